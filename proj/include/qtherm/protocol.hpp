#pragma once

#include "qtherm/qstate.hpp"

// Quench force protocol: qubit frequency and Rabi amplitude both stepped at
// t_q. The drive phase is absorbed by a sigma_z-axis gauge choice, so the
// post-quench Hamiltonian is (omega0 + delta_omega) sigma_z / 2 + omega_rabi sigma_x.

namespace qtherm {

constexpr double kTwoPi = 6.283185307179586476925286766559;

inline double mhz_to_angular(double f_mhz) { return kTwoPi * f_mhz; }
inline double angular_to_mhz(double w) { return w / kTwoPi; }

enum class Direction { Forward, Backward };

struct ProtocolParams {
    double omega0 = 0.0;        // rad/us
    double delta_omega = 0.0;   // rad/us
    double omega_rabi = 0.0;    // rad/us (RWA amplitude Omega_0)
    double tau = 0.0;           // us
    double quench_time = 0.0;   // us, 0 < t_q < tau
    int parity = +1;            // time-reversal parity, +1 for this family

    void validate() const;
    Operator2 h_before() const { return Operator2::sigma_z() * (0.5 * omega0); }
    Operator2 h_after() const {
        return Operator2::sigma_z() * (0.5 * (omega0 + delta_omega)) + Operator2::sigma_x() * omega_rabi;
    }
};

// H_S(lambda_t); Backward evaluates the reversed protocol lambda_{tau-t}.
Operator2 hamiltonian_at(const ProtocolParams& p, double t, Direction dir = Direction::Forward);

// F(lambda_t) = -(1/beta) log Z_t.
double free_energy(const ProtocolParams& p, double t, double beta);

// Delta F(t) = F(lambda_t) - F(lambda_0).
double free_energy_change(const ProtocolParams& p, double t, double beta);

}  // namespace qtherm
