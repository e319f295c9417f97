#include "qtherm/protocol.hpp"

#include <cmath>

namespace qtherm {

void ProtocolParams::validate() const {
    if (!(tau > 0.0)) throw std::invalid_argument("ProtocolParams: tau must be > 0");
    if (!(quench_time > 0.0 && quench_time < tau))
        throw std::invalid_argument("ProtocolParams: quench_time must lie strictly inside (0, tau)");
    if (parity != +1) throw std::invalid_argument("ProtocolParams: only parity +1 protocols are implemented");
}

Operator2 hamiltonian_at(const ProtocolParams& p, double t, Direction dir) {
    if (t < -1e-12 || t > p.tau + 1e-12) throw std::out_of_range("hamiltonian_at: t outside [0, tau]");
    if (dir == Direction::Backward) return hamiltonian_at(p, p.tau - t, Direction::Forward);
    return t < p.quench_time ? p.h_before() : p.h_after();
}

double free_energy(const ProtocolParams& p, double t, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("free_energy: beta must be > 0");
    double log_z = 0.0;
    gibbs_state(hamiltonian_at(p, t), beta, &log_z);
    return -log_z / beta;
}

double free_energy_change(const ProtocolParams& p, double t, double beta) {
    return free_energy(p, t, beta) - free_energy(p, 0.0, beta);
}

}  // namespace qtherm
