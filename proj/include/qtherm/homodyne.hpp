#pragma once

#include "qtherm/qstate.hpp"
#include "qtherm/rng.hpp"

// Continuous homodyne monitoring of sigma_z. Sign convention: basis index
// j in {0,1} carries sigma_z eigenvalue s_j = (-1)^j, the per-step current
// distribution for state |j> is Gaussian with mean s_j sqrt(Gamma_d) and
// standard deviation 1/sqrt(dt).

namespace qtherm {

constexpr double kWeakMeasurementCap = 0.05;  // max allowed Gamma_d * dt

// Gamma_d = 16 chi^2 nbar / kappa (all rates angular).
double measurement_rate(double chi, double kappa, double nbar);

// Dispersive coupling chi = g^2 / Delta.
double derive_chi(double g, double delta);

struct MeasurementModel {
    double chi = 0.0;      // rad/us
    double kappa = 0.0;    // rad/us
    double nbar = 0.0;
    double gamma_d = 0.0;  // rad/us, = 16 chi^2 nbar / kappa
    double dt = 0.0;       // us

    static MeasurementModel make(double chi, double kappa, double nbar, double dt,
                                 double cap = kWeakMeasurementCap);
    void validate(double cap = kWeakMeasurementCap) const;
};

struct CurrentSample {
    double x = 0.0;
};

// Gaussian P_j(x), j in {0,1}; integrates to 1 in x.
double pj_density(const MeasurementModel& m, int j, double x);
double log_pj_density(const MeasurementModel& m, int j, double x);

// Born mixture rho00 P0(x) + rho11 P1(x).
double outcome_density(const MeasurementModel& m, const DensityMatrix& rho, double x);

// Draw from the exact Born mixture.
CurrentSample sample_current(const MeasurementModel& m, const DensityMatrix& rho, PhiloxRng& rng);

// M_x = sqrt(P0(x))|0><0| + sqrt(P1(x))|1><1|.
Operator2 povm_element(const MeasurementModel& m, double x);

struct MeasurementUpdate {
    DensityMatrix rho;
    double log_weight;  // log Tr[M_x rho M_x^dag]
};

MeasurementUpdate measurement_update(const DensityMatrix& rho, const MeasurementModel& m, double x);

// Pure-state version: psi -> M_x psi / ||.||, weight ||M_x psi||^2.
struct PureMeasurementUpdate {
    PureState psi;
    double log_weight;
};

PureMeasurementUpdate measurement_update(const PureState& psi, const MeasurementModel& m, double x);

}  // namespace qtherm
