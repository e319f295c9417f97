#include "qtherm/homodyne.hpp"

#include <cmath>

namespace qtherm {

double measurement_rate(double chi, double kappa, double nbar) {
    if (!(kappa > 0.0)) throw std::domain_error("measurement_rate: kappa must be > 0");
    if (nbar < 0.0) throw std::domain_error("measurement_rate: nbar must be >= 0");
    return 16.0 * chi * chi * nbar / kappa;
}

double derive_chi(double g, double delta) {
    if (delta == 0.0) throw std::domain_error("derive_chi: zero detuning");
    return g * g / delta;
}

MeasurementModel MeasurementModel::make(double chi, double kappa, double nbar, double dt, double cap) {
    MeasurementModel m{chi, kappa, nbar, measurement_rate(chi, kappa, nbar), dt};
    m.validate(cap);
    return m;
}

void MeasurementModel::validate(double cap) const {
    if (!(dt > 0.0)) throw std::invalid_argument("MeasurementModel: dt must be > 0");
    const double expected = 16.0 * chi * chi * nbar / kappa;
    if (std::abs(gamma_d - expected) > 1e-12 * std::max(1.0, std::abs(expected)))
        throw std::invalid_argument("MeasurementModel: gamma_d inconsistent with 16 chi^2 nbar / kappa");
    if (gamma_d * dt > cap)
        throw std::invalid_argument("MeasurementModel: dt * gamma_d exceeds the weak-measurement cap");
}

namespace {
constexpr double kLogTwoPi = 1.8378770664093454835606594728112;
inline double sj(int j) { return j == 0 ? 1.0 : -1.0; }
}  // namespace

double log_pj_density(const MeasurementModel& m, int j, double x) {
    const double mu = sj(j) * std::sqrt(m.gamma_d);
    const double d = x - mu;
    return 0.5 * (std::log(m.dt) - kLogTwoPi) - 0.5 * m.dt * d * d;
}

double pj_density(const MeasurementModel& m, int j, double x) {
    return std::exp(log_pj_density(m, j, x));
}

double outcome_density(const MeasurementModel& m, const DensityMatrix& rho, double x) {
    return rho.p00() * pj_density(m, 0, x) + rho.p11() * pj_density(m, 1, x);
}

CurrentSample sample_current(const MeasurementModel& m, const DensityMatrix& rho, PhiloxRng& rng) {
    const int j = rng.next_double() <= rho.p00() ? 0 : 1;
    const double sigma = 1.0 / std::sqrt(m.dt);
    return {sj(j) * std::sqrt(m.gamma_d) + sigma * rng.next_normal()};
}

Operator2 povm_element(const MeasurementModel& m, double x) {
    return Operator2::diag(std::exp(0.5 * log_pj_density(m, 0, x)),
                           std::exp(0.5 * log_pj_density(m, 1, x)));
}

MeasurementUpdate measurement_update(const DensityMatrix& rho, const MeasurementModel& m, double x) {
    const double p0 = pj_density(m, 0, x);
    const double p1 = pj_density(m, 1, x);
    const double w = rho.p00() * p0 + rho.p11() * p1;
    if (!(w > 0.0))
        throw std::runtime_error("measurement_update: zero-probability outcome (numerical underflow)");
    DensityMatrix out;
    out.m = Operator2{rho.m.a00 * p0, rho.m.a01 * std::sqrt(p0 * p1),
                      rho.m.a10 * std::sqrt(p0 * p1), rho.m.a11 * p1} * (1.0 / w);
    return {out, std::log(w)};
}

PureMeasurementUpdate measurement_update(const PureState& psi, const MeasurementModel& m, double x) {
    PureState out = apply(povm_element(m, x), psi);
    const double w = out.norm2();
    if (!(w > 0.0))
        throw std::runtime_error("measurement_update: zero-probability outcome (numerical underflow)");
    out.normalize();
    return {out, std::log(w)};
}

}  // namespace qtherm
