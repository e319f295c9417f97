#include "qtherm/qstate.hpp"

#include <algorithm>
#include <cmath>

namespace qtherm {

bool Operator2::is_hermitian(double tol) const {
    return std::abs(a00.imag()) <= tol && std::abs(a11.imag()) <= tol &&
           std::abs(a01 - std::conj(a10)) <= tol;
}

double Operator2::frobenius_norm() const {
    return std::sqrt(std::norm(a00) + std::norm(a01) + std::norm(a10) + std::norm(a11));
}

void PureState::normalize() {
    const double n = std::sqrt(norm2());
    if (n <= 0.0 || !std::isfinite(n)) throw std::runtime_error("PureState: cannot normalize zero/non-finite vector");
    c0 /= n;
    c1 /= n;
}

PureState apply(const Operator2& m, const PureState& v) {
    return {m.a00 * v.c0 + m.a01 * v.c1, m.a10 * v.c0 + m.a11 * v.c1};
}

DensityMatrix DensityMatrix::from_pure(const PureState& v) {
    return {Operator2{v.c0 * std::conj(v.c0), v.c0 * std::conj(v.c1),
                      v.c1 * std::conj(v.c0), v.c1 * std::conj(v.c1)}};
}

void DensityMatrix::validate(double trace_tol) const {
    if (!m.is_hermitian()) throw std::runtime_error("DensityMatrix: not Hermitian");
    if (std::abs(m.trace().real() - 1.0) > trace_tol) throw std::runtime_error("DensityMatrix: trace != 1");
    if (m.a00.real() < -1e-12 || m.a11.real() < -1e-12) throw std::runtime_error("DensityMatrix: negative population");
    if (m.det().real() < -kPsdTol) throw std::runtime_error("DensityMatrix: negative determinant");
}

namespace {

// Pauli decomposition of a Hermitian matrix: H = h0*1 + hx*sx + hy*sy + hz*sz.
struct PauliCoeffs {
    double h0, hx, hy, hz;
};

PauliCoeffs decompose(const Operator2& h) {
    return {0.5 * (h.a00.real() + h.a11.real()),
            0.5 * (h.a01 + h.a10).real(),
            0.5 * (h.a10 - h.a01).imag(),
            0.5 * (h.a00.real() - h.a11.real())};
}

void require_hermitian(const Operator2& h, const char* who) {
    if (!h.is_hermitian()) throw std::invalid_argument(std::string(who) + ": operator is not Hermitian");
}

// Phase convention: first amplitude with magnitude > tol made real positive.
PureState fix_phase(PureState v) {
    v.normalize();
    const cplx lead = std::abs(v.c0) > 1e-14 ? v.c0 : v.c1;
    const cplx phase = std::conj(lead) / std::abs(lead);
    v.c0 *= phase;
    v.c1 *= phase;
    return v;
}

}  // namespace

Eigensystem eigensystem(const Operator2& h) {
    require_hermitian(h, "eigensystem");
    const PauliCoeffs c = decompose(h);
    const double r = std::sqrt(c.hx * c.hx + c.hy * c.hy + c.hz * c.hz);

    Eigensystem es;
    es.eps_minus = c.h0 - r;
    es.eps_plus = c.h0 + r;
    if (r < 1e-300) {  // degenerate: any basis works, pick sigma_z
        es.v_minus = PureState::basis1();
        es.v_plus = PureState::basis0();
        return es;
    }
    // Eigenvector of h.sigma for +r: (cos(t/2), e^{i phi} sin(t/2)) with cos t = hz/r.
    const double ct = c.hz / r;
    const double half_plus = std::sqrt(std::max(0.0, 0.5 * (1.0 + ct)));
    const double half_minus = std::sqrt(std::max(0.0, 0.5 * (1.0 - ct)));
    cplx eip(1.0, 0.0);
    const double rxy = std::hypot(c.hx, c.hy);
    if (rxy > 0.0) eip = cplx(c.hx / rxy, c.hy / rxy);
    es.v_plus = fix_phase({half_plus, eip * half_minus});
    es.v_minus = fix_phase({-std::conj(eip) * half_minus, cplx(half_plus)});
    return es;
}

DensityMatrix gibbs_state(const Operator2& h, double beta, double* log_z) {
    require_hermitian(h, "gibbs_state");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("gibbs_state: beta must be finite and >= 0");

    const Eigensystem es = eigensystem(h);
    // Work relative to eps_minus to avoid overflow.
    const double gap = es.eps_plus - es.eps_minus;
    const double w_minus = 1.0;
    const double w_plus = std::exp(-beta * gap);
    const double z = w_minus + w_plus;
    if (log_z) *log_z = std::log(z) - beta * es.eps_minus;

    const double p_minus = w_minus / z;
    const double p_plus = w_plus / z;
    const DensityMatrix rm = DensityMatrix::from_pure(es.v_minus);
    const DensityMatrix rp = DensityMatrix::from_pure(es.v_plus);
    DensityMatrix out{rm.m * p_minus + rp.m * p_plus};
    out.validate();
    return out;
}

Operator2 evolution_operator(const Operator2& h, double dt) {
    require_hermitian(h, "evolution_operator");
    const PauliCoeffs c = decompose(h);
    const double r = std::sqrt(c.hx * c.hx + c.hy * c.hy + c.hz * c.hz);
    const double theta = r * dt;
    const cplx global = std::polar(1.0, -c.h0 * dt);
    if (r * dt == 0.0 || r < 1e-300) return Operator2::identity() * global;

    const double cth = std::cos(theta);
    const double sth = std::sin(theta);
    const double nx = c.hx / r, ny = c.hy / r, nz = c.hz / r;
    // e^{-i theta n.sigma} = cos(theta) 1 - i sin(theta) n.sigma
    Operator2 u{cplx(cth, -sth * nz), cplx(-sth * ny, -sth * nx),
                cplx(sth * ny, -sth * nx), cplx(cth, sth * nz)};
    return u * global;
}

DensityMatrix unitary_step(const DensityMatrix& rho, const Operator2& h, double dt) {
    const Operator2 u = evolution_operator(h, dt);
    return {u * rho.m * u.adjoint()};
}

PureState unitary_step(const PureState& psi, const Operator2& h, double dt) {
    return apply(evolution_operator(h, dt), psi);
}

double expectation(const DensityMatrix& rho, const Operator2& a) {
    if (!a.is_hermitian()) throw std::invalid_argument("expectation: observable is not Hermitian");
    return (rho.m * a).trace().real();
}

PureState time_reverse(const PureState& v) { return v.conjugate(); }
Operator2 time_reverse(const Operator2& m) { return m.conjugate(); }

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    // For 2x2 Hermitian traceless difference D: T = |eigenvalue| = sqrt(-det D).
    const Operator2 d = a.m - b.m;
    const double dz = 0.5 * (d.a00.real() - d.a11.real());
    const double dx = 0.5 * (d.a01 + d.a10).real();
    const double dy = 0.5 * (d.a10 - d.a01).imag();
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace qtherm
