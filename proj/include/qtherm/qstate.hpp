#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>

// Exact 2x2 complex algebra and qubit-state primitives.
// Units: hbar = k_B = 1, time in microseconds, frequencies angular (rad/us).

namespace qtherm {

using cplx = std::complex<double>;

constexpr double kHermitianTol = 1e-12;
constexpr double kTraceTol = 1e-10;
constexpr double kPsdTol = 1e-10;

// 2x2 complex matrix, row-major: a00 a01 / a10 a11.
struct Operator2 {
    cplx a00{0.0}, a01{0.0}, a10{0.0}, a11{0.0};

    static Operator2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Operator2 zero() { return {}; }
    static Operator2 sigma_x() { return {0.0, 1.0, 1.0, 0.0}; }
    static Operator2 sigma_y() { return {0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0}; }
    static Operator2 sigma_z() { return {1.0, 0.0, 0.0, -1.0}; }
    static Operator2 sigma_minus() { return {0.0, 0.0, 1.0, 0.0}; }  // |1><0|, lowers s_j
    static Operator2 sigma_plus() { return {0.0, 1.0, 0.0, 0.0}; }
    static Operator2 diag(double d0, double d1) { return {d0, 0.0, 0.0, d1}; }

    cplx trace() const { return a00 + a11; }
    cplx det() const { return a00 * a11 - a01 * a10; }
    Operator2 adjoint() const { return {std::conj(a00), std::conj(a10), std::conj(a01), std::conj(a11)}; }
    Operator2 conjugate() const { return {std::conj(a00), std::conj(a01), std::conj(a10), std::conj(a11)}; }

    bool is_hermitian(double tol = kHermitianTol) const;
    double frobenius_norm() const;

    Operator2 operator+(const Operator2& o) const { return {a00 + o.a00, a01 + o.a01, a10 + o.a10, a11 + o.a11}; }
    Operator2 operator-(const Operator2& o) const { return {a00 - o.a00, a01 - o.a01, a10 - o.a10, a11 - o.a11}; }
    Operator2 operator*(const Operator2& o) const {
        return {a00 * o.a00 + a01 * o.a10, a00 * o.a01 + a01 * o.a11,
                a10 * o.a00 + a11 * o.a10, a10 * o.a01 + a11 * o.a11};
    }
    Operator2 operator*(cplx s) const { return {a00 * s, a01 * s, a10 * s, a11 * s}; }
    Operator2 operator*(double s) const { return {a00 * s, a01 * s, a10 * s, a11 * s}; }
};

inline Operator2 operator*(double s, const Operator2& m) { return m * s; }

// Normalized two-component amplitude vector in the sigma_z basis.
struct PureState {
    cplx c0{1.0}, c1{0.0};

    static PureState basis0() { return {1.0, 0.0}; }
    static PureState basis1() { return {0.0, 1.0}; }

    double norm2() const { return std::norm(c0) + std::norm(c1); }
    void normalize();
    PureState conjugate() const { return {std::conj(c0), std::conj(c1)}; }
    cplx inner(const PureState& o) const { return std::conj(c0) * o.c0 + std::conj(c1) * o.c1; }
};

PureState apply(const Operator2& m, const PureState& v);

// Hermitian, unit-trace, PSD 2x2 matrix.
struct DensityMatrix {
    Operator2 m = Operator2::diag(1.0, 0.0);

    static DensityMatrix from_pure(const PureState& v);
    static DensityMatrix maximally_mixed() { return {Operator2::diag(0.5, 0.5)}; }

    double p00() const { return m.a00.real(); }
    double p11() const { return m.a11.real(); }
    cplx coherence() const { return m.a01; }

    // Throws std::runtime_error when trace/Hermiticity/PSD invariants fail.
    void validate(double trace_tol = kTraceTol) const;
};

struct Eigensystem {
    double eps_minus = 0.0;   // rad/us, eps_minus <= eps_plus
    double eps_plus = 0.0;
    PureState v_minus;        // deterministic phase: first nonzero amplitude real positive
    PureState v_plus;

    double eps(int k) const { return k == 0 ? eps_minus : eps_plus; }
    const PureState& vec(int k) const { return k == 0 ? v_minus : v_plus; }
};

// Closed-form eigendecomposition of a Hermitian 2x2 matrix.
Eigensystem eigensystem(const Operator2& h);

// e^{-beta H}/Z; log_z receives log Tr[e^{-beta H}] when non-null.
DensityMatrix gibbs_state(const Operator2& h, double beta, double* log_z = nullptr);

// Exact exponential e^{-i H dt} via the Pauli closed form.
Operator2 evolution_operator(const Operator2& h, double dt);
DensityMatrix unitary_step(const DensityMatrix& rho, const Operator2& h, double dt);
PureState unitary_step(const PureState& psi, const Operator2& h, double dt);

// Tr[rho A] for Hermitian A.
double expectation(const DensityMatrix& rho, const Operator2& a);

// Theta = K: complex conjugation in the sigma_z basis.
PureState time_reverse(const PureState& v);
Operator2 time_reverse(const Operator2& m);

double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace qtherm
