#include <doctest.h>

#include <cmath>

#include "qtherm/protocol.hpp"
#include "qtherm/qstate.hpp"
#include "qtherm/rng.hpp"

using namespace qtherm;

namespace {

Operator2 random_hermitian(PhiloxRng& rng) {
    const double a = 4.0 * (rng.next_double() - 0.5);
    const double d = 4.0 * (rng.next_double() - 0.5);
    const cplx off(2.0 * (rng.next_double() - 0.5), 2.0 * (rng.next_double() - 0.5));
    return {a, off, std::conj(off), d};
}

PureState random_state(PhiloxRng& rng) {
    PureState v{cplx(rng.next_normal(), rng.next_normal()), cplx(rng.next_normal(), rng.next_normal())};
    v.normalize();
    return v;
}

double norm_of(const Operator2& m) { return m.frobenius_norm(); }

}  // namespace

TEST_CASE("gibbs state at beta = 0 is maximally mixed") {
    const Operator2 h = Operator2::sigma_z() * 3.7 + Operator2::sigma_x() * 1.2;
    const DensityMatrix rho = gibbs_state(h, 0.0);
    CHECK(rho.p00() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(rho.coherence()) < 1e-14);
}

TEST_CASE("gibbs populations match the two-level closed form") {
    const double omega0 = mhz_to_angular(4000.0);
    const Operator2 h = Operator2::sigma_z() * (0.5 * omega0);
    // p_excited = e^{-b/2} / (e^{b/2} + e^{-b/2}) for beta = b/omega0
    const DensityMatrix r1 = gibbs_state(h, 1.0 / omega0);
    CHECK(r1.p00() == doctest::Approx(1.0 / (1.0 + std::exp(1.0))).epsilon(1e-12));
    CHECK(r1.p00() == doctest::Approx(0.26894).epsilon(1e-4));
    const DensityMatrix r2 = gibbs_state(h, 2.0 / omega0);
    CHECK(r2.p00() == doctest::Approx(1.0 / (1.0 + std::exp(2.0))).epsilon(1e-12));
    CHECK(r2.p00() == doctest::Approx(0.11920).epsilon(1e-4));
}

TEST_CASE("gibbs state rejects non-Hermitian input and commutes with H") {
    Operator2 bad = Operator2::sigma_z();
    bad.a01 = 0.3;
    CHECK_THROWS_AS(gibbs_state(bad, 1.0), std::invalid_argument);

    PhiloxRng rng(7, 0);
    for (int i = 0; i < 50; ++i) {
        const Operator2 h = random_hermitian(rng);
        const DensityMatrix rho = gibbs_state(h, 0.7);
        rho.validate();
        const Operator2 comm = rho.m * h - h * rho.m;
        CHECK(norm_of(comm) <= 1e-10 * norm_of(h) + 1e-13);
        double log_z = 0.0;
        gibbs_state(h, 0.7, &log_z);
        const Eigensystem es = eigensystem(h);
        CHECK(log_z == doctest::Approx(std::log(std::exp(-0.7 * es.eps_minus) +
                                                std::exp(-0.7 * es.eps_plus)))
                           .epsilon(1e-12));
    }
}

TEST_CASE("eigensystem of the Pauli matrices") {
    const Eigensystem ez = eigensystem(Operator2::sigma_z());
    CHECK(ez.eps_minus == doctest::Approx(-1.0));
    CHECK(ez.eps_plus == doctest::Approx(1.0));
    CHECK(std::abs(ez.v_plus.c0 - 1.0) < 1e-14);
    CHECK(std::abs(ez.v_minus.c1 - 1.0) < 1e-14);

    const Eigensystem ex = eigensystem(Operator2::sigma_x());
    CHECK(ex.eps_minus == doctest::Approx(-1.0));
    CHECK(ex.eps_plus == doctest::Approx(1.0));
    CHECK(std::abs(ex.v_plus.c0 - std::sqrt(0.5)) < 1e-14);
    CHECK(std::abs(ex.v_plus.c1 - std::sqrt(0.5)) < 1e-14);
    CHECK(std::abs(ex.v_minus.c0 - std::sqrt(0.5)) < 1e-14);
    CHECK(std::abs(ex.v_minus.c1 + std::sqrt(0.5)) < 1e-14);
}

TEST_CASE("eigensystem of the post-quench transmon Hamiltonian") {
    // (omega0 + dW)/2 sigma_z + W0 sigma_x with omega0/2pi = 4000 MHz,
    // dW/2pi = 400 MHz, W0/2pi = 1 MHz: eps = +-2pi sqrt(2200^2 + 1) MHz.
    const Operator2 h = Operator2::sigma_z() * (0.5 * mhz_to_angular(4400.0)) +
                        Operator2::sigma_x() * mhz_to_angular(1.0);
    const Eigensystem es = eigensystem(h);
    const double expected = mhz_to_angular(std::sqrt(2200.0 * 2200.0 + 1.0));
    CHECK(es.eps_plus == doctest::Approx(expected).epsilon(1e-13));
    CHECK(es.eps_minus == doctest::Approx(-expected).epsilon(1e-13));
    CHECK(angular_to_mhz(es.eps_plus) == doctest::Approx(2200.0002272727).epsilon(1e-9));
}

TEST_CASE("eigensystem residual, orthogonality and reconstruction (random)") {
    PhiloxRng rng(11, 0);
    for (int i = 0; i < 100; ++i) {
        const Operator2 h = random_hermitian(rng);
        const Eigensystem es = eigensystem(h);
        CHECK(es.eps_minus <= es.eps_plus);
        for (int k = 0; k < 2; ++k) {
            const PureState hv = apply(h, es.vec(k));
            const cplx r0 = hv.c0 - es.eps(k) * es.vec(k).c0;
            const cplx r1 = hv.c1 - es.eps(k) * es.vec(k).c1;
            CHECK(std::sqrt(std::norm(r0) + std::norm(r1)) <= 1e-10 * norm_of(h) + 1e-13);
        }
        CHECK(std::abs(es.v_minus.inner(es.v_plus)) < 1e-10);
        const Operator2 rebuilt = DensityMatrix::from_pure(es.v_minus).m * es.eps_minus +
                                  DensityMatrix::from_pure(es.v_plus).m * es.eps_plus;
        CHECK(norm_of(rebuilt - h) <= 1e-10 * norm_of(h) + 1e-13);
    }
}

TEST_CASE("unitary step: identity, Rabi flip, phase rotation") {
    const PureState up = PureState::basis0();
    const PureState still = unitary_step(up, Operator2::zero(), 0.3);
    CHECK(std::abs(still.c0 - 1.0) < 1e-14);

    const double omega = 2.0;
    const PureState flipped = unitary_step(up, Operator2::sigma_x() * omega, M_PI / (2.0 * omega));
    CHECK(std::norm(flipped.c1) == doctest::Approx(1.0).epsilon(1e-12));

    PureState plus{std::sqrt(0.5), std::sqrt(0.5)};
    const double w = 1.7, dt = 0.4;
    const PureState rotated = unitary_step(plus, Operator2::sigma_z() * (0.5 * w), dt);
    const DensityMatrix rho = DensityMatrix::from_pure(rotated);
    CHECK(rho.p00() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rho.coherence() == cplx(0.5 * std::cos(w * dt), 0.5 * std::sin(w * dt) * -1.0) * 1.0);
    CHECK(std::abs(rho.coherence() - 0.5 * std::polar(1.0, -w * dt)) < 1e-12);
}

TEST_CASE("unitary step composes and preserves invariants") {
    PhiloxRng rng(23, 0);
    for (int i = 0; i < 50; ++i) {
        const Operator2 h = random_hermitian(rng);
        const double a = rng.next_double(), b = rng.next_double();
        const PureState v = random_state(rng);
        const PureState two = unitary_step(unitary_step(v, h, a), h, b);
        const PureState one = unitary_step(v, h, a + b);
        CHECK(std::abs(two.c0 - one.c0) < 1e-10);
        CHECK(std::abs(two.c1 - one.c1) < 1e-10);
        CHECK(two.norm2() == doctest::Approx(1.0).epsilon(1e-12));
        const DensityMatrix rho = unitary_step(DensityMatrix::from_pure(v), h, a);
        rho.validate();
        CHECK(rho.m.det().real() == doctest::Approx(0.0).epsilon(1e-12));  // purity
    }
}

TEST_CASE("expectation values") {
    CHECK(expectation(DensityMatrix::maximally_mixed(), Operator2::sigma_z()) == doctest::Approx(0.0));
    CHECK(expectation(DensityMatrix::from_pure(PureState::basis0()), Operator2::sigma_z()) ==
          doctest::Approx(1.0));
    // Bloch vector (x, y, z) -> <sigma_x> = x
    const double x = 0.3, y = -0.2, z = 0.4;
    DensityMatrix rho;
    rho.m = (Operator2::identity() + Operator2::sigma_x() * x + Operator2::sigma_y() * y +
             Operator2::sigma_z() * z) * 0.5;
    CHECK(expectation(rho, Operator2::sigma_x()) == doctest::Approx(x).epsilon(1e-13));
    CHECK(expectation(rho, Operator2::sigma_y()) == doctest::Approx(y).epsilon(1e-13));
    CHECK(expectation(rho, Operator2::sigma_z()) == doctest::Approx(z).epsilon(1e-13));
}

TEST_CASE("time reversal is conjugation and involutive") {
    const PureState v{std::sqrt(0.5), cplx(0.0, std::sqrt(0.5))};
    const PureState rev = time_reverse(v);
    CHECK(std::abs(rev.c1 - cplx(0.0, -std::sqrt(0.5))) < 1e-15);

    const Operator2 m = Operator2::diag(0.2, 1.4);
    const Operator2 mrev = time_reverse(m);
    CHECK(norm_of(mrev - m) < 1e-15);  // real diagonal measurement operators are Theta-invariant

    PhiloxRng rng(5, 0);
    for (int i = 0; i < 20; ++i) {
        const PureState w = random_state(rng);
        const PureState back = time_reverse(time_reverse(w));
        CHECK(std::abs(back.c0 - w.c0) < 1e-15);
        CHECK(std::abs(back.c1 - w.c1) < 1e-15);
    }
}

TEST_CASE("trace distance closed form") {
    const DensityMatrix a = DensityMatrix::from_pure(PureState::basis0());
    const DensityMatrix b = DensityMatrix::from_pure(PureState::basis1());
    CHECK(trace_distance(a, b) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(trace_distance(a, a) == doctest::Approx(0.0));
}
