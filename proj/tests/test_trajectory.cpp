#include <doctest.h>

#include <cmath>
#include <vector>

#include "qtherm/trajectory.hpp"

using namespace qtherm;

namespace {

// Transmon-style parameters, shortened protocol to keep the tests fast.
ProtocolParams short_protocol() {
    ProtocolParams p;
    p.omega0 = mhz_to_angular(4000.0);
    p.delta_omega = mhz_to_angular(400.0);
    p.omega_rabi = mhz_to_angular(1.0);
    p.tau = 0.2;
    p.quench_time = 0.1;
    return p;
}

MeasurementModel model_for(double dt) {
    return MeasurementModel::make(mhz_to_angular(-0.5), mhz_to_angular(10.0), 0.4, dt);
}

TrajectoryConfig cfg_for(double dt, std::uint64_t stream, bool full = false) {
    TrajectoryConfig c;
    c.dt = dt;
    c.master_seed = 424242;
    c.stream_id = stream;
    c.record_stride = 10;
    c.store_full_record = full;
    return c;
}

}  // namespace

TEST_CASE("config validation") {
    TrajectoryConfig c = cfg_for(1e-3, 0);
    CHECK_NOTHROW(c.validate());
    c.dt = 0.0;
    CHECK_THROWS(c.validate());
    c = cfg_for(1e-3, 0);
    c.gamma1 = -1.0;
    CHECK_THROWS(c.validate());
    c = cfg_for(1e-3, 0);
    c.record_stride = 0;
    CHECK_THROWS(c.validate());
}

TEST_CASE("bloch vector round trip and clamping") {
    DensityMatrix rho;
    rho.m = Operator2{0.3, cplx(0.2, -0.1), cplx(0.2, 0.1), 0.7};
    const BlochVector b = BlochVector::from_density(rho);
    CHECK(trace_distance(b.to_density(), rho) < 1e-15);
    CHECK(b.sz() == doctest::Approx(-0.4));

    BlochVector bad{1.2, 0.0, 0.0};
    CHECK(bad.clamp());
    CHECK(bad.p0 == 1.0);
    BlochVector edge{0.9, 0.4, 0.0};  // |c|^2 > p0(1-p0)
    CHECK(edge.clamp());
    CHECK(edge.re_c * edge.re_c <= edge.p0 * (1.0 - edge.p0) + 1e-15);
    BlochVector fine{0.5, 0.3, 0.2};
    CHECK(!fine.clamp());
}

TEST_CASE("initial eigenstate sampling follows the Gibbs weights") {
    const ProtocolParams p = short_protocol();
    const double beta = 1.0 / p.omega0;  // ground weight 1/(1+e^{-1})
    PhiloxRng rng(314, 0);
    const int draws = 40000;
    int ground = 0;
    for (int i = 0; i < draws; ++i) {
        const InitialSample s = sample_initial_eigenstate(p, beta, rng);
        if (s.n == 0) {
            ++ground;
            CHECK(std::abs(s.state.c1 - 1.0) < 1e-14);  // |1> has sigma_z = -1: lower level
            CHECK(s.log_prob == doctest::Approx(std::log(1.0 / (1.0 + std::exp(-1.0)))).epsilon(1e-12));
        } else {
            CHECK(std::abs(s.state.c0 - 1.0) < 1e-14);
        }
    }
    const double p_ground = 1.0 / (1.0 + std::exp(-1.0));
    const double se = std::sqrt(p_ground * (1.0 - p_ground) / draws);
    CHECK(std::abs(static_cast<double>(ground) / draws - p_ground) < 4.0 * se);
}

TEST_CASE("sme step with no measurement reduces to Euler unitary dynamics") {
    const Operator2 h = Operator2::sigma_z() * 1.3 + Operator2::sigma_x() * 0.7;
    DensityMatrix rho;
    rho.m = Operator2{0.6, cplx(0.2, 0.1), cplx(0.2, -0.1), 0.4};
    double d_prev = 0.0;
    for (int k = 0; k < 2; ++k) {
        const double dt = k == 0 ? 1e-3 : 5e-4;
        const BlochVector out = step_sme(BlochVector::from_density(rho), h, 0.0, 0.0, dt);
        const DensityMatrix exact = unitary_step(rho, h, dt);
        const double d = trace_distance(out.to_density(), exact);
        if (k == 0) d_prev = d;
        else CHECK(d_prev / d > 3.5);  // local error is O(dt^2)
    }
}

TEST_CASE("lindblad step: exact decay recursion, trace preservation") {
    const double gamma1 = 2.0, dt = 1e-4;
    const int n_steps = 1000;
    PureState plus{std::sqrt(0.5), std::sqrt(0.5)};
    DensityMatrix rho = DensityMatrix::from_pure(plus);
    for (int i = 0; i < n_steps; ++i) rho = lindblad_step(rho, Operator2::zero(), gamma1, dt);
    CHECK(rho.m.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
    // Euler recursion is exact per step: p00 *= (1 - g dt), c *= (1 - g dt / 2)
    const double p_want = 0.5 * std::pow(1.0 - gamma1 * dt, n_steps);
    const double c_want = 0.5 * std::pow(1.0 - 0.5 * gamma1 * dt, n_steps);
    CHECK(rho.p00() == doctest::Approx(p_want).epsilon(1e-12));
    CHECK(rho.coherence().real() == doctest::Approx(c_want).epsilon(1e-12));
    // and converges to the exponential at first order
    CHECK(rho.p00() == doctest::Approx(0.5 * std::exp(-gamma1 * dt * n_steps)).epsilon(2e-4));
    CHECK_THROWS(lindblad_step(rho, Operator2::zero(), -1.0, dt));
}

TEST_CASE("final projection on an energy eigenstate is deterministic with zero heat") {
    const ProtocolParams p = short_protocol();
    const Eigensystem es = eigensystem(p.h_after());
    PhiloxRng rng(1, 0);
    for (int k = 0; k < 2; ++k) {
        const FinalProjection f = final_projection(es.vec(k), p.h_after(), rng);
        CHECK(f.m == k);
        CHECK(std::abs(f.heat) < 1e-9 * p.omega0);
        CHECK(std::abs(f.log_prob) < 1e-12);
    }
}

TEST_CASE("final projection heat moves the ledger onto the measured level") {
    const ProtocolParams p = short_protocol();
    const Eigensystem es = eigensystem(p.h_after());
    PureState mix{0.8, 0.6};  // superposition in the energy basis
    PhiloxRng rng(7, 3);
    const double u_before = expectation(DensityMatrix::from_pure(mix), p.h_after());
    for (int i = 0; i < 20; ++i) {
        const FinalProjection f = final_projection(mix, p.h_after(), rng);
        CHECK(u_before + f.heat == doctest::Approx(es.eps(f.m)).epsilon(1e-12));
    }
}

TEST_CASE("first law holds along every recorded point and at the endpoint") {
    const ProtocolParams p = short_protocol();
    const double beta = 1.0 / p.omega0;
    const double dt = 1e-3;
    for (std::uint64_t s = 0; s < 5; ++s) {
        const TrajectoryRecord rec = run_forward(p, model_for(dt), cfg_for(dt, s), beta);
        REQUIRE(rec.times.size() == rec.u_series.size());
        for (std::size_t k = 0; k < rec.times.size(); ++k) {
            CHECK(std::abs(rec.u_series[k] - rec.eps_n - rec.w_series[k] - rec.q_series[k]) <
                  1e-9 * p.omega0);
        }
        CHECK(std::abs(rec.work_total + rec.heat_total - rec.delta_u()) < 1e-9 * p.omega0);
        CHECK(rec.sigma_final ==
              doctest::Approx(beta * (rec.work_total + rec.heat_total - rec.delta_f_tau)).epsilon(1e-12));
        CHECK(rec.times.front() == 0.0);
        CHECK(rec.times.back() == doctest::Approx(p.tau));
        CHECK(rec.clamp_warnings == 0);
    }
}

TEST_CASE("work is booked at the quench from the state at the switch time") {
    const ProtocolParams p = short_protocol();
    const double beta = 1.0 / p.omega0;
    const double dt = 1e-3;
    const MeasurementModel m = model_for(dt);
    const TrajectoryRecord rec = run_forward(p, m, cfg_for(dt, 11, true), beta);
    const long iq = std::lround(p.quench_time / dt);
    REQUIRE(static_cast<long>(rec.full_currents.size()) == std::lround(p.tau / dt));

    // Independent replay of the pre-quench segment.
    const Eigensystem es0 = eigensystem(p.h_before());
    DensityMatrix rho = DensityMatrix::from_pure(es0.vec(rec.n));
    for (long i = 0; i < iq; ++i) {
        rho = unitary_step(rho, p.h_before(), dt);
        rho = measurement_update(rho, m, rec.full_currents[i]).rho;
    }
    const double w_oracle = expectation(rho, p.h_after() - p.h_before());
    CHECK(std::abs(rec.work_total - w_oracle) < 1e-9 * std::abs(w_oracle));

    // Work series jumps once, at the switch, and is flat elsewhere.
    for (std::size_t k = 1; k < rec.w_series.size(); ++k) {
        // the switch-step work lands on the first record point past t_q
        const bool crosses_quench =
            rec.times[k - 1] <= p.quench_time + 1e-12 && rec.times[k] > p.quench_time + 1e-12;
        if (!crosses_quench)
            CHECK(rec.w_series[k] == doctest::Approx(rec.w_series[k - 1]).epsilon(1e-14));
    }
}

TEST_CASE("forward log-probability decomposes into its factors") {
    const ProtocolParams p = short_protocol();
    const double beta = 1.0 / p.omega0;
    const double dt = 1e-3;
    const MeasurementModel m = model_for(dt);
    const TrajectoryRecord rec = run_forward(p, m, cfg_for(dt, 3, true), beta);
    REQUIRE(rec.has_path_probabilities());
    REQUIRE(rec.full_log_weights.size() == rec.full_currents.size());

    const Eigensystem es0 = eigensystem(p.h_before());
    const double gap = es0.eps_plus - es0.eps_minus;
    const double log_pn = (rec.n == 0 ? 0.0 : -beta * gap) - std::log(1.0 + std::exp(-beta * gap));

    DensityMatrix rho = DensityMatrix::from_pure(es0.vec(rec.n));
    const DensityMatrix replay = evolve_on_record(p, m, Integrator::PovmUpdate, rho,
                                                  rec.full_currents, dt);
    CHECK(std::abs(expectation(replay, p.h_after()) - rec.u_series.back()) < 1e-8 * p.omega0);

    const Eigensystem es_tau = eigensystem(p.h_after());
    const double born = expectation(replay, DensityMatrix::from_pure(es_tau.vec(rec.m)).m);
    double sum = 0.0;
    for (double w : rec.full_log_weights) sum += w;
    CHECK(rec.log_pf == doctest::Approx(log_pn + sum + std::log(born)).epsilon(1e-10));
}

TEST_CASE("detailed fluctuation theorem holds trajectory by trajectory") {
    const ProtocolParams p = short_protocol();
    const double dt = 1e-3;
    const MeasurementModel m = model_for(dt);
    for (double beta_scale : {1.0, 2.0}) {
        const double beta = beta_scale / p.omega0;
        for (std::uint64_t s = 0; s < 25; ++s) {
            TrajectoryConfig c = cfg_for(dt, s, true);
            c.master_seed = 777 + static_cast<std::uint64_t>(10.0 * beta_scale);
            const TrajectoryRecord rec = run_forward(p, m, c, beta);
            const double log_pb = backward_log_probability(rec, p, m, beta);
            const double lhs = rec.log_pf - log_pb;
            const double rhs = beta * (rec.delta_u() - rec.delta_f_tau);
            CHECK(std::abs(lhs - rhs) < 1e-9);
        }
    }
}

TEST_CASE("backward probability rejects dissipative or truncated records") {
    const ProtocolParams p = short_protocol();
    const double dt = 1e-3;
    const MeasurementModel m = model_for(dt);
    TrajectoryRecord rec = run_forward(p, m, cfg_for(dt, 0, true), 1.0 / p.omega0);
    rec.full_currents.pop_back();
    CHECK_THROWS(backward_log_probability(rec, p, m, 1.0 / p.omega0));
    TrajectoryRecord rec2 = run_forward(p, m, cfg_for(dt, 0, true), 1.0 / p.omega0);
    rec2.gamma1 = 0.01;
    CHECK_THROWS(backward_log_probability(rec2, p, m, 1.0 / p.omega0));
}

TEST_CASE("dissipation disables path probabilities but keeps the ledger exact") {
    ProtocolParams p = short_protocol();
    const double beta = 1.0 / p.omega0;
    const double dt = 1e-3;
    TrajectoryConfig c = cfg_for(dt, 2);
    c.gamma1 = 0.05 * mhz_to_angular(10.0);  // gamma1/kappa = 0.05
    const TrajectoryRecord rec = run_forward(p, model_for(dt), c, beta);
    CHECK(!rec.has_path_probabilities());
    CHECK(std::isnan(rec.log_pf));
    CHECK(std::abs(rec.work_total + rec.heat_total - rec.delta_u()) < 1e-9 * p.omega0);
}

TEST_CASE("identical seeds and streams reproduce trajectories bitwise") {
    const ProtocolParams p = short_protocol();
    const double dt = 1e-3;
    const TrajectoryRecord a = run_forward(p, model_for(dt), cfg_for(dt, 9, true), 1.0 / p.omega0);
    const TrajectoryRecord b = run_forward(p, model_for(dt), cfg_for(dt, 9, true), 1.0 / p.omega0);
    CHECK(a.log_pf == b.log_pf);
    CHECK(a.sigma_final == b.sigma_final);
    REQUIRE(a.full_currents.size() == b.full_currents.size());
    for (std::size_t i = 0; i < a.full_currents.size(); ++i)
        CHECK(a.full_currents[i] == b.full_currents[i]);
    const TrajectoryRecord other = run_forward(p, model_for(dt), cfg_for(dt, 10, true), 1.0 / p.omega0);
    CHECK(other.full_currents[0] != a.full_currents[0]);
}

TEST_CASE("povm and sme integrators converge on a shared measurement record") {
    // The comparison uses a weak-measurement / moderate-drive regime where the
    // deterministic first-order truncation error of the explicit Euler scheme
    // dominates the mean-zero noise-expansion residual, so the gap between the
    // integrators contracts linearly in dt. The coarse-step current is the
    // block mean of the fine record, preserving the per-step statistics.
    ProtocolParams p;
    p.omega0 = mhz_to_angular(3.0);
    p.delta_omega = mhz_to_angular(1.0);
    p.omega_rabi = mhz_to_angular(1.0);
    p.tau = 0.512;
    p.quench_time = 0.256;
    const double dt_fine = 2.5e-4;
    const MeasurementModel m_fine =
        MeasurementModel::make(mhz_to_angular(-0.5), mhz_to_angular(10.0), 0.01, dt_fine);

    PhiloxRng rng(2024, 0);
    const long n_fine = std::lround(p.tau / dt_fine);
    std::vector<double> fine(n_fine);
    DensityMatrix rho0;
    rho0.m = Operator2{0.7, cplx(0.25, 0.1), cplx(0.25, -0.1), 0.3};
    {
        DensityMatrix rho = rho0;
        for (long i = 0; i < n_fine; ++i) {
            const Operator2 h = i * dt_fine < p.quench_time ? p.h_before() : p.h_after();
            rho = unitary_step(rho, h, dt_fine);
            fine[i] = sample_current(m_fine, rho, rng).x;
            rho = measurement_update(rho, m_fine, fine[i]).rho;
        }
    }

    std::vector<double> dists;
    for (int factor : {4, 2, 1}) {
        const double dt = dt_fine * factor;
        std::vector<double> coarse(n_fine / factor);
        for (std::size_t k = 0; k < coarse.size(); ++k) {
            double s = 0.0;
            for (int j = 0; j < factor; ++j) s += fine[k * factor + j];
            coarse[k] = s / factor;
        }
        const MeasurementModel m =
            MeasurementModel::make(mhz_to_angular(-0.5), mhz_to_angular(10.0), 0.01, dt);
        const DensityMatrix a = evolve_on_record(p, m, Integrator::PovmUpdate, rho0, coarse, dt);
        const DensityMatrix b = evolve_on_record(p, m, Integrator::BlochSme, rho0, coarse, dt);
        dists.push_back(trace_distance(a, b));
    }
    CHECK(dists[0] / dists[1] > 1.8);
    CHECK(dists[1] / dists[2] > 1.8);
    CHECK(0.5 * std::log2(dists[0] / dists[2]) > 0.9);
}

TEST_CASE("record stride decimates but keeps both endpoints") {
    const ProtocolParams p = short_protocol();
    const double dt = 1e-3;
    TrajectoryConfig c = cfg_for(dt, 4);
    c.record_stride = 7;  // does not divide 200
    const TrajectoryRecord rec = run_forward(p, model_for(dt), c, 1.0 / p.omega0);
    CHECK(rec.times.front() == 0.0);
    CHECK(rec.times.back() == doctest::Approx(p.tau));
    CHECK(rec.times.size() == 2 + 200 / 7);
}
