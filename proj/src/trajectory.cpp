#include "qtherm/trajectory.hpp"

#include <cmath>
#include <string>

namespace qtherm {

void TrajectoryConfig::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("TrajectoryConfig: dt must be > 0");
    if (gamma1 < 0.0) throw std::invalid_argument("TrajectoryConfig: gamma1 must be >= 0");
    if (record_stride < 1) throw std::invalid_argument("TrajectoryConfig: record_stride must be >= 1");
}

BlochVector BlochVector::from_density(const DensityMatrix& rho) {
    return {rho.p00(), rho.coherence().real(), rho.coherence().imag()};
}

DensityMatrix BlochVector::to_density() const {
    DensityMatrix rho;
    rho.m = Operator2{p0, cplx(re_c, im_c), cplx(re_c, -im_c), 1.0 - p0};
    return rho;
}

bool BlochVector::clamp() {
    bool clamped = false;
    if (p0 < 0.0) { p0 = 0.0; clamped = true; }
    if (p0 > 1.0) { p0 = 1.0; clamped = true; }
    const double c2 = re_c * re_c + im_c * im_c;
    const double max_c2 = p0 * (1.0 - p0);
    if (c2 > max_c2) {
        const double s = c2 > 0.0 ? std::sqrt(max_c2 / c2) : 0.0;
        re_c *= s;
        im_c *= s;
        clamped = true;
    }
    return clamped;
}

namespace {

struct Grid {
    long n_steps;
    long quench_index;  // H switches from h_before to h_after at t = quench_index * dt
};

Grid make_grid(const ProtocolParams& p, double dt) {
    const long n = std::lround(p.tau / dt);
    if (n < 1 || std::abs(n * dt - p.tau) > 1e-9 * p.tau)
        throw std::invalid_argument("trajectory: tau must be an integer multiple of dt");
    long iq = std::lround(p.quench_time / dt);  // snap t_q to the grid
    if (iq < 1) iq = 1;
    if (iq > n - 1) iq = n - 1;
    return {n, iq};
}

int sample_index(double p0, PhiloxRng& rng) { return rng.next_double() <= p0 ? 0 : 1; }

// Neumaier compensated sum; the log path probabilities add O(10^4) terms and
// the detailed-FT identity is checked at 1e-9 absolute.
struct KahanSum {
    double sum = 0.0, comp = 0.0;
    void add(double x) {
        const double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

}  // namespace

InitialSample sample_initial_eigenstate(const ProtocolParams& p, double beta, PhiloxRng& rng) {
    if (!(beta > 0.0)) throw std::invalid_argument("sample_initial_eigenstate: beta must be > 0");
    const Eigensystem es = eigensystem(p.h_before());
    const double w1 = std::exp(-beta * (es.eps_plus - es.eps_minus));
    const double z = 1.0 + w1;
    const int n = sample_index(1.0 / z, rng);
    const double log_prob = (n == 0 ? 0.0 : -beta * (es.eps_plus - es.eps_minus)) - std::log(z);
    return {n, es.vec(n), log_prob};
}

BlochVector step_sme(const BlochVector& b, const Operator2& h, double gamma_d, double current, double dt,
                     long* clamp_count) {
    const double sqrt_g = std::sqrt(gamma_d);
    const double sz = b.sz();
    const double innovation = current - sqrt_g * sz;
    const cplx h01 = h.a01;
    const double dw = h.a00.real() - h.a11.real();  // sigma_z splitting
    const cplx c(b.re_c, b.im_c);

    // d rho00 = -i[H,rho]_00 + 2 sqrt(G) rho00 rho11 (I - sqrt(G)<sz>)
    const double d_p0 = 2.0 * (h01 * std::conj(c)).imag() +
                        2.0 * sqrt_g * b.p0 * (1.0 - b.p0) * innovation;
    // d rho01 = -i dw rho01 + i h01 <sz> - sqrt(G) <sz> (I - sqrt(G)<sz>) rho01 - G/2 rho01
    const cplx d_c = cplx(0.0, -dw) * c + cplx(0.0, 1.0) * h01 * sz -
                     (sqrt_g * sz * innovation + 0.5 * gamma_d) * c;

    BlochVector out{b.p0 + dt * d_p0, b.re_c + dt * d_c.real(), b.im_c + dt * d_c.imag()};
    if (!std::isfinite(out.p0) || !std::isfinite(out.re_c) || !std::isfinite(out.im_c))
        throw std::runtime_error("step_sme: NaN/Inf in SME update");
    if (out.clamp() && clamp_count) ++*clamp_count;
    return out;
}

DensityMatrix lindblad_step(const DensityMatrix& rho, const Operator2& h, double gamma1, double dt) {
    if (gamma1 < 0.0) throw std::invalid_argument("lindblad_step: gamma1 must be >= 0");
    DensityMatrix out = unitary_step(rho, h, dt);
    if (gamma1 > 0.0) {
        // sigma_- rho sigma_+ - (1/2){sigma_+ sigma_-, rho}; sigma_- = |1><0|
        const double p0 = out.p00();
        const cplx c = out.coherence();
        out.m.a00 -= gamma1 * dt * p0;
        out.m.a11 += gamma1 * dt * p0;
        out.m.a01 -= 0.5 * gamma1 * dt * c;
        out.m.a10 -= 0.5 * gamma1 * dt * std::conj(c);
    }
    if (out.p00() < -1e-9 || out.p11() < -1e-9)
        throw std::runtime_error("lindblad_step: negativity beyond tolerance");
    return out;
}

FinalProjection final_projection(const DensityMatrix& rho, const Operator2& h_tau, PhiloxRng& rng) {
    const Eigensystem es = eigensystem(h_tau);
    const double u_before = expectation(rho, h_tau);
    const double p0 = expectation(rho, DensityMatrix::from_pure(es.v_minus).m);
    const int m = sample_index(p0, rng);
    const double born = m == 0 ? p0 : 1.0 - p0;
    return {m, es.eps(m) - u_before, std::log(born)};
}

FinalProjection final_projection(const PureState& psi, const Operator2& h_tau, PhiloxRng& rng) {
    const Eigensystem es = eigensystem(h_tau);
    const DensityMatrix rho = DensityMatrix::from_pure(psi);
    const double u_before = expectation(rho, h_tau);
    const double p0 = std::norm(es.v_minus.inner(psi));
    const int m = sample_index(p0, rng);
    const double born = m == 0 ? p0 : std::norm(es.v_plus.inner(psi));
    return {m, es.eps(m) - u_before, std::log(born)};
}

TrajectoryRecord run_forward(const ProtocolParams& p, const MeasurementModel& model,
                             const TrajectoryConfig& c, double beta) {
    p.validate();
    model.validate();
    c.validate();
    if (std::abs(model.dt - c.dt) > 1e-15 * std::max(1.0, model.dt))
        throw std::invalid_argument("run_forward: measurement model and trajectory dt differ");
    const Grid grid = make_grid(p, c.dt);

    PhiloxRng rng(c.master_seed, c.stream_id);
    const Operator2 h_b = p.h_before();
    const Operator2 h_a = p.h_after();
    const Operator2 u_b = evolution_operator(h_b, c.dt);
    const Operator2 u_a = evolution_operator(h_a, c.dt);
    const double df_tau = free_energy_change(p, p.tau, beta);
    const double sqrt_g = std::sqrt(model.gamma_d);
    const double current_sigma = 1.0 / std::sqrt(c.dt);

    const InitialSample init = sample_initial_eigenstate(p, beta, rng);
    const bool pure_mode = (c.gamma1 == 0.0 && c.integrator == Integrator::PovmUpdate);

    PureState psi = init.state;
    DensityMatrix rho = DensityMatrix::from_pure(init.state);
    BlochVector bloch = BlochVector::from_density(rho);

    TrajectoryRecord rec;
    rec.beta = beta;
    rec.gamma1 = c.gamma1;
    rec.dt = c.dt;
    rec.delta_f_tau = df_tau;
    rec.n = init.n;
    rec.eps_n = eigensystem(h_b).eps(init.n);
    if (c.store_full_record) {
        rec.full_currents.reserve(grid.n_steps);
        rec.full_log_weights.reserve(grid.n_steps);
    }

    double u = rec.eps_n;
    double w_acc = 0.0;
    KahanSum q_acc;
    KahanSum log_pf;
    if (pure_mode) log_pf.add(init.log_prob);

    auto record_point = [&](double t, double current, bool post_quench) {
        rec.times.push_back(t);
        rec.currents.push_back(current);
        rec.u_series.push_back(u);
        rec.w_series.push_back(w_acc);
        rec.q_series.push_back(q_acc.value());
        rec.sigma_series.push_back(beta * (w_acc + q_acc.value() - (post_quench ? df_tau : 0.0)));
    };
    record_point(0.0, 0.0, false);

    for (long i = 0; i < grid.n_steps; ++i) {
        const bool after = i >= grid.quench_index;
        const Operator2& h = after ? h_a : h_b;

        // Work is booked at the switch, with the state at the switch time.
        if (i == grid.quench_index) {
            const double dw = pure_mode
                                  ? expectation(DensityMatrix::from_pure(psi), h_a - h_b)
                                  : expectation(c.integrator == Integrator::BlochSme ? bloch.to_density() : rho,
                                                h_a - h_b);
            w_acc += dw;
            u += dw;
        }

        double x = 0.0;
        double u_new = u;
        if (pure_mode) {
            psi = apply(after ? u_a : u_b, psi);
            const DensityMatrix pre = DensityMatrix::from_pure(psi);
            x = sample_current(model, pre, rng).x;
            const PureMeasurementUpdate upd = measurement_update(psi, model, x);
            psi = upd.psi;
            log_pf.add(upd.log_weight);
            if (c.store_full_record) rec.full_log_weights.push_back(upd.log_weight);
            u_new = expectation(DensityMatrix::from_pure(psi), h);
        } else if (c.integrator == Integrator::BlochSme) {
            x = sqrt_g * bloch.sz() + current_sigma * rng.next_normal();
            bloch = step_sme(bloch, h, model.gamma_d, x, c.dt, &rec.clamp_warnings);
            if (c.gamma1 > 0.0) {
                DensityMatrix tmp = bloch.to_density();
                // unitary part already inside step_sme; apply dissipator only
                tmp = lindblad_step(tmp, Operator2::zero(), c.gamma1, c.dt);
                bloch = BlochVector::from_density(tmp);
            }
            u_new = expectation(bloch.to_density(), h);
        } else {
            rho = c.gamma1 > 0.0 ? lindblad_step(rho, h, c.gamma1, c.dt) : unitary_step(rho, h, c.dt);
            x = sample_current(model, rho, rng).x;
            const MeasurementUpdate upd = measurement_update(rho, model, x);
            rho = upd.rho;
            if (c.store_full_record) rec.full_log_weights.push_back(upd.log_weight);
            u_new = expectation(rho, h);
        }
        if (c.store_full_record) rec.full_currents.push_back(x);

        q_acc.add(u_new - u);  // back-action (and dissipation) heat as ledger residual
        u = u_new;

        if ((i + 1) % c.record_stride == 0 || i + 1 == grid.n_steps)
            record_point((i + 1) * c.dt, x, after);
    }

    const FinalProjection fin =
        pure_mode ? final_projection(psi, h_a, rng)
                  : final_projection(c.integrator == Integrator::BlochSme ? bloch.to_density() : rho, h_a, rng);
    rec.m = fin.m;
    rec.eps_m = eigensystem(h_a).eps(fin.m);
    q_acc.add(fin.heat);
    rec.work_total = w_acc;
    rec.heat_total = q_acc.value();
    rec.sigma_final = beta * (w_acc + q_acc.value() - df_tau);
    if (pure_mode) {
        log_pf.add(fin.log_prob);
        rec.log_pf = log_pf.value();
    }
    return rec;
}

double backward_log_probability(const TrajectoryRecord& rec, const ProtocolParams& p,
                                const MeasurementModel& model, double beta) {
    if (rec.gamma1 != 0.0)
        throw std::invalid_argument("backward_log_probability: only defined for gamma1 = 0 records");
    if (std::abs(model.dt - rec.dt) > 1e-15)
        throw std::invalid_argument("backward_log_probability: model dt differs from record dt");
    const Grid grid = make_grid(p, rec.dt);
    if (static_cast<long>(rec.full_currents.size()) != grid.n_steps)
        throw std::invalid_argument("backward_log_probability: record/protocol length mismatch");

    const Operator2 h_b = p.h_before();
    const Operator2 h_a = p.h_after();
    // Backward unitaries: Theta U_i^dag Theta^dag, applied in reversed order.
    const Operator2 ub_rev = evolution_operator(h_b, rec.dt).adjoint().conjugate();
    const Operator2 ua_rev = evolution_operator(h_a, rec.dt).adjoint().conjugate();

    const Eigensystem es_tau = eigensystem(h_a);
    const Eigensystem es_0 = eigensystem(h_b);
    const double gap = es_tau.eps_plus - es_tau.eps_minus;
    const double log_pm =
        (rec.m == 0 ? 0.0 : -beta * gap) - std::log(1.0 + std::exp(-beta * gap));

    PureState psi = time_reverse(es_tau.vec(rec.m));
    KahanSum log_pb;
    log_pb.add(log_pm);
    for (long k = 0; k < grid.n_steps; ++k) {
        const long i = grid.n_steps - 1 - k;  // matching forward step
        const double x = rec.full_currents[i];
        // Theta M^dag Theta^dag = conj(M^dag); M is real diagonal here, but keep it general.
        const Operator2 m_rev = povm_element(model, x).adjoint().conjugate();
        psi = apply(m_rev, psi);
        const double w = psi.norm2();
        if (!(w > 0.0)) throw std::runtime_error("backward_log_probability: zero-weight backward step");
        log_pb.add(std::log(w));
        psi.normalize();
        psi = apply(i >= grid.quench_index ? ua_rev : ub_rev, psi);
    }
    const PureState target = time_reverse(es_0.vec(rec.n));
    log_pb.add(std::log(std::norm(target.inner(psi))));
    return log_pb.value();
}

DensityMatrix evolve_on_record(const ProtocolParams& p, const MeasurementModel& model,
                               Integrator integrator, const DensityMatrix& rho0,
                               const std::vector<double>& currents, double dt) {
    const Grid grid = make_grid(p, dt);
    if (static_cast<long>(currents.size()) != grid.n_steps)
        throw std::invalid_argument("evolve_on_record: record/protocol length mismatch");

    if (integrator == Integrator::PovmUpdate) {
        DensityMatrix rho = rho0;
        for (long i = 0; i < grid.n_steps; ++i) {
            const Operator2& h = i >= grid.quench_index ? p.h_after() : p.h_before();
            rho = unitary_step(rho, h, dt);
            rho = measurement_update(rho, model, currents[i]).rho;
        }
        return rho;
    }
    BlochVector b = BlochVector::from_density(rho0);
    for (long i = 0; i < grid.n_steps; ++i) {
        const Operator2& h = i >= grid.quench_index ? p.h_after() : p.h_before();
        b = step_sme(b, h, model.gamma_d, currents[i], dt);
    }
    return b.to_density();
}

}  // namespace qtherm
