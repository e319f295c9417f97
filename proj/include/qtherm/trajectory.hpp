#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "qtherm/homodyne.hpp"
#include "qtherm/protocol.hpp"
#include "qtherm/rng.hpp"

// Single-trajectory engine: interleaves unitary (or Lindblad) evolution with
// homodyne measurement updates, keeps the first-law ledger U = W + Q, records
// the current, and evaluates forward/backward log path probabilities.

namespace qtherm {

enum class Integrator { PovmUpdate, BlochSme };

struct TrajectoryConfig {
    double dt = 1e-3;          // us
    double gamma1 = 0.0;       // rad/us; > 0 disables path probabilities
    Integrator integrator = Integrator::PovmUpdate;
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
    int record_stride = 1;
    bool store_full_record = false;  // keep per-step currents and log weights

    void validate() const;
};

struct TrajectoryRecord {
    std::vector<double> times;     // us; decimated by record_stride, endpoints always kept
    std::vector<double> currents;  // current of the step ending at times[k] (0 at t=0)
    std::vector<double> u_series, w_series, q_series, sigma_series;  // sigma at tau is pre-projection

    int n = 0, m = 0;              // energy labels: 0 = lower eigenvalue
    double eps_n = 0.0, eps_m = 0.0;  // rad/us
    double log_pf = std::numeric_limits<double>::quiet_NaN();
    double log_pb = std::numeric_limits<double>::quiet_NaN();
    double beta = 0.0;             // us (inverse angular frequency)
    double delta_f_tau = 0.0;
    double work_total = 0.0, heat_total = 0.0;  // post endpoint projection
    double sigma_final = 0.0;      // beta (W + Q - dF), post projection
    double gamma1 = 0.0, dt = 0.0;
    long clamp_warnings = 0;

    std::vector<double> full_currents, full_log_weights;  // when store_full_record

    bool has_path_probabilities() const { return gamma1 == 0.0; }
    double delta_u() const { return eps_m - eps_n; }
};

// Bloch-sphere parametrization of the density matrix (rho11 implicit).
struct BlochVector {
    double p0 = 1.0;       // rho00
    double re_c = 0.0;     // Re rho01
    double im_c = 0.0;     // Im rho01

    static BlochVector from_density(const DensityMatrix& rho);
    DensityMatrix to_density() const;
    double sz() const { return 2.0 * p0 - 1.0; }
    // Pulls the state back inside the Bloch ball; returns true when clamped.
    bool clamp();
};

// Projective energy measurement on the Gibbs state of H_S(lambda_0).
struct InitialSample {
    int n;
    PureState state;
    double log_prob;
};
InitialSample sample_initial_eigenstate(const ProtocolParams& p, double beta, PhiloxRng& rng);

// One explicit Euler step of the diffusive stochastic master equation driven
// by the measured current sample.
BlochVector step_sme(const BlochVector& b, const Operator2& h, double gamma_d, double current, double dt,
                     long* clamp_count = nullptr);

// Exact unitary conjugation plus first-order Euler amplitude-damping dissipator.
DensityMatrix lindblad_step(const DensityMatrix& rho, const Operator2& h, double gamma1, double dt);

struct FinalProjection {
    int m;
    double heat;      // eps_m - U(tau^-)
    double log_prob;  // log Born probability of m
};
FinalProjection final_projection(const DensityMatrix& rho, const Operator2& h_tau, PhiloxRng& rng);
FinalProjection final_projection(const PureState& psi, const Operator2& h_tau, PhiloxRng& rng);

TrajectoryRecord run_forward(const ProtocolParams& p, const MeasurementModel& m,
                             const TrajectoryConfig& c, double beta);

// Evaluates the backward path probability by explicit sequential application
// of the time-reversed chain. Requires a full current record and gamma1 = 0.
// Never shortcuts through the fluctuation theorem.
double backward_log_probability(const TrajectoryRecord& rec, const ProtocolParams& p,
                                const MeasurementModel& m, double beta);

// Replays a fixed current record through the chosen integrator; used to
// compare the POVM update against the Bloch SME discretization.
DensityMatrix evolve_on_record(const ProtocolParams& p, const MeasurementModel& m,
                               Integrator integrator, const DensityMatrix& rho0,
                               const std::vector<double>& currents, double dt);

}  // namespace qtherm
