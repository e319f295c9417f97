#pragma once

#include <vector>

#include "qtherm/trajectory.hpp"

// Ensemble-level thermodynamic analysis: detailed-FT point clouds, efficacy,
// entropy-production histograms/curves, efficacy-vs-damping regression, and
// the closed-system two-point-measurement (TPM) reference.

namespace qtherm {

struct FtPoint {
    double delta_u;    // (eps_m - eps_n) - dF, rad/us
    double log_ratio;  // log p_F - log p_B
    int n, m;
};

struct FtFit {
    std::vector<FtPoint> points;
    double slope = 0.0, intercept = 0.0;
    double slope_stderr = 0.0;
};

// One point per record plus an OLS fit of log_ratio vs delta_u. Records must
// carry both path probabilities (gamma1 = 0, log_pb filled in).
FtFit detailed_ft_points(const std::vector<TrajectoryRecord>& records);

struct EfficacyResult {
    double mean = 0.0;     // <e^{-Sigma}>
    double stderr_ = 0.0;  // sample std / sqrt(N)
    std::size_t n = 0;
};

EfficacyResult efficacy(const std::vector<TrajectoryRecord>& records);

struct Histogram {
    std::vector<double> edges;  // strictly increasing, size bins+1
    std::vector<long> counts;
    std::size_t total = 0;
    double time = 0.0;
    std::vector<double> cluster_centers;  // 1-D k-means, k = 4
};

// Histogram of Sigma(t) across records; t must lie on the recorded grid.
Histogram entropy_histogram(const std::vector<TrajectoryRecord>& records, double t, int bins);

struct MeanCurve {
    std::vector<double> times;
    std::vector<double> mean;
    std::vector<double> stderr_;
};

MeanCurve mean_entropy_curve(const std::vector<TrajectoryRecord>& records);

struct RegressionResult {
    double intercept = 0.0, slope = 0.0;
    double slope_stderr = 0.0;
    double p_value = 1.0;  // two-sided t-test on slope = 0
    double residual_std = 0.0;
};

struct SweepPoint {
    double gamma1_over_kappa;
    EfficacyResult efficacy;
};

// Weighted least squares (weights 1/stderr^2) of efficacy vs gamma1/kappa.
RegressionResult efficacy_regression(const std::vector<SweepPoint>& sweep);

struct TpmDistribution {
    double prob[2][2];            // prob[n][m]
    double work[2][2];            // eps_m(tau) - eps_n(0)
    double crooks_residual[2][2]; // log[p_F(n->m)/p_B(m->n)] - beta (W - dF)
    double jarzynski_sum;         // sum p e^{-beta (W - dF)}
    double delta_f;
};

// Exhaustive enumeration of the measurement-free (Gamma_d = 0) protocol:
// Crooks ratios and the Jarzynski sum from exact stepped unitaries.
TpmDistribution tpm_reference(const ProtocolParams& p, double beta);

// Small statistics helpers (shared with the harness).
double sample_mean(const std::vector<double>& v);
double sample_stderr(const std::vector<double>& v);
double student_t_two_sided_p(double t, double dof);
std::vector<double> kmeans_1d(const std::vector<double>& data, int k, int iters = 64);

}  // namespace qtherm
