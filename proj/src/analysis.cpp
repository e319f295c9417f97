#include "qtherm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qtherm {

double sample_mean(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("sample_mean: empty input");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_stderr(const std::vector<double>& v) {
    const std::size_t n = v.size();
    if (n < 2) return 0.0;
    const double mu = sample_mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - mu) * (x - mu);
    return std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
}

namespace {

double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16, kFpmin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpmin) d = kFpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpmin) d = kFpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpmin) c = kFpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpmin) d = kFpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpmin) c = kFpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

double betai(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                               a * std::log(x) + b * std::log(1.0 - x));
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

double student_t_two_sided_p(double t, double dof) {
    if (dof <= 0.0) throw std::invalid_argument("student_t_two_sided_p: dof must be > 0");
    return betai(0.5 * dof, 0.5, dof / (dof + t * t));
}

FtFit detailed_ft_points(const std::vector<TrajectoryRecord>& records) {
    if (records.empty()) throw std::invalid_argument("detailed_ft_points: empty input");
    FtFit fit;
    fit.points.reserve(records.size());
    for (const auto& r : records) {
        if (!r.has_path_probabilities() || !std::isfinite(r.log_pb))
            throw std::invalid_argument("detailed_ft_points: record lacks path probabilities");
        fit.points.push_back({r.delta_u() - r.delta_f_tau, r.log_pf - r.log_pb, r.n, r.m});
    }
    const auto n = static_cast<double>(fit.points.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& pt : fit.points) {
        sx += pt.delta_u;
        sy += pt.log_ratio;
        sxx += pt.delta_u * pt.delta_u;
        sxy += pt.delta_u * pt.log_ratio;
    }
    const double denom = n * sxx - sx * sx;
    if (denom <= 0.0) throw std::invalid_argument("detailed_ft_points: degenerate abscissae");
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0.0;
    for (const auto& pt : fit.points) {
        const double r = pt.log_ratio - fit.intercept - fit.slope * pt.delta_u;
        ss_res += r * r;
    }
    if (n > 2) fit.slope_stderr = std::sqrt(ss_res / (n - 2.0) / (sxx - sx * sx / n));
    return fit;
}

EfficacyResult efficacy(const std::vector<TrajectoryRecord>& records) {
    if (records.empty()) throw std::invalid_argument("efficacy: empty input");
    std::vector<double> vals;
    vals.reserve(records.size());
    for (const auto& r : records) vals.push_back(std::exp(-r.sigma_final));
    return {sample_mean(vals), sample_stderr(vals), vals.size()};
}

namespace {

std::size_t grid_index(const TrajectoryRecord& r, double t) {
    for (std::size_t k = 0; k < r.times.size(); ++k)
        if (std::abs(r.times[k] - t) <= 1e-9) return k;
    throw std::invalid_argument("entropy_histogram: t not on the recorded grid");
}

}  // namespace

std::vector<double> kmeans_1d(const std::vector<double>& data, int k, int iters) {
    if (data.empty() || k < 1) throw std::invalid_argument("kmeans_1d: bad input");
    std::vector<double> sorted = data;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> centers(k);
    for (int j = 0; j < k; ++j)
        centers[j] = sorted[std::min(sorted.size() - 1, sorted.size() * (2 * j + 1) / (2 * k))];
    std::vector<double> sum(k);
    std::vector<long> cnt(k);
    for (int it = 0; it < iters; ++it) {
        std::fill(sum.begin(), sum.end(), 0.0);
        std::fill(cnt.begin(), cnt.end(), 0L);
        for (double x : data) {
            int best = 0;
            for (int j = 1; j < k; ++j)
                if (std::abs(x - centers[j]) < std::abs(x - centers[best])) best = j;
            sum[best] += x;
            ++cnt[best];
        }
        bool moved = false;
        for (int j = 0; j < k; ++j) {
            if (cnt[j] == 0) continue;
            const double c = sum[j] / cnt[j];
            if (c != centers[j]) moved = true;
            centers[j] = c;
        }
        if (!moved) break;
    }
    std::sort(centers.begin(), centers.end());
    return centers;
}

Histogram entropy_histogram(const std::vector<TrajectoryRecord>& records, double t, int bins) {
    if (records.empty() || bins < 1) throw std::invalid_argument("entropy_histogram: bad input");
    std::vector<double> vals;
    vals.reserve(records.size());
    for (const auto& r : records) vals.push_back(r.sigma_series[grid_index(r, t)]);

    const auto [lo_it, hi_it] = std::minmax_element(vals.begin(), vals.end());
    double lo = *lo_it, hi = *hi_it;
    if (hi - lo < 1e-12) {  // degenerate: widen around the single value
        lo -= 0.5;
        hi += 0.5;
    }
    Histogram h;
    h.time = t;
    h.total = vals.size();
    h.edges.resize(bins + 1);
    h.counts.assign(bins, 0);
    const double width = (hi - lo) / bins;
    for (int b = 0; b <= bins; ++b) h.edges[b] = lo + b * width;
    for (double v : vals) {
        int b = static_cast<int>((v - lo) / width);
        b = std::clamp(b, 0, bins - 1);
        ++h.counts[b];
    }
    h.cluster_centers = kmeans_1d(vals, std::min<int>(4, static_cast<int>(vals.size())));
    return h;
}

MeanCurve mean_entropy_curve(const std::vector<TrajectoryRecord>& records) {
    if (records.empty()) throw std::invalid_argument("mean_entropy_curve: empty input");
    const std::size_t npts = records.front().times.size();
    for (const auto& r : records)
        if (r.times.size() != npts || std::abs(r.times.back() - records.front().times.back()) > 1e-12)
            throw std::invalid_argument("mean_entropy_curve: records not on a common time grid");
    MeanCurve c;
    c.times = records.front().times;
    c.mean.resize(npts);
    c.stderr_.resize(npts);
    std::vector<double> col(records.size());
    for (std::size_t k = 0; k < npts; ++k) {
        for (std::size_t i = 0; i < records.size(); ++i) col[i] = records[i].sigma_series[k];
        c.mean[k] = sample_mean(col);
        c.stderr_[k] = sample_stderr(col);
    }
    return c;
}

RegressionResult efficacy_regression(const std::vector<SweepPoint>& sweep) {
    const std::size_t n = sweep.size();
    if (n < 3) throw std::invalid_argument("efficacy_regression: need at least 3 sweep points");
    double sw = 0.0, swx = 0.0, swy = 0.0, swxx = 0.0, swxy = 0.0;
    for (const auto& pt : sweep) {
        const double se = pt.efficacy.stderr_;
        const double w = se > 0.0 ? 1.0 / (se * se) : 1.0;
        sw += w;
        swx += w * pt.gamma1_over_kappa;
        swy += w * pt.efficacy.mean;
        swxx += w * pt.gamma1_over_kappa * pt.gamma1_over_kappa;
        swxy += w * pt.gamma1_over_kappa * pt.efficacy.mean;
    }
    const double denom = sw * swxx - swx * swx;
    if (denom <= 0.0) throw std::invalid_argument("efficacy_regression: degenerate abscissae");
    RegressionResult res;
    res.slope = (sw * swxy - swx * swy) / denom;
    res.intercept = (swy - res.slope * swx) / sw;

    double wss_res = 0.0, ss_res = 0.0;
    for (const auto& pt : sweep) {
        const double se = pt.efficacy.stderr_;
        const double w = se > 0.0 ? 1.0 / (se * se) : 1.0;
        const double r = pt.efficacy.mean - res.intercept - res.slope * pt.gamma1_over_kappa;
        wss_res += w * r * r;
        ss_res += r * r;
    }
    const double dof = static_cast<double>(n) - 2.0;
    const double s2 = wss_res / dof;  // overdispersion-scaled variance
    res.slope_stderr = std::sqrt(s2 * sw / denom);
    res.residual_std = std::sqrt(ss_res / dof);
    const double t = res.slope / res.slope_stderr;
    res.p_value = student_t_two_sided_p(t, dof);
    return res;
}

TpmDistribution tpm_reference(const ProtocolParams& p, double beta) {
    p.validate();
    if (!(beta > 0.0)) throw std::invalid_argument("tpm_reference: beta must be > 0");
    const Operator2 h_b = p.h_before();
    const Operator2 h_a = p.h_after();
    const Eigensystem es0 = eigensystem(h_b);
    const Eigensystem es1 = eigensystem(h_a);
    const double df = free_energy_change(p, p.tau, beta);

    // Exact stepped propagator of the quench protocol (no measurement).
    const Operator2 u = evolution_operator(h_a, p.tau - p.quench_time) *
                        evolution_operator(h_b, p.quench_time);
    // Backward propagator Theta U^dag Theta^dag for the reversed protocol.
    const Operator2 u_rev = u.adjoint().conjugate();

    const double z0 = 1.0 + std::exp(-beta * (es0.eps_plus - es0.eps_minus));
    const double z1 = 1.0 + std::exp(-beta * (es1.eps_plus - es1.eps_minus));

    TpmDistribution out{};
    out.delta_f = df;
    out.jarzynski_sum = 0.0;
    for (int n = 0; n < 2; ++n) {
        const double pn = std::exp(-beta * (es0.eps(n) - es0.eps_minus)) / z0;
        for (int m = 0; m < 2; ++m) {
            const double amp = std::norm(es1.vec(m).inner(apply(u, es0.vec(n))));
            const double w = es1.eps(m) - es0.eps(n);
            out.prob[n][m] = pn * amp;
            out.work[n][m] = w;
            out.jarzynski_sum += out.prob[n][m] * std::exp(-beta * (w - df));

            const double pm_rev = std::exp(-beta * (es1.eps(m) - es1.eps_minus)) / z1;
            const PureState m_rev = time_reverse(es1.vec(m));
            const PureState n_rev = time_reverse(es0.vec(n));
            const double amp_rev = std::norm(n_rev.inner(apply(u_rev, m_rev)));
            const double pb = pm_rev * amp_rev;
            if (out.prob[n][m] > 1e-280 && pb > 1e-280)
                out.crooks_residual[n][m] = std::log(out.prob[n][m] / pb) - beta * (w - df);
            else
                out.crooks_residual[n][m] = 0.0;
        }
    }
    return out;
}

}  // namespace qtherm
