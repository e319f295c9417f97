#include "qtherm/ensemble.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace qtherm {

using nlohmann::json;

namespace {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_outputs: cannot open '" + path + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw std::runtime_error("write_outputs: I/O error writing '" + path + "'");
}

json derived_block(const RunConfig& cfg) {
    json d;
    d["gamma_d_mhz"] = angular_to_mhz(cfg.gamma_d);
    d["measurement_time_us"] = cfg.gamma_d > 0.0 ? 1.0 / (2.0 * cfg.gamma_d) : 0.0;
    d["beta_us"] = cfg.beta;
    d["dt_us"] = cfg.dt_us;
    d["steps"] = static_cast<long>(std::lround(cfg.tau_us / cfg.dt_us));
    d["delta_f_tau"] = free_energy_change(cfg.protocol(), cfg.tau_us, cfg.beta);
    return d;
}

json manifest_block(const OutputBundle& bundle) {
    json m = json::object();
    for (const auto& f : bundle.files)
        m[std::filesystem::path(f.path).filename().string()] = f.checksum;
    return m;
}

void write_summary(const RunConfig& cfg, const json& results, OutputBundle& bundle,
                   const std::string& dir) {
    json s;
    s["config"] = json::parse(cfg.to_json());
    s["derived"] = derived_block(cfg);
    s["results"] = results;
    s["manifest"] = manifest_block(bundle);
    const std::string path = dir + "/summary.json";
    auto out = open_out(path);
    out << s.dump(2) << "\n";
    finish(out, path);
    bundle.files.push_back({path, fnv1a_file_hex(path)});
}

}  // namespace

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string fnv1a_file_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checksum: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return fnv1a_hex(ss.str());
}

std::vector<TrajectoryRecord> run_ensemble(const RunConfig& cfg, bool store_full_record) {
    const ProtocolParams proto = cfg.protocol();
    const MeasurementModel model = cfg.measurement_model();
    const long n = cfg.trajectories;
    const bool want_backward = store_full_record && cfg.gamma1_over_kappa == 0.0 &&
                               cfg.integrator_kind() == Integrator::PovmUpdate;

    std::vector<TrajectoryRecord> records(n);
    std::atomic<long> next{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const long k = next.fetch_add(1);
            if (k >= n || failed.load()) break;
            try {
                const TrajectoryConfig tc = cfg.trajectory_config(static_cast<std::uint64_t>(k),
                                                                  store_full_record || want_backward);
                TrajectoryRecord rec = run_forward(proto, model, tc, cfg.beta);
                if (want_backward) rec.log_pb = backward_log_probability(rec, proto, model, cfg.beta);
                records[k] = std::move(rec);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed.exchange(true))
                    first_error = "trajectory " + std::to_string(k) + " (seed " +
                                  std::to_string(cfg.master_seed) + ", stream " + std::to_string(k) +
                                  "): " + e.what();
            }
        }
    };

    const int nthreads = std::min<long>(resolve_threads(cfg.threads), n);
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failed.load()) throw std::runtime_error("run_ensemble: " + first_error);
    return records;
}

OutputBundle write_outputs(const std::vector<TrajectoryRecord>& records, const std::string& dir) {
    std::filesystem::create_directories(dir);
    OutputBundle bundle;

    {
        const std::string path = dir + "/trajectories.csv";
        auto out = open_out(path);
        out << "traj_id,t_us,current,U,W,Q,Sigma\n";
        for (std::size_t k = 0; k < records.size(); ++k) {
            const auto& r = records[k];
            for (std::size_t i = 0; i < r.times.size(); ++i)
                out << k << ',' << fmt17(r.times[i]) << ',' << fmt17(r.currents[i]) << ','
                    << fmt17(r.u_series[i]) << ',' << fmt17(r.w_series[i]) << ','
                    << fmt17(r.q_series[i]) << ',' << fmt17(r.sigma_series[i]) << '\n';
        }
        finish(out, path);
        bundle.files.push_back({path, fnv1a_file_hex(path)});
    }
    {
        const std::string path = dir + "/endpoints.csv";
        auto out = open_out(path);
        out << "traj_id,n,m,eps_n,eps_m,log_pF,log_pB,Sigma_final\n";
        for (std::size_t k = 0; k < records.size(); ++k) {
            const auto& r = records[k];
            out << k << ',' << r.n << ',' << r.m << ',' << fmt17(r.eps_n) << ',' << fmt17(r.eps_m)
                << ',' << fmt17(r.log_pf) << ',' << fmt17(r.log_pb) << ',' << fmt17(r.sigma_final)
                << '\n';
        }
        finish(out, path);
        bundle.files.push_back({path, fnv1a_file_hex(path)});
    }
    return bundle;
}

OutputBundle cmd_simulate(const RunConfig& cfg, const std::string& out_dir) {
    const auto records = run_ensemble(cfg);
    OutputBundle bundle = write_outputs(records, out_dir);
    const EfficacyResult eff = efficacy(records);
    json results;
    results["efficacy"] = {{"mean", eff.mean}, {"stderr", eff.stderr_}, {"n", eff.n}};
    long clamps = 0;
    for (const auto& r : records) clamps += r.clamp_warnings;
    results["clamp_warnings"] = clamps;
    write_summary(cfg, results, bundle, out_dir);
    return bundle;
}

OutputBundle cmd_ft_check(const RunConfig& cfg, const std::string& out_dir) {
    if (cfg.gamma1_over_kappa != 0.0)
        throw std::invalid_argument("ft-check: requires gamma1_over_kappa = 0");
    const auto records = run_ensemble(cfg, /*store_full_record=*/true);
    const FtFit fit = detailed_ft_points(records);

    std::filesystem::create_directories(out_dir);
    OutputBundle bundle;
    const std::string path = out_dir + "/ft_points.csv";
    auto out = open_out(path);
    out << "delta_u,log_ratio,n,m\n";
    for (const auto& pt : fit.points)
        out << fmt17(pt.delta_u) << ',' << fmt17(pt.log_ratio) << ',' << pt.n << ',' << pt.m << '\n';
    finish(out, path);
    bundle.files.push_back({path, fnv1a_file_hex(path)});

    json results;
    results["ft_fit"] = {{"slope", fit.slope},
                         {"intercept", fit.intercept},
                         {"slope_stderr", fit.slope_stderr},
                         {"beta_us", cfg.beta},
                         {"points", fit.points.size()}};
    write_summary(cfg, results, bundle, out_dir);
    return bundle;
}

OutputBundle cmd_histogram(const RunConfig& cfg, double time_us, int bins, const std::string& out_dir) {
    const auto records = run_ensemble(cfg);
    const Histogram hist = entropy_histogram(records, time_us, bins);

    std::filesystem::create_directories(out_dir);
    OutputBundle bundle;
    const std::string path = out_dir + "/histogram.csv";
    auto out = open_out(path);
    out << "bin_lo,bin_hi,count\n";
    for (std::size_t b = 0; b < hist.counts.size(); ++b)
        out << fmt17(hist.edges[b]) << ',' << fmt17(hist.edges[b + 1]) << ',' << hist.counts[b] << '\n';
    finish(out, path);
    bundle.files.push_back({path, fnv1a_file_hex(path)});

    json results;
    results["histogram"] = {{"time_us", hist.time},
                            {"total", hist.total},
                            {"cluster_centers", hist.cluster_centers}};
    write_summary(cfg, results, bundle, out_dir);
    return bundle;
}

OutputBundle cmd_efficacy_sweep(const RunConfig& cfg, const std::vector<double>& gamma1_over_kappa,
                                const std::string& out_dir) {
    if (gamma1_over_kappa.size() < 3)
        throw std::invalid_argument("efficacy-sweep: need at least 3 gamma1/kappa values");
    std::vector<SweepPoint> sweep;
    sweep.reserve(gamma1_over_kappa.size());
    for (std::size_t i = 0; i < gamma1_over_kappa.size(); ++i) {
        RunConfig point = cfg;
        point.gamma1_over_kappa = gamma1_over_kappa[i];
        point.master_seed = cfg.master_seed + i;  // decorrelate sweep points
        point.resolve();
        sweep.push_back({gamma1_over_kappa[i], efficacy(run_ensemble(point))});
    }
    const RegressionResult reg = efficacy_regression(sweep);

    std::filesystem::create_directories(out_dir);
    OutputBundle bundle;
    const std::string path = out_dir + "/efficacy_sweep.csv";
    auto out = open_out(path);
    out << "gamma1_over_kappa,efficacy,stderr\n";
    for (const auto& pt : sweep)
        out << fmt17(pt.gamma1_over_kappa) << ',' << fmt17(pt.efficacy.mean) << ','
            << fmt17(pt.efficacy.stderr_) << '\n';
    finish(out, path);
    bundle.files.push_back({path, fnv1a_file_hex(path)});

    json results;
    results["regression"] = {{"intercept", reg.intercept},
                             {"slope", reg.slope},
                             {"slope_stderr", reg.slope_stderr},
                             {"p_value", reg.p_value},
                             {"residual_std", reg.residual_std}};
    write_summary(cfg, results, bundle, out_dir);
    return bundle;
}

OutputBundle cmd_tpm(const RunConfig& cfg, const std::string& out_dir) {
    const TpmDistribution tpm = tpm_reference(cfg.protocol(), cfg.beta);

    std::filesystem::create_directories(out_dir);
    OutputBundle bundle;
    const std::string path = out_dir + "/tpm.csv";
    auto out = open_out(path);
    out << "n,m,prob,work,crooks_residual\n";
    for (int n = 0; n < 2; ++n)
        for (int m = 0; m < 2; ++m)
            out << n << ',' << m << ',' << fmt17(tpm.prob[n][m]) << ',' << fmt17(tpm.work[n][m])
                << ',' << fmt17(tpm.crooks_residual[n][m]) << '\n';
    finish(out, path);
    bundle.files.push_back({path, fnv1a_file_hex(path)});

    json results;
    results["tpm"] = {{"jarzynski_sum", tpm.jarzynski_sum}, {"delta_f", tpm.delta_f}};
    write_summary(cfg, results, bundle, out_dir);
    return bundle;
}

}  // namespace qtherm
