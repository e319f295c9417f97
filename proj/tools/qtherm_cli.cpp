// Command-line front end; talks to the simulator only through the C API.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qtherm/qtherm_c.h"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::string seed;
    std::string trajectories;
    std::string threads;
    std::string nbar;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "JSON config file");
    cmd->add_option("--out-dir", o.out_dir, "output directory");
    cmd->add_option("--seed", o.seed, "master seed (u64)");
    cmd->add_option("--trajectories", o.trajectories, "number of trajectories");
    cmd->add_option("--threads", o.threads, "worker threads (N or auto)");
}

int die(const char* what) {
    std::fprintf(stderr, "error: %s: %s\n", what, qtherm_last_error());
    return 1;
}

// Builds a config from the optional file plus flag overrides.
int make_config(const CommonOpts& o, qtherm_config** out) {
    qtherm_status st = o.config_path.empty() ? qtherm_config_create(out)
                                             : qtherm_config_load(o.config_path.c_str(), out);
    if (st != QTHERM_OK) return 1;

    std::string overrides = "{";
    bool first = true;
    auto add = [&](const std::string& key, const std::string& value) {
        if (value.empty()) return;
        if (!first) overrides += ",";
        overrides += "\"" + key + "\":" + value;
        first = false;
    };
    add("master_seed", o.seed);
    add("trajectories", o.trajectories);
    add("nbar", o.nbar);
    if (!o.threads.empty()) add("threads", o.threads == "auto" ? "0" : o.threads);
    overrides += "}";
    if (overrides == "{}") return 0;
    if (qtherm_config_merge_json(*out, overrides.c_str()) != QTHERM_OK) {
        qtherm_config_free(*out);
        *out = nullptr;
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo quantum-trajectory thermodynamics of a monitored qubit"};
    app.require_subcommand(1);

    CommonOpts sim_o, ft_o, hist_o, sweep_o, tpm_o;
    double hist_time = 2.4;
    int hist_bins = 60;
    std::vector<double> sweep_ratios;

    auto* sim = app.add_subcommand("simulate", "forward ensemble -> trajectories.csv, endpoints.csv");
    add_common(sim, sim_o);

    auto* ft = app.add_subcommand("ft-check", "detailed fluctuation theorem -> ft_points.csv");
    add_common(ft, ft_o);

    auto* hist = app.add_subcommand("histogram", "entropy-production histogram -> histogram.csv");
    add_common(hist, hist_o);
    hist->add_option("--nbar", hist_o.nbar, "mean photon number override");
    hist->add_option("--time", hist_time, "histogram time (us)");
    hist->add_option("--bins", hist_bins, "number of bins");

    auto* sweep = app.add_subcommand("efficacy-sweep", "efficacy vs damping -> efficacy_sweep.csv");
    add_common(sweep, sweep_o);
    sweep->add_option("--gamma1-over-kappa", sweep_ratios, "sweep values of gamma1/kappa")
        ->delimiter(',');

    auto* tpm = app.add_subcommand("tpm", "closed-system two-point-measurement reference -> tpm.csv");
    add_common(tpm, tpm_o);

    CLI11_PARSE(app, argc, argv);

    const CommonOpts* opts = nullptr;
    if (sim->parsed()) opts = &sim_o;
    else if (ft->parsed()) opts = &ft_o;
    else if (hist->parsed()) opts = &hist_o;
    else if (sweep->parsed()) opts = &sweep_o;
    else opts = &tpm_o;

    qtherm_config* cfg = nullptr;
    if (make_config(*opts, &cfg) != 0) return die("config");

    qtherm_status st = QTHERM_OK;
    if (sim->parsed()) st = qtherm_run_simulate(cfg, opts->out_dir.c_str());
    else if (ft->parsed()) st = qtherm_run_ft_check(cfg, opts->out_dir.c_str());
    else if (hist->parsed()) st = qtherm_run_histogram(cfg, hist_time, hist_bins, opts->out_dir.c_str());
    else if (sweep->parsed()) {
        if (sweep_ratios.empty()) sweep_ratios = {0.0, 0.02, 0.04, 0.06, 0.08, 0.1};
        st = qtherm_run_efficacy_sweep(cfg, sweep_ratios.data(), sweep_ratios.size(),
                                       opts->out_dir.c_str());
    } else st = qtherm_run_tpm(cfg, opts->out_dir.c_str());

    qtherm_config_free(cfg);
    if (st != QTHERM_OK) return die("run");
    std::printf("wrote outputs to %s\n", opts->out_dir.c_str());
    return 0;
}
