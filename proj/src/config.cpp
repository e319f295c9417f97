#include "qtherm/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qtherm {

using nlohmann::json;

void RunConfig::resolve() {
    auto fail = [](const std::string& field, const std::string& why) {
        throw std::invalid_argument("config field '" + field + "': " + why);
    };
    if (!(omega0_mhz > 0.0)) fail("omega0_mhz", "must be > 0");
    if (delta_omega_mhz < 0.0) fail("delta_omega_mhz", "must be >= 0");
    if (omega_rabi_mhz < 0.0) fail("omega_rabi_mhz", "must be >= 0");
    if (!(kappa_mhz > 0.0)) fail("kappa_mhz", "must be > 0");
    if (nbar < 0.0) fail("nbar", "must be >= 0");
    if (!(beta_in_inverse_omega0 > 0.0)) fail("beta_in_inverse_omega0", "must be > 0");
    if (gamma1_over_kappa < 0.0) fail("gamma1_over_kappa", "must be >= 0");
    if (!(tau_us > 0.0)) fail("tau_us", "must be > 0");
    if (trajectories < 1) fail("trajectories", "must be >= 1");
    if (record_stride < 1) fail("record_stride", "must be >= 1");
    if (integrator != "povm" && integrator != "sme") fail("integrator", "must be \"povm\" or \"sme\"");
    if (threads < 0) fail("threads", "must be >= 0");
    if (quench_time_us == 0.0) quench_time_us = 0.5 * tau_us;
    if (!(quench_time_us > 0.0 && quench_time_us < tau_us))
        fail("quench_time_us", "must lie strictly inside (0, tau_us)");

    gamma_d = measurement_rate(mhz_to_angular(chi_mhz), mhz_to_angular(kappa_mhz), nbar);
    beta = beta_in_inverse_omega0 / mhz_to_angular(omega0_mhz);

    if (dt_ns == 0.0 || !dt_explicit) {
        // auto: 1 ns, reduced when the weak-measurement cap demands it,
        // then snapped so that tau is an even number of steps.
        double target_us = 1e-3;
        if (gamma_d > 0.0) target_us = std::min(target_us, kWeakMeasurementCap / gamma_d);
        long n = static_cast<long>(std::ceil(tau_us / target_us));
        if (n % 2 != 0) ++n;
        dt_us = tau_us / static_cast<double>(n);
        dt_ns = dt_us * 1e3;
    } else {
        if (!(dt_ns > 0.0)) fail("dt_ns", "must be > 0");
        dt_us = dt_ns * 1e-3;
        if (gamma_d * dt_us > kWeakMeasurementCap)
            fail("dt_ns", "dt * Gamma_d exceeds the weak-measurement cap 0.05 for this nbar");
        const double steps = tau_us / dt_us;
        if (std::abs(steps - std::round(steps)) > 1e-9 * steps)
            fail("dt_ns", "tau_us must be an integer number of steps");
    }
}

ProtocolParams RunConfig::protocol() const {
    ProtocolParams p;
    p.omega0 = mhz_to_angular(omega0_mhz);
    p.delta_omega = mhz_to_angular(delta_omega_mhz);
    p.omega_rabi = mhz_to_angular(omega_rabi_mhz);
    p.tau = tau_us;
    p.quench_time = quench_time_us;
    return p;
}

MeasurementModel RunConfig::measurement_model() const {
    return MeasurementModel::make(mhz_to_angular(chi_mhz), mhz_to_angular(kappa_mhz), nbar, dt_us);
}

Integrator RunConfig::integrator_kind() const {
    return integrator == "sme" ? Integrator::BlochSme : Integrator::PovmUpdate;
}

TrajectoryConfig RunConfig::trajectory_config(std::uint64_t stream_id, bool store_full_record) const {
    TrajectoryConfig c;
    c.dt = dt_us;
    c.gamma1 = gamma1_over_kappa * mhz_to_angular(kappa_mhz);
    c.integrator = integrator_kind();
    c.master_seed = master_seed;
    c.stream_id = stream_id;
    c.record_stride = record_stride;
    c.store_full_record = store_full_record;
    return c;
}

namespace {

const char* const kKnownKeys[] = {
    "omega0_mhz", "delta_omega_mhz", "omega_rabi_mhz", "chi_mhz", "kappa_mhz",
    "nbar", "beta_in_inverse_omega0", "gamma1_over_kappa", "dt_ns", "tau_us",
    "quench_time_us", "trajectories", "record_stride", "integrator",
    "master_seed", "threads"};

void apply_json(RunConfig& cfg, const json& j) {
    if (!j.is_object()) throw std::invalid_argument("config: top level must be a JSON object");
    for (const auto& [key, val] : j.items()) {
        bool known = false;
        for (const char* k : kKnownKeys) known = known || key == k;
        if (!known) throw std::invalid_argument("config: unknown key '" + key + "'");
        try {
            if (key == "omega0_mhz") cfg.omega0_mhz = val.get<double>();
            else if (key == "delta_omega_mhz") cfg.delta_omega_mhz = val.get<double>();
            else if (key == "omega_rabi_mhz") cfg.omega_rabi_mhz = val.get<double>();
            else if (key == "chi_mhz") cfg.chi_mhz = val.get<double>();
            else if (key == "kappa_mhz") cfg.kappa_mhz = val.get<double>();
            else if (key == "nbar") cfg.nbar = val.get<double>();
            else if (key == "beta_in_inverse_omega0") cfg.beta_in_inverse_omega0 = val.get<double>();
            else if (key == "gamma1_over_kappa") cfg.gamma1_over_kappa = val.get<double>();
            else if (key == "dt_ns") { cfg.dt_ns = val.get<double>(); cfg.dt_explicit = true; }
            else if (key == "tau_us") cfg.tau_us = val.get<double>();
            else if (key == "quench_time_us") cfg.quench_time_us = val.get<double>();
            else if (key == "trajectories") cfg.trajectories = val.get<long>();
            else if (key == "record_stride") cfg.record_stride = val.get<int>();
            else if (key == "integrator") cfg.integrator = val.get<std::string>();
            else if (key == "master_seed") cfg.master_seed = val.get<std::uint64_t>();
            else if (key == "threads") cfg.threads = val.get<int>();
        } catch (const json::exception&) {
            throw std::invalid_argument("config field '" + key + "': wrong type");
        }
    }
}

}  // namespace

RunConfig parse_config_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
    }
    RunConfig cfg;
    apply_json(cfg, j);
    cfg.resolve();
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_json(ss.str());
}

void merge_config_json(RunConfig& cfg, const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
    }
    apply_json(cfg, j);
    cfg.resolve();
}

std::string RunConfig::to_json() const {
    json j;
    j["omega0_mhz"] = omega0_mhz;
    j["delta_omega_mhz"] = delta_omega_mhz;
    j["omega_rabi_mhz"] = omega_rabi_mhz;
    j["chi_mhz"] = chi_mhz;
    j["kappa_mhz"] = kappa_mhz;
    j["nbar"] = nbar;
    j["beta_in_inverse_omega0"] = beta_in_inverse_omega0;
    j["gamma1_over_kappa"] = gamma1_over_kappa;
    j["dt_ns"] = dt_ns;
    j["tau_us"] = tau_us;
    j["quench_time_us"] = quench_time_us;
    j["trajectories"] = trajectories;
    j["record_stride"] = record_stride;
    j["integrator"] = integrator;
    j["master_seed"] = master_seed;
    j["threads"] = threads;
    return j.dump(2);
}

}  // namespace qtherm
