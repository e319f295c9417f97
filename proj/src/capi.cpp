#include "qtherm/qtherm_c.h"

#include <cstring>
#include <new>
#include <string>

#include "qtherm/ensemble.hpp"

struct qtherm_config {
    qtherm::RunConfig cfg;
};

namespace {

thread_local std::string g_last_error;

qtherm_status fail(qtherm_status code, const char* what) {
    g_last_error = what ? what : "unknown error";
    return code;
}

template <typename Fn>
qtherm_status guarded(Fn&& fn) {
    try {
        fn();
        return QTHERM_OK;
    } catch (const std::invalid_argument& e) {
        return fail(QTHERM_ERR_CONFIG, e.what());
    } catch (const std::domain_error& e) {
        return fail(QTHERM_ERR_DOMAIN, e.what());
    } catch (const std::out_of_range& e) {
        return fail(QTHERM_ERR_DOMAIN, e.what());
    } catch (const std::bad_alloc&) {
        return fail(QTHERM_ERR_RUNTIME, "out of memory");
    } catch (const std::exception& e) {
        // I/O failures surface as runtime_error with a path in the message.
        return std::strstr(e.what(), "cannot open") ? fail(QTHERM_ERR_IO, e.what())
                                                    : fail(QTHERM_ERR_RUNTIME, e.what());
    }
}

qtherm_status require(bool ok, const char* what) {
    return ok ? QTHERM_OK : fail(QTHERM_ERR_CONFIG, what);
}

}  // namespace

extern "C" {

const char* qtherm_version(void) { return "0.1.0"; }

const char* qtherm_last_error(void) { return g_last_error.c_str(); }

qtherm_status qtherm_config_create(qtherm_config** out) {
    if (require(out != nullptr, "null output pointer")) return QTHERM_ERR_CONFIG;
    return guarded([&] {
        auto* c = new qtherm_config;
        c->cfg.resolve();
        *out = c;
    });
}

qtherm_status qtherm_config_load(const char* path, qtherm_config** out) {
    if (require(path && out, "null argument")) return QTHERM_ERR_CONFIG;
    return guarded([&] { *out = new qtherm_config{qtherm::parse_config_file(path)}; });
}

qtherm_status qtherm_config_from_json(const char* json_text, qtherm_config** out) {
    if (require(json_text && out, "null argument")) return QTHERM_ERR_CONFIG;
    return guarded([&] { *out = new qtherm_config{qtherm::parse_config_json(json_text)}; });
}

qtherm_status qtherm_config_merge_json(qtherm_config* cfg, const char* json_text) {
    if (require(cfg && json_text, "null argument")) return QTHERM_ERR_CONFIG;
    return guarded([&] { qtherm::merge_config_json(cfg->cfg, json_text); });
}

qtherm_status qtherm_config_to_json(const qtherm_config* cfg, char** out_json) {
    if (require(cfg && out_json, "null argument")) return QTHERM_ERR_CONFIG;
    return guarded([&] {
        const std::string s = cfg->cfg.to_json();
        char* buf = new char[s.size() + 1];
        std::memcpy(buf, s.c_str(), s.size() + 1);
        *out_json = buf;
    });
}

void qtherm_config_free(qtherm_config* cfg) { delete cfg; }

void qtherm_string_free(char* s) { delete[] s; }

qtherm_status qtherm_measurement_rate(double chi, double kappa, double nbar, double* out) {
    if (require(out != nullptr, "null output pointer")) return QTHERM_ERR_CONFIG;
    return guarded([&] { *out = qtherm::measurement_rate(chi, kappa, nbar); });
}

qtherm_status qtherm_run_simulate(const qtherm_config* cfg, const char* out_dir) {
    if (require(cfg && out_dir, "null argument")) return QTHERM_ERR_CONFIG;
    return guarded([&] { qtherm::cmd_simulate(cfg->cfg, out_dir); });
}

qtherm_status qtherm_run_ft_check(const qtherm_config* cfg, const char* out_dir) {
    if (require(cfg && out_dir, "null argument")) return QTHERM_ERR_CONFIG;
    return guarded([&] { qtherm::cmd_ft_check(cfg->cfg, out_dir); });
}

qtherm_status qtherm_run_histogram(const qtherm_config* cfg, double time_us, int bins,
                                   const char* out_dir) {
    if (require(cfg && out_dir, "null argument")) return QTHERM_ERR_CONFIG;
    return guarded([&] { qtherm::cmd_histogram(cfg->cfg, time_us, bins, out_dir); });
}

qtherm_status qtherm_run_efficacy_sweep(const qtherm_config* cfg, const double* gamma1_over_kappa,
                                        size_t count, const char* out_dir) {
    if (require(cfg && out_dir && gamma1_over_kappa, "null argument")) return QTHERM_ERR_CONFIG;
    return guarded([&] {
        qtherm::cmd_efficacy_sweep(cfg->cfg,
                                   std::vector<double>(gamma1_over_kappa, gamma1_over_kappa + count),
                                   out_dir);
    });
}

qtherm_status qtherm_run_tpm(const qtherm_config* cfg, const char* out_dir) {
    if (require(cfg && out_dir, "null argument")) return QTHERM_ERR_CONFIG;
    return guarded([&] { qtherm::cmd_tpm(cfg->cfg, out_dir); });
}

}  // extern "C"
