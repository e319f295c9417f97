#pragma once

#include <cstdint>
#include <string>

#include "qtherm/homodyne.hpp"
#include "qtherm/protocol.hpp"
#include "qtherm/trajectory.hpp"

// Run configuration: flat JSON object, strict schema (unknown keys rejected),
// frequencies given as ordinary MHz values and converted to angular units on
// ingestion. Defaults are applied and echoed back for provenance.

namespace qtherm {

struct RunConfig {
    // physics
    double omega0_mhz = 4000.0;
    double delta_omega_mhz = 400.0;
    double omega_rabi_mhz = 1.0;
    double chi_mhz = -0.5;  // may be negative
    double kappa_mhz = 10.0;
    double nbar = 0.4;
    double beta_in_inverse_omega0 = 1.0;
    double gamma1_over_kappa = 0.0;
    // numerics
    double dt_ns = 0.0;       // 0 = auto: min(1 ns, cap/Gamma_d), snapped to divide tau
    bool dt_explicit = false; // set when dt_ns came from user input; auto dt re-derives on merge
    double tau_us = 2.4;
    double quench_time_us = 0.0;  // 0 = tau/2
    long trajectories = 1000;
    int record_stride = 10;
    std::string integrator = "povm";  // "povm" | "sme"
    std::uint64_t master_seed = 1;
    int threads = 0;  // 0 = auto

    // derived on resolve()
    double dt_us = 0.0;
    double gamma_d = 0.0;  // rad/us
    double beta = 0.0;     // us

    // Applies defaults, derives dt/gamma_d/beta, and enforces physical
    // constraints. Throws std::invalid_argument naming the offending field.
    void resolve();

    ProtocolParams protocol() const;
    MeasurementModel measurement_model() const;
    TrajectoryConfig trajectory_config(std::uint64_t stream_id, bool store_full_record = false) const;
    Integrator integrator_kind() const;

    std::string to_json() const;  // resolved echo, stable key order
};

RunConfig parse_config_json(const std::string& json_text);
RunConfig parse_config_file(const std::string& path);

// Merges a flat JSON fragment of overrides into cfg and re-resolves.
void merge_config_json(RunConfig& cfg, const std::string& json_text);

}  // namespace qtherm
