#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qtherm/analysis.hpp"
#include "qtherm/config.hpp"

// Deterministic parallel ensemble execution and file output. Trajectory k
// always runs on rng stream (master_seed, k), so results are bitwise
// identical for any thread count.

namespace qtherm {

struct OutputBundle {
    struct File {
        std::string path;
        std::string checksum;  // FNV-1a 64, hex
    };
    std::vector<File> files;
};

std::vector<TrajectoryRecord> run_ensemble(const RunConfig& cfg, bool store_full_record = false);

// trajectories.csv + endpoints.csv under dir.
OutputBundle write_outputs(const std::vector<TrajectoryRecord>& records, const std::string& dir);

std::string fnv1a_hex(const std::string& data);
std::string fnv1a_file_hex(const std::string& path);

// Subcommand drivers (simulate / ft-check / histogram / efficacy-sweep / tpm);
// each writes its CSVs plus summary.json and returns the manifest.
OutputBundle cmd_simulate(const RunConfig& cfg, const std::string& out_dir);
OutputBundle cmd_ft_check(const RunConfig& cfg, const std::string& out_dir);
OutputBundle cmd_histogram(const RunConfig& cfg, double time_us, int bins, const std::string& out_dir);
OutputBundle cmd_efficacy_sweep(const RunConfig& cfg, const std::vector<double>& gamma1_over_kappa,
                                const std::string& out_dir);
OutputBundle cmd_tpm(const RunConfig& cfg, const std::string& out_dir);

}  // namespace qtherm
