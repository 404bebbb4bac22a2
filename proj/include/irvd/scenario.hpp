#ifndef IRVD_SCENARIO_HPP
#define IRVD_SCENARIO_HPP

#include <filesystem>
#include <vector>

#include "irvd/config.hpp"

// End-to-end pipeline: sample -> fly -> deposit -> bind -> summarize ->
// encode -> run_control -> detect -> decode, with deterministic sub-seed
// derivation from the master seed and CSV artifacts per stage.

namespace irvd::scenario {

struct RunSummary {
    double hit_fraction = 0.0;    // in-panel impacts / emitted droplets
    double load_fraction = 0.0;
    bool detected = false;
    int tx_type_code = 0;
    int tx_density_code = 0;
    codec::DecodeStatus status = codec::DecodeStatus::ok;
    int rx_type_code = -1;    // -1 when no message decoded
    int rx_density_code = -1;
    bool match = false;
};

struct RunArtifacts {
    std::filesystem::path heatmap_path;
    std::filesystem::path bound_map_path;
    std::filesystem::path trace_path;
    std::filesystem::path decode_path;
    RunSummary summary;
};

std::string summary_text(const RunSummary& summary);

// Full pipeline; writes heatmap.csv, bound_map.csv, trace.csv, decode.csv,
// summary.txt and the effective config into out_dir.
RunArtifacts run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

struct DistanceRow {
    double distance_m = 0.0;
    double hit_fraction = 0.0;
    double load_fraction = 0.0;
    int density_code = 0;
};

// Repeats run_scenario per distance with identical sub-seeds; writes
// sweep_distance.csv plus one artifact directory per distance.
std::vector<DistanceRow> sweep_distance(const ScenarioConfig& cfg,
                                        const std::vector<double>& distances_m,
                                        const std::filesystem::path& out_dir);

struct NoiseRow {
    double sigma = 0.0;
    int trials = 0;
    int errors = 0;
    double error_rate = 0.0;
};

// Message error rate vs noise sigma over uniformly random messages. Trial k
// uses the same message and noise substream at every sigma (paired seeds).
// The dispersion stage is bypassed: this harness drives the codec directly.
std::vector<NoiseRow> sweep_noise(const ScenarioConfig& cfg, const std::vector<double>& sigmas,
                                  int trials_per_sigma, const std::filesystem::path& out_dir);

// in-memory variant used by the sweep and the robustness tests
NoiseRow noise_trials(const ScenarioConfig& cfg, double sigma, int trials);

}  // namespace irvd::scenario

#endif  // IRVD_SCENARIO_HPP
