#include "irvd/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "irvd/rng.hpp"

namespace irvd::scenario {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

std::string summary_text(const RunSummary& s) {
    std::string out;
    out += "hit_fraction=" + fmt(s.hit_fraction) + "\n";
    out += "load_fraction=" + fmt(s.load_fraction) + "\n";
    out += std::string("detected=") + (s.detected ? "true" : "false") + "\n";
    out += "tx_type_code=" + std::to_string(s.tx_type_code) + "\n";
    out += "tx_density_code=" + std::to_string(s.tx_density_code) + "\n";
    out += std::string("decode_status=") + codec::to_string(s.status) + "\n";
    out += "rx_type_code=" + std::to_string(s.rx_type_code) + "\n";
    out += "rx_density_code=" + std::to_string(s.rx_density_code) + "\n";
    out += std::string("match=") + (s.match ? "true" : "false") + "\n";
    return out;
}

RunArtifacts run_scenario(const ScenarioConfig& cfg, const fs::path& out_dir) {
    cfg.validate();
    fs::create_directories(out_dir);

    // fixed sub-seed derivation: emission, binding and noise streams are
    // independent, so changing one knob never perturbs the other stages
    dispersion::EmissionParams emission = cfg.emission;
    emission.seed = mix_seed(cfg.master_seed, seed_tag::emission);
    panel::BindingConfig binding = cfg.binding;
    binding.seed = mix_seed(cfg.master_seed, seed_tag::binding);
    const std::uint64_t noise_seed = mix_seed(cfg.master_seed, seed_tag::noise);

    const auto outcomes = dispersion::run_emission(emission, cfg.wall_distance_m, cfg.air);
    const auto hits = panel::deposit(outcomes, cfg.panel_geom);
    const auto bound = panel::bind(hits, binding);
    const auto load = panel::summarize_load(bound);

    codec::VirusMessage message{cfg.type_code, load.density_code};
    const auto schedule = codec::encode_message(message, cfg.timing);
    const auto trace = steering::run_control(cfg.esc, schedule, cfg.duration_s, cfg.power_model,
                                             cfg.noise_sigma, noise_seed);
    const auto decoded =
        codec::decode_trace(trace, cfg.timing, codec::kDefaultGuardTimeS,
                            codec::kDefaultDipThreshold,
                            2.0 * kPi / cfg.esc.dither_frequency_rad_s);

    RunArtifacts artifacts;
    artifacts.heatmap_path = out_dir / "heatmap.csv";
    artifacts.bound_map_path = out_dir / "bound_map.csv";
    artifacts.trace_path = out_dir / "trace.csv";
    artifacts.decode_path = out_dir / "decode.csv";

    write_file(artifacts.heatmap_path, panel::grid_csv(hits.counts, hits.rows, hits.cols,
                                                       cfg.panel_geom, cfg.wall_distance_m));
    write_file(artifacts.bound_map_path, panel::grid_csv(bound.bound, bound.rows, bound.cols,
                                                         cfg.panel_geom, cfg.wall_distance_m));
    write_file(artifacts.trace_path, steering::trace_csv(trace));
    write_file(artifacts.decode_path, codec::decode_report_csv(decoded));
    write_file(out_dir / "effective_config.toml", config::to_toml(cfg));

    RunSummary& s = artifacts.summary;
    s.hit_fraction = emission.count == 0
                         ? 0.0
                         : static_cast<double>(hits.total_impacts_on_panel) /
                               static_cast<double>(emission.count);
    s.load_fraction = load.load_fraction;
    s.detected = load.detected;
    s.tx_type_code = message.type_code;
    s.tx_density_code = message.density_code;
    s.status = decoded.status;
    if (decoded.message) {
        s.rx_type_code = decoded.message->type_code;
        s.rx_density_code = decoded.message->density_code;
    }
    s.match = decoded.message && *decoded.message == message;

    write_file(out_dir / "summary.txt", summary_text(s));
    return artifacts;
}

std::vector<DistanceRow> sweep_distance(const ScenarioConfig& cfg,
                                        const std::vector<double>& distances_m,
                                        const fs::path& out_dir) {
    if (distances_m.empty()) throw std::invalid_argument("sweep_distance: no distances given");
    fs::create_directories(out_dir);

    std::vector<DistanceRow> rows;
    std::string csv = "distance_m,hit_fraction,load_fraction,density_code\n";
    for (double d : distances_m) {
        ScenarioConfig run_cfg = cfg;
        run_cfg.wall_distance_m = d;
        char name[48];
        std::snprintf(name, sizeof(name), "distance_%g", d);
        const RunArtifacts art = run_scenario(run_cfg, out_dir / name);
        DistanceRow row{d, art.summary.hit_fraction, art.summary.load_fraction,
                        art.summary.tx_density_code};
        rows.push_back(row);
        csv += fmt(row.distance_m) + "," + fmt(row.hit_fraction) + "," +
               fmt(row.load_fraction) + "," + std::to_string(row.density_code) + "\n";
    }
    write_file(out_dir / "sweep_distance.csv", csv);
    return rows;
}

NoiseRow noise_trials(const ScenarioConfig& cfg, double sigma, int trials) {
    if (trials < 1) throw std::invalid_argument("noise_trials: trials must be >= 1");
    NoiseRow row;
    row.sigma = sigma;
    row.trials = trials;
    for (int trial = 0; trial < trials; ++trial) {
        // same message and noise substream for trial k at every sigma
        const std::uint64_t trial_seed = mix_seed(cfg.master_seed, seed_tag::trial + trial);
        Rng msg_rng(trial_seed);
        const int raw = static_cast<int>(msg_rng.next_u64() % 32);
        codec::VirusMessage message{(raw >> 3) & 3, raw & 7};

        const auto schedule = codec::encode_message(message, cfg.timing);
        const auto trace =
            steering::run_control(cfg.esc, schedule, cfg.duration_s, cfg.power_model, sigma,
                                  mix_seed(trial_seed, seed_tag::noise));
        const auto decoded =
            codec::decode_trace(trace, cfg.timing, codec::kDefaultGuardTimeS,
                                codec::kDefaultDipThreshold,
                                2.0 * kPi / cfg.esc.dither_frequency_rad_s);
        const bool ok = decoded.status == codec::DecodeStatus::ok && decoded.message &&
                        *decoded.message == message;
        if (!ok) ++row.errors;
    }
    row.error_rate = static_cast<double>(row.errors) / trials;
    return row;
}

std::vector<NoiseRow> sweep_noise(const ScenarioConfig& cfg, const std::vector<double>& sigmas,
                                  int trials_per_sigma, const fs::path& out_dir) {
    if (sigmas.empty()) throw std::invalid_argument("sweep_noise: no sigmas given");
    fs::create_directories(out_dir);

    std::vector<NoiseRow> rows;
    std::string csv = "sigma,trials,errors,error_rate\n";
    for (double sigma : sigmas) {
        if (!(sigma >= 0.0)) throw std::invalid_argument("sweep_noise: sigma must be >= 0");
        const NoiseRow row = noise_trials(cfg, sigma, trials_per_sigma);
        rows.push_back(row);
        csv += fmt(row.sigma) + "," + std::to_string(row.trials) + "," +
               std::to_string(row.errors) + "," + fmt(row.error_rate) + "\n";
    }
    write_file(out_dir / "sweep_noise.csv", csv);
    return rows;
}

}  // namespace irvd::scenario
