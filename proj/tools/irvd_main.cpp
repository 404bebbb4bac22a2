// irvd: command-line front end for the IR-VD simulator.
//
//   sneeze          emission + deposit + bind -> heatmap/bound-map CSVs
//   transmit        message -> flick schedule -> received-power trace CSV
//   receive         trace CSV -> dip detection + decode report
//   run             full end-to-end pipeline
//   sweep-distance  run at several emitter distances, compare hit/load
//   sweep-noise     message error rate vs measurement noise

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "irvd/rng.hpp"
#include "irvd/scenario.hpp"

namespace fs = std::filesystem;
using namespace irvd;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitNoSignal = 2;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    double distance = 0.0;
    bool distance_set = false;
    double noise = -1.0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "scenario config file (TOML)");
    cmd->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--seed", opts.seed, "master seed override")
        ->each([&](const std::string&) { opts.seed_set = true; });
    cmd->add_option("--distance", opts.distance, "emitter-to-wall distance in m")
        ->each([&](const std::string&) { opts.distance_set = true; });
    cmd->add_option("--noise", opts.noise, "measurement noise sigma override");
}

scenario::ScenarioConfig load_config(const CommonOpts& opts) {
    scenario::ScenarioConfig cfg;
    if (!opts.config_path.empty()) cfg = scenario::config::load_file(opts.config_path);
    if (opts.seed_set) cfg.master_seed = opts.seed;
    if (opts.distance_set) cfg.wall_distance_m = opts.distance;
    if (opts.noise >= 0.0) cfg.noise_sigma = opts.noise;
    cfg.validate();
    return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cmd_sneeze(const CommonOpts& opts) {
    const auto cfg = load_config(opts);
    fs::create_directories(opts.out_dir);

    dispersion::EmissionParams emission = cfg.emission;
    emission.seed = mix_seed(cfg.master_seed, seed_tag::emission);
    panel::BindingConfig binding = cfg.binding;
    binding.seed = mix_seed(cfg.master_seed, seed_tag::binding);

    const auto outcomes = dispersion::run_emission(emission, cfg.wall_distance_m, cfg.air);
    const auto hits = panel::deposit(outcomes, cfg.panel_geom);
    const auto bound = panel::bind(hits, binding);
    const auto load = panel::summarize_load(bound);

    write_file(fs::path(opts.out_dir) / "heatmap.csv",
               panel::grid_csv(hits.counts, hits.rows, hits.cols, cfg.panel_geom,
                               cfg.wall_distance_m));
    write_file(fs::path(opts.out_dir) / "bound_map.csv",
               panel::grid_csv(bound.bound, bound.rows, bound.cols, cfg.panel_geom,
                               cfg.wall_distance_m));

    std::printf("droplets=%zu impacts_on_panel=%llu hit_fraction=%.6g\n", emission.count,
                static_cast<unsigned long long>(hits.total_impacts_on_panel),
                emission.count ? static_cast<double>(hits.total_impacts_on_panel) /
                                     static_cast<double>(emission.count)
                               : 0.0);
    std::printf("bound=%llu load_fraction=%.6g detected=%s density_code=%d\n",
                static_cast<unsigned long long>(bound.total_bound()), load.load_fraction,
                load.detected ? "true" : "false", load.density_code);
    return 0;
}

int cmd_transmit(const CommonOpts& opts, int density_code) {
    const auto cfg = load_config(opts);
    fs::create_directories(opts.out_dir);

    codec::VirusMessage message{cfg.type_code, density_code};
    const auto schedule = codec::encode_message(message, cfg.timing);
    const auto trace = steering::run_control(
        cfg.esc, schedule, cfg.duration_s, cfg.power_model, cfg.noise_sigma,
        mix_seed(cfg.master_seed, seed_tag::noise));
    write_file(fs::path(opts.out_dir) / "trace.csv", steering::trace_csv(trace));

    auto bits = message.bits();
    std::printf("type_code=%d density_code=%d bits=%d%d%d%d%d trace=%s\n", message.type_code,
                message.density_code, bits[0], bits[1], bits[2], bits[3], bits[4],
                (fs::path(opts.out_dir) / "trace.csv").c_str());
    return 0;
}

int cmd_receive(const CommonOpts& opts, const std::string& trace_path) {
    const auto cfg = load_config(opts);
    fs::create_directories(opts.out_dir);

    const auto trace = steering::parse_trace_csv(read_file(trace_path));
    const auto decoded =
        codec::decode_trace(trace, cfg.timing, codec::kDefaultGuardTimeS,
                            codec::kDefaultDipThreshold,
                            2.0 * kPi / cfg.esc.dither_frequency_rad_s);
    write_file(fs::path(opts.out_dir) / "decode.csv", codec::decode_report_csv(decoded));

    std::printf("status=%s dips=%zu", codec::to_string(decoded.status),
                decoded.dip_events.size());
    if (decoded.message)
        std::printf(" type_code=%d density_code=%d", decoded.message->type_code,
                    decoded.message->density_code);
    std::printf("\n");
    return decoded.status == codec::DecodeStatus::no_signal ? kExitNoSignal : 0;
}

int cmd_run(const CommonOpts& opts) {
    const auto cfg = load_config(opts);
    const auto artifacts = scenario::run_scenario(cfg, opts.out_dir);
    std::fputs(scenario::summary_text(artifacts.summary).c_str(), stdout);
    return artifacts.summary.status == codec::DecodeStatus::no_signal ? kExitNoSignal : 0;
}

int cmd_sweep_distance(const CommonOpts& opts, const std::vector<double>& distances) {
    const auto cfg = load_config(opts);
    const auto rows = scenario::sweep_distance(cfg, distances, opts.out_dir);
    std::printf("distance_m,hit_fraction,load_fraction,density_code\n");
    for (const auto& r : rows)
        std::printf("%g,%.6g,%.6g,%d\n", r.distance_m, r.hit_fraction, r.load_fraction,
                    r.density_code);
    return 0;
}

int cmd_sweep_noise(const CommonOpts& opts, const std::vector<double>& sigmas, int trials) {
    const auto cfg = load_config(opts);
    const auto rows = scenario::sweep_noise(cfg, sigmas, trials, opts.out_dir);
    std::printf("sigma,trials,errors,error_rate\n");
    for (const auto& r : rows)
        std::printf("%g,%d,%d,%.6g\n", r.sigma, r.trials, r.errors, r.error_rate);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"IR-VD simulator: droplet dispersion, receptor binding, "
                 "beam-flick encoding and received-power decoding"};
    app.require_subcommand(1);

    CommonOpts opts;
    int density_code = 0;
    std::string trace_path;
    std::vector<double> distances{1.0, 4.0};
    std::vector<double> sigmas{0.0, 0.002, 0.01, 0.05};
    int trials = 100;

    auto* sneeze = app.add_subcommand("sneeze", "emission, deposit and binding maps");
    add_common(sneeze, opts);

    auto* transmit = app.add_subcommand("transmit", "encode a message into a power trace");
    add_common(transmit, opts);
    transmit->add_option("--density", density_code, "density code to send (0-7)")
        ->check(CLI::Range(0, 7));

    auto* receive = app.add_subcommand("receive", "decode a power trace");
    add_common(receive, opts);
    receive->add_option("trace", trace_path, "trace CSV to decode")->required();

    auto* run = app.add_subcommand("run", "end-to-end scenario");
    add_common(run, opts);

    auto* sweepd = app.add_subcommand("sweep-distance", "compare emitter distances");
    add_common(sweepd, opts);
    sweepd->add_option("--distances", distances, "distances in m")->delimiter(',');

    auto* sweepn = app.add_subcommand("sweep-noise", "message error rate vs noise");
    add_common(sweepn, opts);
    sweepn->add_option("--sigmas", sigmas, "noise sigmas")->delimiter(',');
    sweepn->add_option("--trials", trials, "trials per sigma")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sneeze->parsed()) return cmd_sneeze(opts);
        if (transmit->parsed()) return cmd_transmit(opts, density_code);
        if (receive->parsed()) return cmd_receive(opts, trace_path);
        if (run->parsed()) return cmd_run(opts);
        if (sweepd->parsed()) return cmd_sweep_distance(opts, distances);
        if (sweepn->parsed()) return cmd_sweep_noise(opts, sigmas, trials);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return 0;
}
