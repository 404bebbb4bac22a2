// Acceptance suite: end-to-end checks of the shipped defaults, one line per
// criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "irvd/rng.hpp"
#include "irvd/scenario.hpp"

using namespace irvd;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path out_root() {
    const fs::path dir = fs::temp_directory_path() / "irvd_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// ---- 1: ESC convergence -----------------------------------------------

void criterion_1() {
    const auto start = std::chrono::steady_clock::now();
    const steering::EscParams params;
    const auto trace =
        steering::run_control(params, steering::FlickSchedule{}, 8.0, steering::GaussianLobe{});

    double t_power = -1.0;
    double last_band_violation = 0.0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (t_power < 0.0 && trace.power[i] >= 0.99) t_power = trace.t_s[i];
        if (trace.t_s[i] >= 1.5 && std::abs(trace.theta_deg[i] - 50.0) > 0.7)
            last_band_violation = trace.t_s[i];
    }
    const double runtime = seconds_since(start);

    const bool power_ok = t_power >= 0.0 && t_power <= 1.5;
    const bool angle_ok = last_band_violation == 0.0;
    const bool runtime_ok = runtime < 1.0;

    char detail[256];
    std::snprintf(detail, sizeof(detail),
                  "power>=0.99 at t=%.3fs (<=1.5s: %s); |theta-50|<=0.7 from 1.5s: %s (last "
                  "violation %.3fs); runtime %.2fs",
                  t_power, power_ok ? "yes" : "no", angle_ok ? "yes" : "no",
                  last_band_violation, runtime);
    report("C1 esc-convergence", power_ok && angle_ok && runtime_ok, detail);
}

// ---- 2: flick observable ----------------------------------------------

void criterion_2() {
    const auto start = std::chrono::steady_clock::now();
    const steering::EscParams params;
    steering::FlickSchedule schedule;
    schedule.events.push_back({2.0, 0.2, -1.0});
    const auto trace =
        steering::run_control(params, schedule, 4.0, steering::GaussianLobe{});

    double dev_sum = 0.0;
    int dev_n = 0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (trace.t_s[i] >= 2.0 && trace.t_s[i] < 2.2) {
            dev_sum += 50.0 - trace.theta_deg[i];
            ++dev_n;
        }
    }
    const double mean_dev = dev_sum / dev_n;
    // guard 1.5 s: the loop is converged by then (see C1's power clause), and
    // the baseline window must end before this flick starts
    const auto scan = codec::detect_dips(trace, 1.5);
    const double depth_fraction =
        scan.dips.empty() ? 0.0 : scan.dips[0].depth / scan.baseline;
    const double runtime = seconds_since(start);

    const bool dev_ok = mean_dev >= 0.7 && mean_dev <= 1.3;
    const bool dip_ok = scan.dips.size() == 1 && depth_fraction >= 0.03;
    const bool runtime_ok = runtime < 1.0;

    char detail[256];
    std::snprintf(detail, sizeof(detail),
                  "mean in-flick deviation %.3f deg (1 +/- 0.3); dip depth %.1f%% of baseline "
                  "(>=3%%, %zu dip); runtime %.2fs",
                  mean_dev, 100.0 * depth_fraction, scan.dips.size(), runtime);
    report("C2 flick-observable", dev_ok && dip_ok && runtime_ok, detail);
}

// ---- 3: exhaustive round trip -----------------------------------------

void criterion_3() {
    const auto start = std::chrono::steady_clock::now();
    const steering::EscParams params;
    const std::array<std::array<double, 5>, 2> schedules = {
        {{2.5, 3.1, 4.1, 5.1, 6.1}, {2.1, 3.1, 4.1, 5.1, 6.1}}};
    int passed = 0;
    int total = 0;
    for (const auto& times : schedules) {
        codec::TimingConfig timing;
        timing.bit_times_s = times;
        for (int m = 0; m < 32; ++m) {
            ++total;
            const codec::VirusMessage msg{(m >> 3) & 3, m & 7};
            const auto trace = steering::run_control(
                params, codec::encode_message(msg, timing), 8.0, steering::GaussianLobe{});
            const auto decoded = codec::decode_trace(trace, timing);
            if (decoded.status == codec::DecodeStatus::ok && decoded.message &&
                *decoded.message == msg)
                ++passed;
        }
    }
    const double runtime = seconds_since(start);
    char detail[128];
    std::snprintf(detail, sizeof(detail), "%d/%d messages decoded (both schedules); runtime %.1fs",
                  passed, total, runtime);
    report("C3 exhaustive-round-trip", passed == total && runtime < 30.0, detail);
}

// ---- 4: noise robustness ----------------------------------------------

void criterion_4() {
    const auto start = std::chrono::steady_clock::now();
    scenario::ScenarioConfig cfg;
    cfg.master_seed = 2025;

    const auto zero = scenario::noise_trials(cfg, 0.002, 100);
    const bool zero_ok = zero.errors == 0;

    const std::vector<double> sigmas{0.0, 0.002, 0.01, 0.05};
    std::vector<int> errors;
    bool monotone = true;
    std::string curve;
    for (double sigma : sigmas) {
        const auto row = scenario::noise_trials(cfg, sigma, 200);
        if (!errors.empty() && row.errors < errors.back()) monotone = false;
        errors.push_back(row.errors);
        char buf[48];
        std::snprintf(buf, sizeof(buf), " %g:%d/200", sigma, row.errors);
        curve += buf;
    }
    const double runtime = seconds_since(start);
    char detail[256];
    std::snprintf(detail, sizeof(detail),
                  "sigma=0.002 errors %d/100; error curve%s monotone=%s; runtime %.1fs",
                  zero.errors, curve.c_str(), monotone ? "yes" : "no", runtime);
    report("C4 noise-robustness", zero_ok && monotone && runtime < 300.0, detail);
}

// ---- 5: dispersion oracle ---------------------------------------------

void criterion_5() {
    const auto start = std::chrono::steady_clock::now();
    dispersion::EmissionParams params;
    params.count = 1000;
    params.seed = 314159;
    dispersion::AirModel air;
    air.drag_enabled = false;

    const auto droplets = dispersion::sample_droplets(params, air.droplet_density);
    int impacts = 0;
    double worst = 0.0;
    for (const auto& d : droplets) {
        const auto out = dispersion::simulate_flight(d, 1.0, air);
        if (!dispersion::is_impact(out)) continue;
        ++impacts;
        const auto& imp = std::get<dispersion::Impact>(out);
        const double t_ref = 1.0 / d.velocity.x;
        const double y_ref = d.velocity.y * t_ref;
        const double z_ref = d.velocity.z * t_ref - 0.5 * air.gravity * t_ref * t_ref;
        const auto rel = [](double a, double b) {
            return std::abs(a - b) / std::max(std::abs(b), 1e-6);
        };
        worst = std::max({worst, rel(imp.t_s, t_ref), rel(imp.y_m, y_ref), rel(imp.z_m, z_ref)});
    }
    const double runtime = seconds_since(start);
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "%d impacts, worst relative error %.2e (<=1e-6); runtime %.1fs", impacts,
                  worst, runtime);
    report("C5 dispersion-oracle", impacts > 900 && worst <= 1e-6 && runtime < 5.0, detail);
}

// ---- 6: distance comparison -------------------------------------------

void criterion_6(const fs::path& out_dir) {
    const auto start = std::chrono::steady_clock::now();
    scenario::ScenarioConfig cfg;  // full default emission, 50,000 droplets
    cfg.master_seed = 99;

    struct Stats {
        double hit_fraction = 0.0;
        std::uint32_t peak = 0;
    };
    Stats stats[2];
    const double distances[2] = {1.0, 4.0};
    for (int i = 0; i < 2; ++i) {
        dispersion::EmissionParams emission = cfg.emission;
        emission.seed = mix_seed(cfg.master_seed, seed_tag::emission);
        const auto outcomes = dispersion::run_emission(emission, distances[i], cfg.air);
        const auto hits = panel::deposit(outcomes, cfg.panel_geom);
        stats[i].hit_fraction = static_cast<double>(hits.total_impacts_on_panel) /
                                static_cast<double>(emission.count);
        for (auto c : hits.counts) stats[i].peak = std::max(stats[i].peak, c);
        char name[32];
        std::snprintf(name, sizeof(name), "heatmap_%gm.csv", distances[i]);
        std::ofstream(out_dir / name)
            << panel::grid_csv(hits.counts, hits.rows, hits.cols, cfg.panel_geom, distances[i]);
    }
    const double runtime = seconds_since(start);
    const bool ok = stats[0].hit_fraction > stats[1].hit_fraction &&
                    stats[0].peak > stats[1].peak;
    char detail[224];
    std::snprintf(detail, sizeof(detail),
                  "hit fraction 1m=%.4f vs 4m=%.4f; peak tile 1m=%u vs 4m=%u; heatmaps in %s; "
                  "runtime %.1fs",
                  stats[0].hit_fraction, stats[1].hit_fraction, stats[0].peak, stats[1].peak,
                  out_dir.c_str(), runtime);
    report("C6 distance-comparison", ok && runtime < 30.0, detail);
}

// ---- 7: binding oracle --------------------------------------------------

void criterion_7() {
    const auto start = std::chrono::steady_clock::now();
    struct Case {
        int hits;
        int capacity;
        double p_bind;
    };
    const Case cases[] = {{10, 160, 0.5}, {100, 160, 0.8}, {2000, 160, 1.0}};
    bool all_ok = true;
    std::string detail;

    for (const Case& c : cases) {
        // implementation mean over independent seeds
        panel::TileHitMap map;
        map.rows = 1;
        map.cols = 1;
        map.counts = {static_cast<std::uint32_t>(c.hits)};
        const int impl_trials = 200000;
        double sum = 0.0, sum2 = 0.0;
        for (int t = 0; t < impl_trials; ++t) {
            panel::BindingConfig bc;
            bc.receptors_per_tile = c.capacity;
            bc.p_bind = c.p_bind;
            bc.seed = mix_seed(808, t);
            const double b = panel::bind(map, bc).bound[0];
            sum += b;
            sum2 += b * b;
        }
        const double impl_mean = sum / impl_trials;
        const double impl_se =
            std::sqrt(std::max(sum2 / impl_trials - impl_mean * impl_mean, 0.0) / impl_trials);

        // brute-force oracle, separate implementation and RNG family
        std::mt19937_64 gen(1234567 + c.hits);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        const int oracle_trials = 1000000;
        double osum = 0.0, osum2 = 0.0;
        for (int t = 0; t < oracle_trials; ++t) {
            int bound = 0;
            for (int k = 0; k < c.hits && bound < c.capacity; ++k) {
                if (uni(gen) < c.p_bind * (c.capacity - bound) / static_cast<double>(c.capacity))
                    ++bound;
            }
            osum += bound;
            osum2 += static_cast<double>(bound) * bound;
        }
        const double oracle_mean = osum / oracle_trials;
        const double oracle_se = std::sqrt(
            std::max(osum2 / oracle_trials - oracle_mean * oracle_mean, 0.0) / oracle_trials);

        const double se = std::sqrt(impl_se * impl_se + oracle_se * oracle_se);
        const double diff = std::abs(impl_mean - oracle_mean);
        const bool ok = diff <= 3.0 * se;
        all_ok = all_ok && ok;
        char buf[120];
        std::snprintf(buf, sizeof(buf), " (%d,%d,%.1f): |%.4f-%.4f|=%.4f vs 3SE=%.4f;",
                      c.hits, c.capacity, c.p_bind, impl_mean, oracle_mean, diff, 3.0 * se);
        detail += buf;
    }
    const double runtime = seconds_since(start);
    char buf[48];
    std::snprintf(buf, sizeof(buf), " runtime %.1fs", runtime);
    detail += buf;
    report("C7 binding-oracle", all_ok && runtime < 60.0, detail.substr(1));
}

// ---- 8: determinism -----------------------------------------------------

void criterion_8(const fs::path& out_dir) {
    const auto start = std::chrono::steady_clock::now();
    scenario::ScenarioConfig cfg;  // full default scenario
    cfg.master_seed = 31337;
    const auto a = scenario::run_scenario(cfg, out_dir / "det_a");
    const auto b = scenario::run_scenario(cfg, out_dir / "det_b");
    const bool ok = slurp(a.heatmap_path) == slurp(b.heatmap_path) &&
                    slurp(a.bound_map_path) == slurp(b.bound_map_path) &&
                    slurp(a.trace_path) == slurp(b.trace_path) &&
                    slurp(a.decode_path) == slurp(b.decode_path) &&
                    slurp(out_dir / "det_a" / "summary.txt") ==
                        slurp(out_dir / "det_b" / "summary.txt");
    const double runtime = seconds_since(start);
    char detail[128];
    std::snprintf(detail, sizeof(detail), "all five artifacts byte-identical: %s; runtime %.1fs",
                  ok ? "yes" : "no", runtime);
    report("C8 determinism", ok, detail);
}

}  // namespace

int main() {
    const fs::path out_dir = out_root();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6(out_dir);
    criterion_7();
    criterion_8(out_dir);
    std::printf("%d/8 criteria passed\n", 8 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
