#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "irvd/panel.hpp"
#include "irvd/rng.hpp"

using namespace irvd;
using namespace irvd::panel;
using dispersion::FlightOutcome;
using dispersion::Impact;
using dispersion::Miss;
using dispersion::MissReason;

namespace {

std::vector<FlightOutcome> impacts(std::initializer_list<std::pair<double, double>> yz) {
    std::vector<FlightOutcome> out;
    for (auto [y, z] : yz) out.push_back(Impact{y, z, 0.1});
    return out;
}

// independent re-implementation of the sequential binding rule, used as a
// brute-force oracle (different RNG family on purpose)
double oracle_mean_bound(int hits, int capacity, double p_bind, int trials,
                         std::uint64_t seed, double* stderr_out) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double sum = 0.0, sum2 = 0.0;
    for (int t = 0; t < trials; ++t) {
        int bound = 0;
        for (int k = 0; k < hits && bound < capacity; ++k) {
            const double p = p_bind * (capacity - bound) / static_cast<double>(capacity);
            if (uni(gen) < p) ++bound;
        }
        sum += bound;
        sum2 += static_cast<double>(bound) * bound;
    }
    const double mean = sum / trials;
    const double var = sum2 / trials - mean * mean;
    if (stderr_out) *stderr_out = std::sqrt(std::max(var, 0.0) / trials);
    return mean;
}

// mean of the production bind() over many seeds, one tile
double impl_mean_bound(int hits, int capacity, double p_bind, int trials,
                       double* stderr_out) {
    TileHitMap map;
    map.rows = 1;
    map.cols = 1;
    map.counts = {static_cast<std::uint32_t>(hits)};
    map.total_impacts_on_panel = static_cast<std::uint64_t>(hits);
    double sum = 0.0, sum2 = 0.0;
    for (int t = 0; t < trials; ++t) {
        BindingConfig cfg;
        cfg.receptors_per_tile = capacity;
        cfg.p_bind = p_bind;
        cfg.seed = mix_seed(4242, t);
        const BoundState state = bind(map, cfg);
        sum += state.bound[0];
        sum2 += static_cast<double>(state.bound[0]) * state.bound[0];
    }
    const double mean = sum / trials;
    const double var = sum2 / trials - mean * mean;
    if (stderr_out) *stderr_out = std::sqrt(std::max(var, 0.0) / trials);
    return mean;
}

}  // namespace

TEST_CASE("deposit: center impact lands in the center tile") {
    PanelGeometry geom;  // 2x1 m, 40x20 tiles, centered on the emitter
    const auto map = deposit(impacts({{0.01, 0.01}}), geom);
    CHECK(map.total_impacts_on_panel == 1);
    int nonzero = 0;
    for (int r = 0; r < map.rows; ++r)
        for (int c = 0; c < map.cols; ++c)
            if (map.at(r, c)) {
                ++nonzero;
                CHECK(r == 10);  // 0.01 above center -> row 10 of 20
                CHECK(c == 20);  // 0.01 right of center -> col 20 of 40
                CHECK(map.at(r, c) == 1);
            }
    CHECK(nonzero == 1);
}

TEST_CASE("deposit: out-of-bounds impacts and misses are ignored") {
    const auto map = deposit(
        std::vector<FlightOutcome>{Impact{1.5, 0.0, 0.1}, Impact{0.0, 0.8, 0.1},
                                   Miss{MissReason::floor_hit}, Miss{MissReason::moving_away}},
        PanelGeometry{});
    CHECK(map.total_impacts_on_panel == 0);
}

TEST_CASE("deposit: panel max edge belongs to the last tile") {
    PanelGeometry geom;
    const auto map = deposit(impacts({{1.0, 0.5}, {-1.0, -0.5}}), geom);
    CHECK(map.total_impacts_on_panel == 2);
    CHECK(map.at(geom.tile_rows - 1, geom.tile_cols - 1) == 1);
    CHECK(map.at(0, 0) == 1);
}

TEST_CASE("deposit: interior tile boundary belongs to the upper tile") {
    PanelGeometry geom;
    geom.width_m = 2.0;
    geom.tile_cols = 2;
    geom.tile_rows = 1;
    geom.height_m = 1.0;
    const auto map = deposit(impacts({{0.0, 0.0}}), geom);  // exactly on the column split
    CHECK(map.at(0, 1) == 1);
}

TEST_CASE("deposit: counts are conserved") {
    Rng rng(8);
    std::vector<FlightOutcome> outcomes;
    for (int i = 0; i < 5000; ++i) {
        if (rng.uniform01() < 0.2) outcomes.push_back(Miss{MissReason::floor_hit});
        else outcomes.push_back(Impact{4.0 * rng.uniform01() - 2.0,
                                       2.0 * rng.uniform01() - 1.0, 0.1});
    }
    const auto map = deposit(outcomes, PanelGeometry{});
    std::uint64_t sum = 0;
    for (auto c : map.counts) sum += c;
    CHECK(sum == map.total_impacts_on_panel);
    CHECK(sum <= outcomes.size());
}

TEST_CASE("bind: zero hits bind nothing") {
    TileHitMap map;
    map.rows = 2;
    map.cols = 2;
    map.counts = {0, 0, 0, 0};
    const auto state = bind(map, BindingConfig{});
    CHECK(state.total_bound() == 0);
}

TEST_CASE("bind: saturates at capacity under flooding") {
    TileHitMap map;
    map.rows = 1;
    map.cols = 1;
    map.counts = {1600};  // 10x capacity
    BindingConfig cfg;
    cfg.p_bind = 1.0;
    cfg.seed = 77;
    const auto state = bind(map, cfg);
    CHECK(state.bound[0] == 160);
}

TEST_CASE("bind: never exceeds capacity, deterministic per seed") {
    TileHitMap map;
    map.rows = 1;
    map.cols = 3;
    map.counts = {50, 400, 10000};
    BindingConfig cfg;
    cfg.seed = 11;
    const auto a = bind(map, cfg);
    const auto b = bind(map, cfg);
    for (std::size_t i = 0; i < a.bound.size(); ++i) {
        CHECK(a.bound[i] <= static_cast<std::uint32_t>(a.capacity));
        CHECK(a.bound[i] == b.bound[i]);
    }
}

TEST_CASE("bind: expected count matches the brute-force oracle") {
    double se_impl = 0.0, se_oracle = 0.0;
    const double impl = impl_mean_bound(100, 160, 0.5, 20000, &se_impl);
    const double oracle = oracle_mean_bound(100, 160, 0.5, 100000, 999, &se_oracle);
    const double se = std::sqrt(se_impl * se_impl + se_oracle * se_oracle);
    CHECK(std::abs(impl - oracle) <= 3.0 * se);
    // closed form of the same recursion: E[bound] = cap * (1 - (1 - p/cap)^hits)
    const double closed = 160.0 * (1.0 - std::pow(1.0 - 0.5 / 160.0, 100));
    CHECK(std::abs(impl - closed) <= 3.0 * se_impl + 1e-9);
}

TEST_CASE("bind: adding hits never decreases the bound count (same seed)") {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const int h = static_cast<int>(rng.next_u64() % 300);
        const int extra = static_cast<int>(rng.next_u64() % 300);
        TileHitMap small;
        small.rows = 1;
        small.cols = 1;
        small.counts = {static_cast<std::uint32_t>(h)};
        TileHitMap big = small;
        big.counts = {static_cast<std::uint32_t>(h + extra)};
        BindingConfig cfg;
        cfg.seed = rng.next_u64();
        CHECK(bind(big, cfg).bound[0] >= bind(small, cfg).bound[0]);
    }
}

TEST_CASE("binding presets fix the receptor capacity") {
    BindingConfig cfg;
    cfg.preset = "dai";
    CHECK(cfg.capacity() == 565);
    cfg.preset = "li";
    CHECK(cfg.capacity() == 726);
    cfg.preset = "naqvi";
    CHECK(cfg.capacity() == 48);
    cfg.preset = "table2";
    CHECK(cfg.capacity() == 160);
    cfg.preset = "bogus";
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("summarize_load: endpoints and the half-load code") {
    BoundState state;
    state.rows = 1;
    state.cols = 2;
    state.capacity = 160;

    state.bound = {0, 0};
    PanelLoad load = summarize_load(state);
    CHECK(load.load_fraction == 0.0);
    CHECK_FALSE(load.detected);
    CHECK(load.density_code == 0);

    state.bound = {160, 160};
    load = summarize_load(state);
    CHECK(load.load_fraction == 1.0);
    CHECK(load.detected);
    CHECK(load.density_code == 7);

    state.bound = {160, 0};  // load exactly 0.5 -> floor(0.5 * 8) = 4
    load = summarize_load(state);
    CHECK(load.load_fraction == doctest::Approx(0.5));
    CHECK(load.density_code == 4);
}

TEST_CASE("summarize_load: density code is monotone in load") {
    BoundState state;
    state.rows = 1;
    state.cols = 1;
    state.capacity = 160;
    int prev = -1;
    for (int b = 0; b <= 160; ++b) {
        state.bound = {static_cast<std::uint32_t>(b)};
        const PanelLoad load = summarize_load(state);
        CHECK(load.density_code >= prev);
        prev = load.density_code;
    }
    CHECK(prev == 7);
}

TEST_CASE("grid_csv: header carries the geometry") {
    PanelGeometry geom;
    geom.tile_cols = 2;
    geom.tile_rows = 2;
    const std::string csv = grid_csv({1, 2, 3, 4}, 2, 2, geom, 1.0);
    CHECK(csv == "# rows=2 cols=2 width=2 height=1 distance=1\n1,2\n3,4\n");
}
