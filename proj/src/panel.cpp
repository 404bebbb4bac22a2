#include "irvd/panel.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "irvd/rng.hpp"

namespace irvd::panel {

void PanelGeometry::validate() const {
    if (!(width_m > 0.0) || !(height_m > 0.0))
        throw std::invalid_argument("panel.width/height must be > 0");
    if (tile_cols < 1 || tile_rows < 1)
        throw std::invalid_argument("panel.tile_cols/tile_rows must be >= 1");
    if (!std::isfinite(center_y_m) || !std::isfinite(center_z_m))
        throw std::invalid_argument("panel.center_y/center_z must be finite");
}

void BindingConfig::validate() const {
    if (!(p_bind >= 0.0 && p_bind <= 1.0))
        throw std::invalid_argument("binding.p_bind must be in [0,1]");
    if (capacity() < 1) throw std::invalid_argument("binding.receptors_per_tile must be >= 1");
}

int BindingConfig::capacity() const {
    if (!preset) return receptors_per_tile;
    const std::string& p = *preset;
    if (p == "table2") return 160;
    if (p == "dai") return 565;
    if (p == "li") return 726;
    if (p == "naqvi") return 48;
    throw std::invalid_argument("binding.preset must be one of table2|dai|li|naqvi (got \"" +
                                p + "\")");
}

std::uint64_t BoundState::total_bound() const {
    std::uint64_t sum = 0;
    for (std::uint32_t b : bound) sum += b;
    return sum;
}

TileHitMap deposit(std::span<const FlightOutcome> outcomes, const PanelGeometry& geom) {
    geom.validate();
    TileHitMap map;
    map.rows = geom.tile_rows;
    map.cols = geom.tile_cols;
    map.counts.assign(static_cast<std::size_t>(map.rows) * map.cols, 0);

    const double y0 = geom.center_y_m - geom.width_m / 2.0;
    const double z0 = geom.center_z_m - geom.height_m / 2.0;

    for (const FlightOutcome& o : outcomes) {
        const auto* imp = std::get_if<dispersion::Impact>(&o);
        if (!imp) continue;
        const double ly = imp->y_m - y0;
        const double lz = imp->z_m - z0;
        if (ly < 0.0 || ly > geom.width_m || lz < 0.0 || lz > geom.height_m) continue;
        int col = static_cast<int>(ly / geom.tile_width_m());
        int row = static_cast<int>(lz / geom.tile_height_m());
        if (col >= map.cols) col = map.cols - 1;  // max edge belongs to the last tile
        if (row >= map.rows) row = map.rows - 1;
        ++map.counts[static_cast<std::size_t>(row) * map.cols + col];
        ++map.total_impacts_on_panel;
    }
    return map;
}

BoundState bind(const TileHitMap& hits, const BindingConfig& cfg) {
    cfg.validate();
    BoundState state;
    state.rows = hits.rows;
    state.cols = hits.cols;
    state.capacity = cfg.capacity();
    state.bound.assign(hits.counts.size(), 0);

    const double cap = static_cast<double>(state.capacity);
    for (std::size_t tile = 0; tile < hits.counts.size(); ++tile) {
        const std::uint32_t n = hits.counts[tile];
        if (n == 0) continue;
        Rng rng(mix_seed(cfg.seed, tile));
        std::uint32_t bound = 0;
        for (std::uint32_t k = 0; k < n && bound < static_cast<std::uint32_t>(state.capacity);
             ++k) {
            const double free = cap - bound;
            if (rng.uniform01() < cfg.p_bind * free / cap) ++bound;
        }
        state.bound[tile] = bound;
    }
    return state;
}

PanelLoad summarize_load(const BoundState& state) {
    if (state.capacity < 1 || state.bound.empty())
        throw std::invalid_argument("summarize_load: empty bound state");
    const std::uint64_t total = state.total_bound();
    PanelLoad load;
    load.load_fraction = static_cast<double>(total) /
                         (static_cast<double>(state.capacity) * state.bound.size());
    load.detected = total >= 1;
    load.density_code = std::min(static_cast<int>(load.load_fraction * 8.0), 7);
    return load;
}

std::string grid_csv(const std::vector<std::uint32_t>& grid, int rows, int cols,
                     const PanelGeometry& geom, double wall_distance_m) {
    char header[160];
    std::snprintf(header, sizeof(header), "# rows=%d cols=%d width=%g height=%g distance=%g\n",
                  rows, cols, geom.width_m, geom.height_m, wall_distance_m);
    std::string out = header;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (c) out += ',';
            out += std::to_string(grid[static_cast<std::size_t>(r) * cols + c]);
        }
        out += '\n';
    }
    return out;
}

}  // namespace irvd::panel
