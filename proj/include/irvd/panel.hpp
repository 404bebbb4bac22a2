#ifndef IRVD_PANEL_HPP
#define IRVD_PANEL_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "irvd/dispersion.hpp"

// The tiled detector panel: bins wall impacts into tiles, applies the
// saturating receptor-binding rule, and quantizes the bound load into the
// 3-bit density code the codec transmits.

namespace irvd::panel {

using dispersion::FlightOutcome;

struct PanelGeometry {
    double width_m = 2.0;
    double height_m = 1.0;
    int tile_cols = 40;  // 50x50 mm tiles over 2x1 m
    int tile_rows = 20;
    double center_y_m = 0.0;  // lateral offset from the emitter axis
    double center_z_m = 0.0;  // height offset from the emitter

    void validate() const;
    double tile_width_m() const { return width_m / tile_cols; }
    double tile_height_m() const { return height_m / tile_rows; }
};

struct TileHitMap {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint32_t> counts;  // row-major, row 0 at the panel bottom
    std::uint64_t total_impacts_on_panel = 0;

    std::uint32_t at(int row, int col) const { return counts[static_cast<std::size_t>(row) * cols + col]; }
};

struct BindingConfig {
    int receptors_per_tile = 160;
    double p_bind = 0.8;
    std::uint64_t seed = 0;
    // preset names: table2 (160), dai (565), li (726), naqvi (48)
    std::optional<std::string> preset;

    void validate() const;
    // receptors_per_tile after applying the preset, if any
    int capacity() const;
};

struct BoundState {
    int rows = 0;
    int cols = 0;
    int capacity = 0;
    std::vector<std::uint32_t> bound;  // row-major

    std::uint64_t total_bound() const;
};

struct PanelLoad {
    double load_fraction = 0.0;
    bool detected = false;
    int density_code = 0;
};

// Bins in-bounds impacts into tiles (half-open tile intervals; the panel's
// max edge belongs to the last tile). Misses and out-of-bounds impacts are
// ignored.
TileHitMap deposit(std::span<const FlightOutcome> outcomes, const PanelGeometry& geom);

// Sequential saturating Bernoulli binding per tile: each droplet binds one
// receptor with probability p_bind * free/capacity. Tile (r,c) uses the
// substream (seed, r*cols+c).
BoundState bind(const TileHitMap& hits, const BindingConfig& cfg);

PanelLoad summarize_load(const BoundState& state);

// CSV export shared by the hit map and the bound map: a comment header
// followed by one line per tile row (row 0 first), comma-separated counts.
std::string grid_csv(const std::vector<std::uint32_t>& grid, int rows, int cols,
                     const PanelGeometry& geom, double wall_distance_m);

}  // namespace irvd::panel

#endif  // IRVD_PANEL_HPP
