#ifndef IRVD_DISPERSION_HPP
#define IRVD_DISPERSION_HPP

#include <cstdint>
#include <variant>
#include <vector>

// Sneeze-droplet sampling and ballistic transport with quadratic air drag,
// integrated to the wall plane. All randomness comes from per-droplet
// substreams so results are independent of evaluation order.

namespace irvd::dispersion {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

struct EmissionParams {
    double mass_mean_kg = 1e-7;  // 10^-4 g
    double mass_std_kg = 1e-7;
    double speed_mean_mps = 11.2;
    double speed_std_mps = 3.0;
    double h_angle_mean_deg = 0.0;
    double h_angle_std_deg = 18.0;
    double v_angle_mean_deg = -6.0;
    double v_angle_std_deg = 12.0;
    std::size_t count = 50000;
    std::uint64_t seed = 0;

    void validate() const;
};

struct Droplet {
    double mass_kg = 0.0;
    double radius_m = 0.0;
    Vec3 position;
    Vec3 velocity;
};

struct AirModel {
    double air_density = 1.225;       // kg/m^3
    double drag_coefficient = 0.47;   // sphere
    double gravity = 9.81;            // m/s^2
    double droplet_density = 1000.0;  // kg/m^3
    double dt_s = 1e-4;
    bool drag_enabled = true;
    // flight termination: droplets below z = -emitter_height are lost,
    // droplets still airborne after flight_timeout_s are lost
    double emitter_height_m = 1.5;
    double flight_timeout_s = 10.0;

    void validate() const;
};

struct Impact {
    double y_m = 0.0;  // lateral position on the wall plane
    double z_m = 0.0;  // height relative to the emitter
    double t_s = 0.0;
};

enum class MissReason { floor_hit, moving_away, timeout };

struct Miss {
    MissReason reason = MissReason::timeout;
};

using FlightOutcome = std::variant<Impact, Miss>;

inline bool is_impact(const FlightOutcome& o) { return std::holds_alternative<Impact>(o); }

// Draws count droplets; mass, speed and both angles are independent normals,
// non-positive mass samples are rejected and redrawn. Droplet i uses the
// substream (seed, i), so any evaluation order gives identical output.
std::vector<Droplet> sample_droplets(const EmissionParams& params, double droplet_density);

// RK4 flight integration until the droplet crosses x = wall_distance (Impact,
// crossing resolved within the step), drops below the floor, stops moving
// toward the wall, or times out.
FlightOutcome simulate_flight(const Droplet& droplet, double wall_distance_m,
                              const AirModel& air);

// sample + fly for the whole emission; output order matches droplet order.
// n_threads = 0 picks a hardware-based default; any thread count gives
// identical results.
std::vector<FlightOutcome> run_emission(const EmissionParams& params, double wall_distance_m,
                                        const AirModel& air, unsigned n_threads = 0);

}  // namespace irvd::dispersion

#endif  // IRVD_DISPERSION_HPP
