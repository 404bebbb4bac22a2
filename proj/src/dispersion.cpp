#include "irvd/dispersion.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "irvd/rng.hpp"

namespace irvd::dispersion {

namespace {

constexpr double kDeg2Rad = kPi / 180.0;

Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }

struct State {
    Vec3 pos;
    Vec3 vel;
};

// dv/dt = g_vec - (1/2m) * rho_air * C_d * pi * r^2 * |v| * v
Vec3 acceleration(const Vec3& v, const AirModel& air, double drag_factor) {
    Vec3 a{0.0, 0.0, -air.gravity};
    if (air.drag_enabled) {
        const double speed = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
        const double s = -drag_factor * speed;
        a = a + s * v;
    }
    return a;
}

State rk4_step(const State& y, double h, const AirModel& air, double drag_factor) {
    const Vec3 k1v = acceleration(y.vel, air, drag_factor);
    const Vec3 k1x = y.vel;

    const Vec3 v2 = y.vel + (h / 2.0) * k1v;
    const Vec3 k2v = acceleration(v2, air, drag_factor);
    const Vec3 k2x = v2;

    const Vec3 v3 = y.vel + (h / 2.0) * k2v;
    const Vec3 k3v = acceleration(v3, air, drag_factor);
    const Vec3 k3x = v3;

    const Vec3 v4 = y.vel + h * k3v;
    const Vec3 k4v = acceleration(v4, air, drag_factor);
    const Vec3 k4x = v4;

    State out;
    out.pos = y.pos + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    out.vel = y.vel + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    return out;
}

bool finite(const Vec3& v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

}  // namespace

void EmissionParams::validate() const {
    if (!(mass_mean_kg > 0.0)) throw std::invalid_argument("emission.mass_mean must be > 0");
    if (!(mass_std_kg >= 0.0)) throw std::invalid_argument("emission.mass_std must be >= 0");
    if (!(speed_mean_mps > 0.0)) throw std::invalid_argument("emission.speed_mean must be > 0");
    if (!(speed_std_mps >= 0.0)) throw std::invalid_argument("emission.speed_std must be >= 0");
    if (!(h_angle_std_deg >= 0.0)) throw std::invalid_argument("emission.h_angle_std must be >= 0");
    if (!(v_angle_std_deg >= 0.0)) throw std::invalid_argument("emission.v_angle_std must be >= 0");
    if (!std::isfinite(h_angle_mean_deg) || !std::isfinite(v_angle_mean_deg))
        throw std::invalid_argument("emission angle means must be finite");
}

void AirModel::validate() const {
    if (!(dt_s > 0.0)) throw std::invalid_argument("air.dt must be > 0");
    if (!(air_density >= 0.0)) throw std::invalid_argument("air.air_density must be >= 0");
    if (!(drag_coefficient >= 0.0))
        throw std::invalid_argument("air.drag_coefficient must be >= 0");
    if (!(droplet_density > 0.0)) throw std::invalid_argument("air.droplet_density must be > 0");
    if (!(emitter_height_m > 0.0)) throw std::invalid_argument("air.emitter_height must be > 0");
    if (!(flight_timeout_s > 0.0)) throw std::invalid_argument("air.flight_timeout must be > 0");
    if (!std::isfinite(gravity)) throw std::invalid_argument("air.gravity must be finite");
}

std::vector<Droplet> sample_droplets(const EmissionParams& params, double droplet_density) {
    params.validate();
    if (!(droplet_density > 0.0)) throw std::invalid_argument("droplet_density must be > 0");

    std::vector<Droplet> droplets(params.count);
    for (std::size_t i = 0; i < params.count; ++i) {
        Rng rng(mix_seed(params.seed, i));
        double mass;
        do {
            mass = rng.normal(params.mass_mean_kg, params.mass_std_kg);
        } while (mass <= 0.0);
        const double speed = rng.normal(params.speed_mean_mps, params.speed_std_mps);
        const double h = rng.normal(params.h_angle_mean_deg, params.h_angle_std_deg) * kDeg2Rad;
        const double v = rng.normal(params.v_angle_mean_deg, params.v_angle_std_deg) * kDeg2Rad;

        Droplet& d = droplets[i];
        d.mass_kg = mass;
        d.radius_m = std::cbrt(3.0 * mass / (4.0 * kPi * droplet_density));
        d.position = {0.0, 0.0, 0.0};
        // +x toward the wall, +z up; horizontal angle rotates in x-y,
        // vertical angle elevates out of x-y
        d.velocity = {speed * std::cos(v) * std::cos(h), speed * std::cos(v) * std::sin(h),
                      speed * std::sin(v)};
    }
    return droplets;
}

FlightOutcome simulate_flight(const Droplet& droplet, double wall_distance_m,
                              const AirModel& air) {
    air.validate();
    if (!(wall_distance_m > 0.0)) throw std::invalid_argument("wall_distance must be > 0");
    if (!(droplet.mass_kg > 0.0) || !(droplet.radius_m > 0.0) || !finite(droplet.position) ||
        !finite(droplet.velocity))
        throw std::invalid_argument("simulate_flight: invalid droplet state");

    const double drag_factor = air.air_density * air.drag_coefficient * kPi *
                               droplet.radius_m * droplet.radius_m / (2.0 * droplet.mass_kg);
    const double floor_z = -air.emitter_height_m;

    State y{droplet.position, droplet.velocity};
    double t = 0.0;

    while (true) {
        if (y.vel.x <= 0.0) return Miss{MissReason::moving_away};
        if (t > air.flight_timeout_s) return Miss{MissReason::timeout};

        const State next = rk4_step(y, air.dt_s, air, drag_factor);

        if (next.pos.x >= wall_distance_m) {
            // linear estimate of the crossing fraction, refined by Newton
            // iterations on RK4 substeps so the landing state carries the
            // integrator's accuracy instead of interpolation error
            double f = (wall_distance_m - y.pos.x) / (next.pos.x - y.pos.x);
            State hit = next;
            for (int it = 0; it < 3; ++it) {
                hit = rk4_step(y, f * air.dt_s, air, drag_factor);
                const double err = hit.pos.x - wall_distance_m;
                const double dxdf = hit.vel.x * air.dt_s;
                if (dxdf <= 0.0) break;
                f -= err / dxdf;
                if (f < 0.0) f = 0.0;
                if (f > 1.0) f = 1.0;
            }
            // floor takes precedence if it was crossed first within the step
            if (hit.pos.z < floor_z) return Miss{MissReason::floor_hit};
            return Impact{hit.pos.y, hit.pos.z, t + f * air.dt_s};
        }
        if (next.pos.z < floor_z) return Miss{MissReason::floor_hit};

        y = next;
        t += air.dt_s;
    }
}

std::vector<FlightOutcome> run_emission(const EmissionParams& params, double wall_distance_m,
                                        const AirModel& air, unsigned n_threads) {
    const std::vector<Droplet> droplets = sample_droplets(params, air.droplet_density);
    std::vector<FlightOutcome> outcomes(droplets.size());

    unsigned workers = n_threads ? n_threads : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    if (droplets.size() < 2048) workers = 1;

    if (workers == 1) {
        for (std::size_t i = 0; i < droplets.size(); ++i)
            outcomes[i] = simulate_flight(droplets[i], wall_distance_m, air);
        return outcomes;
    }

    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (droplets.size() + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(droplets.size(), lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i)
                outcomes[i] = simulate_flight(droplets[i], wall_distance_m, air);
        });
    }
    for (auto& th : pool) th.join();
    return outcomes;
}

}  // namespace irvd::dispersion
