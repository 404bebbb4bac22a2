#include "irvd/steering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

namespace irvd::steering {

namespace {

double deg2rad(double d) { return d * (kPi / 180.0); }

struct PowerVisitor {
    double theta_deg;
    double theta_rx_deg;

    double operator()(const GaussianLobe& g) const {
        const double d = theta_deg - theta_rx_deg;
        return std::exp(-d * d / (2.0 * g.sigma_deg * g.sigma_deg));
    }

    double operator()(const UniformArray& u) const {
        // normalized array factor |sin(N*psi/2) / (N*sin(psi/2))|^2
        const double psi = 2.0 * kPi * u.spacing_wavelengths *
                           (std::sin(deg2rad(theta_deg)) - std::sin(deg2rad(theta_rx_deg)));
        const double half = 0.5 * psi;
        const double den = static_cast<double>(u.n_elements) * std::sin(half);
        if (std::abs(den) < 1e-12) return 1.0;  // removable singularity, peak value
        const double af = std::sin(static_cast<double>(u.n_elements) * half) / den;
        return af * af;
    }
};

}  // namespace

double received_power(double theta_deg, double theta_rx_deg, const PowerModel& model) {
    return std::visit(PowerVisitor{theta_deg, theta_rx_deg}, model);
}

void EscParams::validate() const {
    if (!(dt_s > 0.0)) throw std::invalid_argument("esc.dt must be > 0");
    if (!(dither_amplitude_deg > 0.0))
        throw std::invalid_argument("esc.dither_amplitude must be > 0");
    if (!(dt_s * dither_frequency_rad_s < 0.5))
        throw std::invalid_argument("esc.dt * esc.dither_frequency must be < 0.5 rad per step");
    if (!(hpf_cutoff_rad_s >= 0.0)) throw std::invalid_argument("esc.hpf_cutoff must be >= 0");
    if (!std::isfinite(integrator_gain))
        throw std::invalid_argument("esc.integrator_gain must be finite");
    if (!std::isfinite(theta_init_deg) || !std::isfinite(theta_rx_deg))
        throw std::invalid_argument("esc.theta_init/theta_rx must be finite");
}

void FlickSchedule::validate() const {
    double prev_end = -1e300;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const FlickEvent& e = events[i];
        if (!(e.width_s > 0.0))
            throw std::invalid_argument("flick schedule: event width must be > 0 (event " +
                                        std::to_string(i) + ")");
        if (!std::isfinite(e.start_s) || !std::isfinite(e.delta_deg))
            throw std::invalid_argument("flick schedule: non-finite event " + std::to_string(i));
        if (e.start_s < prev_end)
            throw std::invalid_argument(
                "flick schedule: events must be time-sorted and non-overlapping (event " +
                std::to_string(i) + ")");
        prev_end = e.start_s + e.width_s;
    }
}

EscStepOutput esc_step(ControlState& state, const EscParams& params,
                       double disturbance_deg, const PowerModel& model,
                       double measurement_noise) {
    return esc_step_fn(
        state, params, disturbance_deg,
        [&](double theta) { return received_power(theta, params.theta_rx_deg, model); },
        measurement_noise);
}

ControlTrace run_control(const EscParams& params, const FlickSchedule& schedule,
                         double duration_s, const PowerModel& model,
                         double noise_sigma, std::uint64_t noise_seed) {
    params.validate();
    schedule.validate();
    if (!(duration_s > 0.0)) throw std::invalid_argument("run_control: duration must be > 0");
    for (const FlickEvent& e : schedule.events) {
        if (e.start_s < 0.0 || e.start_s >= duration_s)
            throw std::invalid_argument("run_control: schedule event outside [0, duration)");
    }
    if (!(noise_sigma >= 0.0)) throw std::invalid_argument("run_control: noise_sigma must be >= 0");

    const auto n_steps = static_cast<std::size_t>(std::llround(duration_s / params.dt_s));
    ControlTrace trace;
    trace.dt_s = params.dt_s;
    trace.t_s.reserve(n_steps);
    trace.theta_deg.reserve(n_steps);
    trace.power.reserve(n_steps);

    ControlState state;
    state.theta_hat_deg = params.theta_init_deg;

    Rng noise_rng(noise_seed);
    std::size_t next_event = 0;

    for (std::size_t i = 0; i < n_steps; ++i) {
        const double t = state.t_s;
        // events are sorted and non-overlapping: at most one active at a time
        while (next_event < schedule.events.size() &&
               t >= schedule.events[next_event].start_s + schedule.events[next_event].width_s) {
            ++next_event;
        }
        double disturbance = 0.0;
        if (next_event < schedule.events.size() &&
            t >= schedule.events[next_event].start_s) {
            disturbance = schedule.events[next_event].delta_deg;
        }
        const double noise = noise_sigma * noise_rng.normal();
        const EscStepOutput out = esc_step(state, params, disturbance, model, noise);
        trace.t_s.push_back(t);
        trace.theta_deg.push_back(out.theta_reflected_deg);
        trace.power.push_back(out.power);
    }
    return trace;
}

std::string trace_csv(const ControlTrace& trace) {
    std::string out = "t,theta_deg,power\n";
    char buf[128];
    for (std::size_t i = 0; i < trace.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", trace.t_s[i],
                      trace.theta_deg[i], trace.power[i]);
        out += buf;
    }
    return out;
}

ControlTrace parse_trace_csv(const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    if (!std::getline(ss, line) || line.rfind("t,theta_deg,power", 0) != 0)
        throw std::invalid_argument("trace csv: missing t,theta_deg,power header");
    ControlTrace trace;
    int lineno = 1;
    while (std::getline(ss, line)) {
        ++lineno;
        if (line.empty()) continue;
        double t, theta, power;
        if (std::sscanf(line.c_str(), "%lg,%lg,%lg", &t, &theta, &power) != 3)
            throw std::invalid_argument("trace csv: bad row at line " + std::to_string(lineno));
        trace.t_s.push_back(t);
        trace.theta_deg.push_back(theta);
        trace.power.push_back(power);
    }
    if (trace.size() < 2) throw std::invalid_argument("trace csv: needs at least 2 samples");
    trace.dt_s = trace.t_s[1] - trace.t_s[0];
    if (!(trace.dt_s > 0.0)) throw std::invalid_argument("trace csv: non-increasing time");
    return trace;
}

}  // namespace irvd::steering
