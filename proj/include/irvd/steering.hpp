#ifndef IRVD_STEERING_HPP
#define IRVD_STEERING_HPP

#include <cstdint>
#include <stdexcept>
#include <variant>
#include <vector>

#include "irvd/rng.hpp"

// Extremum-seeking beam steering: normalized received power as a function of
// the reflected angle, and the dither-demodulation control loop that climbs
// to the receiver angle. Flick disturbances (the information carrier) enter
// as an additive offset on the reflected angle while the loop keeps running.

namespace irvd::steering {

struct GaussianLobe {
    double sigma_deg = 3.0;
};

struct UniformArray {
    int n_elements = 24;
    double spacing_wavelengths = 0.5;
};

using PowerModel = std::variant<GaussianLobe, UniformArray>;

// Normalized received power in [0, 1]; exactly 1 at theta == theta_rx.
double received_power(double theta_deg, double theta_rx_deg, const PowerModel& model);

struct EscParams {
    double dither_amplitude_deg = 0.5;
    double dither_frequency_rad_s = 50.0;
    // Tuned loop gain; see README for the tuning target. With the default
    // Gaussian lobe the small-signal convergence time constant is
    // roughly 4*sigma_deg^2 / (dither_amplitude * integrator_gain).
    double integrator_gain = 38.0;
    double hpf_cutoff_rad_s = 5.0;
    double dt_s = 1e-3;
    double theta_init_deg = 48.0;
    double theta_rx_deg = 50.0;

    void validate() const;
};

struct ControlState {
    double theta_hat_deg = 0.0;
    double hpf_y = 0.0;       // high-pass filter output state
    double hpf_u_prev = 0.0;  // previous filter input
    bool hpf_primed = false;  // first sample initializes hpf_u_prev
    double t_s = 0.0;
};

struct EscStepOutput {
    double theta_reflected_deg = 0.0;
    double power = 0.0;
};

// One loop iteration against an arbitrary power map (test hook; the
// PowerModel overload below is the production path).
//   theta_reflected = theta_hat + a*sin(w*t) + disturbance
//   measured        = power_of_theta(theta_reflected) + measurement_noise
//   gradient        = highpass(measured) * sin(w*t)
//   theta_hat      += integrator_gain * gradient * dt
template <class PowerFn>
EscStepOutput esc_step_fn(ControlState& state, const EscParams& params,
                          double disturbance_deg, PowerFn&& power_of_theta,
                          double measurement_noise = 0.0) {
    if (!std::isfinite(state.theta_hat_deg) || !std::isfinite(state.hpf_y) ||
        !std::isfinite(state.t_s) || !std::isfinite(disturbance_deg)) {
        throw std::invalid_argument("esc_step: non-finite control state or disturbance");
    }
    const double phase = params.dither_frequency_rad_s * state.t_s;
    const double dither = params.dither_amplitude_deg * std::sin(phase);
    const double theta_reflected = state.theta_hat_deg + dither + disturbance_deg;
    const double measured = power_of_theta(theta_reflected) + measurement_noise;

    if (!state.hpf_primed) {
        state.hpf_u_prev = measured;
        state.hpf_primed = true;
    }
    const double alpha = 1.0 / (1.0 + params.hpf_cutoff_rad_s * params.dt_s);
    state.hpf_y = alpha * (state.hpf_y + measured - state.hpf_u_prev);
    state.hpf_u_prev = measured;

    const double gradient = state.hpf_y * std::sin(phase);
    state.theta_hat_deg += params.integrator_gain * gradient * params.dt_s;
    state.t_s += params.dt_s;
    return {theta_reflected, measured};
}

EscStepOutput esc_step(ControlState& state, const EscParams& params,
                       double disturbance_deg, const PowerModel& model,
                       double measurement_noise = 0.0);

struct ControlTrace {
    std::vector<double> t_s;
    std::vector<double> theta_deg;  // reflected angle, dither + flick included
    std::vector<double> power;      // measured (noisy) normalized power
    double dt_s = 1e-3;

    std::size_t size() const { return t_s.size(); }
};

struct FlickEvent {
    double start_s = 0.0;
    double width_s = 0.0;
    double delta_deg = 0.0;
};

struct FlickSchedule {
    std::vector<FlickEvent> events;

    // events must be time-sorted, positive-width, non-overlapping
    void validate() const;
};

// Runs the loop from theta_init for duration_s, injecting schedule events
// (active on [start, start+width)) and optional Gaussian measurement noise
// drawn from a dedicated substream.
ControlTrace run_control(const EscParams& params, const FlickSchedule& schedule,
                         double duration_s, const PowerModel& model,
                         double noise_sigma = 0.0, std::uint64_t noise_seed = 0);

// "t,theta_deg,power" rows at full precision, and the inverse.
std::string trace_csv(const ControlTrace& trace);
ControlTrace parse_trace_csv(const std::string& text);

}  // namespace irvd::steering

#endif  // IRVD_STEERING_HPP
