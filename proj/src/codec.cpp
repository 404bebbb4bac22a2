#include "irvd/codec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace irvd::codec {

void VirusMessage::validate() const {
    if (type_code < 0 || type_code > 3)
        throw std::invalid_argument("message.type_code must be in [0,3]");
    if (density_code < 0 || density_code > 7)
        throw std::invalid_argument("message.density_code must be in [0,7]");
}

std::array<int, 5> VirusMessage::bits() const {
    validate();
    return {(type_code >> 1) & 1, type_code & 1,
            (density_code >> 2) & 1, (density_code >> 1) & 1, density_code & 1};
}

VirusMessage VirusMessage::from_bits(const std::array<int, 5>& bits) {
    for (int b : bits) {
        if (b != 0 && b != 1) throw std::invalid_argument("message bits must be 0 or 1");
    }
    VirusMessage msg;
    msg.type_code = bits[0] * 2 + bits[1];
    msg.density_code = bits[2] * 4 + bits[3] * 2 + bits[4];
    return msg;
}

void TimingConfig::validate() const {
    if (!(w0_s > 0.0)) throw std::invalid_argument("timing.w0 must be > 0");
    if (std::abs(w1_s - 2.0 * w0_s) > 1e-12)
        throw std::invalid_argument("timing.w1 must equal 2*w0");
    if (delta_deg == 0.0 || !std::isfinite(delta_deg))
        throw std::invalid_argument("timing.delta must be nonzero and finite");
    for (std::size_t i = 0; i + 1 < bit_times_s.size(); ++i) {
        if (!(bit_times_s[i + 1] > bit_times_s[i]))
            throw std::invalid_argument("timing.bit_times must be strictly increasing");
        const double gap = bit_times_s[i + 1] - bit_times_s[i];
        if (gap < w1_s + kRecoveryMarginS - 1e-12)
            throw std::invalid_argument(
                "timing.bit_times gap " + std::to_string(gap) + "s at index " +
                std::to_string(i) + " is below w1 + recovery margin (" +
                std::to_string(w1_s + kRecoveryMarginS) + "s)");
    }
}

const char* to_string(DecodeStatus status) {
    switch (status) {
        case DecodeStatus::ok: return "ok";
        case DecodeStatus::wrong_bit_count: return "wrong-bit-count";
        case DecodeStatus::no_signal: return "no-signal";
    }
    return "unknown";
}

FlickSchedule encode_message(const VirusMessage& msg, const TimingConfig& timing) {
    timing.validate();
    const std::array<int, 5> bits = msg.bits();
    FlickSchedule schedule;
    schedule.events.reserve(5);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        schedule.events.push_back(
            {timing.bit_times_s[i], bits[i] ? timing.w1_s : timing.w0_s, timing.delta_deg});
    }
    schedule.validate();
    return schedule;
}

namespace {

// centered moving average with clamped window at the trace edges
std::vector<double> smooth(const std::vector<double>& x, int window) {
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    std::vector<double> prefix(n + 1, 0.0);
    for (std::ptrdiff_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];
    std::vector<double> out(x.size());
    const std::ptrdiff_t left = window / 2;
    const std::ptrdiff_t right = window - 1 - left;
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - left);
        const std::ptrdiff_t hi = std::min(n - 1, i + right);
        out[i] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
    }
    return out;
}

// streaming median over the pre-dip samples; sorted-insert is plenty fast
// for the trace lengths this decoder sees
class RunningMedian {
public:
    void push(double v) {
        sorted_.insert(std::upper_bound(sorted_.begin(), sorted_.end(), v), v);
    }
    bool empty() const { return sorted_.empty(); }
    double median() const {
        const std::size_t n = sorted_.size();
        return (n % 2 == 1) ? sorted_[n / 2]
                            : 0.5 * (sorted_[n / 2 - 1] + sorted_[n / 2]);
    }

private:
    std::vector<double> sorted_;
};

constexpr double kMergeGapS = 0.05;

}  // namespace

DipScan detect_dips(const ControlTrace& trace, double guard_time_s, double threshold,
                    double smoothing_window_s, double min_width_s) {
    if (trace.size() == 0) throw std::invalid_argument("detect_dips: empty trace");
    if (!(trace.dt_s > 0.0)) throw std::invalid_argument("detect_dips: trace dt must be > 0");
    if (!(threshold > 0.0 && threshold < 1.0))
        throw std::invalid_argument("detect_dips: threshold must be in (0,1)");

    const int window =
        std::max(1, static_cast<int>(std::llround(smoothing_window_s / trace.dt_s)));
    const std::vector<double> s = smooth(trace.power, window);

    std::size_t i0 = 0;
    while (i0 < s.size() && trace.t_s[i0] < guard_time_s) ++i0;

    DipScan scan;
    RunningMedian median;
    bool baseline_frozen = false;
    double baseline = 0.0;

    struct RawDip {
        std::size_t start = 0;
        std::size_t end = 0;  // one past the last below-threshold sample
        double min_power = 0.0;
    };
    std::vector<RawDip> raw;
    bool in_dip = false;

    for (std::size_t i = i0; i < s.size(); ++i) {
        if (!baseline_frozen) {
            if (!median.empty() && s[i] < threshold * median.median()) {
                baseline = median.median();
                baseline_frozen = true;
            } else {
                median.push(s[i]);
                continue;
            }
        }
        const bool below = s[i] < threshold * baseline;
        if (below && !in_dip) {
            raw.push_back({i, i + 1, s[i]});
            in_dip = true;
        } else if (below) {
            raw.back().end = i + 1;
            raw.back().min_power = std::min(raw.back().min_power, s[i]);
        } else if (in_dip) {
            in_dip = false;
        }
    }
    if (!baseline_frozen) {
        // no crossing at all; the whole post-guard span is baseline
        baseline = median.empty() ? 0.0 : median.median();
    }
    scan.baseline = baseline;
    scan.signal_ok = baseline >= 0.5;

    // merge dips separated by less than the merge gap
    std::vector<RawDip> merged;
    for (const RawDip& d : raw) {
        if (!merged.empty() &&
            trace.t_s[d.start] - trace.t_s[merged.back().end - 1] < kMergeGapS) {
            merged.back().end = d.end;
            merged.back().min_power = std::min(merged.back().min_power, d.min_power);
        } else {
            merged.push_back(d);
        }
    }

    for (const RawDip& d : merged) {
        DipEvent ev;
        ev.start_s = trace.t_s[d.start];
        const double end_t = (d.end < trace.t_s.size()) ? trace.t_s[d.end]
                                                        : trace.t_s.back() + trace.dt_s;
        ev.width_s = end_t - ev.start_s;
        ev.depth = baseline - d.min_power;
        if (ev.width_s >= min_width_s) scan.dips.push_back(ev);
    }
    return scan;
}

DecodeResult decode_bits(const std::vector<DipEvent>& dips, const TimingConfig& timing) {
    timing.validate();
    DecodeResult result;
    result.dip_events = dips;
    for (const DipEvent& d : dips) {
        result.bits.push_back(d.width_s > 1.5 * timing.w0_s ? 1 : 0);
    }
    if (result.bits.size() == 5) {
        result.message = VirusMessage::from_bits(
            {result.bits[0], result.bits[1], result.bits[2], result.bits[3], result.bits[4]});
        result.status = DecodeStatus::ok;
    } else {
        result.status = DecodeStatus::wrong_bit_count;
    }
    return result;
}

DecodeResult decode_trace(const ControlTrace& trace, const TimingConfig& timing,
                          double guard_time_s, double threshold,
                          double smoothing_window_s, double min_width_s) {
    const DipScan scan =
        detect_dips(trace, guard_time_s, threshold, smoothing_window_s, min_width_s);
    if (!scan.signal_ok) {
        DecodeResult result;
        result.dip_events = scan.dips;
        result.status = DecodeStatus::no_signal;
        return result;
    }
    return decode_bits(scan.dips, timing);
}

std::string decode_report_csv(const DecodeResult& result) {
    std::string out = "bit_index,start_s,width_s,depth,bit\n";
    char buf[160];
    for (std::size_t i = 0; i < result.dip_events.size(); ++i) {
        const DipEvent& d = result.dip_events[i];
        const char* bit = i < result.bits.size() ? (result.bits[i] ? "1" : "0") : "";
        std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.9g,%s\n", i, d.start_s, d.width_s,
                      d.depth, bit);
        out += buf;
    }
    out += "status,type_code,density_code\n";
    if (result.message) {
        std::snprintf(buf, sizeof(buf), "%s,%d,%d\n", to_string(result.status),
                      result.message->type_code, result.message->density_code);
        out += buf;
    } else {
        std::snprintf(buf, sizeof(buf), "%s,,\n", to_string(result.status));
        out += buf;
    }
    return out;
}

}  // namespace irvd::codec
