#ifndef IRVD_CODEC_HPP
#define IRVD_CODEC_HPP

#include <array>
#include <optional>
#include <vector>

#include "irvd/steering.hpp"

// Pulse-width keying of beam flicks: the 5-bit virus report is sent as five
// timed -1 degree disturbances whose hold widths carry the bit values
// (bit 1 = double width), and recovered from the received-power trace by
// threshold-crossing dip detection.

namespace irvd::codec {

using steering::ControlTrace;
using steering::FlickEvent;
using steering::FlickSchedule;

struct VirusMessage {
    int type_code = 0;     // 2-bit virus concentration/type class
    int density_code = 0;  // 3-bit quantized panel load

    void validate() const;

    // bit layout, most significant first: [type1 type0 density2 density1 density0]
    std::array<int, 5> bits() const;
    static VirusMessage from_bits(const std::array<int, 5>& bits);

    friend bool operator==(const VirusMessage&, const VirusMessage&) = default;
};

struct TimingConfig {
    std::array<double, 5> bit_times_s{2.5, 3.1, 4.1, 5.1, 6.1};
    double w0_s = 0.2;        // bit-0 hold width
    double w1_s = 0.4;        // bit-1 hold width, must equal 2*w0
    double delta_deg = -1.0;  // flick angle offset

    void validate() const;
};

// Hold margin required between one flick's end and the next flick's start so
// the loop can recover between bits. 0.2 s is the largest margin the default
// schedule (0.6 s minimum gap, w1 = 0.4 s) admits.
inline constexpr double kRecoveryMarginS = 0.2;

// Default decoder settings. The threshold sits between the steady smoothed
// power (~0.993 for the default lobe) and the deepest point the loop's
// partial compensation leaves in a carried-over bit-1 dip (~0.96).
inline constexpr double kDefaultGuardTimeS = 2.0;
inline constexpr double kDefaultDipThreshold = 0.991;

// Dips narrower than this are debounce artifacts (threshold grazes during the
// loop's post-flick recovery, measured <= 0.15 s across the protocol space),
// not protocol dips; protocol dips smooth to >= 0.24 s.
inline constexpr double kMinDipWidthS = 0.17;

struct DipEvent {
    double start_s = 0.0;
    double width_s = 0.0;
    double depth = 0.0;  // max smoothed-power drop below baseline
};

enum class DecodeStatus { ok, wrong_bit_count, no_signal };

const char* to_string(DecodeStatus status);

struct DecodeResult {
    std::vector<int> bits;                // one classified bit per detected dip
    std::optional<VirusMessage> message;  // present iff bits.size() == 5
    std::vector<DipEvent> dip_events;
    DecodeStatus status = DecodeStatus::ok;
};

// msg -> five flicks at timing.bit_times, width w1 for bit 1 else w0.
FlickSchedule encode_message(const VirusMessage& msg, const TimingConfig& timing);

struct DipScan {
    std::vector<DipEvent> dips;
    double baseline = 0.0;  // median smoothed power over [guard, first crossing)
    bool signal_ok = true;  // false when baseline < 0.5
};

// Smooths the power trace with a moving average of one dither period
// (smoothing_window_s), finds excursions below threshold*baseline after
// guard_time, merges dips separated by less than 0.05 s, and drops dips
// narrower than min_width_s.
DipScan detect_dips(const ControlTrace& trace, double guard_time_s = kDefaultGuardTimeS,
                    double threshold = kDefaultDipThreshold,
                    double smoothing_window_s = 2.0 * kPi / 50.0,
                    double min_width_s = kMinDipWidthS);

// Width classification: bit 1 iff width > 1.5*w0. Five dips reconstruct the
// message; any other count yields wrong_bit_count.
DecodeResult decode_bits(const std::vector<DipEvent>& dips, const TimingConfig& timing);

// detect_dips + decode_bits, folding a bad baseline into status no_signal.
DecodeResult decode_trace(const ControlTrace& trace, const TimingConfig& timing,
                          double guard_time_s = kDefaultGuardTimeS,
                          double threshold = kDefaultDipThreshold,
                          double smoothing_window_s = 2.0 * kPi / 50.0,
                          double min_width_s = kMinDipWidthS);

// "bit_index,start_s,width_s,depth,bit" rows followed by the
// "status,type_code,density_code" summary line.
std::string decode_report_csv(const DecodeResult& result);

}  // namespace irvd::codec

#endif  // IRVD_CODEC_HPP
