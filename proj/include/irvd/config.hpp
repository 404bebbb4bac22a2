#ifndef IRVD_CONFIG_HPP
#define IRVD_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "irvd/codec.hpp"
#include "irvd/dispersion.hpp"
#include "irvd/panel.hpp"
#include "irvd/steering.hpp"

// Scenario configuration: a flat TOML-style document (sections of key = value
// pairs) mirroring the module parameter structs. Every key is optional and
// defaults baked into the parameter structs.

namespace irvd::scenario {

struct ScenarioConfig {
    dispersion::EmissionParams emission;
    dispersion::AirModel air;
    double wall_distance_m = 1.0;
    panel::PanelGeometry panel_geom;
    panel::BindingConfig binding;
    steering::EscParams esc;
    steering::PowerModel power_model = steering::GaussianLobe{};
    codec::TimingConfig timing;
    double noise_sigma = 0.0;
    int type_code = 0;
    std::uint64_t master_seed = 1;
    double duration_s = 8.0;

    void validate() const;
};

namespace config {

// One parsed value; numbers keep their raw text so 64-bit seeds survive.
struct Value {
    enum class Kind { number, boolean, string, array } kind = Kind::number;
    double num = 0.0;
    bool boolean = false;
    std::string str;            // string value, or raw text for numbers
    std::vector<double> array;
    int line = 0;
};

using Table = std::map<std::string, std::map<std::string, Value>>;

// Parses the TOML subset: [section] headers, key = value, # comments,
// values are numbers, true/false, "strings", or [num, num, ...].
Table parse(const std::string& text);

// Table -> ScenarioConfig with defaults for absent keys; unknown sections or
// keys are errors.
ScenarioConfig from_table(const Table& table);

ScenarioConfig load_file(const std::string& path);

// Full effective config, serialized in the same format.
std::string to_toml(const ScenarioConfig& cfg);

}  // namespace config
}  // namespace irvd::scenario

#endif  // IRVD_CONFIG_HPP
