#include "irvd/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace irvd::scenario {

void ScenarioConfig::validate() const {
    emission.validate();
    air.validate();
    if (!(wall_distance_m > 0.0)) throw std::invalid_argument("wall_distance must be > 0");
    panel_geom.validate();
    binding.validate();
    esc.validate();
    timing.validate();
    if (!(noise_sigma >= 0.0)) throw std::invalid_argument("noise_sigma must be >= 0");
    if (type_code < 0 || type_code > 3)
        throw std::invalid_argument("type_code must be in [0,3]");
    const double needed = timing.bit_times_s.back() + timing.w1_s + 0.5;
    if (!(duration_s > needed))
        throw std::invalid_argument("duration must exceed last bit time + w1 + 0.5s (" +
                                    std::to_string(needed) + "s)");
}

namespace config {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
    throw std::invalid_argument("config line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

double parse_number(const std::string& text, int line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) fail(line, "bad number \"" + text + "\"");
        return v;
    } catch (const std::invalid_argument&) {
        fail(line, "bad number \"" + text + "\"");
    } catch (const std::out_of_range&) {
        fail(line, "number out of range \"" + text + "\"");
    }
}

Value parse_value(const std::string& raw, int line) {
    Value v;
    v.line = line;
    if (raw.empty()) fail(line, "missing value");
    if (raw.front() == '"') {
        if (raw.size() < 2 || raw.back() != '"') fail(line, "unterminated string");
        v.kind = Value::Kind::string;
        v.str = raw.substr(1, raw.size() - 2);
        return v;
    }
    if (raw == "true" || raw == "false") {
        v.kind = Value::Kind::boolean;
        v.boolean = raw == "true";
        return v;
    }
    if (raw.front() == '[') {
        if (raw.back() != ']') fail(line, "unterminated array");
        v.kind = Value::Kind::array;
        std::string inner = raw.substr(1, raw.size() - 2);
        std::stringstream ss(inner);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) fail(line, "empty array element");
            v.array.push_back(parse_number(item, line));
        }
        return v;
    }
    v.kind = Value::Kind::number;
    v.num = parse_number(raw, line);
    v.str = raw;
    return v;
}

// typed getters over one section
class Section {
public:
    Section(const Table& table, const std::string& name) : name_(name) {
        auto it = table.find(name);
        if (it != table.end()) entries_ = &it->second;
    }

    double number(const std::string& key, double fallback) {
        const Value* v = get(key, Value::Kind::number);
        return v ? v->num : fallback;
    }

    int integer(const std::string& key, int fallback) {
        const Value* v = get(key, Value::Kind::number);
        if (!v) return fallback;
        if (v->num != std::floor(v->num)) fail(v->line, qualify(key) + " must be an integer");
        return static_cast<int>(v->num);
    }

    std::uint64_t u64(const std::string& key, std::uint64_t fallback) {
        const Value* v = get(key, Value::Kind::number);
        if (!v) return fallback;
        std::uint64_t out = 0;
        const auto* first = v->str.data();
        const auto* last = first + v->str.size();
        auto [ptr, ec] = std::from_chars(first, last, out);
        if (ec != std::errc{} || ptr != last)
            fail(v->line, qualify(key) + " must be an unsigned 64-bit integer");
        return out;
    }

    bool boolean(const std::string& key, bool fallback) {
        const Value* v = get(key, Value::Kind::boolean);
        return v ? v->boolean : fallback;
    }

    std::string string(const std::string& key, const std::string& fallback) {
        const Value* v = get(key, Value::Kind::string);
        return v ? v->str : fallback;
    }

    std::vector<double> array(const std::string& key) {
        const Value* v = get(key, Value::Kind::array);
        return v ? v->array : std::vector<double>{};
    }

    bool has(const std::string& key) const {
        return entries_ && entries_->count(key) > 0;
    }

    void reject_unknown() const {
        if (!entries_) return;
        for (const auto& [key, value] : *entries_) {
            if (!seen_.count(key)) fail(value.line, "unknown key " + qualify(key));
        }
    }

private:
    const Value* get(const std::string& key, Value::Kind kind) {
        seen_.insert(key);
        if (!entries_) return nullptr;
        auto it = entries_->find(key);
        if (it == entries_->end()) return nullptr;
        if (it->second.kind != kind) fail(it->second.line, qualify(key) + " has the wrong type");
        return &it->second;
    }

    std::string qualify(const std::string& key) const {
        return name_.empty() ? key : name_ + "." + key;
    }

    std::string name_;
    const std::map<std::string, Value>* entries_ = nullptr;
    mutable std::set<std::string> seen_;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

Table parse(const std::string& text) {
    Table table;
    std::string section;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        // strip comments, respecting quoted strings
        bool in_string = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_string = !in_string;
            if (line[i] == '#' && !in_string) {
                line = line.substr(0, i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) fail(lineno, "empty section name");
            table[section];
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(lineno, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string raw = trim(line.substr(eq + 1));
        if (key.empty()) fail(lineno, "empty key");
        if (table[section].count(key)) fail(lineno, "duplicate key " + key);
        table[section][key] = parse_value(raw, lineno);
    }
    return table;
}

ScenarioConfig from_table(const Table& table) {
    static const std::set<std::string> known_sections = {
        "", "emission", "air", "panel", "binding", "esc", "power_model", "timing"};
    for (const auto& [name, entries] : table) {
        if (!known_sections.count(name)) {
            const int line = entries.empty() ? 0 : entries.begin()->second.line;
            fail(line, "unknown section [" + name + "]");
        }
    }

    ScenarioConfig cfg;

    Section top(table, "");
    cfg.wall_distance_m = top.number("wall_distance", cfg.wall_distance_m);
    cfg.noise_sigma = top.number("noise_sigma", cfg.noise_sigma);
    cfg.type_code = top.integer("type_code", cfg.type_code);
    cfg.master_seed = top.u64("master_seed", cfg.master_seed);
    cfg.duration_s = top.number("duration", cfg.duration_s);
    top.reject_unknown();

    Section em(table, "emission");
    cfg.emission.mass_mean_kg = em.number("mass_mean", cfg.emission.mass_mean_kg);
    cfg.emission.mass_std_kg = em.number("mass_std", cfg.emission.mass_std_kg);
    cfg.emission.speed_mean_mps = em.number("speed_mean", cfg.emission.speed_mean_mps);
    cfg.emission.speed_std_mps = em.number("speed_std", cfg.emission.speed_std_mps);
    cfg.emission.h_angle_mean_deg = em.number("h_angle_mean", cfg.emission.h_angle_mean_deg);
    cfg.emission.h_angle_std_deg = em.number("h_angle_std", cfg.emission.h_angle_std_deg);
    cfg.emission.v_angle_mean_deg = em.number("v_angle_mean", cfg.emission.v_angle_mean_deg);
    cfg.emission.v_angle_std_deg = em.number("v_angle_std", cfg.emission.v_angle_std_deg);
    const int count = em.integer("count", static_cast<int>(cfg.emission.count));
    if (count < 0) throw std::invalid_argument("emission.count must be >= 0");
    cfg.emission.count = static_cast<std::size_t>(count);
    em.reject_unknown();

    Section air(table, "air");
    cfg.air.air_density = air.number("air_density", cfg.air.air_density);
    cfg.air.drag_coefficient = air.number("drag_coefficient", cfg.air.drag_coefficient);
    cfg.air.gravity = air.number("gravity", cfg.air.gravity);
    cfg.air.droplet_density = air.number("droplet_density", cfg.air.droplet_density);
    cfg.air.dt_s = air.number("dt", cfg.air.dt_s);
    cfg.air.drag_enabled = air.boolean("drag_enabled", cfg.air.drag_enabled);
    cfg.air.emitter_height_m = air.number("emitter_height", cfg.air.emitter_height_m);
    cfg.air.flight_timeout_s = air.number("flight_timeout", cfg.air.flight_timeout_s);
    air.reject_unknown();

    Section pan(table, "panel");
    cfg.panel_geom.width_m = pan.number("width", cfg.panel_geom.width_m);
    cfg.panel_geom.height_m = pan.number("height", cfg.panel_geom.height_m);
    cfg.panel_geom.tile_cols = pan.integer("tile_cols", cfg.panel_geom.tile_cols);
    cfg.panel_geom.tile_rows = pan.integer("tile_rows", cfg.panel_geom.tile_rows);
    cfg.panel_geom.center_y_m = pan.number("center_y", cfg.panel_geom.center_y_m);
    cfg.panel_geom.center_z_m = pan.number("center_z", cfg.panel_geom.center_z_m);
    pan.reject_unknown();

    Section bind(table, "binding");
    cfg.binding.receptors_per_tile =
        bind.integer("receptors_per_tile", cfg.binding.receptors_per_tile);
    cfg.binding.p_bind = bind.number("p_bind", cfg.binding.p_bind);
    if (bind.has("preset")) cfg.binding.preset = bind.string("preset", "");
    bind.reject_unknown();

    Section esc(table, "esc");
    cfg.esc.dither_amplitude_deg = esc.number("dither_amplitude", cfg.esc.dither_amplitude_deg);
    cfg.esc.dither_frequency_rad_s =
        esc.number("dither_frequency", cfg.esc.dither_frequency_rad_s);
    cfg.esc.integrator_gain = esc.number("integrator_gain", cfg.esc.integrator_gain);
    cfg.esc.hpf_cutoff_rad_s = esc.number("hpf_cutoff", cfg.esc.hpf_cutoff_rad_s);
    cfg.esc.dt_s = esc.number("dt", cfg.esc.dt_s);
    cfg.esc.theta_init_deg = esc.number("theta_init", cfg.esc.theta_init_deg);
    cfg.esc.theta_rx_deg = esc.number("theta_rx", cfg.esc.theta_rx_deg);
    esc.reject_unknown();

    Section power(table, "power_model");
    const std::string kind = power.string("kind", "gaussian");
    if (kind == "gaussian") {
        steering::GaussianLobe lobe;
        lobe.sigma_deg = power.number("sigma", lobe.sigma_deg);
        power.number("n_elements", 0);  // mark as known even if unused
        power.number("spacing_wavelengths", 0);
        cfg.power_model = lobe;
    } else if (kind == "uniform_array") {
        steering::UniformArray arr;
        arr.n_elements = power.integer("n_elements", arr.n_elements);
        arr.spacing_wavelengths = power.number("spacing_wavelengths", arr.spacing_wavelengths);
        power.number("sigma", 0);
        if (arr.n_elements < 1)
            throw std::invalid_argument("power_model.n_elements must be >= 1");
        cfg.power_model = arr;
    } else {
        throw std::invalid_argument("power_model.kind must be gaussian or uniform_array (got \"" +
                                    kind + "\")");
    }
    power.reject_unknown();

    Section tim(table, "timing");
    const std::vector<double> times = tim.array("bit_times");
    if (!times.empty()) {
        if (times.size() != 5)
            throw std::invalid_argument("timing.bit_times must have exactly 5 entries");
        for (std::size_t i = 0; i < 5; ++i) cfg.timing.bit_times_s[i] = times[i];
    }
    cfg.timing.w0_s = tim.number("w0", cfg.timing.w0_s);
    cfg.timing.w1_s = tim.number("w1", cfg.timing.w1_s);
    cfg.timing.delta_deg = tim.number("delta", cfg.timing.delta_deg);
    tim.reject_unknown();

    cfg.validate();
    return cfg;
}

ScenarioConfig load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_table(parse(ss.str()));
}

std::string to_toml(const ScenarioConfig& cfg) {
    std::string out;
    out += "wall_distance = " + fmt(cfg.wall_distance_m) + "\n";
    out += "noise_sigma = " + fmt(cfg.noise_sigma) + "\n";
    out += "type_code = " + std::to_string(cfg.type_code) + "\n";
    out += "master_seed = " + std::to_string(cfg.master_seed) + "\n";
    out += "duration = " + fmt(cfg.duration_s) + "\n";

    out += "\n[emission]\n";
    out += "mass_mean = " + fmt(cfg.emission.mass_mean_kg) + "\n";
    out += "mass_std = " + fmt(cfg.emission.mass_std_kg) + "\n";
    out += "speed_mean = " + fmt(cfg.emission.speed_mean_mps) + "\n";
    out += "speed_std = " + fmt(cfg.emission.speed_std_mps) + "\n";
    out += "h_angle_mean = " + fmt(cfg.emission.h_angle_mean_deg) + "\n";
    out += "h_angle_std = " + fmt(cfg.emission.h_angle_std_deg) + "\n";
    out += "v_angle_mean = " + fmt(cfg.emission.v_angle_mean_deg) + "\n";
    out += "v_angle_std = " + fmt(cfg.emission.v_angle_std_deg) + "\n";
    out += "count = " + std::to_string(cfg.emission.count) + "\n";

    out += "\n[air]\n";
    out += "air_density = " + fmt(cfg.air.air_density) + "\n";
    out += "drag_coefficient = " + fmt(cfg.air.drag_coefficient) + "\n";
    out += "gravity = " + fmt(cfg.air.gravity) + "\n";
    out += "droplet_density = " + fmt(cfg.air.droplet_density) + "\n";
    out += "dt = " + fmt(cfg.air.dt_s) + "\n";
    out += std::string("drag_enabled = ") + (cfg.air.drag_enabled ? "true" : "false") + "\n";
    out += "emitter_height = " + fmt(cfg.air.emitter_height_m) + "\n";
    out += "flight_timeout = " + fmt(cfg.air.flight_timeout_s) + "\n";

    out += "\n[panel]\n";
    out += "width = " + fmt(cfg.panel_geom.width_m) + "\n";
    out += "height = " + fmt(cfg.panel_geom.height_m) + "\n";
    out += "tile_cols = " + std::to_string(cfg.panel_geom.tile_cols) + "\n";
    out += "tile_rows = " + std::to_string(cfg.panel_geom.tile_rows) + "\n";
    out += "center_y = " + fmt(cfg.panel_geom.center_y_m) + "\n";
    out += "center_z = " + fmt(cfg.panel_geom.center_z_m) + "\n";

    out += "\n[binding]\n";
    out += "receptors_per_tile = " + std::to_string(cfg.binding.receptors_per_tile) + "\n";
    out += "p_bind = " + fmt(cfg.binding.p_bind) + "\n";
    if (cfg.binding.preset) out += "preset = \"" + *cfg.binding.preset + "\"\n";

    out += "\n[esc]\n";
    out += "dither_amplitude = " + fmt(cfg.esc.dither_amplitude_deg) + "\n";
    out += "dither_frequency = " + fmt(cfg.esc.dither_frequency_rad_s) + "\n";
    out += "integrator_gain = " + fmt(cfg.esc.integrator_gain) + "\n";
    out += "hpf_cutoff = " + fmt(cfg.esc.hpf_cutoff_rad_s) + "\n";
    out += "dt = " + fmt(cfg.esc.dt_s) + "\n";
    out += "theta_init = " + fmt(cfg.esc.theta_init_deg) + "\n";
    out += "theta_rx = " + fmt(cfg.esc.theta_rx_deg) + "\n";

    out += "\n[power_model]\n";
    if (const auto* lobe = std::get_if<steering::GaussianLobe>(&cfg.power_model)) {
        out += "kind = \"gaussian\"\n";
        out += "sigma = " + fmt(lobe->sigma_deg) + "\n";
    } else {
        const auto& arr = std::get<steering::UniformArray>(cfg.power_model);
        out += "kind = \"uniform_array\"\n";
        out += "n_elements = " + std::to_string(arr.n_elements) + "\n";
        out += "spacing_wavelengths = " + fmt(arr.spacing_wavelengths) + "\n";
    }

    out += "\n[timing]\n";
    out += "bit_times = [" + fmt(cfg.timing.bit_times_s[0]) + ", " + fmt(cfg.timing.bit_times_s[1]) +
           ", " + fmt(cfg.timing.bit_times_s[2]) + ", " + fmt(cfg.timing.bit_times_s[3]) + ", " +
           fmt(cfg.timing.bit_times_s[4]) + "]\n";
    out += "w0 = " + fmt(cfg.timing.w0_s) + "\n";
    out += "w1 = " + fmt(cfg.timing.w1_s) + "\n";
    out += "delta = " + fmt(cfg.timing.delta_deg) + "\n";
    return out;
}

}  // namespace config
}  // namespace irvd::scenario
