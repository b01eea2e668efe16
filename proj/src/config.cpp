// SPDX-License-Identifier: Apache-2.0
//
// beamsteer: beam-steering MIMO WiFi backscatter simulator
// Copyright (C) 2026 The beamsteer authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "beamsteer/config.hpp"

#include "beamsteer/calibration.hpp"
#include "beamsteer/errors.hpp"
#include "beamsteer/protocol.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string_view>

namespace beamsteer {

namespace {

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fmt(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? "," : "") + fmt(v[i]);
    }
    return s;
}

std::string fmt(const std::vector<NodePosition>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? ";" : "") + fmt(v[i].x) + ":" + fmt(v[i].y);
    }
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text) {
    const std::string t = trim(text);
    try {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used != t.size()) {
            throw ConfigError("trailing characters in number '" + t + "'");
        }
        return v;
    } catch (const std::logic_error&) {
        throw ConfigError("not a number: '" + t + "'");
    }
}

long long parse_int(const std::string& text) {
    const std::string t = trim(text);
    long long v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
        throw ConfigError("not an integer: '" + t + "'");
    }
    return v;
}

std::uint64_t parse_u64(const std::string& text) {
    const std::string t = trim(text);
    std::uint64_t v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
        throw ConfigError("not an unsigned integer: '" + t + "'");
    }
    return v;
}

bool parse_bool(const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes") {
        return true;
    }
    if (t == "false" || t == "0" || t == "no") {
        return false;
    }
    throw ConfigError("not a boolean: '" + t + "'");
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (!trim(item).empty()) {
            parts.push_back(trim(item));
        }
    }
    return parts;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& p : split(text, ',')) {
        out.push_back(parse_double(p));
    }
    return out;
}

std::vector<NodePosition> parse_positions(const std::string& text) {
    std::vector<NodePosition> out;
    for (const auto& p : split(text, ';')) {
        const auto xy = split(p, ':');
        if (xy.size() != 2) {
            throw ConfigError("AP position must be x:y, got '" + p + "'");
        }
        out.push_back({parse_double(xy[0]), parse_double(xy[1])});
    }
    return out;
}

struct Key {
    const char* section;
    const char* name;
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string&)> set;
};

#define BS_DOUBLE(sec, key, field)                                                                 \
    Key {                                                                                          \
        sec, key, [](const ExperimentConfig& c) { return fmt(c.field); },                          \
            [](ExperimentConfig& c, const std::string& v) { c.field = parse_double(v); }           \
    }
#define BS_INT(sec, key, field)                                                                    \
    Key {                                                                                          \
        sec, key, [](const ExperimentConfig& c) { return std::to_string(c.field); },               \
            [](ExperimentConfig& c, const std::string& v) {                                        \
                c.field = static_cast<decltype(c.field)>(parse_int(v));                            \
            }                                                                                      \
    }
#define BS_BOOL(sec, key, field)                                                                   \
    Key {                                                                                          \
        sec, key, [](const ExperimentConfig& c) { return std::string(c.field ? "true" : "false"); }, \
            [](ExperimentConfig& c, const std::string& v) { c.field = parse_bool(v); }             \
    }
#define BS_STRING(sec, key, field)                                                                 \
    Key {                                                                                          \
        sec, key, [](const ExperimentConfig& c) { return c.field; },                               \
            [](ExperimentConfig& c, const std::string& v) { c.field = trim(v); }                   \
    }
#define BS_LIST(sec, key, field)                                                                   \
    Key {                                                                                          \
        sec, key, [](const ExperimentConfig& c) { return fmt(c.field); },                          \
            [](ExperimentConfig& c, const std::string& v) { c.field = parse_list(v); }             \
    }
#define BS_POSITIONS(sec, key, field)                                                              \
    Key {                                                                                          \
        sec, key, [](const ExperimentConfig& c) { return fmt(c.field); },                          \
            [](ExperimentConfig& c, const std::string& v) { c.field = parse_positions(v); }        \
    }

const std::vector<Key>& schema() {
    static const std::vector<Key> keys{
        BS_INT("tag", "num_antennas", tag.num_antennas),
        BS_DOUBLE("tag", "spacing_wavelengths", tag.spacing_wavelengths),
        BS_INT("tag", "quantization_levels", tag.quantization_levels),

        BS_DOUBLE("radio", "tx_power_dbm", radio.tx_power_dbm),
        BS_DOUBLE("radio", "tx_gain_dbi", radio.tx_gain_dbi),
        BS_DOUBLE("radio", "rx_gain_dbi", radio.rx_gain_dbi),
        BS_DOUBLE("radio", "tag_element_gain_dbi", radio.tag_element_gain_dbi),
        BS_DOUBLE("radio", "carrier_hz", radio.carrier_hz),
        BS_DOUBLE("radio", "noise_floor_dbm", radio.noise_floor_dbm),
        BS_DOUBLE("radio", "tag_conversion_loss_db", radio.tag_conversion_loss_db),
        BS_DOUBLE("radio", "path_loss_exponent", radio.path_loss_exponent),
        BS_DOUBLE("radio", "sensitivity_dbm", radio.sensitivity_dbm),
        BS_INT("radio", "excitation_channel", radio.excitation_channel),
        BS_BOOL("radio", "far_field", radio.far_field),

        BS_DOUBLE("linkbudget", "retro_self_interference_db", retro_self_interference_db),
        BS_BOOL("linkbudget", "calibrated", calibrated),
        BS_DOUBLE("linkbudget", "d_max_m", range.d_max_m),
        BS_DOUBLE("linkbudget", "grid_step_m", range.grid_step_m),
        BS_DOUBLE("linkbudget", "expected_single_m", range.expected_single_m),
        BS_DOUBLE("linkbudget", "expected_retro_m", range.expected_retro_m),
        BS_DOUBLE("linkbudget", "expected_beam_m", range.expected_beam_m),
        BS_DOUBLE("linkbudget", "tolerance_m", range.tolerance_m),

        BS_DOUBLE("beampattern", "delta_deg", beampattern.delta_deg),
        BS_DOUBLE("beampattern", "theta_in_deg", beampattern.theta_in_deg),
        BS_INT("beampattern", "num_points", beampattern.num_points),

        BS_DOUBLE("estimation", "tx_distance_m", estimation.tx_distance_m),
        BS_DOUBLE("estimation", "tx_angle_deg", estimation.tx_angle_deg),
        BS_LIST("estimation", "rx_angles_deg", estimation.rx_angles_deg),
        BS_LIST("estimation", "rx_distances_m", estimation.rx_distances_m),
        BS_INT("estimation", "num_trials", estimation.num_trials),
        BS_DOUBLE("estimation", "accuracy_threshold_deg", estimation.accuracy_threshold_deg),
        BS_BOOL("estimation", "noise_enabled", estimation.noise_enabled),
        BS_DOUBLE("estimation", "check_distance_m", estimation.check_distance_m),
        BS_DOUBLE("estimation", "check_angle_deg", estimation.check_angle_deg),
        BS_DOUBLE("estimation", "min_accurate_fraction", estimation.min_accurate_fraction),

        BS_STRING("protocol", "policy", protocol.policy),
        BS_INT("protocol", "num_sessions", protocol.num_sessions),
        BS_DOUBLE("protocol", "slot_s", protocol.slot_s),
        BS_INT("protocol", "response_window_slots", protocol.response_window_slots),
        BS_DOUBLE("protocol", "loss_probability", protocol.loss_probability),
        BS_INT("protocol", "data_packets", protocol.data_packets),
        BS_DOUBLE("protocol", "min_angle_deg", protocol.min_angle_deg),
        BS_DOUBLE("protocol", "max_angle_deg", protocol.max_angle_deg),
        BS_DOUBLE("protocol", "min_distance_m", protocol.min_distance_m),
        BS_DOUBLE("protocol", "max_distance_m", protocol.max_distance_m),
        BS_POSITIONS("protocol", "mesh_aps", protocol.mesh_aps),

        BS_DOUBLE("coverage", "floor_width_m", coverage.floor_width_m),
        BS_DOUBLE("coverage", "floor_height_m", coverage.floor_height_m),
        BS_DOUBLE("coverage", "cell_m", coverage.cell_m),
        BS_STRING("coverage", "variant", coverage.variant),
        BS_POSITIONS("coverage", "aps", coverage.aps),

        Key{"run", "seed", [](const ExperimentConfig& c) { return std::to_string(c.seed); },
            [](ExperimentConfig& c, const std::string& v) { c.seed = parse_u64(v); }},
        BS_STRING("run", "out_dir", out_dir),
    };
    return keys;
}

#undef BS_DOUBLE
#undef BS_INT
#undef BS_BOOL
#undef BS_STRING
#undef BS_LIST
#undef BS_POSITIONS

void validate(const ExperimentConfig& c) {
    c.tag.validate();
    c.radio.validate();
    ChannelMap{}.shift(c.radio.excitation_channel);
    if (c.beampattern.num_points < 2) {
        throw ConfigError("beampattern.num_points must be >= 2");
    }
    if (c.estimation.num_trials < 1) {
        throw ConfigError("estimation.num_trials must be >= 1");
    }
    if (c.estimation.rx_angles_deg.empty() || c.estimation.rx_distances_m.empty()) {
        throw ConfigError("estimation needs at least one rx angle and distance");
    }
    if (c.protocol.policy != "both") {
        parse_policy(c.protocol.policy);
    }
    if (c.protocol.loss_probability < 0.0 || c.protocol.loss_probability > 1.0) {
        throw ConfigError("protocol.loss_probability must lie in [0, 1]");
    }
    if (c.protocol.min_angle_deg <= -90.0 || c.protocol.max_angle_deg >= 90.0 ||
        c.protocol.min_angle_deg > c.protocol.max_angle_deg) {
        throw ConfigError("protocol angle range must lie inside (-90, 90) degrees");
    }
    if (!(c.protocol.min_distance_m > 0.0) || c.protocol.min_distance_m > c.protocol.max_distance_m) {
        throw ConfigError("protocol distance range must be positive and ordered");
    }
    parse_tag_kind(c.coverage.variant);
    if (!(c.range.grid_step_m > 0.0) || !(c.coverage.cell_m > 0.0)) {
        throw ConfigError("grid and cell sizes must be positive");
    }
}

} // namespace

LinkBudgetCalibration ExperimentConfig::link_budget() const {
    return {radio, retro_self_interference_db, calibrated};
}

ExperimentConfig default_config() {
    ExperimentConfig c;
    const LinkBudgetCalibration cal = shipped_calibration();
    c.radio = cal.radio;
    c.retro_self_interference_db = cal.retro_self_interference_db;
    c.calibrated = cal.calibrated;
    return c;
}

ExperimentConfig parse_config(std::istream& in) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.what());
    }

    ExperimentConfig cfg = default_config();
    const auto& keys = schema();
    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            throw ConfigError("key '" + section + "' outside any section");
        }
        for (const auto& [name, value] : body) {
            const auto it = std::find_if(keys.begin(), keys.end(), [&](const Key& k) {
                return section == k.section && name == k.name;
            });
            if (it == keys.end()) {
                throw ConfigError("unknown config key '" + section + "." + name + "'");
            }
            try {
                it->set(cfg, value.data());
            } catch (const ConfigError& e) {
                throw ConfigError(section + "." + name + ": " + e.what());
            }
        }
    }
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path.string() + "'");
    }
    try {
        return parse_config(in);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string dump_config(const ExperimentConfig& cfg) {
    std::string out;
    std::string current;
    for (const auto& k : schema()) {
        if (current != k.section) {
            out += (current.empty() ? "[" : "\n[") + std::string(k.section) + "]\n";
            current = k.section;
        }
        out += std::string(k.name) + " = " + k.get(cfg) + "\n";
    }
    return out;
}

// Where results are written does not change them, so the output directory
// stays out of the resolved lines and the hash.
static bool result_relevant(const Key& k) {
    return std::string_view(k.section) != "run" || std::string_view(k.name) != "out_dir";
}

std::vector<std::string> resolved_config_lines(const ExperimentConfig& cfg) {
    std::vector<std::string> lines;
    for (const auto& k : schema()) {
        if (!result_relevant(k)) {
            continue;
        }
        lines.push_back(std::string(k.section) + "." + k.name + "=" + k.get(cfg));
    }
    return lines;
}

std::string config_hash(const ExperimentConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    std::string text;
    for (const auto& line : resolved_config_lines(cfg)) {
        text += line + '\n';
    }
    for (const unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

double deg_to_rad(double deg) {
    return deg * kPi / 180.0;
}

double rad_to_deg(double rad) {
    return rad * 180.0 / kPi;
}

} // namespace beamsteer
