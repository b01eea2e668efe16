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

#include "beamsteer/channel.hpp"

#include "beamsteer/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace beamsteer {

namespace {

double db_to_linear(double db) {
    return std::pow(10.0, db / 10.0);
}

void require_in_front(const NodePosition& p, const char* who) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        throw GeometryError(std::string(who) + " position is not finite");
    }
    if (p.y <= 0.0) {
        throw GeometryError(std::string(who) + " is on the array axis or behind the tag");
    }
}

Complex hop_gain(double dist, double lambda, double exponent, double antenna_gain_linear) {
    const double amplitude = std::sqrt(path_gain(dist, lambda, exponent) * antenna_gain_linear);
    return std::polar(amplitude, -kTwoPi * dist / lambda);
}

} // namespace

double distance(const NodePosition& a, const NodePosition& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

double angle_from_tag(const NodePosition& p) {
    return std::atan2(p.x, p.y);
}

NodePosition position_from_polar(double distance_m, double angle_rad) {
    return {distance_m * std::sin(angle_rad), distance_m * std::cos(angle_rad)};
}

void RadioParams::validate() const {
    if (!(carrier_hz > 0.0)) {
        throw ConfigError("radio: carrier_hz must be positive");
    }
    if (path_loss_exponent < 2.0 || path_loss_exponent > 4.0) {
        throw ConfigError("radio: path_loss_exponent must lie in [2, 4]");
    }
    if (tag_conversion_loss_db < 0.0) {
        throw ConfigError("radio: tag_conversion_loss_db must be >= 0");
    }
    if (std::isnan(noise_floor_dbm) || noise_floor_dbm == std::numeric_limits<double>::infinity()) {
        throw ConfigError("radio: noise_floor_dbm must be finite or -inf");
    }
}

double friis_path_gain(double distance_m, double wavelength_m) {
    if (!(distance_m > 0.0)) {
        throw DomainError("friis_path_gain: distance must be positive");
    }
    const double a = wavelength_m / (4.0 * kPi * distance_m);
    return a * a;
}

double path_gain(double distance_m, double wavelength_m, double exponent) {
    if (!(distance_m > 0.0)) {
        throw DomainError("path_gain: distance must be positive");
    }
    return friis_path_gain(1.0, wavelength_m) * std::pow(distance_m, -exponent);
}

double path_loss_db(double distance_m, double wavelength_m, double exponent) {
    return -10.0 * std::log10(path_gain(distance_m, wavelength_m, exponent));
}

Complex backscatter_channel(const NodePosition& tx, const NodePosition& rx, const TagConfig& cfg,
                            const RadioParams& params) {
    require_in_front(tx, "tx");
    require_in_front(rx, "rx");
    cfg.validate();

    const double lambda = params.wavelength();
    const double n = params.path_loss_exponent;
    const double element_gain = db_to_linear(params.tag_element_gain_dbi);
    const double g_tx = db_to_linear(params.tx_gain_dbi) * element_gain;
    const double g_rx = db_to_linear(params.rx_gain_dbi) * element_gain;
    const double conversion = std::sqrt(db_to_linear(-params.tag_conversion_loss_db));

    if (params.far_field) {
        const Complex g1 = hop_gain(distance(tx, {}), lambda, n, g_tx);
        const Complex g2 = hop_gain(distance(rx, {}), lambda, n, g_rx);
        const Complex af = array_factor(cfg, {angle_from_tag(tx), angle_from_tag(rx)});
        return g1 * af * g2 * conversion;
    }

    const double spacing_m = cfg.spacing_wavelengths * lambda;
    Complex sum{0.0, 0.0};
    for (int k = 0; k < cfg.num_antennas; ++k) {
        const NodePosition element{-k * spacing_m, 0.0};
        const Complex g1 = hop_gain(distance(tx, element), lambda, n, g_tx);
        const Complex g2 = hop_gain(distance(rx, element), lambda, n, g_rx);
        sum += g1 * std::polar(1.0, k * cfg.phase_step) * g2;
    }
    return sum * conversion;
}

double csi_noise_variance(const RadioParams& params) {
    if (std::isinf(params.noise_floor_dbm) && params.noise_floor_dbm < 0.0) {
        return 0.0;
    }
    return db_to_linear(params.noise_floor_dbm - params.tx_power_dbm);
}

CsiMeasurement measure_csi(Complex h, const RadioParams& params, std::mt19937_64& rng) {
    CsiMeasurement m;
    m.noise_variance = csi_noise_variance(params);
    m.complex_gain = h;
    if (m.noise_variance > 0.0) {
        std::normal_distribution<double> component(0.0, std::sqrt(m.noise_variance / 2.0));
        const double re = component(rng);
        const double im = component(rng);
        m.complex_gain += Complex{re, im};
    }
    const double p = std::norm(m.complex_gain);
    m.rssi_dbm = p > 0.0 ? params.tx_power_dbm + 10.0 * std::log10(p)
                         : -std::numeric_limits<double>::infinity();
    m.channel_index = shift_channel(params.excitation_channel);
    return m;
}

CsiMeasurement measure_csi(Complex h, const RadioParams& params, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return measure_csi(h, params, rng);
}

double amplitude_from_rssi(double rssi_dbm, double tx_power_dbm) {
    return std::pow(10.0, (rssi_dbm - tx_power_dbm) / 20.0);
}

ChannelMap::ChannelMap() : mapping_{{1, 11}, {11, 1}} {}

ChannelMap::ChannelMap(std::map<int, int> mapping) : mapping_(std::move(mapping)) {
    for (const auto& [from, to] : mapping_) {
        if (from < 1 || from > 11 || to < 1 || to > 11) {
            throw ConfigError("channel map entries must lie in 1..11");
        }
    }
}

int ChannelMap::shift(int input_channel) const {
    if (input_channel < 1 || input_channel > 11) {
        throw ConfigError("channel " + std::to_string(input_channel) +
                          " is outside the 2.4 GHz band 1..11");
    }
    const auto it = mapping_.find(input_channel);
    if (it == mapping_.end()) {
        throw ConfigError("channel " + std::to_string(input_channel) + " has no shift mapping");
    }
    return it->second;
}

double ChannelMap::center_frequency_hz(int channel) {
    if (channel < 1 || channel > 13) {
        throw ConfigError("no 2.4 GHz center frequency for channel " + std::to_string(channel));
    }
    return 2.407e9 + 5e6 * channel;
}

int shift_channel(int input_channel) {
    static const ChannelMap default_map;
    return default_map.shift(input_channel);
}

} // namespace beamsteer
