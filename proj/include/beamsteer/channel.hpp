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

#pragma once

// Two-hop backscatter channel: Tx AP -> tag -> Rx AP.
//
// The tag sits at the origin with its array normal along +y. Element k is at
// (-k*d, 0), which makes the exact per-element path model agree with the
// plane-wave phase convention in array_model.hpp. Complex gains are
// normalized to the transmit power: received power = tx_power * |h|^2.

#include "beamsteer/array_model.hpp"

#include <cstdint>
#include <map>
#include <random>

namespace beamsteer {

inline constexpr double kSpeedOfLight = 299'792'458.0;

struct NodePosition {
    double x = 0.0;
    double y = 0.0;
};

double distance(const NodePosition& a, const NodePosition& b);

// Angle from the tag normal (+y), positive toward +x.
double angle_from_tag(const NodePosition& p);

NodePosition position_from_polar(double distance_m, double angle_rad);

struct RadioParams {
    double tx_power_dbm = 20.0;
    double tx_gain_dbi = 0.0;
    double rx_gain_dbi = 0.0;
    double tag_element_gain_dbi = 0.0;
    double carrier_hz = 2.412e9; // WiFi channel 1
    double noise_floor_dbm = -95.0;
    double tag_conversion_loss_db = 0.0;
    double path_loss_exponent = 2.0; // 2 is free space, up to 4 allowed
    double sensitivity_dbm = -90.0;  // decode threshold for backscattered data
    int excitation_channel = 1;
    bool far_field = true;

    double wavelength() const { return kSpeedOfLight / carrier_hz; }
    void validate() const;
};

struct CsiMeasurement {
    Complex complex_gain{0.0, 0.0};
    double rssi_dbm = 0.0;
    double noise_variance = 0.0; // normalized to tx power, like complex_gain
    int channel_index = 0;
};

// (lambda / (4*pi*d))^2.
double friis_path_gain(double distance_m, double wavelength_m);

// Log-distance model anchored at 1 m free space:
//   PL(d) = PL_friis(1 m) + 10 * n * log10(d / 1 m).
// Equals friis_path_gain for n = 2.
double path_gain(double distance_m, double wavelength_m, double exponent);

double path_loss_db(double distance_m, double wavelength_m, double exponent);

Complex backscatter_channel(const NodePosition& tx, const NodePosition& rx, const TagConfig& cfg,
                            const RadioParams& params);

// Per-measurement noise variance relative to the transmit power. Zero when the
// floor is -inf.
double csi_noise_variance(const RadioParams& params);

CsiMeasurement measure_csi(Complex h, const RadioParams& params, std::uint64_t seed);
CsiMeasurement measure_csi(Complex h, const RadioParams& params, std::mt19937_64& rng);

// Converts an RSSI reading back to the linear amplitude domain of complex_gain.
double amplitude_from_rssi(double rssi_dbm, double tx_power_dbm);

// Frequency-shift bookkeeping: which WiFi channel the backscattered copy
// lands on. Only the 2.4 GHz channels 1..11 are accepted.
class ChannelMap {
  public:
    // 1 <-> 11 (2412 MHz <-> 2462 MHz).
    ChannelMap();
    explicit ChannelMap(std::map<int, int> mapping);

    int shift(int input_channel) const;

    static double center_frequency_hz(int channel);

  private:
    std::map<int, int> mapping_;
};

int shift_channel(int input_channel);

} // namespace beamsteer
