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

#include "beamsteer/array_model.hpp"

#include "beamsteer/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace beamsteer {

namespace {

// Tie tolerance in units of one tap spacing.
constexpr double kTapTieEps = 1e-9;

double residual_geometric_phase(double spacing_wavelengths, const PlaneWaveAngles& angles) {
    return kTwoPi * spacing_wavelengths * (std::sin(angles.theta_out) + std::sin(angles.theta_in));
}

} // namespace

void TagConfig::validate() const {
    if (num_antennas < 1) {
        throw ConfigError("tag: num_antennas must be >= 1, got " + std::to_string(num_antennas));
    }
    if (quantization_levels < 1) {
        throw ConfigError("tag: quantization_levels must be >= 1, got " +
                          std::to_string(quantization_levels));
    }
    if (!(spacing_wavelengths > 0.0) || !std::isfinite(spacing_wavelengths)) {
        throw ConfigError("tag: spacing_wavelengths must be positive");
    }
    if (!std::isfinite(phase_step)) {
        throw ConfigError("tag: phase_step must be finite");
    }
}

double wrap_angle(double radians) {
    double r = std::remainder(radians, kTwoPi); // [-pi, pi]
    if (r <= -kPi) {
        r += kTwoPi;
    }
    return r;
}

double circular_distance(double a, double b) {
    return std::abs(wrap_angle(a - b));
}

Complex progressive_sum(int num_antennas, double residual_phase) {
    Complex sum{0.0, 0.0};
    for (int k = 0; k < num_antennas; ++k) {
        sum += std::polar(1.0, k * residual_phase);
    }
    return sum;
}

Complex array_factor(const TagConfig& cfg, const PlaneWaveAngles& angles) {
    const double geometric = residual_geometric_phase(cfg.spacing_wavelengths, angles);
    Complex sum{0.0, 0.0};
    for (int k = 0; k < cfg.num_antennas; ++k) {
        // Applied and geometric terms kept as separate factors to follow the
        // per-element model literally.
        sum += std::polar(1.0, k * cfg.phase_step) * std::polar(1.0, -k * geometric);
    }
    return sum;
}

Complex array_factor(std::span<const double> element_phases, double spacing_wavelengths,
                     const PlaneWaveAngles& angles) {
    const double geometric = residual_geometric_phase(spacing_wavelengths, angles);
    Complex sum{0.0, 0.0};
    for (std::size_t k = 0; k < element_phases.size(); ++k) {
        sum += std::polar(1.0, element_phases[k] - static_cast<double>(k) * geometric);
    }
    return sum;
}

BeamPattern beam_pattern(const TagConfig& cfg, double theta_in, int num_points) {
    if (num_points < 2) {
        throw DomainError("beam_pattern: num_points must be >= 2");
    }
    BeamPattern pattern;
    pattern.samples.resize(static_cast<std::size_t>(num_points));
    const double step = kPi / (num_points - 1);
    for (int i = 0; i < num_points; ++i) {
        auto& s = pattern.samples[static_cast<std::size_t>(i)];
        s.theta = (i == num_points - 1) ? kPi / 2.0 : -kPi / 2.0 + i * step;
        s.raw_power = std::norm(array_factor(cfg, {theta_in, s.theta}));
        if (s.raw_power > pattern.peak_raw_power) {
            pattern.peak_raw_power = s.raw_power;
            pattern.peak_theta = s.theta;
        }
    }
    for (auto& s : pattern.samples) {
        s.normalized = pattern.peak_raw_power > 0.0 ? s.raw_power / pattern.peak_raw_power : 0.0;
        s.power_db = s.normalized > 0.0 ? 10.0 * std::log10(s.normalized)
                                        : -std::numeric_limits<double>::infinity();
    }
    return pattern;
}

std::vector<double> peak_angles(const BeamPattern& pattern, double rel_tol) {
    std::vector<double> peaks;
    bool in_run = false;
    double best_in_run = -1.0;
    for (const auto& s : pattern.samples) {
        const bool at_peak = s.raw_power >= pattern.peak_raw_power * (1.0 - rel_tol);
        if (at_peak && (!in_run || s.raw_power > best_in_run)) {
            if (in_run) {
                peaks.back() = s.theta;
            } else {
                peaks.push_back(s.theta);
            }
            best_in_run = s.raw_power;
        }
        in_run = at_peak;
        if (!at_peak) {
            best_in_run = -1.0;
        }
    }
    return peaks;
}

double half_power_beamwidth(const BeamPattern& pattern) {
    const auto& s = pattern.samples;
    if (s.empty()) {
        return 0.0;
    }
    const auto peak_it = std::max_element(s.begin(), s.end(), [](const auto& a, const auto& b) {
        return a.normalized < b.normalized;
    });
    const auto peak = static_cast<std::size_t>(peak_it - s.begin());
    const double half = 0.5;

    auto crossing = [&](std::size_t inside, std::size_t outside) {
        const double y0 = s[inside].normalized;
        const double y1 = s[outside].normalized;
        const double t = (y0 - half) / (y0 - y1);
        return s[inside].theta + t * (s[outside].theta - s[inside].theta);
    };

    double left = s.front().theta;
    for (std::size_t i = peak; i > 0; --i) {
        if (s[i - 1].normalized < half) {
            left = crossing(i, i - 1);
            break;
        }
    }
    double right = s.back().theta;
    for (std::size_t i = peak; i + 1 < s.size(); ++i) {
        if (s[i + 1].normalized < half) {
            right = crossing(i, i + 1);
            break;
        }
    }
    return right - left;
}

double steering_phase(double theta_in, double theta_out, double spacing_wavelengths) {
    return wrap_angle(kTwoPi * spacing_wavelengths * (std::sin(theta_out) + std::sin(theta_in)));
}

double tap_phase(int index, int levels) {
    return kTwoPi * static_cast<double>(index) / static_cast<double>(levels);
}

QuantizedPhase quantize_phase(double delta, int levels) {
    if (levels < 1) {
        throw DomainError("quantize_phase: levels must be >= 1");
    }
    // Position on the tap circle in units of one tap spacing, in [0, K).
    double t = std::fmod(delta / kTwoPi * levels, static_cast<double>(levels));
    if (t < 0.0) {
        t += levels;
    }
    const double lower = std::floor(t);
    const double frac = t - lower;
    const int lo = static_cast<int>(lower) % levels;
    const int hi = (lo + 1) % levels;

    int index = lo;
    if (std::abs(frac - 0.5) <= kTapTieEps) {
        index = std::min(lo, hi);
    } else if (frac > 0.5) {
        index = hi;
    }
    return {index, tap_phase(index, levels)};
}

} // namespace beamsteer
