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

// Reflective linear array of the tag.
//
// Conventions used throughout the library:
//  * angles are measured from the array normal, positive toward +x, in the
//    azimuth plane; valid angles lie in (-pi/2, pi/2)
//  * element k (k = 0..N-1) re-radiates with applied phase k * phase_step
//  * the incident plane wave arriving from theta_in reaches element k with
//    phase -2*pi*(d/lambda)*k*sin(theta_in), and the re-radiated wave toward
//    theta picks up -2*pi*(d/lambda)*k*sin(theta)
//  * wrapped angles live in (-pi, pi]
//
// With these conventions the array factor is
//   AF = sum_k exp(j*k*phase_step) * exp(-j*2*pi*(d/lambda)*k*(sin(theta) + sin(theta_in)))
// and the steering solution is phase_step = 2*pi*(d/lambda)*(sin(theta_out) + sin(theta_in)).

#include <complex>
#include <numbers>
#include <span>
#include <vector>

namespace beamsteer {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct TagConfig {
    int num_antennas = 4;             // SP4T-driven elements on the prototype
    double spacing_wavelengths = 0.5; // d / lambda
    double phase_step = 0.0;          // progressive phase, radians
    int quantization_levels = 4;      // clock phase taps per switch

    // Throws ConfigError on N < 1, K < 1 or non-positive spacing.
    void validate() const;
};

struct PlaneWaveAngles {
    double theta_in = 0.0;  // incidence angle
    double theta_out = 0.0; // observation / steering angle
};

struct QuantizedPhase {
    int index = 0;
    double phase = 0.0; // 2*pi*index/K, in [0, 2*pi)

    friend bool operator==(const QuantizedPhase&, const QuantizedPhase&) = default;
};

struct PatternSample {
    double theta = 0.0;      // radians
    double raw_power = 0.0;  // |AF|^2
    double normalized = 0.0; // raw / peak, peak = 1
    double power_db = 0.0;   // 10*log10(normalized)
};

struct BeamPattern {
    std::vector<PatternSample> samples;
    double peak_raw_power = 0.0;
    double peak_theta = 0.0; // first sample attaining the peak
};

double wrap_angle(double radians);

// Smallest |wrap(a - b)|.
double circular_distance(double a, double b);

Complex array_factor(const TagConfig& cfg, const PlaneWaveAngles& angles);

// Arbitrary per-element applied phases; reduces to the progressive form when
// element_phases[k] = k * phase_step.
Complex array_factor(std::span<const double> element_phases, double spacing_wavelengths,
                     const PlaneWaveAngles& angles);

// Array factor written in terms of the residual progressive phase
// x = phase_step - alpha: sum_k exp(j*k*x).
Complex progressive_sum(int num_antennas, double residual_phase);

// Uniform sampling of theta over [-pi/2, pi/2], endpoints included.
BeamPattern beam_pattern(const TagConfig& cfg, double theta_in, int num_points);

// One angle per contiguous run of samples within rel_tol of the peak. More
// than one entry means grating lobes of equal height (e.g. both +-90 degrees
// for a pi step at normal incidence).
std::vector<double> peak_angles(const BeamPattern& pattern, double rel_tol = 1e-9);

// Width of the main lobe at half power, in radians, from linear interpolation
// between samples. A lobe that runs off the sampled range is bounded by the
// range edge on that side.
double half_power_beamwidth(const BeamPattern& pattern);

double steering_phase(double theta_in, double theta_out, double spacing_wavelengths);

QuantizedPhase quantize_phase(double delta, int levels);

double tap_phase(int index, int levels);

} // namespace beamsteer
