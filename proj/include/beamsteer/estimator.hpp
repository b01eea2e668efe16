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

// Best phase-step selection from received signal strength.
//
// For a 4-element, half-wavelength tag the received amplitude at progressive
// phase step D is |sum_k exp(j*k*(D - alpha))|. Measuring at D = 0 (s1) and
// D = pi (s2) gives s1 / s2 = cot(|alpha| / 2), so |alpha| follows from a
// single ratio. The sign is settled by probing D = +|alpha| and D = -|alpha|.

#include "beamsteer/array_model.hpp"
#include "beamsteer/channel.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace beamsteer {

struct AlphaEstimate {
    double alpha_abs = 0.0;    // [0, pi]
    double alpha_signed = 0.0; // (-pi, pi]
    double chosen_delta = 0.0; // == alpha_signed
    QuantizedPhase chosen_delta_quantized;
    double s1 = 0.0; // amplitude at D = 0
    double s2 = 0.0; // amplitude at D = pi
    double chosen_magnitude = 0.0;
    int commands_issued = 0;
};

// |alpha| = 2 * atan(s2 / s1). Amplitudes, not powers.
double alpha_from_ratio(double s1, double s2);

using MagnitudeProbe = std::function<double(double delta)>;

// Compares probe(+alpha_abs) and probe(-alpha_abs); ties go to +alpha_abs.
// alpha_abs of 0 or pi needs no probe. Throws LowSnrError when both probes
// are at or below noise_floor_amplitude.
AlphaEstimate resolve_sign(const MagnitudeProbe& probe, double alpha_abs, int levels = 4,
                           double noise_floor_amplitude = 0.0);

// Anything that can set the tag to a phase step and report one CSI sample.
// Ratio estimate plus sign resolution for a four-element tag. Handles the
// point |alpha| = pi/2, where both s1 and s2 vanish together, by reading the
// sign probes. s1 = s2 = 0 is tried as that point before giving up with
// NoSignalError. Set probes_quantized when the probe snaps each step to the
// nearest hardware tap.
AlphaEstimate estimate_alpha(double s1, double s2, const MagnitudeProbe& probe, int levels = 4,
                             double noise_floor_amplitude = 0.0, bool probes_quantized = false);

class MeasurementContext {
  public:
    virtual ~MeasurementContext() = default;

    CsiMeasurement measure(double delta) {
        ++commands_;
        return do_measure(delta);
    }

    int commands_issued() const { return commands_; }

  protected:
    virtual CsiMeasurement do_measure(double delta) = 0;

  private:
    int commands_ = 0;
};

// Tag between two positioned APs, noisy CSI from channel.hpp.
class SimulatedLink : public MeasurementContext {
  public:
    SimulatedLink(NodePosition tx, NodePosition rx, TagConfig cfg, RadioParams params,
                  std::uint64_t seed);

    // Noiseless channel for a phase step.
    Complex channel_at(double delta) const;

    // Alpha implied by the geometry, wrapped.
    double true_alpha() const;

    const RadioParams& params() const { return params_; }

  protected:
    CsiMeasurement do_measure(double delta) override;

  private:
    NodePosition tx_;
    NodePosition rx_;
    TagConfig cfg_;
    RadioParams params_;
    std::mt19937_64 rng_;
};

// Four-measurement procedure (three when |alpha| is 0 or pi: the coinciding
// sign probes collapse into a single confirmation measurement at the chosen
// step). Requires cfg.num_antennas == 4.
AlphaEstimate scan_and_select(MeasurementContext& ctx, const TagConfig& cfg);

struct ScanResult {
    double best_delta = 0.0;
    double best_magnitude = 0.0;
};

// Exhaustive fallback usable for any N: measures num_points evenly spaced
// steps over [0, 2*pi).
ScanResult brute_force_scan(MeasurementContext& ctx, int num_points);

struct EstimationGeometry {
    double tx_distance_m = 10.0;
    double tx_angle = 0.0;
    double rx_distance_m = 10.0;
    double rx_angle = 0.0;
};

struct TrialOptions {
    int num_trials = 1000;
    std::uint64_t seed = 1;
    double accuracy_threshold = kPi / 8.0; // half a tap for K = 4
    bool noise_enabled = true;
};

struct ErrorCdf {
    EstimationGeometry geometry;
    double alpha_true = 0.0;
    double accuracy_threshold = 0.0;
    std::vector<double> sorted_errors; // |wrap(alpha_hat - alpha_true)|
    double accurate_fraction = 0.0;
    int low_snr_trials = 0;
    double mean_ideal_power_dbm = 0.0;     // noiseless, at chosen_delta
    double mean_quantized_power_dbm = 0.0; // noiseless, at the quantized tap

    // Empirical quantile, p in [0, 1], nearest-rank.
    double quantile(double p) const;
};

// Independent per-trial seed derived from a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// Monte-Carlo over CSI noise for one geometry. Trials whose sign probes drop
// to the noise floor count as error pi.
ErrorCdf run_estimation_trials(const EstimationGeometry& geometry, const TagConfig& cfg,
                               const RadioParams& params, const TrialOptions& options);

// One row per trial: r_m,theta_deg,trial_quantile,abs_error_rad, preceded by
// the '#' metadata lines in `metadata` and the column header.
void write_cdf_csv(std::ostream& out, const std::vector<ErrorCdf>& cdfs,
                   const std::vector<std::string>& metadata);

} // namespace beamsteer
