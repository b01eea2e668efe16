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

#include "beamsteer/estimator.hpp"

#include "beamsteer/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace beamsteer {

namespace {

// Ratio legs below this fraction of the other leg count as exactly zero.
constexpr double kSingularFloor = 1e-12;

// Both legs carry the factor |1 + z^2|, which vanishes at |alpha| = pi/2.
// When their combined size is this small next to the stronger sign probe, the
// ratio is 0/0 and the estimate falls back to the common null.
constexpr double kCommonNullFloor = 1e-9;

double to_dbm(double normalized_power, double tx_power_dbm) {
    return tx_power_dbm + 10.0 * std::log10(normalized_power);
}

} // namespace

double alpha_from_ratio(double s1, double s2) {
    if (s1 < 0.0 || s2 < 0.0 || std::isnan(s1) || std::isnan(s2)) {
        throw DomainError("alpha_from_ratio: magnitudes must be non-negative");
    }
    if (s1 == 0.0 && s2 == 0.0) {
        throw NoSignalError("alpha_from_ratio: both measurements are zero");
    }
    if (s2 <= kSingularFloor * s1) {
        return 0.0;
    }
    if (s1 <= kSingularFloor * s2) {
        return kPi;
    }
    return 2.0 * std::atan2(s2, s1);
}

AlphaEstimate resolve_sign(const MagnitudeProbe& probe, double alpha_abs, int levels,
                           double noise_floor_amplitude) {
    AlphaEstimate est;
    est.alpha_abs = alpha_abs;

    if (alpha_abs == 0.0 || alpha_abs == kPi) {
        est.alpha_signed = alpha_abs;
    } else {
        const double plus = probe(alpha_abs);
        const double minus = probe(-alpha_abs);
        if (std::max(plus, minus) <= noise_floor_amplitude) {
            throw LowSnrError("resolve_sign: both sign probes at the noise floor");
        }
        est.alpha_signed = (minus > plus) ? -alpha_abs : alpha_abs;
        est.chosen_magnitude = std::max(plus, minus);
    }
    est.chosen_delta = est.alpha_signed;
    est.chosen_delta_quantized = quantize_phase(est.chosen_delta, levels);
    return est;
}

SimulatedLink::SimulatedLink(NodePosition tx, NodePosition rx, TagConfig cfg, RadioParams params,
                             std::uint64_t seed)
    : tx_(tx), rx_(rx), cfg_(cfg), params_(params), rng_(seed) {
    cfg_.validate();
    params_.validate();
}

Complex SimulatedLink::channel_at(double delta) const {
    TagConfig c = cfg_;
    c.phase_step = delta;
    return backscatter_channel(tx_, rx_, c, params_);
}

double SimulatedLink::true_alpha() const {
    return steering_phase(angle_from_tag(tx_), angle_from_tag(rx_), cfg_.spacing_wavelengths);
}

CsiMeasurement SimulatedLink::do_measure(double delta) {
    return measure_csi(channel_at(delta), params_, rng_);
}

AlphaEstimate estimate_alpha(double s1, double s2, const MagnitudeProbe& probe, int levels,
                             double noise_floor_amplitude, bool probes_quantized) {
    const bool both_zero = s1 == 0.0 && s2 == 0.0;
    const double ratio_abs = both_zero ? kPi / 2.0 : alpha_from_ratio(s1, s2);
    if (ratio_abs == 0.0 || ratio_abs == kPi) {
        AlphaEstimate est = resolve_sign(probe, ratio_abs, levels, noise_floor_amplitude);
        est.s1 = s1;
        est.s2 = s2;
        return est;
    }

    const double plus = probe(ratio_abs);
    const double minus = probe(-ratio_abs);
    const double strongest = std::max(plus, minus);
    if (both_zero && strongest == 0.0) {
        throw NoSignalError("estimate_alpha: no signal at any phase step");
    }
    if (strongest <= noise_floor_amplitude) {
        throw LowSnrError("estimate_alpha: both sign probes at the noise floor");
    }

    AlphaEstimate est;
    est.s1 = s1;
    est.s2 = s2;
    est.chosen_magnitude = strongest;
    if (std::hypot(s1, s2) <= kCommonNullFloor * strongest) {
        // For alpha = +pi/2 the probes read |AF(a - pi/2)| and |AF(a + pi/2)|;
        // alpha = -pi/2 swaps them. Pick the hypothesis the readings match.
        const auto realized = [&](double d) {
            return probes_quantized ? quantize_phase(d, levels).phase : d;
        };
        const double expect_plus =
            std::abs(progressive_sum(4, realized(ratio_abs) - kPi / 2.0));
        const double expect_minus =
            std::abs(progressive_sum(4, realized(-ratio_abs) - kPi / 2.0));
        const bool positive = (plus >= minus) == (expect_plus >= expect_minus);
        est.alpha_abs = kPi / 2.0;
        est.alpha_signed = positive ? kPi / 2.0 : -kPi / 2.0;
    } else {
        est.alpha_abs = ratio_abs;
        est.alpha_signed = (minus > plus) ? -ratio_abs : ratio_abs;
    }
    est.chosen_delta = est.alpha_signed;
    est.chosen_delta_quantized = quantize_phase(est.chosen_delta, levels);
    return est;
}

AlphaEstimate scan_and_select(MeasurementContext& ctx, const TagConfig& cfg) {
    if (cfg.num_antennas != 4) {
        throw ConfigError("scan_and_select: the ratio estimator needs exactly 4 antennas; use "
                          "brute_force_scan");
    }
    const int start = ctx.commands_issued();
    const CsiMeasurement m1 = ctx.measure(0.0);
    const CsiMeasurement m2 = ctx.measure(kPi);
    const double floor = std::sqrt(m1.noise_variance);

    AlphaEstimate est = estimate_alpha(
        std::abs(m1.complex_gain), std::abs(m2.complex_gain),
        [&](double delta) { return std::abs(ctx.measure(delta).complex_gain); },
        cfg.quantization_levels, floor);

    if (est.alpha_abs == 0.0 || est.alpha_abs == kPi) {
        est.chosen_magnitude = std::abs(ctx.measure(est.chosen_delta).complex_gain);
        if (est.chosen_magnitude <= floor) {
            throw LowSnrError("scan_and_select: confirmation probe at the noise floor");
        }
    }
    est.commands_issued = ctx.commands_issued() - start;
    return est;
}

ScanResult brute_force_scan(MeasurementContext& ctx, int num_points) {
    if (num_points < 1) {
        throw DomainError("brute_force_scan: num_points must be >= 1");
    }
    ScanResult best{0.0, -1.0};
    for (int i = 0; i < num_points; ++i) {
        const double delta = kTwoPi * i / num_points;
        const double mag = std::abs(ctx.measure(delta).complex_gain);
        if (mag > best.best_magnitude) {
            best = {wrap_angle(delta), mag};
        }
    }
    return best;
}

double ErrorCdf::quantile(double p) const {
    if (sorted_errors.empty()) {
        return 0.0;
    }
    const auto n = sorted_errors.size();
    auto rank = static_cast<std::size_t>(std::ceil(std::clamp(p, 0.0, 1.0) * n));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return sorted_errors[rank - 1];
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    // splitmix64 finalizer
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

ErrorCdf run_estimation_trials(const EstimationGeometry& geometry, const TagConfig& cfg,
                               const RadioParams& params, const TrialOptions& options) {
    if (options.num_trials < 1) {
        throw DomainError("run_estimation_trials: num_trials must be >= 1");
    }
    RadioParams p = params;
    if (!options.noise_enabled) {
        p.noise_floor_dbm = -std::numeric_limits<double>::infinity();
    }
    const NodePosition tx = position_from_polar(geometry.tx_distance_m, geometry.tx_angle);
    const NodePosition rx = position_from_polar(geometry.rx_distance_m, geometry.rx_angle);

    ErrorCdf cdf;
    cdf.geometry = geometry;
    cdf.accuracy_threshold = options.accuracy_threshold;
    cdf.sorted_errors.reserve(static_cast<std::size_t>(options.num_trials));

    double ideal_sum = 0.0;
    double quantized_sum = 0.0;
    int accurate = 0;
    for (int i = 0; i < options.num_trials; ++i) {
        SimulatedLink link(tx, rx, cfg, p, derive_seed(options.seed, static_cast<std::uint64_t>(i)));
        cdf.alpha_true = link.true_alpha();
        double error = kPi;
        try {
            const AlphaEstimate est = scan_and_select(link, cfg);
            error = circular_distance(est.chosen_delta, cdf.alpha_true);
            ideal_sum += std::norm(link.channel_at(est.chosen_delta));
            quantized_sum += std::norm(link.channel_at(est.chosen_delta_quantized.phase));
        } catch (const LowSnrError&) {
            ++cdf.low_snr_trials;
        }
        if (error < options.accuracy_threshold) {
            ++accurate;
        }
        cdf.sorted_errors.push_back(error);
    }
    std::sort(cdf.sorted_errors.begin(), cdf.sorted_errors.end());
    cdf.accurate_fraction = static_cast<double>(accurate) / options.num_trials;

    const int valid = options.num_trials - cdf.low_snr_trials;
    if (valid > 0) {
        cdf.mean_ideal_power_dbm = to_dbm(ideal_sum / valid, p.tx_power_dbm);
        cdf.mean_quantized_power_dbm = to_dbm(quantized_sum / valid, p.tx_power_dbm);
    } else {
        cdf.mean_ideal_power_dbm = -std::numeric_limits<double>::infinity();
        cdf.mean_quantized_power_dbm = -std::numeric_limits<double>::infinity();
    }
    return cdf;
}

void write_cdf_csv(std::ostream& out, const std::vector<ErrorCdf>& cdfs,
                   const std::vector<std::string>& metadata) {
    for (const auto& line : metadata) {
        out << "# " << line << '\n';
    }
    for (const auto& c : cdfs) {
        out << "# r_m=" << c.geometry.rx_distance_m
            << " theta_deg=" << c.geometry.rx_angle * 180.0 / kPi << " alpha_true_rad="
            << std::setprecision(10) << c.alpha_true << " accurate_fraction=" << c.accurate_fraction
            << " threshold_rad=" << c.accuracy_threshold << " low_snr_trials=" << c.low_snr_trials
            << " ideal_power_dbm=" << c.mean_ideal_power_dbm
            << " quantized_power_dbm=" << c.mean_quantized_power_dbm << '\n';
    }
    out << "r_m,theta_deg,trial_quantile,abs_error_rad\n";
    for (const auto& c : cdfs) {
        const auto n = c.sorted_errors.size();
        for (std::size_t i = 0; i < n; ++i) {
            out << std::setprecision(10) << c.geometry.rx_distance_m << ','
                << c.geometry.rx_angle * 180.0 / kPi << ','
                << static_cast<double>(i + 1) / static_cast<double>(n) << ','
                << c.sorted_errors[i] << '\n';
        }
    }
}

} // namespace beamsteer
