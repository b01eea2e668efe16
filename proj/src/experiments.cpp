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

#include "beamsteer/experiments.hpp"

#include "beamsteer/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace beamsteer {

namespace {

double to_deg(double rad) {
    return rad * 180.0 / kPi;
}

// Ideal four-element response to a phase step for a fixed alpha.
class IdealTagContext : public MeasurementContext {
  public:
    explicit IdealTagContext(double alpha) : alpha_(alpha) {}

  protected:
    CsiMeasurement do_measure(double delta) override {
        CsiMeasurement m;
        m.complex_gain = progressive_sum(4, delta - alpha_);
        return m;
    }

  private:
    double alpha_;
};

struct SessionOutcome {
    bool timed_out = false;
    bool low_snr = false;
    int selected = -1;
    std::string transcript;
};

SessionOutcome traced_session(const AccessPoint& tx, const AccessPoint& rx, const TagConfig& cfg,
                              const RadioParams& params, const SessionOptions& options) {
    TagState tag;
    tag.levels = cfg.quantization_levels;
    SessionOutcome out;
    try {
        const SessionReport r = run_session(tx, rx, tag, cfg, params, options);
        std::ostringstream s;
        write_transcript(s, r.transcript);
        out.transcript = s.str();
        out.selected = r.selected_delta_index;
    } catch (const TimeoutError& e) {
        out.timed_out = true;
        out.transcript = e.what();
    } catch (const LowSnrError& e) {
        out.low_snr = true;
        out.transcript = e.what();
    }
    return out;
}

} // namespace

std::vector<SteeringRow> steering_sweep(const std::vector<double>& deltas, const TagConfig& base,
                                        double theta_in, int num_points) {
    std::vector<SteeringRow> rows;
    for (const double delta : deltas) {
        TagConfig cfg = base;
        cfg.phase_step = delta;
        const BeamPattern pattern = beam_pattern(cfg, theta_in, num_points);

        SteeringRow row;
        row.delta = delta;
        const double s = delta / (kTwoPi * cfg.spacing_wavelengths) - std::sin(theta_in);
        row.expected_deg = to_deg(std::asin(std::clamp(s, -1.0, 1.0)));
        row.error_deg = std::numeric_limits<double>::infinity();
        for (const double peak : peak_angles(pattern)) {
            row.peaks_deg.push_back(to_deg(peak));
            row.error_deg = std::min(row.error_deg, std::abs(to_deg(peak) - row.expected_deg));
        }
        row.beamwidth_deg = to_deg(half_power_beamwidth(pattern));
        rows.push_back(std::move(row));
    }
    return rows;
}

IdentityStats ratio_identity_suite(int num_samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> draw(-kPi, kPi);
    IdentityStats stats;
    while (stats.evaluated < num_samples) {
        const double alpha = draw(rng);
        const double a = std::abs(alpha);
        if (a < 1e-6 || kPi - a < 1e-6 || std::abs(a - kPi / 2.0) < 1e-6) {
            ++stats.skipped;
            continue;
        }
        const double num = std::abs(progressive_sum(4, alpha));
        const double den = std::abs(progressive_sum(4, alpha + kPi));
        const double cot = 1.0 / std::tan(a / 2.0);
        stats.max_rel_error = std::max(stats.max_rel_error, std::abs(num / den - cot) / cot);
        ++stats.evaluated;
    }
    return stats;
}

RoundTripStats estimator_round_trip(int step_deg, double tolerance, int levels) {
    if (step_deg < 1) {
        throw DomainError("estimator_round_trip: step must be >= 1 degree");
    }
    TagConfig cfg;
    cfg.quantization_levels = levels;
    RoundTripStats stats;
    for (int d = -179; d <= 179; d += step_deg) {
        const double alpha = d * kPi / 180.0;
        IdealTagContext ctx(alpha);
        const AlphaEstimate est = scan_and_select(ctx, cfg);
        ++stats.grid_points;
        const double err = circular_distance(est.chosen_delta, alpha);
        stats.max_error = std::max(stats.max_error, err);
        stats.recovered += err <= tolerance;
        stats.max_commands = std::max(stats.max_commands, est.commands_issued);

        double best = -1.0;
        int best_index = 0;
        bool unique = true;
        for (int k = 0; k < levels; ++k) {
            const double mag = std::abs(progressive_sum(4, tap_phase(k, levels) - alpha));
            if (mag > best * (1.0 + 1e-9)) {
                best = mag;
                best_index = k;
                unique = true;
            } else if (mag >= best * (1.0 - 1e-9)) {
                unique = false;
            }
        }
        if (unique) {
            ++stats.tap_compared;
            stats.tap_matches += est.chosen_delta_quantized.index == best_index;
        }
    }
    return stats;
}

std::vector<ErrorCdf> estimation_sweep(double tx_distance_m, double tx_angle,
                                       const std::vector<double>& rx_angles,
                                       const std::vector<double>& rx_distances_m,
                                       const TagConfig& cfg, const RadioParams& params,
                                       const TrialOptions& options) {
    std::vector<ErrorCdf> out;
    std::uint64_t cell = 0;
    for (const double angle : rx_angles) {
        for (const double r : rx_distances_m) {
            EstimationGeometry g;
            g.tx_distance_m = tx_distance_m;
            g.tx_angle = tx_angle;
            g.rx_distance_m = r;
            g.rx_angle = angle;
            TrialOptions o = options;
            o.seed = derive_seed(options.seed, cell++);
            out.push_back(run_estimation_trials(g, cfg, params, o));
        }
    }
    return out;
}

bool cdfs_tighten(const std::vector<ErrorCdf>& by_distance) {
    for (std::size_t i = 1; i < by_distance.size(); ++i) {
        const ErrorCdf& nearer = by_distance[i - 1];
        const ErrorCdf& farther = by_distance[i];
        if (nearer.accurate_fraction < farther.accurate_fraction) {
            return false;
        }
        for (int q = 1; q <= 9; ++q) {
            if (nearer.quantile(q / 10.0) > farther.quantile(q / 10.0)) {
                return false;
            }
        }
    }
    return true;
}

RangeExperiment range_experiment(const LinkBudgetCalibration& cal, int num_antennas,
                                 double d_max_m, double grid_step_m) {
    RangeExperiment ex;
    for (const TagKind kind :
         {TagKind::SingleAntenna, TagKind::RetroReflective, TagKind::BeamScatter}) {
        const TagVariant v = cal.variant(kind, num_antennas);
        ex.variants.push_back({v, feasible_region(v, cal.radio, d_max_m, grid_step_m)});
    }

    const auto& single = ex.variants[0].region.samples;
    const auto& retro = ex.variants[1].region.samples;
    const auto& beam = ex.variants[2].region.samples;
    const auto n = static_cast<std::size_t>(std::llround(std::sqrt(double(beam.size()))));
    const auto at = [n](const std::vector<RegionSample>& s, std::size_t i, std::size_t j) {
        return s[i * n + j].feasible;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            ex.nested = ex.nested && (!at(single, i, j) || at(beam, i, j));
            ex.symmetric = ex.symmetric && at(single, i, j) == at(single, j, i) &&
                           at(beam, i, j) == at(beam, j, i);
            for (const auto* s : {&single, &beam}) {
                if (at(*s, i, j)) {
                    ex.monotone = ex.monotone && (i == 0 || at(*s, i - 1, j)) &&
                                  (j == 0 || at(*s, i, j - 1));
                }
            }
            if (at(retro, i, j)) {
                ex.retro_diagonal_only = ex.retro_diagonal_only && i == j;
                ex.monotone = ex.monotone && (i == 0 || at(retro, i - 1, j - 1));
            }
        }
    }
    return ex;
}

CoverageExperiment coverage_experiment(double width_m, double height_m,
                                       const std::vector<NodePosition>& aps,
                                       const TagVariant& variant, const RadioParams& params,
                                       double cell_m) {
    CoverageExperiment ex;
    ex.full = coverage_map(width_m, height_m, aps, variant, params, cell_m);
    for (std::size_t drop = 0; drop < aps.size(); ++drop) {
        std::vector<NodePosition> rest;
        for (std::size_t i = 0; i < aps.size(); ++i) {
            if (i != drop) {
                rest.push_back(aps[i]);
            }
        }
        double fraction = 0.0;
        try {
            fraction = coverage_map(width_m, height_m, rest, variant, params, cell_m)
                           .covered_fraction;
        } catch (const ConfigError&) {
            // Too few APs left to form any link.
        }
        ex.drop_one_fractions.push_back(fraction);
    }
    return ex;
}

ProtocolBatchStats protocol_batch(const TagConfig& cfg, const RadioParams& params,
                                  const ProtocolBatchOptions& options) {
    RadioParams clean = params;
    clean.noise_floor_dbm = -std::numeric_limits<double>::infinity();
    SessionOptions exhaustive = options.session;
    exhaustive.policy = SelectionPolicy::Exhaustive;
    exhaustive.loss_probability = 0.0;
    SessionOptions ratio = exhaustive;
    ratio.policy = SelectionPolicy::Ratio;

    std::mt19937_64 rng(derive_seed(options.seed, 2));
    std::uniform_real_distribution<double> angle(options.min_angle, options.max_angle);
    std::uniform_real_distribution<double> dist(options.min_distance_m, options.max_distance_m);

    TagState fresh;
    fresh.levels = cfg.quantization_levels;

    ProtocolBatchStats stats;
    stats.min_exhaustive_commands = std::numeric_limits<int>::max();
    for (int i = 0; i < options.num_sessions; ++i) {
        const double ta = angle(rng);
        const double td = dist(rng);
        const double ra = angle(rng);
        const double rd = dist(rng);
        const AccessPoint tx{0, position_from_polar(td, ta)};
        const AccessPoint rx{1, position_from_polar(rd, ra)};
        const std::uint64_t seed = derive_seed(options.seed, 1000 + static_cast<std::uint64_t>(i));
        exhaustive.seed = seed;
        ratio.seed = seed;

        const TapOptimum opt = best_tap(tx, rx, cfg, clean);
        const SessionReport a = run_session(tx, rx, fresh, cfg, clean, exhaustive);
        const SessionReport b = run_session(tx, rx, fresh, cfg, clean, ratio);
        ++stats.sessions;
        if (opt.unique) {
            ++stats.unique_optimum;
            stats.exhaustive_matches += a.final_tag.lut.at({0, 1}) == opt.index;
            stats.ratio_matches += b.final_tag.lut.at({0, 1}) == opt.index;
        }
        stats.ratio_agrees_with_exhaustive += a.selected_delta_index == b.selected_delta_index;
        stats.max_ratio_commands = std::max(stats.max_ratio_commands, b.num_downlink_commands);
        stats.min_exhaustive_commands =
            std::min(stats.min_exhaustive_commands, a.num_downlink_commands);
        stats.max_exhaustive_commands =
            std::max(stats.max_exhaustive_commands, a.num_downlink_commands);
        stats.decode_failures += !a.decoded_payload_ok;
        stats.decode_failures += !b.decoded_payload_ok;
        if (i == 0) {
            stats.first_ratio_session = b;
        }

        if (i < options.determinism_sessions) {
            SessionOptions noisy = options.session;
            noisy.policy = SelectionPolicy::Ratio;
            noisy.seed = seed;
            const SessionOutcome x = traced_session(tx, rx, cfg, params, noisy);
            const SessionOutcome y = traced_session(tx, rx, cfg, params, noisy);
            ++stats.determinism_checked;
            stats.timeouts += x.timed_out;
            stats.low_snr_aborts += x.low_snr;
            const bool same = x.timed_out == y.timed_out && x.low_snr == y.low_snr &&
                              x.selected == y.selected &&
                              x.transcript == y.transcript;
            stats.determinism_mismatches += !same;
        }
    }
    if (stats.sessions == 0) {
        stats.min_exhaustive_commands = 0;
    }
    return stats;
}

MeshRun mesh_run(const std::vector<AccessPoint>& aps, int tag_id, const TagConfig& cfg,
                 const RadioParams& params, const SessionOptions& options) {
    MeshRun run;
    run.tag.tag_id = tag_id;
    run.tag.levels = cfg.quantization_levels;
    std::uint64_t index = 0;
    for (const PlannedSession& s : mesh_session_plan(aps, {tag_id}, cfg.quantization_levels,
                                                     options)) {
        const auto find = [&](int id) -> const AccessPoint& {
            const auto it = std::find_if(aps.begin(), aps.end(),
                                         [id](const AccessPoint& ap) { return ap.id == id; });
            return *it;
        };
        SessionOptions o = options;
        o.seed = derive_seed(options.seed, index++);
        const SessionReport r = run_session(find(s.tx_ap), find(s.rx_ap), run.tag, cfg, params, o);
        for (TranscriptRecord rec : r.transcript) {
            rec.time_s += s.start_time_s;
            run.transcript.push_back(std::move(rec));
        }
        run.tag = r.final_tag;
    }
    return run;
}

} // namespace beamsteer
