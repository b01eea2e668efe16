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

// Batch experiments shared by the command-line tool and the acceptance run.

#include "beamsteer/estimator.hpp"
#include "beamsteer/linkbudget.hpp"
#include "beamsteer/protocol.hpp"

#include <cstdint>
#include <vector>

namespace beamsteer {

struct SteeringRow {
    double delta = 0.0;
    double expected_deg = 0.0;         // arcsin(delta / (2 pi d/lambda) - sin theta_in)
    std::vector<double> peaks_deg;     // all global maxima of the sampled pattern
    double error_deg = 0.0;            // distance from expected to the nearest peak
    double beamwidth_deg = 0.0;
};

std::vector<SteeringRow> steering_sweep(const std::vector<double>& deltas, const TagConfig& base,
                                        double theta_in, int num_points);

struct IdentityStats {
    int evaluated = 0;
    int skipped = 0; // draws too close to 0, pi/2 or pi for a finite ratio
    double max_rel_error = 0.0;
};

// Draws alpha uniformly on (-pi, pi) and compares the four-term magnitude
// ratio to cot(|alpha| / 2).
IdentityStats ratio_identity_suite(int num_samples, std::uint64_t seed);

struct RoundTripStats {
    int grid_points = 0;
    int recovered = 0;      // |wrap(alpha_hat - alpha)| <= tolerance
    int tap_compared = 0;   // alphas with a unique best tap
    int tap_matches = 0;
    int max_commands = 0;
    double max_error = 0.0;
};

// Noiseless sweep over alpha = -179..179 degrees (step_deg apart) through
// scan_and_select against an ideal four-element magnitude response.
RoundTripStats estimator_round_trip(int step_deg, double tolerance, int levels = 4);

// One CDF per (angle, distance), angle-major in the order given.
std::vector<ErrorCdf> estimation_sweep(double tx_distance_m, double tx_angle,
                                       const std::vector<double>& rx_angles,
                                       const std::vector<double>& rx_distances_m,
                                       const TagConfig& cfg, const RadioParams& params,
                                       const TrialOptions& options);

// True when every quantile in 0.1..0.9 and the accurate fraction improve (or
// hold) as distance shrinks. `by_distance` must be sorted by ascending
// distance for a fixed angle.
bool cdfs_tighten(const std::vector<ErrorCdf>& by_distance);

struct RangeResult {
    TagVariant variant;
    FeasibleRegion region;
};

struct RangeExperiment {
    std::vector<RangeResult> variants; // single, retro, beam
    bool nested = true;                // single within beam on every cell
    bool symmetric = true;             // non-co-located variants only
    bool monotone = true;              // shrinking either hop keeps feasibility
    bool retro_diagonal_only = true;
};

RangeExperiment range_experiment(const LinkBudgetCalibration& cal, int num_antennas,
                                 double d_max_m, double grid_step_m);

struct CoverageExperiment {
    CoverageMap full;
    std::vector<double> drop_one_fractions; // fraction with AP i removed
};

CoverageExperiment coverage_experiment(double width_m, double height_m,
                                       const std::vector<NodePosition>& aps,
                                       const TagVariant& variant, const RadioParams& params,
                                       double cell_m);

struct ProtocolBatchOptions {
    int num_sessions = 1000;
    std::uint64_t seed = 1;
    double min_angle = -kPi / 3.0;
    double max_angle = kPi / 3.0;
    double min_distance_m = 2.0;
    double max_distance_m = 30.0;
    SessionOptions session; // policy is ignored, both run
    int determinism_sessions = 50;
};

struct ProtocolBatchStats {
    int sessions = 0;
    int unique_optimum = 0;
    int exhaustive_matches = 0;
    int ratio_matches = 0;
    int ratio_agrees_with_exhaustive = 0; // over all sessions
    int max_ratio_commands = 0;
    int min_exhaustive_commands = 0;
    int max_exhaustive_commands = 0;
    int decode_failures = 0;
    int determinism_checked = 0;
    int determinism_mismatches = 0;
    int timeouts = 0;       // in the noisy determinism reruns
    int low_snr_aborts = 0; // likewise
    SessionReport first_ratio_session;
};

// Agreement runs use the radio with noise removed and no packet loss; the
// determinism reruns keep the configured noise floor and loss probability.
ProtocolBatchStats protocol_batch(const TagConfig& cfg, const RadioParams& params,
                                  const ProtocolBatchOptions& options);

struct MeshRun {
    TagState tag;
    std::vector<TranscriptRecord> transcript;
};

// Runs every planned session of a single-tag mesh in order, sharing one tag.
MeshRun mesh_run(const std::vector<AccessPoint>& aps, int tag_id, const TagConfig& cfg,
                 const RadioParams& params, const SessionOptions& options);

} // namespace beamsteer
