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

// Range feasibility for single-antenna, retro-reflective and beam-steering
// tags, plus floor-plan coverage.
//
// Received backscatter power over a (d1, d2) = (Tx->tag, tag->Rx) pair:
//   P = tx_power + tx_gain + rx_gain + 2*tag_element_gain + 10*log10(array_gain)
//       - PL(d1) - PL(d2) - conversion_loss - implementation_loss
// with the log-distance PL from channel.hpp. The link closes when
// P >= sensitivity_dbm.

#include "beamsteer/channel.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace beamsteer {

enum class TagKind { SingleAntenna, RetroReflective, BeamScatter };

enum class PlacementConstraint { None, ColocatedTxRx };

struct TagVariant {
    TagKind kind = TagKind::BeamScatter;
    double array_gain_linear = 16.0;
    PlacementConstraint constraint = PlacementConstraint::None;
    // Extra loss not captured by the free-space budget. Nonzero only for the
    // retro-reflective tag, whose co-located receiver is desensitized by the
    // transmitter's own leakage.
    double implementation_loss_db = 0.0;

    static TagVariant single_antenna();
    static TagVariant retro_reflective(int num_antennas, double self_interference_db);
    static TagVariant beam_scatter(int num_antennas);

    std::string name() const;
};

TagKind parse_tag_kind(const std::string& name);
std::string to_string(TagKind kind);

// Radio parameters plus the retro-reflective desensitization, as produced by
// calibrate_link_budget().
struct LinkBudgetCalibration {
    RadioParams radio;
    double retro_self_interference_db = 0.0;
    bool calibrated = false;

    TagVariant variant(TagKind kind, int num_antennas = 4) const;
};

// Symmetric endpoints (d1 = d2) the calibration reproduces.
struct RangeTargets {
    double single_antenna_m = 15.5;
    double retro_reflective_m = 23.5;
    double beam_scatter_m = 28.5;
};

// Closed-form fit. With array gain G for the multi-antenna tags:
//   exponent    from beam/single:  10*log10(G) = 20*n*log10(beam / single)
//   sensitivity from the single-antenna endpoint
//   retro loss  from beam/retro:   20*n*log10(beam / retro)
// tx power, antenna gains and conversion loss are taken from `base`.
LinkBudgetCalibration calibrate_link_budget(const RadioParams& base, const RangeTargets& targets,
                                            int num_antennas = 4);

// The shipped calibration: calibrate_link_budget(default_radio_base(), RangeTargets{}).
LinkBudgetCalibration calibrated_link_budget();

// Uncalibrated radio front end the shipped calibration starts from.
RadioParams default_radio_base();

double received_power_dbm(double d1_m, double d2_m, const TagVariant& variant,
                          const RadioParams& params);

// Co-located variants are feasible only on the d1 == d2 diagonal.
bool link_feasible(double d1_m, double d2_m, const TagVariant& variant, const RadioParams& params);

// Largest d with (d, d) feasible, solved exactly.
double symmetric_range_limit(const TagVariant& variant, const RadioParams& params);

struct RegionSample {
    double d1_m = 0.0;
    double d2_m = 0.0;
    bool feasible = false;
};

struct FeasibleRegion {
    std::vector<RegionSample> samples; // row-major, d1 outer
    double max_symmetric_range_m = 0.0; // largest grid d with (d, d) feasible
};

// Grid points at i * grid_step for i = 1 .. floor(d_max / grid_step).
FeasibleRegion feasible_region(const TagVariant& variant, const RadioParams& params, double d_max_m,
                               double grid_step_m);

struct CoverageCell {
    double x_m = 0.0;
    double y_m = 0.0;
    bool covered = false;
    int best_tx = -1; // AP indices of the largest-margin pair, -1 when uncovered
    int best_rx = -1;
};

struct CoverageMap {
    double covered_fraction = 0.0;
    int columns = 0;
    int rows = 0;
    std::vector<CoverageCell> cells; // row-major, y outer
};

// Distances below this are clamped; a tag cannot sit inside an AP.
inline constexpr double kMinLinkDistanceM = 0.1;

// Rectangle [0, width] x [0, height] split into ceil(size / cell) equal cells;
// each cell is judged at its center. Distinct-pair variants need >= 2 APs.
CoverageMap coverage_map(double floor_width_m, double floor_height_m,
                         std::span<const NodePosition> aps, const TagVariant& variant,
                         const RadioParams& params, double cell_m = 0.5);

void write_region_csv(std::ostream& out, const FeasibleRegion& region,
                      const std::vector<std::string>& metadata);

void write_coverage_csv(std::ostream& out, const CoverageMap& map,
                        const std::vector<std::string>& metadata);

} // namespace beamsteer
