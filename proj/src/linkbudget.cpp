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

#include "beamsteer/linkbudget.hpp"

#include "beamsteer/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace beamsteer {

namespace {

// Relative tolerance for treating d1 and d2 as the same distance.
constexpr double kDiagonalTol = 1e-9;

bool is_colocated(const TagVariant& v) {
    return v.constraint == PlacementConstraint::ColocatedTxRx;
}

// Everything in the budget except the two path losses.
double budget_without_paths(const TagVariant& variant, const RadioParams& p) {
    return p.tx_power_dbm + p.tx_gain_dbi + p.rx_gain_dbi + 2.0 * p.tag_element_gain_dbi +
           10.0 * std::log10(variant.array_gain_linear) - p.tag_conversion_loss_db -
           variant.implementation_loss_db;
}

} // namespace

TagVariant TagVariant::single_antenna() {
    return {TagKind::SingleAntenna, 1.0, PlacementConstraint::None, 0.0};
}

TagVariant TagVariant::retro_reflective(int num_antennas, double self_interference_db) {
    const double n = num_antennas;
    return {TagKind::RetroReflective, n * n, PlacementConstraint::ColocatedTxRx,
            self_interference_db};
}

TagVariant TagVariant::beam_scatter(int num_antennas) {
    const double n = num_antennas;
    return {TagKind::BeamScatter, n * n, PlacementConstraint::None, 0.0};
}

std::string TagVariant::name() const {
    return to_string(kind);
}

std::string to_string(TagKind kind) {
    switch (kind) {
    case TagKind::SingleAntenna:
        return "single_antenna";
    case TagKind::RetroReflective:
        return "retro_reflective";
    case TagKind::BeamScatter:
        return "beam_scatter";
    }
    return "unknown";
}

TagKind parse_tag_kind(const std::string& name) {
    if (name == "single_antenna") {
        return TagKind::SingleAntenna;
    }
    if (name == "retro_reflective") {
        return TagKind::RetroReflective;
    }
    if (name == "beam_scatter") {
        return TagKind::BeamScatter;
    }
    throw ConfigError("unknown tag variant '" + name + "'");
}

TagVariant LinkBudgetCalibration::variant(TagKind kind, int num_antennas) const {
    switch (kind) {
    case TagKind::SingleAntenna:
        return TagVariant::single_antenna();
    case TagKind::RetroReflective:
        return TagVariant::retro_reflective(num_antennas, retro_self_interference_db);
    case TagKind::BeamScatter:
        return TagVariant::beam_scatter(num_antennas);
    }
    throw ConfigError("unknown tag variant");
}

RadioParams default_radio_base() {
    RadioParams p;
    p.tx_power_dbm = 30.0;
    p.tx_gain_dbi = 6.0;
    p.rx_gain_dbi = 6.0;
    p.tag_element_gain_dbi = 0.0;
    p.carrier_hz = 2.412e9;
    p.tag_conversion_loss_db = 6.0;
    return p;
}

LinkBudgetCalibration calibrate_link_budget(const RadioParams& base, const RangeTargets& targets,
                                            int num_antennas) {
    const auto& t = targets;
    if (!(t.single_antenna_m > 0.0 && t.retro_reflective_m > 0.0 && t.beam_scatter_m > 0.0)) {
        throw DomainError("calibrate_link_budget: targets must be positive");
    }
    if (!(t.beam_scatter_m > t.single_antenna_m) || t.retro_reflective_m > t.beam_scatter_m) {
        throw DomainError("calibrate_link_budget: expected single < beam and retro <= beam");
    }
    const double gain_db = 20.0 * std::log10(static_cast<double>(num_antennas));

    LinkBudgetCalibration cal;
    cal.radio = base;
    cal.radio.path_loss_exponent =
        gain_db / (20.0 * std::log10(t.beam_scatter_m / t.single_antenna_m));
    if (cal.radio.path_loss_exponent < 2.0 || cal.radio.path_loss_exponent > 4.0) {
        throw ConfigError("calibrate_link_budget: fitted path-loss exponent outside [2, 4]");
    }

    const TagVariant single = TagVariant::single_antenna();
    const double lambda = cal.radio.wavelength();
    cal.radio.sensitivity_dbm =
        budget_without_paths(single, cal.radio) -
        2.0 * path_loss_db(t.single_antenna_m, lambda, cal.radio.path_loss_exponent);
    cal.retro_self_interference_db =
        20.0 * cal.radio.path_loss_exponent * std::log10(t.beam_scatter_m / t.retro_reflective_m);
    cal.calibrated = true;
    return cal;
}

LinkBudgetCalibration calibrated_link_budget() {
    return calibrate_link_budget(default_radio_base(), RangeTargets{});
}

double received_power_dbm(double d1_m, double d2_m, const TagVariant& variant,
                          const RadioParams& params) {
    if (!(d1_m > 0.0) || !(d2_m > 0.0)) {
        throw DomainError("received_power_dbm: distances must be positive");
    }
    const double lambda = params.wavelength();
    const double n = params.path_loss_exponent;
    return budget_without_paths(variant, params) - path_loss_db(d1_m, lambda, n) -
           path_loss_db(d2_m, lambda, n);
}

bool link_feasible(double d1_m, double d2_m, const TagVariant& variant, const RadioParams& params) {
    const double p = received_power_dbm(d1_m, d2_m, variant, params);
    if (is_colocated(variant) && std::abs(d1_m - d2_m) > kDiagonalTol * std::max(d1_m, d2_m)) {
        return false;
    }
    return p >= params.sensitivity_dbm;
}

double symmetric_range_limit(const TagVariant& variant, const RadioParams& params) {
    const double lambda = params.wavelength();
    const double n = params.path_loss_exponent;
    // budget - 2 * (PL(1 m) + 10 n log10 d) = sensitivity
    const double excess =
        budget_without_paths(variant, params) - 2.0 * path_loss_db(1.0, lambda, n) -
        params.sensitivity_dbm;
    return std::pow(10.0, excess / (20.0 * n));
}

FeasibleRegion feasible_region(const TagVariant& variant, const RadioParams& params,
                               double d_max_m, double grid_step_m) {
    if (!(grid_step_m > 0.0)) {
        throw DomainError("feasible_region: grid_step must be positive");
    }
    const auto count = static_cast<int>(std::floor(d_max_m / grid_step_m + 1e-9));
    FeasibleRegion region;
    region.samples.reserve(static_cast<std::size_t>(std::max(count, 0)) *
                           static_cast<std::size_t>(std::max(count, 0)));
    for (int i = 1; i <= count; ++i) {
        const double d1 = i * grid_step_m;
        for (int j = 1; j <= count; ++j) {
            const double d2 = j * grid_step_m;
            const bool ok = link_feasible(d1, d2, variant, params);
            region.samples.push_back({d1, d2, ok});
            if (i == j && ok) {
                region.max_symmetric_range_m = d1;
            }
        }
    }
    return region;
}

CoverageMap coverage_map(double floor_width_m, double floor_height_m,
                         std::span<const NodePosition> aps, const TagVariant& variant,
                         const RadioParams& params, double cell_m) {
    if (aps.empty()) {
        throw ConfigError("coverage_map: no access points");
    }
    if (!is_colocated(variant) && aps.size() < 2) {
        throw ConfigError("coverage_map: " + variant.name() +
                          " needs at least two access points (distinct Tx and Rx)");
    }
    if (!(floor_width_m > 0.0) || !(floor_height_m > 0.0) || !(cell_m > 0.0)) {
        throw DomainError("coverage_map: floor size and cell size must be positive");
    }

    CoverageMap map;
    map.columns = static_cast<int>(std::ceil(floor_width_m / cell_m - 1e-9));
    map.rows = static_cast<int>(std::ceil(floor_height_m / cell_m - 1e-9));
    const double cw = floor_width_m / map.columns;
    const double ch = floor_height_m / map.rows;
    map.cells.reserve(static_cast<std::size_t>(map.columns) * static_cast<std::size_t>(map.rows));

    const int num_aps = static_cast<int>(aps.size());
    std::size_t covered = 0;
    for (int r = 0; r < map.rows; ++r) {
        for (int c = 0; c < map.columns; ++c) {
            CoverageCell cell;
            cell.x_m = (c + 0.5) * cw;
            cell.y_m = (r + 0.5) * ch;
            const NodePosition tag{cell.x_m, cell.y_m};
            double best_margin = -std::numeric_limits<double>::infinity();
            for (int t = 0; t < num_aps; ++t) {
                for (int x = 0; x < num_aps; ++x) {
                    if (is_colocated(variant) != (t == x)) {
                        continue;
                    }
                    const double d1 = std::max(distance(aps[static_cast<std::size_t>(t)], tag),
                                               kMinLinkDistanceM);
                    const double d2 = std::max(distance(aps[static_cast<std::size_t>(x)], tag),
                                               kMinLinkDistanceM);
                    if (!link_feasible(d1, d2, variant, params)) {
                        continue;
                    }
                    const double margin =
                        received_power_dbm(d1, d2, variant, params) - params.sensitivity_dbm;
                    if (margin > best_margin) {
                        best_margin = margin;
                        cell.covered = true;
                        cell.best_tx = t;
                        cell.best_rx = x;
                    }
                }
            }
            covered += cell.covered ? 1 : 0;
            map.cells.push_back(cell);
        }
    }
    map.covered_fraction = static_cast<double>(covered) / static_cast<double>(map.cells.size());
    return map;
}

void write_region_csv(std::ostream& out, const FeasibleRegion& region,
                      const std::vector<std::string>& metadata) {
    for (const auto& line : metadata) {
        out << "# " << line << '\n';
    }
    out << "# max_symmetric_range_m=" << region.max_symmetric_range_m << '\n';
    out << "d1_m,d2_m,feasible\n";
    for (const auto& s : region.samples) {
        out << s.d1_m << ',' << s.d2_m << ',' << (s.feasible ? 1 : 0) << '\n';
    }
}

void write_coverage_csv(std::ostream& out, const CoverageMap& map,
                        const std::vector<std::string>& metadata) {
    for (const auto& line : metadata) {
        out << "# " << line << '\n';
    }
    out << "# covered_fraction=" << map.covered_fraction << '\n';
    out << "x_m,y_m,covered,best_tx,best_rx\n";
    for (const auto& c : map.cells) {
        out << c.x_m << ',' << c.y_m << ',' << (c.covered ? 1 : 0) << ',' << c.best_tx << ','
            << c.best_rx << '\n';
    }
}

} // namespace beamsteer
