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

// Experiment configuration: INI-style sections of key = value pairs.
//
//   [tag]        num_antennas, spacing_wavelengths, quantization_levels
//   [radio]      transmit/receive front end and noise (see dump_defaults())
//   [linkbudget] retro_self_interference_db, calibrated, d_max_m, grid_step_m, ...
//   [beampattern], [estimation], [protocol], [coverage], [run]
//
// Angles are degrees in the file and radians everywhere else. Lists are
// comma separated; AP positions are "x:y" pairs separated by ';'. Unknown
// sections or keys are rejected.

#include "beamsteer/array_model.hpp"
#include "beamsteer/channel.hpp"
#include "beamsteer/linkbudget.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace beamsteer {

struct BeampatternSettings {
    double delta_deg = 90.0;
    double theta_in_deg = 0.0;
    int num_points = 1801;
};

struct EstimationSettings {
    double tx_distance_m = 10.0;
    double tx_angle_deg = 20.0;
    std::vector<double> rx_angles_deg{0.0, 60.0};
    std::vector<double> rx_distances_m{5.0, 10.0, 20.0, 30.0};
    int num_trials = 10000;
    double accuracy_threshold_deg = 22.5;
    bool noise_enabled = true;
    double check_distance_m = 30.0;
    double check_angle_deg = 0.0;
    double min_accurate_fraction = 0.75;
};

struct RangeSettings {
    double d_max_m = 60.0;
    double grid_step_m = 1.0;
    double expected_single_m = 15.0;
    double expected_retro_m = 23.0;
    double expected_beam_m = 28.0;
    double tolerance_m = 1.0;
};

struct ProtocolSettings {
    std::string policy = "both"; // exhaustive | ratio | both
    int num_sessions = 1000;
    double slot_s = 2e-3;
    int response_window_slots = 2;
    double loss_probability = 0.0;
    int data_packets = 4;
    double min_angle_deg = -60.0;
    double max_angle_deg = 60.0;
    double min_distance_m = 2.0;
    double max_distance_m = 30.0;
    std::vector<NodePosition> mesh_aps{{-15.0, 10.0}, {15.0, 10.0}, {0.0, 20.0}};
};

struct CoverageSettings {
    double floor_width_m = 36.0644;  // 14000 sq ft as a square
    double floor_height_m = 36.0644;
    double cell_m = 0.5;
    std::string variant = "beam_scatter";
    std::vector<NodePosition> aps{{0.0, 0.0}, {36.0644, 0.0}, {0.0, 36.0644}, {36.0644, 36.0644}};
};

struct ExperimentConfig {
    TagConfig tag;
    RadioParams radio;
    double retro_self_interference_db = 0.0;
    bool calibrated = true;
    BeampatternSettings beampattern;
    EstimationSettings estimation;
    RangeSettings range;
    ProtocolSettings protocol;
    CoverageSettings coverage;
    std::uint64_t seed = 1;
    std::string out_dir = "out";

    LinkBudgetCalibration link_budget() const;
};

// Shipped calibration plus the settings above.
ExperimentConfig default_config();

// Starts from default_config() and overrides every key present.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical text of every key; parse_config(dump_config(c)) == c up to
// formatting precision.
std::string dump_config(const ExperimentConfig& cfg);

// "section.key=value" lines for output headers.
std::vector<std::string> resolved_config_lines(const ExperimentConfig& cfg);

// FNV-1a over dump_config(), hex.
std::string config_hash(const ExperimentConfig& cfg);

double deg_to_rad(double deg);
double rad_to_deg(double rad);

} // namespace beamsteer
