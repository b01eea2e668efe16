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

// Shipped parameter set. Both halves are fits, not measurements:
//  * the link budget reproduces the 15 / 23 / 28 m symmetric ranges
//  * the CSI noise floor makes the ratio estimator accurate in about 80% of
//    trials with the Rx 30 m out on the tag normal and the Tx 10 m away
// Anything reported with these numbers is a calibrated reproduction.

#include "beamsteer/estimator.hpp"
#include "beamsteer/linkbudget.hpp"

#include <cstdint>

namespace beamsteer {

// Output of fit_csi_noise_floor() for the reference geometry below with
// 4000 trials, seed 2024, target 0.82, rounded to 0.1 dB.
inline constexpr double kCalibratedCsiNoiseFloorDbm = -108.5;

// Tx 10 m away at 20 degrees, Rx on the normal at 30 m.
EstimationGeometry reference_estimation_geometry();

LinkBudgetCalibration shipped_calibration();

// Bisection on noise_floor_dbm over [lo_dbm, hi_dbm] so that the accurate
// fraction at `geometry` meets target_fraction. Trials share seeds across
// iterations, which keeps the fraction monotone in the floor in practice.
double fit_csi_noise_floor(const EstimationGeometry& geometry, const TagConfig& cfg,
                           const RadioParams& radio, double target_fraction, int num_trials,
                           std::uint64_t seed, double lo_dbm = -140.0, double hi_dbm = -60.0);

} // namespace beamsteer
