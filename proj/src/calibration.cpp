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

#include "beamsteer/calibration.hpp"

#include "beamsteer/errors.hpp"

#include <cmath>

namespace beamsteer {

EstimationGeometry reference_estimation_geometry() {
    EstimationGeometry g;
    g.tx_distance_m = 10.0;
    g.tx_angle = 20.0 * kPi / 180.0;
    g.rx_distance_m = 30.0;
    g.rx_angle = 0.0;
    return g;
}

LinkBudgetCalibration shipped_calibration() {
    LinkBudgetCalibration cal = calibrated_link_budget();
    cal.radio.noise_floor_dbm = kCalibratedCsiNoiseFloorDbm;
    return cal;
}

double fit_csi_noise_floor(const EstimationGeometry& geometry, const TagConfig& cfg,
                           const RadioParams& radio, double target_fraction, int num_trials,
                           std::uint64_t seed, double lo_dbm, double hi_dbm) {
    if (!(lo_dbm < hi_dbm) || target_fraction <= 0.0 || target_fraction >= 1.0) {
        throw DomainError("fit_csi_noise_floor: bad bracket or target");
    }
    TrialOptions opt;
    opt.num_trials = num_trials;
    opt.seed = seed;
    auto fraction_at = [&](double floor_dbm) {
        RadioParams p = radio;
        p.noise_floor_dbm = floor_dbm;
        return run_estimation_trials(geometry, cfg, p, opt).accurate_fraction;
    };
    if (fraction_at(lo_dbm) < target_fraction || fraction_at(hi_dbm) >= target_fraction) {
        throw DomainError("fit_csi_noise_floor: target not bracketed");
    }
    // Invariant: fraction(lo) >= target > fraction(hi).
    for (int iter = 0; iter < 40 && hi_dbm - lo_dbm > 1e-3; ++iter) {
        const double mid = 0.5 * (lo_dbm + hi_dbm);
        if (fraction_at(mid) >= target_fraction) {
            lo_dbm = mid;
        } else {
            hi_dbm = mid;
        }
    }
    return lo_dbm;
}

} // namespace beamsteer
