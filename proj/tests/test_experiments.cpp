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

#include "doctest.h"

#include "beamsteer/calibration.hpp"
#include "beamsteer/experiments.hpp"
#include "oracles.hpp"

#include <limits>

using namespace beamsteer;
using oracle::deg;

TEST_CASE("steering sweep reports the analytic angle") {
    const auto rows = steering_sweep({0.0, kPi / 2.0, kPi}, TagConfig{}, 0.0, 3601);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].expected_deg == doctest::Approx(0.0));
    CHECK(rows[1].expected_deg == doctest::Approx(30.0));
    CHECK(rows[2].expected_deg == doctest::Approx(90.0));
    CHECK(rows[2].peaks_deg.size() == 2);
    for (const auto& r : rows) {
        CHECK(r.error_deg <= 0.05 + 1e-9);
    }
}

TEST_CASE("cdf tightening detects an inversion") {
    ErrorCdf near;
    near.sorted_errors = {0.1, 0.2, 0.3};
    near.accurate_fraction = 1.0;
    ErrorCdf far;
    far.sorted_errors = {0.2, 0.4, 0.6};
    far.accurate_fraction = 0.9;
    CHECK(cdfs_tighten({near, far}));
    CHECK_FALSE(cdfs_tighten({far, near}));
}

TEST_CASE("drop-one coverage with two APs leaves nothing") {
    const LinkBudgetCalibration cal = shipped_calibration();
    const CoverageExperiment ex =
        coverage_experiment(10.0, 10.0, {{0.0, 0.0}, {10.0, 10.0}},
                            cal.variant(TagKind::BeamScatter), cal.radio, 1.0);
    CHECK(ex.full.covered_fraction == 1.0);
    CHECK(ex.drop_one_fractions == std::vector<double>{0.0, 0.0});
}

TEST_CASE("mesh run fills one LUT entry per ordered pair") {
    RadioParams p = shipped_calibration().radio;
    p.noise_floor_dbm = -std::numeric_limits<double>::infinity();
    const std::vector<AccessPoint> aps{{4, position_from_polar(8.0, deg(-30.0))},
                                       {9, position_from_polar(11.0, deg(25.0))}};
    const MeshRun run = mesh_run(aps, 3, TagConfig{}, p, SessionOptions{});
    CHECK(run.tag.lut.size() == 2);
    CHECK(run.tag.lut.count({4, 9}) == 1);
    CHECK(run.tag.lut.count({9, 4}) == 1);
    for (std::size_t i = 1; i < run.transcript.size(); ++i) {
        CHECK(run.transcript[i].time_s >= run.transcript[i - 1].time_s);
    }
}

TEST_CASE("protocol batch counts") {
    ProtocolBatchOptions o;
    o.num_sessions = 40;
    o.determinism_sessions = 10;
    const ProtocolBatchStats s = protocol_batch(TagConfig{}, shipped_calibration().radio, o);
    CHECK(s.sessions == 40);
    CHECK(s.determinism_checked == 10);
    CHECK(s.determinism_mismatches == 0);
    CHECK(s.exhaustive_matches == s.unique_optimum);
    CHECK(s.ratio_matches == s.unique_optimum);
}
