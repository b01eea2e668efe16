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

#include "beamsteer/channel.hpp"
#include "beamsteer/errors.hpp"
#include "oracles.hpp"

#include <limits>
#include <map>
#include <random>

using namespace beamsteer;
using oracle::deg;

namespace {

RadioParams noiseless() {
    RadioParams p;
    p.noise_floor_dbm = -std::numeric_limits<double>::infinity();
    return p;
}

} // namespace

TEST_CASE("friis path gain") {
    const double lambda = 0.1244;
    CHECK(friis_path_gain(lambda / (4.0 * kPi), lambda) == doctest::Approx(1.0));
    CHECK(friis_path_gain(20.0, lambda) ==
          doctest::Approx(friis_path_gain(10.0, lambda) / 4.0).epsilon(1e-12));
    // (0.1244 / (4 pi 10))^2 = 9.79989e-7, -60.088 dB
    CHECK(friis_path_gain(10.0, lambda) == doctest::Approx(9.79989e-7).epsilon(1e-5));
    CHECK_THROWS_AS(friis_path_gain(0.0, lambda), DomainError);
    CHECK_THROWS_AS(friis_path_gain(-1.0, lambda), DomainError);
}

TEST_CASE("log-distance gain reduces to friis at exponent 2") {
    const double lambda = 0.1243;
    for (double d : {0.5, 1.0, 3.0, 27.0}) {
        CHECK(path_gain(d, lambda, 2.0) == doctest::Approx(friis_path_gain(d, lambda)).epsilon(1e-12));
    }
    CHECK(path_loss_db(10.0, lambda, 3.0) - path_loss_db(1.0, lambda, 3.0) ==
          doctest::Approx(30.0));
}

TEST_CASE("two-hop channel is maximized at the steering phase") {
    const RadioParams p = noiseless();
    const NodePosition tx = position_from_polar(10.0, deg(25.0));
    const NodePosition rx = position_from_polar(15.0, deg(-40.0));
    TagConfig cfg;
    cfg.phase_step = steering_phase(deg(25.0), deg(-40.0), 0.5);
    const double at_opt = std::abs(backscatter_channel(tx, rx, cfg, p));

    double grid_best = 0.0;
    double grid_arg = 0.0;
    for (int i = 0; i < 3600; ++i) {
        TagConfig c = cfg;
        c.phase_step = -kPi + kTwoPi * i / 3600.0;
        const double m = std::abs(backscatter_channel(tx, rx, c, p));
        if (m > grid_best) {
            grid_best = m;
            grid_arg = c.phase_step;
        }
    }
    CHECK(at_opt >= grid_best * (1.0 - 1e-12));
    CHECK(oracle::circ_dist(grid_arg, cfg.phase_step) <= kTwoPi / 3600.0);
}

TEST_CASE("single element ignores the phase step") {
    const RadioParams p = noiseless();
    const NodePosition tx = position_from_polar(8.0, deg(10.0));
    const NodePosition rx = position_from_polar(12.0, deg(50.0));
    TagConfig cfg;
    cfg.num_antennas = 1;
    const double ref = std::abs(backscatter_channel(tx, rx, cfg, p));
    for (double d : {0.5, 1.0, 2.0, 3.0}) {
        cfg.phase_step = d;
        CHECK(std::abs(backscatter_channel(tx, rx, cfg, p)) == doctest::Approx(ref).epsilon(1e-14));
    }
}

TEST_CASE("four elements at the optimum give 16x the single-element power") {
    const RadioParams p = noiseless();
    const NodePosition tx = position_from_polar(10.0, deg(-15.0));
    const NodePosition rx = position_from_polar(20.0, deg(35.0));
    TagConfig four;
    four.phase_step = steering_phase(deg(-15.0), deg(35.0), 0.5);
    TagConfig one;
    one.num_antennas = 1;
    const double ratio = std::norm(backscatter_channel(tx, rx, four, p)) /
                         std::norm(backscatter_channel(tx, rx, one, p));
    CHECK(ratio == doctest::Approx(16.0).epsilon(1e-9));
}

TEST_CASE("doubling both hops costs 16x power") {
    const RadioParams p = noiseless();
    TagConfig cfg;
    cfg.phase_step = 0.4;
    const double near = std::norm(backscatter_channel(position_from_polar(5.0, 0.3),
                                                      position_from_polar(7.0, -0.2), cfg, p));
    const double far = std::norm(backscatter_channel(position_from_polar(10.0, 0.3),
                                                     position_from_polar(14.0, -0.2), cfg, p));
    CHECK(near / far == doctest::Approx(16.0).epsilon(1e-12));
}

TEST_CASE("swapping Tx and Rx keeps the optimized magnitude") {
    const RadioParams p = noiseless();
    const NodePosition a = position_from_polar(9.0, deg(12.0));
    const NodePosition b = position_from_polar(21.0, deg(-33.0));
    TagConfig cfg;
    cfg.phase_step = steering_phase(deg(12.0), deg(-33.0), 0.5);
    const double ab = std::abs(backscatter_channel(a, b, cfg, p));
    cfg.phase_step = steering_phase(deg(-33.0), deg(12.0), 0.5);
    const double ba = std::abs(backscatter_channel(b, a, cfg, p));
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
}

TEST_CASE("exact per-element paths approach the plane-wave model in the far field") {
    RadioParams p = noiseless();
    const NodePosition tx = position_from_polar(200.0, deg(20.0));
    const NodePosition rx = position_from_polar(300.0, deg(-10.0));
    TagConfig cfg;
    cfg.phase_step = 1.1;
    const Complex plane = backscatter_channel(tx, rx, cfg, p);
    p.far_field = false;
    const Complex exact = backscatter_channel(tx, rx, cfg, p);
    // Phase centres differ (element 0 vs array); compare magnitudes.
    CHECK(std::abs(exact) == doctest::Approx(std::abs(plane)).epsilon(2e-3));
}

TEST_CASE("nodes behind the array are rejected") {
    const RadioParams p = noiseless();
    const TagConfig cfg;
    CHECK_THROWS_AS(backscatter_channel({1.0, 0.0}, {0.0, 5.0}, cfg, p), GeometryError);
    CHECK_THROWS_AS(backscatter_channel({0.0, 5.0}, {1.0, -2.0}, cfg, p), GeometryError);
    CHECK_THROWS_AS(backscatter_channel({0.0, 0.0}, {0.0, 5.0}, cfg, p), GeometryError);
}

TEST_CASE("noiseless CSI returns the channel exactly") {
    const RadioParams p = noiseless();
    const Complex h{1e-5, -2e-5};
    const CsiMeasurement m = measure_csi(h, p, 42);
    CHECK(m.complex_gain == h);
    CHECK(m.noise_variance == 0.0);
    CHECK(m.channel_index == 11);
    CHECK(m.rssi_dbm == doctest::Approx(p.tx_power_dbm + 10.0 * std::log10(std::norm(h))));
}

TEST_CASE("CSI noise has the configured variance") {
    RadioParams p;
    p.tx_power_dbm = 20.0;
    p.noise_floor_dbm = -80.0;
    const double var = std::pow(10.0, -10.0);
    CHECK(csi_noise_variance(p) == doctest::Approx(var));

    // h at 20 dB SNR
    const Complex h = std::polar(std::sqrt(100.0 * var), 0.7);
    std::mt19937_64 rng(99);
    double acc = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        acc += std::norm(measure_csi(h, p, rng).complex_gain - h);
    }
    CHECK(acc / n == doctest::Approx(var).epsilon(0.05));
}

TEST_CASE("noise-only RSSI sits near the noise floor") {
    RadioParams p;
    p.noise_floor_dbm = -90.0;
    std::mt19937_64 rng(5);
    double acc = 0.0;
    const int n = 4000;
    for (int i = 0; i < n; ++i) {
        acc += std::pow(10.0, measure_csi({0.0, 0.0}, p, rng).rssi_dbm / 10.0);
    }
    CHECK(10.0 * std::log10(acc / n) == doctest::Approx(-90.0).epsilon(0.2 / 90.0));
}

TEST_CASE("same seed gives bit-identical CSI") {
    RadioParams p;
    p.noise_floor_dbm = -70.0;
    const Complex h{3e-5, 1e-5};
    const CsiMeasurement a = measure_csi(h, p, 1234);
    const CsiMeasurement b = measure_csi(h, p, 1234);
    CHECK(a.complex_gain == b.complex_gain);
    CHECK(a.rssi_dbm == b.rssi_dbm);
    CHECK(measure_csi(h, p, 1235).complex_gain != a.complex_gain);
}

TEST_CASE("rssi converts back to amplitude") {
    const RadioParams p = noiseless();
    const Complex h{2e-4, 0.0};
    const CsiMeasurement m = measure_csi(h, p, 1);
    CHECK(amplitude_from_rssi(m.rssi_dbm, p.tx_power_dbm) == doctest::Approx(2e-4));
}

TEST_CASE("channel shift") {
    CHECK(shift_channel(1) == 11);
    CHECK(shift_channel(11) == 1);
    CHECK_THROWS_AS(shift_channel(6), ConfigError);
    CHECK_THROWS_AS(shift_channel(0), ConfigError);
    CHECK_THROWS_AS(shift_channel(14), ConfigError);
    CHECK(ChannelMap::center_frequency_hz(1) == doctest::Approx(2.412e9));
    CHECK(ChannelMap::center_frequency_hz(11) == doctest::Approx(2.462e9));

    const ChannelMap custom(std::map<int, int>{{6, 1}});
    CHECK(custom.shift(6) == 1);
    CHECK_THROWS_AS(custom.shift(1), ConfigError);
    CHECK_THROWS_AS(ChannelMap(std::map<int, int>{{6, 12}}), ConfigError);
}

TEST_CASE("radio params validation") {
    RadioParams p;
    CHECK_NOTHROW(p.validate());
    p.path_loss_exponent = 1.5;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.tag_conversion_loss_db = -1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.noise_floor_dbm = -std::numeric_limits<double>::infinity();
    CHECK_NOTHROW(p.validate());
}
