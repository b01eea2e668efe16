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
#include "beamsteer/errors.hpp"
#include "beamsteer/protocol.hpp"
#include "oracles.hpp"

#include <limits>
#include <random>
#include <sstream>

using namespace beamsteer;
using oracle::deg;

namespace {

RadioParams noiseless() {
    RadioParams p = shipped_calibration().radio;
    p.noise_floor_dbm = -std::numeric_limits<double>::infinity();
    return p;
}

TagState sleeping_tag(int id = 7) {
    TagState t;
    t.tag_id = id;
    return t;
}

Event ev(EventKind kind, std::int64_t arg, int source = 0, double t = 0.0) {
    return Event{t, kind, arg, source};
}

} // namespace

TEST_CASE("tag wakes only for its own pattern") {
    const TagState s = sleeping_tag();
    const TagStep other = tag_step(s, ev(EventKind::WakePattern, 3));
    CHECK(other.state.mode == TagMode::Sleep);
    CHECK_FALSE(other.response);
    CHECK(other.ignored);

    const TagStep mine = tag_step(s, ev(EventKind::WakePattern, 7, 2));
    CHECK(mine.state.mode == TagMode::Scanning);
    CHECK(mine.state.active_tx == 2);
}

TEST_CASE("freeze moves scanning to backscattering and writes the LUT") {
    TagState s = tag_step(sleeping_tag(), ev(EventKind::WakePattern, 7, 0)).state;
    s = tag_step(s, ev(EventKind::CsiProbe, 1, 1)).state;
    const TagStep f = tag_step(s, ev(EventKind::Freeze, 2));
    CHECK(f.state.mode == TagMode::Backscattering);
    CHECK(f.state.current_delta_index == 2);
    CHECK(f.state.lut.at({0, 1}) == 2);
}

TEST_CASE("commands in sleep are ignored") {
    const TagState s = sleeping_tag();
    for (auto kind : {EventKind::SetPhase, EventKind::Freeze, EventKind::CsiProbe,
                      EventKind::ExcitationPacket}) {
        const TagStep st = tag_step(s, ev(kind, 1));
        CHECK(st.ignored);
        CHECK(st.state == s);
        CHECK_FALSE(st.response);
    }
}

TEST_CASE("malformed events are rejected") {
    TagState s = tag_step(sleeping_tag(), ev(EventKind::WakePattern, 7)).state;
    CHECK_THROWS_AS(tag_step(s, ev(EventKind::SetPhase, 4)), ProtocolError);
    CHECK_THROWS_AS(tag_step(s, ev(EventKind::Freeze, -1)), ProtocolError);
    CHECK_THROWS_AS(tag_step(s, ev(EventKind::SetPhase, 1, 0, -1.0)), ProtocolError);
    CHECK_THROWS_AS(
        tag_step(s, ev(EventKind::SetPhase, 1, 0, std::numeric_limits<double>::quiet_NaN())),
        ProtocolError);
}

TEST_CASE("backscattered responses land on the shifted channel") {
    TagState s = tag_step(sleeping_tag(), ev(EventKind::WakePattern, 7)).state;
    const TagStep probe = tag_step(s, ev(EventKind::CsiProbe, 1));
    REQUIRE(probe.response);
    CHECK(probe.response->kind == ResponseKind::ProbeReflection);
    CHECK(probe.response->channel == 11);

    s = tag_step(probe.state, ev(EventKind::Freeze, 1)).state;
    const TagStep data = tag_step(s, ev(EventKind::ExcitationPacket, 0x42));
    REQUIRE(data.response);
    CHECK(data.response->kind == ResponseKind::ModulatedData);
    CHECK(data.response->payload == 0x42);
    CHECK(data.response->delta_index == 1);

    CHECK(tag_step(data.state, ev(EventKind::Timeout, 0)).state.mode == TagMode::Sleep);
}

TEST_CASE("random event streams respect the mode table") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> kind(0, 5);
    std::uniform_int_distribution<int> idx(0, 3);
    std::uniform_int_distribution<int> tag(6, 8);
    TagState s = sleeping_tag();
    for (int i = 0; i < 20000; ++i) {
        const auto k = static_cast<EventKind>(kind(rng));
        const std::int64_t arg = k == EventKind::WakePattern ? tag(rng) : idx(rng);
        const TagState before = s;
        const TagStep st = tag_step(s, ev(k, arg, idx(rng), i * 1e-3));
        s = st.state;

        if (st.response) {
            // Reflections only while scanning; data only when frozen.
            if (st.response->kind == ResponseKind::ProbeReflection) {
                CHECK(before.mode == TagMode::Scanning);
                CHECK(k == EventKind::CsiProbe);
            } else {
                CHECK(before.mode == TagMode::Backscattering);
            }
        }
        if (before.mode != s.mode) {
            const bool allowed =
                (before.mode == TagMode::Sleep && s.mode == TagMode::Scanning) ||
                (before.mode == TagMode::Scanning && s.mode == TagMode::Backscattering) ||
                s.mode == TagMode::Sleep;
            CHECK(allowed);
        }
        if (s.lut != before.lut) {
            CHECK(before.mode == TagMode::Scanning);
        }
    }
}

TEST_CASE("event ordering") {
    CHECK(event_before(ev(EventKind::Timeout, 0, 5, 1.0), ev(EventKind::WakePattern, 0, 0, 2.0)));
    CHECK(event_before(ev(EventKind::Timeout, 0, 0, 1.0), ev(EventKind::WakePattern, 0, 1, 1.0)));
    CHECK(event_before(ev(EventKind::WakePattern, 0, 1, 1.0), ev(EventKind::SetPhase, 0, 1, 1.0)));
}

TEST_CASE("exhaustive session picks the brute-force tap") {
    const RadioParams p = noiseless();
    const TagConfig cfg;
    const AccessPoint tx{0, position_from_polar(10.0, deg(10.0))};
    const AccessPoint rx{1, position_from_polar(12.0, deg(40.0))};
    SessionOptions opt;
    opt.policy = SelectionPolicy::Exhaustive;
    const SessionReport r = run_session(tx, rx, sleeping_tag(), cfg, p, opt);
    CHECK(r.selected_delta_index == best_tap(tx, rx, cfg, p).index);
    CHECK(r.num_downlink_commands == 5);
    CHECK(r.csi_log.size() == 4);
    CHECK(r.final_tag.mode == TagMode::Sleep);
    CHECK(r.final_tag.lut.at({0, 1}) == r.selected_delta_index);
    CHECK(r.decoded_payload_ok);
    CHECK(r.elapsed_time_s > 0.0);
}

TEST_CASE("ratio and exhaustive agree on a geometry grid") {
    const RadioParams p = noiseless();
    const TagConfig cfg;
    int compared = 0;
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            const AccessPoint tx{0, position_from_polar(8.0, deg(-60.0 + 13.0 * i + 0.37))};
            const AccessPoint rx{1, position_from_polar(15.0, deg(-60.0 + 13.0 * j + 0.11))};
            const TapOptimum opt = best_tap(tx, rx, cfg, p);
            SessionOptions ratio;
            ratio.policy = SelectionPolicy::Ratio;
            SessionOptions exhaustive;
            const SessionReport a = run_session(tx, rx, sleeping_tag(), cfg, p, ratio);
            const SessionReport b = run_session(tx, rx, sleeping_tag(), cfg, p, exhaustive);
            CHECK(a.num_downlink_commands <= 5);
            CHECK(b.num_downlink_commands == 5);
            if (opt.unique) {
                ++compared;
                CHECK(a.selected_delta_index == opt.index);
                CHECK(b.selected_delta_index == opt.index);
            }
        }
    }
    CHECK(compared > 90);
}

TEST_CASE("ratio policy at the quarter-turn null") {
    const RadioParams p = noiseless();
    const TagConfig cfg;
    SessionOptions opt;
    opt.policy = SelectionPolicy::Ratio;
    for (double out : {30.0, -30.0}) {
        const AccessPoint tx{0, position_from_polar(10.0, 0.0)};
        const AccessPoint rx{1, position_from_polar(10.0, deg(out))};
        const SessionReport r = run_session(tx, rx, sleeping_tag(), cfg, p, opt);
        CHECK(r.selected_delta_index == (out > 0 ? 1 : 3));
        CHECK(r.selected_delta_index == best_tap(tx, rx, cfg, p).index);
    }
}

TEST_CASE("ratio policy constraints") {
    const RadioParams p = noiseless();
    TagConfig cfg;
    cfg.quantization_levels = 3;
    SessionOptions opt;
    opt.policy = SelectionPolicy::Ratio;
    TagState tag = sleeping_tag();
    tag.levels = 3;
    const AccessPoint tx{0, position_from_polar(5.0, 0.2)};
    const AccessPoint rx{1, position_from_polar(5.0, -0.2)};
    CHECK_THROWS_AS(run_session(tx, rx, tag, cfg, p, opt), ConfigError);
    CHECK_THROWS_AS(run_session(tx, tx, sleeping_tag(), TagConfig{}, p, opt), ConfigError);
}

TEST_CASE("sessions are deterministic under noise and loss") {
    RadioParams p = shipped_calibration().radio;
    const TagConfig cfg;
    const AccessPoint tx{0, position_from_polar(10.0, deg(-20.0))};
    const AccessPoint rx{1, position_from_polar(20.0, deg(30.0))};
    SessionOptions opt;
    opt.policy = SelectionPolicy::Ratio;
    opt.seed = 555;
    const SessionReport a = run_session(tx, rx, sleeping_tag(), cfg, p, opt);
    const SessionReport b = run_session(tx, rx, sleeping_tag(), cfg, p, opt);
    std::ostringstream ta;
    std::ostringstream tb;
    write_transcript(ta, a.transcript);
    write_transcript(tb, b.transcript);
    CHECK(ta.str() == tb.str());
    CHECK(a.selected_delta_index == b.selected_delta_index);
    CHECK(a.csi_log.size() == b.csi_log.size());
    for (std::size_t i = 0; i < a.csi_log.size(); ++i) {
        CHECK(a.csi_log[i].second.complex_gain == b.csi_log[i].second.complex_gain);
    }
}

TEST_CASE("lost responses end in a timeout") {
    const RadioParams p = noiseless();
    const TagConfig cfg;
    const AccessPoint tx{0, position_from_polar(10.0, 0.1)};
    const AccessPoint rx{1, position_from_polar(10.0, 0.5)};
    SessionOptions opt;
    opt.loss_probability = 1.0;
    CHECK_THROWS_AS(run_session(tx, rx, sleeping_tag(), cfg, p, opt), TimeoutError);

    // Some seed at moderate loss must also hit the timeout path.
    opt.loss_probability = 0.05;
    int timeouts = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        opt.seed = seed;
        try {
            run_session(tx, rx, sleeping_tag(), cfg, p, opt);
        } catch (const TimeoutError&) {
            ++timeouts;
        }
    }
    CHECK(timeouts > 0);
    CHECK(timeouts < 50);
}

TEST_CASE("weak links fail to decode") {
    RadioParams p = noiseless();
    p.sensitivity_dbm = 0.0;
    const AccessPoint tx{0, position_from_polar(10.0, 0.1)};
    const AccessPoint rx{1, position_from_polar(10.0, 0.5)};
    const SessionReport r = run_session(tx, rx, sleeping_tag(), TagConfig{}, p, SessionOptions{});
    CHECK_FALSE(r.decoded_payload_ok);
}

TEST_CASE("session refuses an awake tag") {
    TagState tag = sleeping_tag();
    tag.mode = TagMode::Scanning;
    const AccessPoint tx{0, position_from_polar(10.0, 0.1)};
    const AccessPoint rx{1, position_from_polar(10.0, 0.5)};
    CHECK_THROWS_AS(run_session(tx, rx, tag, TagConfig{}, noiseless(), SessionOptions{}),
                    ProtocolError);
}

TEST_CASE("LUT accumulates across sessions") {
    const RadioParams p = noiseless();
    const TagConfig cfg;
    const std::vector<AccessPoint> aps{{0, position_from_polar(10.0, deg(-40.0))},
                                       {1, position_from_polar(12.0, deg(5.0))},
                                       {2, position_from_polar(9.0, deg(50.0))}};
    TagState tag = sleeping_tag();
    for (const auto& s : mesh_session_plan(aps, {tag.tag_id}, cfg.quantization_levels, {})) {
        const auto& tx = aps[static_cast<std::size_t>(s.tx_ap)];
        const auto& rx = aps[static_cast<std::size_t>(s.rx_ap)];
        tag = run_session(tx, rx, tag, cfg, p, SessionOptions{}).final_tag;
    }
    CHECK(tag.lut.size() == 6);
    for (const auto& [pair, index] : tag.lut) {
        CHECK(index == best_tap(aps[static_cast<std::size_t>(pair.first)],
                                aps[static_cast<std::size_t>(pair.second)], cfg, p)
                           .index);
    }
    std::ostringstream out;
    write_lut_csv(out, tag, {});
    CHECK(out.str().rfind("tx_ap,rx_ap,delta_index,delta_rad\n", 0) == 0);
}

TEST_CASE("mesh plan enumerates ordered pairs without overlap") {
    const SessionOptions opt;
    const std::vector<AccessPoint> two{{0, {}}, {1, {}}};
    const std::vector<AccessPoint> three{{0, {}}, {1, {}}, {2, {}}};
    CHECK(mesh_session_plan(two, {1}, 4, opt).size() == 2);
    CHECK(mesh_session_plan(three, {1}, 4, opt).size() == 6);

    const auto plan = mesh_session_plan(two, {1, 2}, 4, opt);
    REQUIRE(plan.size() == 4);
    const double span = session_slot_budget(4, opt.data_packets, opt.timing) * opt.timing.slot_s;
    for (std::size_t i = 1; i < plan.size(); ++i) {
        CHECK(plan[i].start_time_s - plan[i - 1].start_time_s >= span - 1e-12);
    }
    CHECK_THROWS_AS(mesh_session_plan({{0, {}}}, {1}, 4, opt), ConfigError);
}

TEST_CASE("session fits its slot budget") {
    const RadioParams p = noiseless();
    const AccessPoint tx{0, position_from_polar(10.0, 0.1)};
    const AccessPoint rx{1, position_from_polar(10.0, 0.5)};
    const SessionOptions opt;
    const SessionReport r = run_session(tx, rx, sleeping_tag(), TagConfig{}, p, opt);
    CHECK(r.elapsed_time_s <=
          session_slot_budget(4, opt.data_packets, opt.timing) * opt.timing.slot_s + 1e-12);
}
