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

#include "beamsteer/protocol.hpp"

#include "beamsteer/errors.hpp"
#include "beamsteer/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <queue>
#include <random>

namespace beamsteer {

std::string to_string(TagMode mode) {
    switch (mode) {
    case TagMode::Sleep:
        return "Sleep";
    case TagMode::Scanning:
        return "Scanning";
    case TagMode::Backscattering:
        return "Backscattering";
    }
    return "?";
}

std::string to_string(EventKind kind) {
    switch (kind) {
    case EventKind::WakePattern:
        return "WakePattern";
    case EventKind::SetPhase:
        return "SetPhase";
    case EventKind::CsiProbe:
        return "CsiProbe";
    case EventKind::Freeze:
        return "Freeze";
    case EventKind::ExcitationPacket:
        return "ExcitationPacket";
    case EventKind::Timeout:
        return "Timeout";
    }
    return "?";
}

std::string to_string(SelectionPolicy policy) {
    return policy == SelectionPolicy::Exhaustive ? "exhaustive" : "ratio";
}

SelectionPolicy parse_policy(const std::string& name) {
    if (name == "exhaustive") {
        return SelectionPolicy::Exhaustive;
    }
    if (name == "ratio") {
        return SelectionPolicy::Ratio;
    }
    throw ConfigError("unknown selection policy '" + name + "'");
}

bool event_before(const Event& a, const Event& b) {
    if (a.time != b.time) {
        return a.time < b.time;
    }
    if (a.source_ap != b.source_ap) {
        return a.source_ap < b.source_ap;
    }
    return static_cast<int>(a.kind) < static_cast<int>(b.kind);
}

TagStep tag_step(const TagState& state, const Event& event, int excitation_channel) {
    if (!std::isfinite(event.time) || event.time < 0.0) {
        throw ProtocolError("tag_step: event time must be finite and non-negative");
    }
    const bool carries_index = event.kind == EventKind::SetPhase || event.kind == EventKind::Freeze;
    if (carries_index && (event.arg < 0 || event.arg >= state.levels)) {
        throw ProtocolError("tag_step: delta index " + std::to_string(event.arg) +
                            " outside 0.." + std::to_string(state.levels - 1));
    }

    TagStep out{state, std::nullopt, false};
    TagState& s = out.state;
    switch (event.kind) {
    case EventKind::WakePattern:
        if (event.arg != state.tag_id) {
            out.ignored = true;
        } else if (state.mode == TagMode::Sleep) {
            s.mode = TagMode::Scanning;
            s.active_tx = event.source_ap;
            s.active_rx = -1;
        } else {
            out.ignored = true;
        }
        break;
    case EventKind::SetPhase:
        if (state.mode == TagMode::Scanning) {
            s.current_delta_index = static_cast<int>(event.arg);
        } else {
            out.ignored = true;
        }
        break;
    case EventKind::CsiProbe:
        if (state.mode == TagMode::Scanning) {
            s.active_rx = static_cast<int>(event.arg);
            out.response = TagResponse{ResponseKind::ProbeReflection, s.current_delta_index,
                                       shift_channel(excitation_channel), 0};
        } else {
            out.ignored = true;
        }
        break;
    case EventKind::Freeze:
        if (state.mode == TagMode::Scanning) {
            s.current_delta_index = static_cast<int>(event.arg);
            s.lut[{s.active_tx, s.active_rx}] = s.current_delta_index;
            s.mode = TagMode::Backscattering;
        } else {
            out.ignored = true;
        }
        break;
    case EventKind::ExcitationPacket:
        if (state.mode == TagMode::Backscattering) {
            out.response = TagResponse{ResponseKind::ModulatedData, s.current_delta_index,
                                       shift_channel(excitation_channel), event.arg};
        } else {
            out.ignored = true;
        }
        break;
    case EventKind::Timeout:
        s.mode = TagMode::Sleep;
        s.active_tx = -1;
        s.active_rx = -1;
        break;
    }
    return out;
}

namespace {

struct Delivery {
    double time = 0.0;
    int source = 0;
    int order = 0;
    std::uint64_t seq = 0;
    bool is_response = false;
    Event event;
    TagResponse response;
};

struct DeliveryLater {
    bool operator()(const Delivery& a, const Delivery& b) const {
        if (a.time != b.time) {
            return a.time > b.time;
        }
        if (a.source != b.source) {
            return a.source > b.source;
        }
        if (a.order != b.order) {
            return a.order > b.order;
        }
        return a.seq > b.seq;
    }
};

struct Arrival {
    double time = 0.0;
    TagResponse response;
    CsiMeasurement csi;
};

// Responses sort after every AP-originated event in the same slot.
constexpr int kResponseOrder = 100;
constexpr int kTagSource = 1 << 30;

class SessionSim {
  public:
    SessionSim(const AccessPoint& tx, const AccessPoint& rx, const TagState& tag,
               const TagConfig& cfg, const RadioParams& params, const SessionOptions& options)
        : tx_(tx), rx_(rx), tag_(tag), cfg_(cfg), params_(params), options_(options),
          noise_rng_(derive_seed(options.seed, 0)), loss_rng_(derive_seed(options.seed, 1)) {}

    void transmit(EventKind kind, std::int64_t arg, const AccessPoint& from, const char* role) {
        const Event e{now_, kind, arg, from.id};
        record(now_, std::string(role) + ":" + std::to_string(from.id), to_string(kind), arg);
        if (kind == EventKind::SetPhase || kind == EventKind::Freeze) {
            ++downlink_commands_;
        }
        if (lost()) {
            record(now_, "channel", "Dropped", arg);
        } else {
            push({now_, from.id, static_cast<int>(kind), 0, false, e, {}});
        }
        now_ += options_.timing.slot_s;
    }

    // Waits for one tag response to the transmission sent in the previous
    // slot.
    Arrival await_response(ResponseKind expected) {
        const double sent = now_ - options_.timing.slot_s;
        const double deadline = sent + options_.timing.response_window_slots * options_.timing.slot_s;
        pump(deadline);
        for (auto it = arrivals_.begin(); it != arrivals_.end(); ++it) {
            if (it->response.kind == expected) {
                Arrival a = *it;
                arrivals_.erase(it);
                now_ = std::max(now_, a.time + options_.timing.slot_s);
                return a;
            }
        }
        now_ = std::max(now_, deadline + options_.timing.slot_s);
        record(deadline, "rx_ap:" + std::to_string(rx_.id), "ResponseWindowExpired", 0);
        throw TimeoutError("no tag response within " +
                           std::to_string(options_.timing.response_window_slots) +
                           " slots of t=" + std::to_string(sent) + " s");
    }

    void drain() { pump(std::numeric_limits<double>::infinity()); }

    double now() const { return now_; }
    int downlink_commands() const { return downlink_commands_; }
    const TagState& tag() const { return tag_; }
    std::vector<TranscriptRecord>& transcript() { return transcript_; }

  private:
    bool lost() {
        if (options_.loss_probability <= 0.0) {
            return false;
        }
        return std::bernoulli_distribution(options_.loss_probability)(loss_rng_);
    }

    void push(Delivery d) {
        d.seq = next_seq_++;
        queue_.push(d);
    }

    void record(double t, std::string actor, std::string kind, std::int64_t arg,
                std::optional<double> rssi = std::nullopt) {
        transcript_.push_back({t, std::move(actor), std::move(kind), arg, rssi});
    }

    void pump(double until) {
        while (!queue_.empty() && queue_.top().time <= until) {
            const Delivery d = queue_.top();
            queue_.pop();
            if (d.is_response) {
                deliver_to_rx(d);
            } else {
                deliver_to_tag(d);
            }
        }
    }

    void deliver_to_tag(const Delivery& d) {
        const TagStep step = tag_step(tag_, d.event, params_.excitation_channel);
        tag_ = step.state;
        if (!step.response) {
            return;
        }
        const double t = d.time + options_.timing.slot_s;
        const char* kind =
            step.response->kind == ResponseKind::ProbeReflection ? "ProbeReflection" : "ModulatedData";
        if (lost()) {
            record(t, "channel", std::string("Dropped") + kind, step.response->delta_index);
            return;
        }
        push({t, kTagSource, kResponseOrder, 0, true, {}, *step.response});
    }

    void deliver_to_rx(const Delivery& d) {
        TagConfig c = cfg_;
        c.phase_step = tap_phase(d.response.delta_index, cfg_.quantization_levels);
        const Complex h = backscatter_channel(tx_.position, rx_.position, c, params_);
        const CsiMeasurement csi = measure_csi(h, params_, noise_rng_);
        const char* kind =
            d.response.kind == ResponseKind::ProbeReflection ? "ProbeReflection" : "ModulatedData";
        record(d.time, "tag:" + std::to_string(tag_.tag_id), kind, d.response.delta_index,
               csi.rssi_dbm);
        arrivals_.push_back({d.time, d.response, csi});
    }

    AccessPoint tx_;
    AccessPoint rx_;
    TagState tag_;
    TagConfig cfg_;
    RadioParams params_;
    SessionOptions options_;
    std::mt19937_64 noise_rng_;
    std::mt19937_64 loss_rng_;
    std::priority_queue<Delivery, std::vector<Delivery>, DeliveryLater> queue_;
    std::vector<Arrival> arrivals_;
    std::vector<TranscriptRecord> transcript_;
    double now_ = 0.0;
    std::uint64_t next_seq_ = 0;
    int downlink_commands_ = 0;
};

} // namespace

SessionReport run_session(const AccessPoint& tx_ap, const AccessPoint& rx_ap, const TagState& tag,
                          const TagConfig& cfg, const RadioParams& params,
                          const SessionOptions& options) {
    cfg.validate();
    params.validate();
    if (tx_ap.id == rx_ap.id) {
        throw ConfigError("run_session: Tx and Rx must be distinct APs");
    }
    if (tag.mode != TagMode::Sleep) {
        throw ProtocolError("run_session: tag must be asleep at session start");
    }
    if (tag.levels != cfg.quantization_levels) {
        throw ConfigError("run_session: tag state and config disagree on the number of taps");
    }
    const int levels = cfg.quantization_levels;
    if (options.policy == SelectionPolicy::Ratio &&
        (cfg.num_antennas != 4 || levels % 2 != 0)) {
        throw ConfigError("run_session: ratio policy needs 4 antennas and an even tap count");
    }
    if (!(options.timing.slot_s > 0.0) || options.timing.response_window_slots < 1) {
        throw ConfigError("run_session: slot must be positive and the response window >= 1 slot");
    }

    SessionSim sim(tx_ap, rx_ap, tag, cfg, params, options);
    SessionReport report;
    std::map<int, CsiMeasurement> scanned;

    auto probe = [&](int index) -> const CsiMeasurement& {
        if (auto it = scanned.find(index); it != scanned.end()) {
            return it->second;
        }
        sim.transmit(EventKind::SetPhase, index, tx_ap, "tx_ap");
        sim.transmit(EventKind::CsiProbe, rx_ap.id, rx_ap, "rx_ap");
        const Arrival a = sim.await_response(ResponseKind::ProbeReflection);
        report.csi_log.emplace_back(index, a.csi);
        return scanned.emplace(index, a.csi).first->second;
    };

    sim.transmit(EventKind::WakePattern, tag.tag_id, tx_ap, "tx_ap");

    int best = 0;
    if (options.policy == SelectionPolicy::Exhaustive) {
        double best_mag = -1.0;
        for (int i = 0; i < levels; ++i) {
            const double mag = std::abs(probe(i).complex_gain);
            if (mag > best_mag) {
                best_mag = mag;
                best = i;
            }
        }
    } else {
        const CsiMeasurement& m1 = probe(0);
        const double s1 = std::abs(m1.complex_gain);
        const double floor = std::sqrt(m1.noise_variance);
        const double s2 = std::abs(probe(levels / 2).complex_gain);
        const AlphaEstimate est = estimate_alpha(
            s1, s2,
            [&](double delta) {
                return std::abs(probe(quantize_phase(delta, levels).index).complex_gain);
            },
            levels, floor, true);
        best = est.chosen_delta_quantized.index;
    }

    sim.transmit(EventKind::Freeze, best, tx_ap, "tx_ap");

    bool ok = true;
    double rssi_sum = 0.0;
    for (int p = 0; p < options.data_packets; ++p) {
        const std::int64_t payload = 0x5A00 + p;
        sim.transmit(EventKind::ExcitationPacket, payload, tx_ap, "tx_ap");
        const Arrival a = sim.await_response(ResponseKind::ModulatedData);
        ok = ok && a.response.payload == payload && a.csi.rssi_dbm >= params.sensitivity_dbm;
        rssi_sum += a.csi.rssi_dbm;
    }
    sim.transmit(EventKind::Timeout, 0, tx_ap, "tx_ap");
    sim.drain();

    report.selected_delta_index = best;
    report.num_downlink_commands = sim.downlink_commands();
    report.elapsed_time_s = sim.now();
    report.decoded_payload_ok = ok;
    report.data_rssi_dbm = options.data_packets > 0 ? rssi_sum / options.data_packets : 0.0;
    report.transcript = std::move(sim.transcript());
    report.final_tag = sim.tag();
    return report;
}

TapOptimum best_tap(const AccessPoint& tx_ap, const AccessPoint& rx_ap, const TagConfig& cfg,
                    const RadioParams& params, double rel_tol) {
    const int levels = cfg.quantization_levels;
    std::vector<double> mags(static_cast<std::size_t>(levels));
    for (int i = 0; i < levels; ++i) {
        TagConfig c = cfg;
        c.phase_step = tap_phase(i, levels);
        mags[static_cast<std::size_t>(i)] =
            std::abs(backscatter_channel(tx_ap.position, rx_ap.position, c, params));
    }
    TapOptimum opt;
    opt.index = static_cast<int>(std::max_element(mags.begin(), mags.end()) - mags.begin());
    const double top = mags[static_cast<std::size_t>(opt.index)];
    for (int i = 0; i < levels; ++i) {
        if (i != opt.index && mags[static_cast<std::size_t>(i)] >= top * (1.0 - rel_tol)) {
            opt.unique = false;
        }
    }
    return opt;
}

int session_slot_budget(int levels, int data_packets, const ProtocolTiming& timing) {
    // wake + 3 slots per scanned setting + freeze + 2 per data packet + sleep,
    // plus one expired response window.
    return 1 + 3 * std::max(levels, 4) + 1 + 2 * data_packets + 1 + timing.response_window_slots;
}

std::vector<PlannedSession> mesh_session_plan(const std::vector<AccessPoint>& aps,
                                              const std::vector<int>& tag_ids, int levels,
                                              const SessionOptions& options) {
    if (aps.size() < 2) {
        throw ConfigError("mesh_session_plan: need at least two APs for redirected links");
    }
    const double span =
        session_slot_budget(levels, options.data_packets, options.timing) * options.timing.slot_s;
    std::vector<PlannedSession> plan;
    for (const int tag : tag_ids) {
        for (const auto& tx : aps) {
            for (const auto& rx : aps) {
                if (tx.id == rx.id) {
                    continue;
                }
                plan.push_back({static_cast<double>(plan.size()) * span, tx.id, rx.id, tag});
            }
        }
    }
    return plan;
}

void write_transcript(std::ostream& out, const std::vector<TranscriptRecord>& transcript) {
    out << "time_s,actor,event_kind,arg,rssi_dbm\n";
    for (const auto& r : transcript) {
        out << std::fixed << std::setprecision(6) << r.time_s << ',' << r.actor << ','
            << r.event_kind << ',' << r.arg << ',';
        if (r.rssi_dbm) {
            out << std::setprecision(3) << *r.rssi_dbm;
        }
        out << '\n';
    }
    out << std::defaultfloat;
}

void write_lut_csv(std::ostream& out, const TagState& tag, const std::vector<std::string>& metadata) {
    for (const auto& line : metadata) {
        out << "# " << line << '\n';
    }
    out << "tx_ap,rx_ap,delta_index,delta_rad\n";
    for (const auto& [pair, index] : tag.lut) {
        out << pair.first << ',' << pair.second << ',' << index << ',' << std::setprecision(10)
            << tap_phase(index, tag.levels) << '\n';
    }
}

} // namespace beamsteer
