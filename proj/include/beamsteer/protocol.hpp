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

// AP <-> tag phase-selection protocol as a discrete-event simulation.
//
// Session sequence:
//   Tx AP  WakePattern(tag_id)           tag: Sleep -> Scanning
//   repeat per scanned setting:
//     Tx AP  SetPhase(i)
//     Rx AP  CsiProbe(rx_ap_id)          tag reflects at setting i on the shifted channel
//   Tx AP  Freeze(best)                  tag: LUT[(tx, rx)] = best, Scanning -> Backscattering
//   Tx AP  ExcitationPacket(payload)...  tag answers with modulated data
//   Tx AP  Timeout                       tag: -> Sleep
//
// Every transmission occupies one slot. A missing tag response is detected
// when the Rx AP's response window expires.

#include "beamsteer/array_model.hpp"
#include "beamsteer/channel.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace beamsteer {

enum class TagMode { Sleep, Scanning, Backscattering };

enum class EventKind { WakePattern, SetPhase, CsiProbe, Freeze, ExcitationPacket, Timeout };

std::string to_string(TagMode mode);
std::string to_string(EventKind kind);

struct Event {
    double time = 0.0;
    EventKind kind = EventKind::Timeout;
    // WakePattern: tag id; SetPhase / Freeze: delta index; CsiProbe: rx AP id;
    // ExcitationPacket: payload word; Timeout: unused.
    std::int64_t arg = 0;
    int source_ap = 0;
};

// Dispatch order: time, then source AP, then kind.
bool event_before(const Event& a, const Event& b);

using ApPair = std::pair<int, int>; // (tx_ap, rx_ap)

struct TagState {
    int tag_id = 0;
    int levels = 4;
    TagMode mode = TagMode::Sleep;
    int current_delta_index = 0;
    std::map<ApPair, int> lut;
    int active_tx = -1; // set on wake-up
    int active_rx = -1; // set by the first CSI probe

    friend bool operator==(const TagState&, const TagState&) = default;
};

enum class ResponseKind { ProbeReflection, ModulatedData };

struct TagResponse {
    ResponseKind kind = ResponseKind::ProbeReflection;
    int delta_index = 0;
    int channel = 0; // channel the reflection occupies
    std::int64_t payload = 0;
};

struct TagStep {
    TagState state;
    std::optional<TagResponse> response;
    bool ignored = false; // event had no effect in this mode
};

// Pure transition function. Throws ProtocolError for malformed events
// (negative or non-finite time, out-of-range delta index).
TagStep tag_step(const TagState& state, const Event& event, int excitation_channel = 1);

enum class SelectionPolicy { Exhaustive, Ratio };

std::string to_string(SelectionPolicy policy);
SelectionPolicy parse_policy(const std::string& name);

struct AccessPoint {
    int id = 0;
    NodePosition position; // relative to the tag
};

struct ProtocolTiming {
    double slot_s = 2e-3;
    int response_window_slots = 2;
};

struct SessionOptions {
    SelectionPolicy policy = SelectionPolicy::Exhaustive;
    ProtocolTiming timing;
    double loss_probability = 0.0; // per transmission
    int data_packets = 4;
    std::uint64_t seed = 1;
};

struct TranscriptRecord {
    double time_s = 0.0;
    std::string actor;
    std::string event_kind;
    std::int64_t arg = 0;
    std::optional<double> rssi_dbm;
};

struct SessionReport {
    int selected_delta_index = 0;
    int num_downlink_commands = 0; // SetPhase + Freeze
    std::vector<std::pair<int, CsiMeasurement>> csi_log;
    double elapsed_time_s = 0.0;
    bool decoded_payload_ok = false;
    double data_rssi_dbm = 0.0;
    std::vector<TranscriptRecord> transcript;
    TagState final_tag;
};

// Runs one complete session. `tag` carries the LUT from earlier sessions and
// must be asleep. The Ratio policy needs 4 antennas and an even number of
// taps (Delta = pi must be a tap). Throws TimeoutError when a response
// window expires and LowSnrError when the sign probes are lost in noise.
SessionReport run_session(const AccessPoint& tx_ap, const AccessPoint& rx_ap, const TagState& tag,
                          const TagConfig& cfg, const RadioParams& params,
                          const SessionOptions& options);

// Brute-force argmax of |backscatter_channel| over the K taps; ties go to
// the lower index. unique is false when another tap is within rel_tol.
struct TapOptimum {
    int index = 0;
    bool unique = true;
};
TapOptimum best_tap(const AccessPoint& tx_ap, const AccessPoint& rx_ap, const TagConfig& cfg,
                    const RadioParams& params, double rel_tol = 1e-9);

struct PlannedSession {
    double start_time_s = 0.0;
    int tx_ap = 0;
    int rx_ap = 0;
    int tag_id = 0;
};

// Worst-case slots one session may take.
int session_slot_budget(int levels, int data_packets, const ProtocolTiming& timing);

// Every ordered (tx, rx) pair for every tag, serialized back to back.
// Throws ConfigError with fewer than two APs.
std::vector<PlannedSession> mesh_session_plan(const std::vector<AccessPoint>& aps,
                                              const std::vector<int>& tag_ids, int levels,
                                              const SessionOptions& options);

void write_transcript(std::ostream& out, const std::vector<TranscriptRecord>& transcript);

void write_lut_csv(std::ostream& out, const TagState& tag, const std::vector<std::string>& metadata);

} // namespace beamsteer
