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

#include <stdexcept>
#include <string>

namespace beamsteer {

// Nonpositive distance, empty grid step and similar argument faults.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

// Tx or Rx on the array axis or behind the tag.
class GeometryError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Both ratio measurements vanished; nothing to estimate from.
class NoSignalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Sign-resolution probes fell to the noise floor. Callers should rescan.
class LowSnrError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ProtocolError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class TimeoutError : public ProtocolError {
  public:
    using ProtocolError::ProtocolError;
};

} // namespace beamsteer
