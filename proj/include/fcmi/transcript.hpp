/*
 * Copyright 2026 the fcmi authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FCMI_TRANSCRIPT_HPP
#define FCMI_TRANSCRIPT_HPP

#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fcmi/errors.hpp"

namespace fcmi {

// Message log for the simulated protocol. Payload bodies live in a keyed
// vault: the transcript itself only carries opaque handles, so an observer
// without the channel key (the modeled eavesdropper) sees metadata and sizes
// but no content. Recovering a data block therefore requires both the
// key-channel payload (beta, eta, sigma) and the client-channel payload
// (the encrypted polynomial), mirroring the two-intercept argument.

struct TranscriptEvent {
  char phase = 'a';  // protocol phase a..d (or CMM round digit)
  std::string sender;
  std::string receiver;
  std::size_t symbols = 0;
  double sim_time = 0.0;
  std::string label;
  std::uint64_t payload_handle = 0;  // 0: no payload stored
};

class Transcript {
 public:
  std::vector<TranscriptEvent> events;
  std::set<std::size_t> straggler_set;
  double decode_time = 0.0;

  std::uint64_t store_payload(std::uint64_t key, nlohmann::json payload) {
    const std::uint64_t handle = next_handle_++;
    vault_[handle] = {key, std::move(payload)};
    return handle;
  }

  /// Content access needs the channel key; anything else is redacted.
  nlohmann::json view_payload(std::uint64_t handle, std::uint64_t key) const {
    auto it = vault_.find(handle);
    if (it == vault_.end()) throw ProtocolError("transcript: unknown payload handle");
    if (it->second.first != key) return "[redacted]";
    return it->second.second;
  }

  void add(TranscriptEvent ev) { events.push_back(std::move(ev)); }

  std::string to_jsonl() const {
    std::ostringstream out;
    for (const auto& ev : events) {
      nlohmann::json j{{"phase", std::string(1, ev.phase)}, {"from", ev.sender},
                       {"to", ev.receiver},  {"symbols", ev.symbols},
                       {"time", ev.sim_time}, {"label", ev.label}};
      if (ev.payload_handle) j["payload"] = ev.payload_handle;
      out << j.dump() << '\n';
    }
    return out.str();
  }

 private:
  std::uint64_t next_handle_ = 1;
  std::map<std::uint64_t, std::pair<std::uint64_t, nlohmann::json>> vault_;
};

/// An abstract secure channel standing in for the public-key layer. Delivery
/// records land in the transcript; the key gates payload visibility.
class SecureChannel {
 public:
  SecureChannel(Transcript* log, std::uint64_t key, std::string name)
      : log_(log), key_(key), name_(std::move(name)) {}

  std::uint64_t key() const { return key_; }
  const std::string& name() const { return name_; }

  /// Delivers one payload to several receivers, logging one event each.
  std::vector<std::uint64_t> broadcast(char phase, const std::string& sender,
                                       const std::vector<std::string>& receivers,
                                       const std::string& label, std::size_t symbols,
                                       nlohmann::json payload, double sim_time) {
    std::vector<std::uint64_t> handles;
    const std::uint64_t handle = log_->store_payload(key_, std::move(payload));
    for (const auto& r : receivers) {
      log_->add({phase, sender, r, symbols, sim_time, label, handle});
      handles.push_back(handle);
    }
    return handles;
  }

 private:
  Transcript* log_;
  std::uint64_t key_;
  std::string name_;
};

}  // namespace fcmi

#endif  // FCMI_TRANSCRIPT_HPP
