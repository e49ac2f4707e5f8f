// mcbf - worst-case robust multi-cell coordinated beamforming
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

#ifndef MCBF_BACKHAUL_TRANSPORT_HPP
#define MCBF_BACKHAUL_TRANSPORT_HPP

#include <chrono>
#include <map>
#include <memory>

#include "mcbf/backhaul/message.hpp"

namespace mcbf::backhaul {

struct RoundStats {
    uint64_t messages = 0;
    uint64_t bytes = 0;   // on-wire frame bytes, counted once per broadcast
    uint64_t scalars = 0; // payload doubles, counted once per broadcast
};

/// Per-agent endpoint. broadcast is non-blocking; gather blocks until all
/// expected senders' round-q messages arrived (the caller's own broadcast is
/// looped back) or the timeout expires. Messages are returned sorted by
/// sender id; out-of-round messages are buffered for later gathers.
class Transport {
  public:
    virtual ~Transport() = default;
    virtual void broadcast(const IciMessage& msg) = 0;
    virtual std::vector<IciMessage> gather(uint32_t q, int expected,
                                           std::chrono::milliseconds timeout) = 0;
    virtual int sender_id() const = 0;
};

/// Message switch shared by all agents of a session; serializes per-round
/// delivery and accounts for the exchanged bytes.
class Hub {
  public:
    virtual ~Hub() = default;
    virtual std::unique_ptr<Transport> connect(uint16_t sender) = 0;
    virtual RoundStats round_stats(uint32_t q) const = 0;
};

std::unique_ptr<Hub> make_inproc_hub(int n_agents);

// TCP hub listening on 127.0.0.1:port (port 0 picks a free port; see
// tcp_port()). Agents connect over one long-lived socket each; the hub
// rebroadcasts every validated frame to all agents including the sender.
class TcpHub : public Hub {
  public:
    virtual uint16_t tcp_port() const = 0;
};
std::unique_ptr<TcpHub> make_tcp_hub(int n_agents, uint16_t port = 0);

// Buffers decoded messages by round and hands out complete rounds; shared by
// both transport implementations.
class GatherBuffer {
  public:
    void deposit_frame(const uint8_t* body, size_t len);
    void deposit(IciMessage msg); // throws ProtocolError on duplicate (sender, q)
    bool complete(uint32_t q, int expected) const;
    std::vector<IciMessage> take(uint32_t q, int expected);
    std::vector<int> missing(uint32_t q, int expected) const;

  private:
    std::map<uint32_t, std::map<uint16_t, IciMessage>> rounds_;
};

} // namespace mcbf::backhaul

#endif
