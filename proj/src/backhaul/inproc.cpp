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

#include <condition_variable>
#include <deque>
#include <mutex>

#include "mcbf/backhaul/transport.hpp"

namespace mcbf::backhaul {

void GatherBuffer::deposit_frame(const uint8_t* body, size_t len) {
    deposit(decode_frame(body, len));
}

void GatherBuffer::deposit(IciMessage msg) {
    auto& round = rounds_[msg.q];
    if (round.count(msg.sender))
        throw ProtocolError("backhaul: duplicate message for (sender " +
                            std::to_string(msg.sender) + ", round " + std::to_string(msg.q) +
                            ")");
    round.emplace(msg.sender, std::move(msg));
}

bool GatherBuffer::complete(uint32_t q, int expected) const {
    auto it = rounds_.find(q);
    return it != rounds_.end() && static_cast<int>(it->second.size()) >= expected;
}

std::vector<IciMessage> GatherBuffer::take(uint32_t q, int expected) {
    auto it = rounds_.find(q);
    if (it == rounds_.end() || static_cast<int>(it->second.size()) != expected)
        throw ProtocolError("backhaul: taking an incomplete round");
    std::vector<IciMessage> out;
    out.reserve(static_cast<size_t>(expected));
    for (auto& [sender, msg] : it->second)
        out.push_back(std::move(msg)); // std::map iterates in ascending sender order
    rounds_.erase(it);
    return out;
}

std::vector<int> GatherBuffer::missing(uint32_t q, int expected) const {
    std::vector<int> out;
    auto it = rounds_.find(q);
    for (int s = 0; s < expected; ++s)
        if (it == rounds_.end() || !it->second.count(static_cast<uint16_t>(s)))
            out.push_back(s);
    return out;
}

namespace {

// mutex/condvar mailbox switch; every broadcast goes through the same wire
// encoding as the TCP transport
class InprocHub final : public Hub {
  public:
    explicit InprocHub(int n_agents) : mailboxes_(static_cast<size_t>(n_agents)) {}

    std::unique_ptr<Transport> connect(uint16_t sender) override;

    void broadcast_frame(std::vector<uint8_t> frame) {
        std::lock_guard<std::mutex> lock(mu_);
        // account once per broadcast (the paper counts exchanged scalars, not
        // per-recipient copies)
        const IciMessage probe = decode_frame(frame.data() + 4, frame.size() - 4);
        auto& st = stats_[probe.q];
        st.messages += 1;
        st.bytes += frame.size();
        st.scalars += probe.payload.size();
        for (auto& mb : mailboxes_)
            mb.push_back(frame);
        cv_.notify_all();
    }

    template <typename Pred> bool wait_mail(std::chrono::milliseconds timeout, Pred&& ready) {
        std::unique_lock<std::mutex> lock(mu_);
        return cv_.wait_for(lock, timeout, std::forward<Pred>(ready));
    }

    std::deque<std::vector<uint8_t>>& mailbox(int id) { return mailboxes_[static_cast<size_t>(id)]; }
    std::mutex& mutex() { return mu_; }
    std::condition_variable& cv() { return cv_; }

    RoundStats round_stats(uint32_t q) const override {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = stats_.find(q);
        return it == stats_.end() ? RoundStats{} : it->second;
    }

  private:
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::vector<std::deque<std::vector<uint8_t>>> mailboxes_;
    std::map<uint32_t, RoundStats> stats_;
};

class InprocTransport final : public Transport {
  public:
    InprocTransport(InprocHub& hub, uint16_t sender) : hub_(hub), sender_(sender) {}

    void broadcast(const IciMessage& msg) override {
        IciMessage m = msg;
        m.sender = sender_;
        hub_.broadcast_frame(encode_frame(m));
    }

    std::vector<IciMessage> gather(uint32_t q, int expected,
                                   std::chrono::milliseconds timeout) override {
        const auto deadline = std::chrono::steady_clock::now() + timeout;
        while (true) {
            {
                std::unique_lock<std::mutex> lock(hub_.mutex());
                auto& mb = hub_.mailbox(sender_);
                while (!mb.empty()) {
                    std::vector<uint8_t> frame = std::move(mb.front());
                    mb.pop_front();
                    lock.unlock(); // decode outside the switch lock
                    buffer_.deposit_frame(frame.data() + 4, frame.size() - 4);
                    lock.lock();
                }
                if (buffer_.complete(q, expected))
                    return buffer_.take(q, expected);
                if (std::chrono::steady_clock::now() >= deadline)
                    break;
                hub_.cv().wait_until(lock, deadline);
            }
        }
        throw TimeoutError("backhaul: round " + std::to_string(q) + " timed out",
                           buffer_.missing(q, expected));
    }

    int sender_id() const override { return sender_; }

  private:
    InprocHub& hub_;
    uint16_t sender_;
    GatherBuffer buffer_;
};

std::unique_ptr<Transport> InprocHub::connect(uint16_t sender) {
    if (sender >= mailboxes_.size())
        throw std::invalid_argument("backhaul: sender id out of range");
    return std::make_unique<InprocTransport>(*this, sender);
}

} // namespace

std::unique_ptr<Hub> make_inproc_hub(int n_agents) {
    if (n_agents < 1)
        throw std::invalid_argument("backhaul: need at least one agent");
    return std::make_unique<InprocHub>(n_agents);
}

} // namespace mcbf::backhaul
