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

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cstring>
#include <mutex>
#include <thread>

#include "mcbf/backhaul/transport.hpp"

namespace mcbf::backhaul {

namespace {

uint32_t header_u32(const uint8_t* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

bool read_exact(int fd, uint8_t* buf, size_t n, int timeout_ms) {
    size_t got = 0;
    while (got < n) {
        pollfd p{fd, POLLIN, 0};
        const int pr = ::poll(&p, 1, timeout_ms);
        if (pr <= 0)
            return false;
        const ssize_t r = ::recv(fd, buf + got, n - got, 0);
        if (r <= 0)
            return false;
        got += static_cast<size_t>(r);
    }
    return true;
}

bool write_all(int fd, const uint8_t* buf, size_t n) {
    size_t sent = 0;
    while (sent < n) {
        const ssize_t w = ::send(fd, buf + sent, n - sent, MSG_NOSIGNAL);
        if (w <= 0)
            return false;
        sent += static_cast<size_t>(w);
    }
    return true;
}

class TcpHubImpl final : public TcpHub {
  public:
    TcpHubImpl(int n_agents, uint16_t port) : n_agents_(n_agents) {
        listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
        if (listen_fd_ < 0)
            throw std::runtime_error("backhaul: cannot create hub socket");
        const int one = 1;
        ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
        addr.sin_port = htons(port);
        if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0 ||
            ::listen(listen_fd_, n_agents) < 0) {
            ::close(listen_fd_);
            throw std::runtime_error("backhaul: cannot bind/listen on hub port");
        }
        socklen_t alen = sizeof(addr);
        ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &alen);
        port_ = ntohs(addr.sin_port);
        conn_fds_.assign(static_cast<size_t>(n_agents), -1);
        accept_thread_ = std::thread([this] { accept_loop(); });
    }

    ~TcpHubImpl() override {
        stop_.store(true);
        ::shutdown(listen_fd_, SHUT_RDWR);
        ::close(listen_fd_);
        {
            std::lock_guard<std::mutex> lock(conn_mu_);
            for (int fd : conn_fds_)
                if (fd >= 0)
                    ::shutdown(fd, SHUT_RDWR);
        }
        if (accept_thread_.joinable())
            accept_thread_.join();
        for (auto& t : reader_threads_)
            if (t.joinable())
                t.join();
        for (int fd : conn_fds_)
            if (fd >= 0)
                ::close(fd);
    }

    uint16_t tcp_port() const override { return port_; }

    std::unique_ptr<Transport> connect(uint16_t sender) override;

    RoundStats round_stats(uint32_t q) const override {
        std::lock_guard<std::mutex> lock(stats_mu_);
        auto it = stats_.find(q);
        return it == stats_.end() ? RoundStats{} : it->second;
    }

  private:
    void accept_loop() {
        int accepted = 0;
        while (!stop_.load() && accepted < n_agents_) {
            const int fd = ::accept(listen_fd_, nullptr, nullptr);
            if (fd < 0)
                break;
            const int one = 1;
            ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
            uint8_t hello[2];
            if (!read_exact(fd, hello, 2, 10000)) {
                ::close(fd);
                continue;
            }
            const uint16_t sender = static_cast<uint16_t>(hello[0] | (hello[1] << 8));
            if (sender >= conn_fds_.size()) {
                ::close(fd);
                continue;
            }
            {
                std::lock_guard<std::mutex> lock(conn_mu_);
                conn_fds_[sender] = fd;
            }
            reader_threads_.emplace_back([this, fd] { reader_loop(fd); });
            ++accepted;
        }
    }

    void reader_loop(int fd) {
        std::vector<uint8_t> rx;
        while (!stop_.load()) {
            pollfd p{fd, POLLIN, 0};
            if (::poll(&p, 1, 100) <= 0)
                continue;
            uint8_t chunk[4096];
            const ssize_t r = ::recv(fd, chunk, sizeof(chunk), 0);
            if (r <= 0)
                return;
            rx.insert(rx.end(), chunk, chunk + r);
            while (rx.size() >= 4) {
                const uint32_t body_len = header_u32(rx.data());
                if (body_len < 15 || body_len > (1u << 26))
                    return; // protocol violation: drop the connection
                if (rx.size() < 4 + static_cast<size_t>(body_len))
                    break;
                // account from the header fields; agents authoritatively
                // verify the checksum on decode
                const uint32_t q = header_u32(rx.data() + 5);
                const uint32_t veclen = header_u32(rx.data() + 11);
                {
                    std::lock_guard<std::mutex> lock(stats_mu_);
                    auto& st = stats_[q];
                    st.messages += 1;
                    st.bytes += 4 + body_len;
                    st.scalars += veclen;
                }
                {
                    std::lock_guard<std::mutex> lock(conn_mu_);
                    for (int out : conn_fds_)
                        if (out >= 0)
                            write_all(out, rx.data(), 4 + body_len);
                }
                rx.erase(rx.begin(), rx.begin() + 4 + body_len);
            }
        }
    }

    int n_agents_;
    int listen_fd_ = -1;
    uint16_t port_ = 0;
    std::atomic<bool> stop_{false};
    std::thread accept_thread_;
    std::vector<std::thread> reader_threads_;
    std::vector<int> conn_fds_;
    mutable std::mutex conn_mu_;
    mutable std::mutex stats_mu_;
    std::map<uint32_t, RoundStats> stats_;
};

class TcpTransport final : public Transport {
  public:
    TcpTransport(uint16_t port, uint16_t sender) : sender_(sender) {
        fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd_ < 0)
            throw std::runtime_error("backhaul: cannot create agent socket");
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
        addr.sin_port = htons(port);
        int rc = -1;
        for (int attempt = 0; attempt < 50 && rc < 0; ++attempt) {
            rc = ::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr));
            if (rc < 0)
                std::this_thread::sleep_for(std::chrono::milliseconds(20));
        }
        if (rc < 0) {
            ::close(fd_);
            throw std::runtime_error("backhaul: cannot reach the hub");
        }
        const int one = 1;
        ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
        const uint8_t hello[2] = {static_cast<uint8_t>(sender & 0xFF),
                                  static_cast<uint8_t>(sender >> 8)};
        if (!write_all(fd_, hello, 2))
            throw std::runtime_error("backhaul: hello failed");
    }

    ~TcpTransport() override {
        if (fd_ >= 0)
            ::close(fd_);
    }

    void broadcast(const IciMessage& msg) override {
        IciMessage m = msg;
        m.sender = sender_;
        const std::vector<uint8_t> frame = encode_frame(m);
        if (!write_all(fd_, frame.data(), frame.size()))
            throw std::runtime_error("backhaul: broadcast failed");
    }

    std::vector<IciMessage> gather(uint32_t q, int expected,
                                   std::chrono::milliseconds timeout) override {
        const auto deadline = std::chrono::steady_clock::now() + timeout;
        while (true) {
            while (rx_.size() >= 4) {
                const uint32_t body_len = header_u32(rx_.data());
                if (body_len < 15 || body_len > (1u << 26))
                    throw ProtocolError("backhaul: invalid frame length");
                if (rx_.size() < 4 + static_cast<size_t>(body_len))
                    break;
                buffer_.deposit_frame(rx_.data() + 4, body_len);
                rx_.erase(rx_.begin(), rx_.begin() + 4 + body_len);
            }
            if (buffer_.complete(q, expected))
                return buffer_.take(q, expected);
            const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                deadline - std::chrono::steady_clock::now());
            if (left.count() <= 0)
                throw TimeoutError("backhaul: round " + std::to_string(q) + " timed out",
                                   buffer_.missing(q, expected));
            pollfd p{fd_, POLLIN, 0};
            if (::poll(&p, 1, static_cast<int>(std::min<long long>(left.count(), 100))) <= 0)
                continue;
            uint8_t chunk[4096];
            const ssize_t r = ::recv(fd_, chunk, sizeof(chunk), 0);
            if (r <= 0)
                throw ProtocolError("backhaul: connection closed");
            rx_.insert(rx_.end(), chunk, chunk + r);
        }
    }

    int sender_id() const override { return sender_; }

  private:
    int fd_ = -1;
    uint16_t sender_;
    GatherBuffer buffer_;
    std::vector<uint8_t> rx_;
};

std::unique_ptr<Transport> TcpHubImpl::connect(uint16_t sender) {
    if (static_cast<int>(sender) >= n_agents_)
        throw std::invalid_argument("backhaul: sender id out of range");
    return std::make_unique<TcpTransport>(port_, sender);
}

} // namespace

std::unique_ptr<TcpHub> make_tcp_hub(int n_agents, uint16_t port) {
    if (n_agents < 1)
        throw std::invalid_argument("backhaul: need at least one agent");
    return std::make_unique<TcpHubImpl>(n_agents, port);
}

} // namespace mcbf::backhaul
