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

#ifndef MCBF_BACKHAUL_MESSAGE_HPP
#define MCBF_BACKHAUL_MESSAGE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcbf::backhaul {

inline constexpr uint8_t kProtocolVersion = 1;

/// One per-round broadcast of a BS's local ICI vector.
///
/// Wire format, little-endian, length-prefixed for TCP framing:
///   u32 frame length (bytes after this field)
///   u8  protocol version
///   u32 iteration q
///   u16 sender BS id
///   u32 vector length
///   f64 payload[vector length]
///   u32 CRC32 over version..payload
/// 15 header bytes (including the length prefix) + 8 per scalar + 4.
struct IciMessage {
    uint8_t version = kProtocolVersion;
    uint32_t q = 0;
    uint16_t sender = 0;
    std::vector<double> payload;
};

inline constexpr size_t kFrameHeaderBytes = 15; // includes the length prefix
inline size_t frame_bytes(size_t veclen) { return kFrameHeaderBytes + 8 * veclen + 4; }

uint32_t crc32(const uint8_t* data, size_t len);

// Full frame including the length prefix.
std::vector<uint8_t> encode_frame(const IciMessage& msg);
// body: the frame after the length prefix (length = frame length field).
IciMessage decode_frame(const uint8_t* body, size_t len);

struct CorruptMessageError : std::runtime_error {
    explicit CorruptMessageError(const std::string& what) : std::runtime_error(what) {}
};
struct ProtocolError : std::runtime_error {
    explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};
struct TimeoutError : std::runtime_error {
    TimeoutError(const std::string& what, std::vector<int> missing_senders)
        : std::runtime_error(what), missing(std::move(missing_senders)) {}
    std::vector<int> missing;
};

} // namespace mcbf::backhaul

#endif
