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

#include "mcbf/backhaul/message.hpp"

#include <array>
#include <bit>
#include <cstring>

namespace mcbf::backhaul {

namespace {

std::array<uint32_t, 256> make_crc_table() {
    std::array<uint32_t, 256> table{};
    for (uint32_t i = 0; i < 256; ++i) {
        uint32_t c = i;
        for (int k = 0; k < 8; ++k)
            c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
        table[i] = c;
    }
    return table;
}

const std::array<uint32_t, 256>& crc_table() {
    static const std::array<uint32_t, 256> table = make_crc_table();
    return table;
}

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v & 0xFF));
    out.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::vector<uint8_t>& out, double v) {
    const uint64_t bits = std::bit_cast<uint64_t>(v);
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<uint8_t>((bits >> (8 * i)) & 0xFF));
}

uint16_t get_u16(const uint8_t* p) { return static_cast<uint16_t>(p[0] | (p[1] << 8)); }

uint32_t get_u32(const uint8_t* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

double get_f64(const uint8_t* p) {
    uint64_t bits = 0;
    for (int i = 7; i >= 0; --i)
        bits = (bits << 8) | p[i];
    return std::bit_cast<double>(bits);
}

} // namespace

uint32_t crc32(const uint8_t* data, size_t len) {
    uint32_t c = 0xFFFFFFFFu;
    for (size_t i = 0; i < len; ++i)
        c = crc_table()[(c ^ data[i]) & 0xFFu] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

std::vector<uint8_t> encode_frame(const IciMessage& msg) {
    const uint32_t veclen = static_cast<uint32_t>(msg.payload.size());
    std::vector<uint8_t> out;
    out.reserve(frame_bytes(veclen));
    put_u32(out, static_cast<uint32_t>(frame_bytes(veclen) - 4)); // body length
    const size_t body_start = out.size();
    out.push_back(msg.version);
    put_u32(out, msg.q);
    put_u16(out, msg.sender);
    put_u32(out, veclen);
    for (double v : msg.payload)
        put_f64(out, v);
    const uint32_t crc = crc32(out.data() + body_start, out.size() - body_start);
    put_u32(out, crc);
    return out;
}

IciMessage decode_frame(const uint8_t* body, size_t len) {
    if (len < 11 + 4)
        throw CorruptMessageError("backhaul: truncated frame");
    const uint32_t stored_crc = get_u32(body + len - 4);
    if (crc32(body, len - 4) != stored_crc)
        throw CorruptMessageError("backhaul: checksum mismatch");
    IciMessage msg;
    msg.version = body[0];
    if (msg.version != kProtocolVersion)
        throw ProtocolError("backhaul: unsupported protocol version");
    msg.q = get_u32(body + 1);
    msg.sender = get_u16(body + 5);
    const uint32_t veclen = get_u32(body + 7);
    if (len != 11 + 8 * static_cast<size_t>(veclen) + 4)
        throw CorruptMessageError("backhaul: frame length mismatch");
    msg.payload.resize(veclen);
    for (uint32_t i = 0; i < veclen; ++i)
        msg.payload[i] = get_f64(body + 11 + 8 * i);
    return msg;
}

} // namespace mcbf::backhaul
