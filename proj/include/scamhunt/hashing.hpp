#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace scamhunt {

using Digest256 = std::array<std::uint8_t, 32>;

Digest256 sha256(std::span<const std::uint8_t> data);
Digest256 sha256(std::string_view data);
Digest256 double_sha256(std::span<const std::uint8_t> data);

/// Original Keccak-256 (pad byte 0x01), as used by Ethereum; not FIPS SHA3-256.
Digest256 keccak256(std::span<const std::uint8_t> data);
Digest256 keccak256(std::string_view data);

std::string to_hex(std::span<const std::uint8_t> bytes);

}  // namespace scamhunt
