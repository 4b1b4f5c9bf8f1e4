#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scamhunt::codec {

using Bytes = std::vector<std::uint8_t>;

/// All alphanumerics except 0, I, O, l.
inline constexpr std::string_view kBitcoinBase58 =
    "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";
/// Same character set, permuted so that 'r' encodes zero.
inline constexpr std::string_view kRippleBase58 =
    "rpshnaf39wBUDNEGHJKLM4PQRST7VWXYZ2bcdeCg65jkm8oFqi1tuvAxyz";

inline constexpr std::string_view kBech32Charset = "qpzry9x8gf2tvdw0s3jn54khce6mua7l";

std::string base58_encode(std::span<const std::uint8_t> data,
                          std::string_view alphabet = kBitcoinBase58);
std::optional<Bytes> base58_decode(std::string_view text,
                                   std::string_view alphabet = kBitcoinBase58);

/// Appends the first four bytes of double-SHA-256(payload) and encodes.
std::string base58check_encode(std::span<const std::uint8_t> payload,
                               std::string_view alphabet = kBitcoinBase58);
/// Returns the payload (version byte included, checksum stripped) iff the
/// trailing four bytes match.
std::optional<Bytes> base58check_decode(std::string_view text,
                                        std::string_view alphabet = kBitcoinBase58);

enum class Bech32Variant { Bech32, Bech32m };

struct Bech32Decoded {
    Bech32Variant variant;
    std::string hrp;
    Bytes data;  // 5-bit groups, checksum removed
};

/// BIP-173 / BIP-350 encoding of 5-bit groups.
std::string bech32_encode(std::string_view hrp, std::span<const std::uint8_t> values,
                          Bech32Variant variant);

/// Decodes and verifies the checksum. Rejects mixed case. `max_length` is
/// 90 for segwit; Cardano addresses exceed it, so callers may raise it.
std::optional<Bech32Decoded> bech32_decode(std::string_view text, std::size_t max_length = 90);

/// Regroups bits, e.g. 8→5 for encoding and 5→8 for decoding.
std::optional<Bytes> convert_bits(std::span<const std::uint8_t> in, int from_bits, int to_bits,
                                  bool pad);

struct WitnessProgram {
    int version;
    Bytes program;
};

/// Full BIP-173/BIP-350 segwit address check for the given human-readable part.
std::optional<WitnessProgram> segwit_decode(std::string_view hrp, std::string_view address);
std::string segwit_encode(std::string_view hrp, int version, std::span<const std::uint8_t> program);

/// EIP-55 mixed-case form of a 0x-prefixed 40-hex-digit address
/// (input case is ignored). Returns nullopt if the shape is wrong.
std::optional<std::string> eip55_checksum(std::string_view address);

}  // namespace scamhunt::codec
