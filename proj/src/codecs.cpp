#include "scamhunt/codecs.hpp"

#include "scamhunt/hashing.hpp"

#include <algorithm>
#include <array>

namespace scamhunt::codec {

std::string base58_encode(std::span<const std::uint8_t> data, std::string_view alphabet) {
    std::size_t zeroes = 0;
    while (zeroes < data.size() && data[zeroes] == 0) ++zeroes;

    // log(256) / log(58), rounded up
    std::vector<std::uint8_t> b58((data.size() - zeroes) * 138 / 100 + 1);
    std::size_t length = 0;
    for (std::size_t i = zeroes; i < data.size(); ++i) {
        int carry = data[i];
        std::size_t j = 0;
        for (auto it = b58.rbegin(); (carry != 0 || j < length) && it != b58.rend(); ++it, ++j) {
            carry += 256 * (*it);
            *it = static_cast<std::uint8_t>(carry % 58);
            carry /= 58;
        }
        length = j;
    }
    auto it = b58.begin() + static_cast<std::ptrdiff_t>(b58.size() - length);
    while (it != b58.end() && *it == 0) ++it;

    std::string out(zeroes, alphabet[0]);
    for (; it != b58.end(); ++it) out += alphabet[*it];
    return out;
}

std::optional<Bytes> base58_decode(std::string_view text, std::string_view alphabet) {
    std::array<int, 256> index{};
    index.fill(-1);
    for (std::size_t i = 0; i < alphabet.size(); ++i) {
        index[static_cast<unsigned char>(alphabet[i])] = static_cast<int>(i);
    }

    std::size_t zeroes = 0;
    while (zeroes < text.size() && text[zeroes] == alphabet[0]) ++zeroes;

    // log(58) / log(256), rounded up
    std::vector<std::uint8_t> b256((text.size() - zeroes) * 733 / 1000 + 1);
    std::size_t length = 0;
    for (std::size_t i = zeroes; i < text.size(); ++i) {
        int carry = index[static_cast<unsigned char>(text[i])];
        if (carry < 0) return std::nullopt;
        std::size_t j = 0;
        for (auto it = b256.rbegin(); (carry != 0 || j < length) && it != b256.rend(); ++it, ++j) {
            carry += 58 * (*it);
            *it = static_cast<std::uint8_t>(carry % 256);
            carry /= 256;
        }
        length = j;
    }
    auto it = b256.begin() + static_cast<std::ptrdiff_t>(b256.size() - length);
    while (it != b256.end() && *it == 0) ++it;

    Bytes out(zeroes, 0);
    out.insert(out.end(), it, b256.end());
    return out;
}

std::string base58check_encode(std::span<const std::uint8_t> payload, std::string_view alphabet) {
    Bytes buf(payload.begin(), payload.end());
    const Digest256 check = double_sha256(payload);
    buf.insert(buf.end(), check.begin(), check.begin() + 4);
    return base58_encode(buf, alphabet);
}

std::optional<Bytes> base58check_decode(std::string_view text, std::string_view alphabet) {
    auto raw = base58_decode(text, alphabet);
    if (!raw || raw->size() < 4) return std::nullopt;
    const std::span<const std::uint8_t> payload(raw->data(), raw->size() - 4);
    const Digest256 check = double_sha256(payload);
    if (!std::equal(check.begin(), check.begin() + 4, raw->end() - 4)) return std::nullopt;
    raw->resize(raw->size() - 4);
    return raw;
}

namespace {

constexpr std::uint32_t kBech32Const = 1;
constexpr std::uint32_t kBech32mConst = 0x2bc830a3;

std::uint32_t polymod(std::span<const std::uint8_t> values) {
    std::uint32_t chk = 1;
    for (std::uint8_t v : values) {
        const std::uint8_t top = chk >> 25;
        chk = ((chk & 0x1ffffff) << 5) ^ v;
        if (top & 1) chk ^= 0x3b6a57b2;
        if (top & 2) chk ^= 0x26508e6d;
        if (top & 4) chk ^= 0x1ea119fa;
        if (top & 8) chk ^= 0x3d4233dd;
        if (top & 16) chk ^= 0x2a1462b3;
    }
    return chk;
}

Bytes hrp_expand(std::string_view hrp) {
    Bytes out;
    out.reserve(hrp.size() * 2 + 1);
    for (char c : hrp) out.push_back(static_cast<std::uint8_t>(c) >> 5);
    out.push_back(0);
    for (char c : hrp) out.push_back(static_cast<std::uint8_t>(c) & 31);
    return out;
}

char to_lower_ascii(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

}  // namespace

std::string bech32_encode(std::string_view hrp, std::span<const std::uint8_t> values,
                          Bech32Variant variant) {
    Bytes enc = hrp_expand(hrp);
    enc.insert(enc.end(), values.begin(), values.end());
    enc.insert(enc.end(), 6, 0);
    const std::uint32_t mod =
        polymod(enc) ^ (variant == Bech32Variant::Bech32 ? kBech32Const : kBech32mConst);

    std::string out(hrp);
    out += '1';
    for (std::uint8_t v : values) out += kBech32Charset[v];
    for (int i = 0; i < 6; ++i) out += kBech32Charset[(mod >> (5 * (5 - i))) & 31];
    return out;
}

std::optional<Bech32Decoded> bech32_decode(std::string_view text, std::size_t max_length) {
    if (text.size() > max_length) return std::nullopt;
    bool lower = false, upper = false;
    for (char c : text) {
        if (c < 33 || c > 126) return std::nullopt;
        if (c >= 'a' && c <= 'z') lower = true;
        if (c >= 'A' && c <= 'Z') upper = true;
    }
    if (lower && upper) return std::nullopt;

    const auto sep = text.rfind('1');
    if (sep == std::string_view::npos || sep == 0 || sep + 7 > text.size()) return std::nullopt;

    std::string hrp;
    for (char c : text.substr(0, sep)) hrp += to_lower_ascii(c);
    Bytes values;
    for (char c : text.substr(sep + 1)) {
        const auto pos = kBech32Charset.find(to_lower_ascii(c));
        if (pos == std::string_view::npos) return std::nullopt;
        values.push_back(static_cast<std::uint8_t>(pos));
    }

    Bytes check = hrp_expand(hrp);
    check.insert(check.end(), values.begin(), values.end());
    const std::uint32_t mod = polymod(check);
    Bech32Variant variant;
    if (mod == kBech32Const) {
        variant = Bech32Variant::Bech32;
    } else if (mod == kBech32mConst) {
        variant = Bech32Variant::Bech32m;
    } else {
        return std::nullopt;
    }
    values.resize(values.size() - 6);
    return Bech32Decoded{variant, std::move(hrp), std::move(values)};
}

std::optional<Bytes> convert_bits(std::span<const std::uint8_t> in, int from_bits, int to_bits,
                                  bool pad) {
    std::uint32_t acc = 0;
    int bits = 0;
    const std::uint32_t maxv = (1u << to_bits) - 1;
    Bytes out;
    for (std::uint8_t v : in) {
        if (v >> from_bits) return std::nullopt;
        acc = (acc << from_bits) | v;
        bits += from_bits;
        while (bits >= to_bits) {
            bits -= to_bits;
            out.push_back(static_cast<std::uint8_t>((acc >> bits) & maxv));
        }
    }
    if (pad) {
        if (bits) out.push_back(static_cast<std::uint8_t>((acc << (to_bits - bits)) & maxv));
    } else if (bits >= from_bits || ((acc << (to_bits - bits)) & maxv)) {
        return std::nullopt;
    }
    return out;
}

std::optional<WitnessProgram> segwit_decode(std::string_view hrp, std::string_view address) {
    auto dec = bech32_decode(address);
    if (!dec || dec->hrp != hrp || dec->data.empty()) return std::nullopt;
    const int version = dec->data[0];
    if (version > 16) return std::nullopt;
    auto program = convert_bits(std::span(dec->data).subspan(1), 5, 8, false);
    if (!program || program->size() < 2 || program->size() > 40) return std::nullopt;
    if (version == 0 && program->size() != 20 && program->size() != 32) return std::nullopt;
    if ((version == 0) != (dec->variant == Bech32Variant::Bech32)) return std::nullopt;
    return WitnessProgram{version, std::move(*program)};
}

std::string segwit_encode(std::string_view hrp, int version, std::span<const std::uint8_t> program) {
    Bytes values{static_cast<std::uint8_t>(version)};
    auto five = convert_bits(program, 8, 5, true);
    values.insert(values.end(), five->begin(), five->end());
    return bech32_encode(hrp, values, version == 0 ? Bech32Variant::Bech32 : Bech32Variant::Bech32m);
}

std::optional<std::string> eip55_checksum(std::string_view address) {
    if (address.size() != 42 || address[0] != '0' || (address[1] != 'x' && address[1] != 'X')) {
        return std::nullopt;
    }
    std::string lower;
    lower.reserve(40);
    for (char c : address.substr(2)) {
        const char l = to_lower_ascii(c);
        if (!((l >= '0' && l <= '9') || (l >= 'a' && l <= 'f'))) return std::nullopt;
        lower += l;
    }
    const Digest256 h = keccak256(lower);
    std::string out = "0x";
    for (std::size_t i = 0; i < lower.size(); ++i) {
        const std::uint8_t nibble = (i % 2 == 0) ? (h[i / 2] >> 4) : (h[i / 2] & 0x0f);
        const char c = lower[i];
        out += (c >= 'a' && nibble >= 8) ? static_cast<char>(c - 'a' + 'A') : c;
    }
    return out;
}

}  // namespace scamhunt::codec
