#include "scamhunt/hashing.hpp"

#include "scamhunt/errors.hpp"

#include <openssl/evp.h>

#include <memory>

namespace scamhunt {

Digest256 sha256(std::span<const std::uint8_t> data) {
    Digest256 out{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != out.size()) {
        throw Error("EVP_Digest(sha256) failed");
    }
    return out;
}

Digest256 sha256(std::string_view data) {
    return sha256(std::span(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

Digest256 double_sha256(std::span<const std::uint8_t> data) {
    const Digest256 first = sha256(data);
    return sha256(first);
}

namespace {

constexpr std::array<std::uint64_t, 24> kRoundConstants{
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL, 0x8000000080008000ULL,
    0x000000000000808bULL, 0x0000000080000001ULL, 0x8000000080008081ULL, 0x8000000000008009ULL,
    0x000000000000008aULL, 0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL, 0x8000000000008003ULL,
    0x8000000000008002ULL, 0x8000000000000080ULL, 0x000000000000800aULL, 0x800000008000000aULL,
    0x8000000080008081ULL, 0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL};

constexpr std::array<int, 24> kRotations{1,  3,  6,  10, 15, 21, 28, 36, 45, 55, 2,  14,
                                         27, 41, 56, 8,  25, 43, 62, 18, 39, 61, 20, 44};
constexpr std::array<int, 24> kPiLanes{10, 7,  11, 17, 18, 3, 5,  16, 8,  21, 24, 4,
                                       15, 23, 19, 13, 12, 2, 20, 14, 22, 9,  6,  1};

constexpr std::uint64_t rotl(std::uint64_t x, int n) { return (x << n) | (x >> (64 - n)); }

void keccak_f1600(std::array<std::uint64_t, 25>& st) {
    for (std::uint64_t rc : kRoundConstants) {
        std::uint64_t bc[5];
        for (int i = 0; i < 5; ++i) bc[i] = st[i] ^ st[i + 5] ^ st[i + 10] ^ st[i + 15] ^ st[i + 20];
        for (int i = 0; i < 5; ++i) {
            const std::uint64_t t = bc[(i + 4) % 5] ^ rotl(bc[(i + 1) % 5], 1);
            for (int j = 0; j < 25; j += 5) st[j + i] ^= t;
        }
        std::uint64_t t = st[1];
        for (int i = 0; i < 24; ++i) {
            const int j = kPiLanes[i];
            const std::uint64_t tmp = st[j];
            st[j] = rotl(t, kRotations[i]);
            t = tmp;
        }
        for (int j = 0; j < 25; j += 5) {
            for (int i = 0; i < 5; ++i) bc[i] = st[j + i];
            for (int i = 0; i < 5; ++i) st[j + i] ^= (~bc[(i + 1) % 5]) & bc[(i + 2) % 5];
        }
        st[0] ^= rc;
    }
}

}  // namespace

Digest256 keccak256(std::span<const std::uint8_t> data) {
    constexpr std::size_t kRate = 136;
    std::array<std::uint64_t, 25> st{};
    auto absorb_block = [&st](const std::uint8_t* block) {
        for (std::size_t i = 0; i < kRate / 8; ++i) {
            std::uint64_t lane = 0;
            for (int b = 7; b >= 0; --b) lane = (lane << 8) | block[i * 8 + b];
            st[i] ^= lane;
        }
        keccak_f1600(st);
    };

    std::size_t offset = 0;
    while (data.size() - offset >= kRate) {
        absorb_block(data.data() + offset);
        offset += kRate;
    }
    std::array<std::uint8_t, kRate> last{};
    const std::size_t rem = data.size() - offset;
    for (std::size_t i = 0; i < rem; ++i) last[i] = data[offset + i];
    last[rem] ^= 0x01;
    last[kRate - 1] ^= 0x80;
    absorb_block(last.data());

    Digest256 out{};
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>(st[i / 8] >> (8 * (i % 8)));
    }
    return out;
}

Digest256 keccak256(std::string_view data) {
    return keccak256(std::span(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out += kHex[b >> 4];
        out += kHex[b & 0x0f];
    }
    return out;
}

}  // namespace scamhunt
