#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace scamhunt {

/// Blockchains whose native-coin giveaway addresses are tracked.
enum class Chain { BTC, ETH, BNB, ADA, XRP };

inline constexpr std::array<Chain, 5> kAllChains{Chain::BTC, Chain::ETH, Chain::BNB,
                                                 Chain::ADA, Chain::XRP};

constexpr std::string_view chain_name(Chain c) noexcept {
    switch (c) {
        case Chain::BTC: return "BTC";
        case Chain::ETH: return "ETH";
        case Chain::BNB: return "BNB";
        case Chain::ADA: return "ADA";
        case Chain::XRP: return "XRP";
    }
    return "?";
}

/// Number of base units per native coin, as a power of ten
/// (satoshi, wei, jager, lovelace, drop).
constexpr unsigned chain_decimals(Chain c) noexcept {
    switch (c) {
        case Chain::BTC: return 8;
        case Chain::ETH: return 18;
        case Chain::BNB: return 18;
        case Chain::ADA: return 6;
        case Chain::XRP: return 6;
    }
    return 0;
}

constexpr std::string_view chain_long_name(Chain c) noexcept {
    switch (c) {
        case Chain::BTC: return "Bitcoin";
        case Chain::ETH: return "Ethereum";
        case Chain::BNB: return "Binance";
        case Chain::ADA: return "Cardano";
        case Chain::XRP: return "Ripple";
    }
    return "?";
}

inline std::optional<Chain> parse_chain(std::string_view s) noexcept {
    for (Chain c : kAllChains) {
        if (chain_name(c) == s) return c;
    }
    return std::nullopt;
}

}  // namespace scamhunt
