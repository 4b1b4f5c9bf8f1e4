#include "scamhunt/codecs.hpp"
#include "scamhunt/extractor.hpp"

#include <algorithm>
#include <cctype>

namespace scamhunt::extractor {

namespace {

bool all_in(std::string_view s, std::string_view alphabet) {
    return std::all_of(s.begin(), s.end(), [&](char c) { return alphabet.find(c) != std::string_view::npos; });
}

bool is_hex(char c) { return std::isxdigit(static_cast<unsigned char>(c)) != 0; }

/// Bech32 body in one consistent case.
bool bech32_body(std::string_view s) {
    if (all_in(s, codec::kBech32Charset)) return true;
    std::string lower(s);
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    const bool upper = std::none_of(s.begin(), s.end(), [](char c) { return std::islower(static_cast<unsigned char>(c)); });
    return upper && all_in(lower, codec::kBech32Charset);
}

bool istarts_with(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
    }
    return true;
}

bool is_segwit_shape(std::string_view t) {
    return t.size() >= 14 && t.size() <= 74 && (t.starts_with("bc1") || t.starts_with("BC1")) &&
           bech32_body(t.substr(3));
}

bool is_legacy_btc_shape(std::string_view t) {
    return t.size() >= 26 && t.size() <= 35 && (t[0] == '1' || t[0] == '3') && all_in(t, codec::kBitcoinBase58);
}

bool is_ada_shape(std::string_view t) {
    return t.size() >= 55 && t.size() <= 113 && (t.starts_with("addr1") || t.starts_with("ADDR1")) &&
           bech32_body(t.substr(5));
}

bool is_xrp_shape(std::string_view t) {
    return t.size() >= 25 && t.size() <= 35 && t[0] == 'r' && all_in(t, codec::kRippleBase58);
}

bool token_byte(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool check_btc(std::string_view t) {
    if (istarts_with(t, "bc1")) return codec::segwit_decode("bc", t).has_value();
    auto payload = codec::base58check_decode(t, codec::kBitcoinBase58);
    return payload && payload->size() == 21 && ((*payload)[0] == 0x00 || (*payload)[0] == 0x05);
}

bool check_xrp(std::string_view t) {
    auto payload = codec::base58check_decode(t, codec::kRippleBase58);
    return payload && payload->size() == 21 && (*payload)[0] == 0x00;
}

bool check_ada(std::string_view t) {
    auto decoded = codec::bech32_decode(t, 1023);
    if (!decoded || decoded->hrp != "addr" || decoded->variant != codec::Bech32Variant::Bech32) return false;
    auto bytes = codec::convert_bits(decoded->data, 5, 8, false);
    // header byte: address type in the high nibble, network id 1 (mainnet) in the low nibble
    return bytes && bytes->size() >= 29 && ((*bytes)[0] & 0x0F) == 0x01;
}

}  // namespace

bool is_evm_shape(std::string_view t) {
    return t.size() == 42 && t[0] == '0' && t[1] == 'x' && std::all_of(t.begin() + 2, t.end(), is_hex);
}

bool matches_grammar(std::string_view token, Chain chain) {
    switch (chain) {
        case Chain::BTC: return is_legacy_btc_shape(token) || is_segwit_shape(token);
        case Chain::ETH:
        case Chain::BNB: return is_evm_shape(token);
        case Chain::ADA: return is_ada_shape(token);
        case Chain::XRP: return is_xrp_shape(token);
    }
    return false;
}

std::vector<AddressCandidate> scan_addresses(std::string_view body) {
    std::vector<AddressCandidate> out;
    std::unordered_set<std::string> seen;
    std::size_t pos = 0;
    while (pos < body.size()) {
        if (!token_byte(body[pos])) {
            ++pos;
            continue;
        }
        std::size_t end = pos;
        while (end < body.size() && token_byte(body[end])) ++end;
        const std::string_view token = body.substr(pos, end - pos);
        pos = end;
        if (token.size() < 25 || token.size() > 113) continue;
        for (Chain c : {Chain::BTC, Chain::ETH, Chain::ADA, Chain::XRP}) {
            if (matches_grammar(token, c)) {
                if (seen.insert(std::string(token)).second) out.push_back({c, std::string(token)});
                break;
            }
        }
    }
    return out;
}

ChainAddress validate_address(std::string_view candidate, Chain chain) {
    ChainAddress out{chain, std::string(candidate), false};
    if (!matches_grammar(candidate, chain)) return out;
    switch (chain) {
        case Chain::BTC: out.checksum_ok = check_btc(candidate); break;
        case Chain::XRP: out.checksum_ok = check_xrp(candidate); break;
        case Chain::ADA: out.checksum_ok = check_ada(candidate); break;
        case Chain::ETH:
        case Chain::BNB: {
            auto canonical = codec::eip55_checksum(candidate);
            if (!canonical) break;
            const auto hex = candidate.substr(2);
            const bool single_case =
                std::none_of(hex.begin(), hex.end(), [](char c) { return std::isupper(static_cast<unsigned char>(c)); }) ||
                std::none_of(hex.begin(), hex.end(), [](char c) { return std::islower(static_cast<unsigned char>(c)); });
            out.checksum_ok = single_case || candidate == *canonical;
            if (out.checksum_ok) out.text = *canonical;
            break;
        }
    }
    return out;
}

Chain disambiguate_evm(std::string_view page_body, const std::vector<std::string>& keywords) {
    std::string lower(page_body);
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    auto boundary = [&](std::size_t i) { return i >= lower.size() || !std::isalnum(static_cast<unsigned char>(lower[i])); };
    for (auto kw : keywords) {
        for (auto& c : kw) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (kw.empty()) continue;
        for (auto at = lower.find(kw); at != std::string::npos; at = lower.find(kw, at + 1)) {
            if ((at == 0 || boundary(at - 1)) && boundary(at + kw.size())) return Chain::BNB;
        }
    }
    return Chain::ETH;
}

std::vector<ChainAddress> extract_addresses(std::string_view page_body, const std::vector<std::string>& keywords) {
    std::vector<ChainAddress> out;
    std::optional<Chain> evm_chain;
    std::unordered_set<std::string> seen;
    for (const auto& cand : scan_addresses(page_body)) {
        Chain chain = cand.chain;
        if (is_evm_shape(cand.text)) {
            if (!evm_chain) evm_chain = disambiguate_evm(page_body, keywords);
            chain = *evm_chain;
        }
        auto addr = validate_address(cand.text, chain);
        if (seen.insert(addr.text).second) out.push_back(std::move(addr));
    }
    return out;
}

}  // namespace scamhunt::extractor
