#pragma once

#include "test_support.hpp"

#include "scamhunt/chain.hpp"
#include "scamhunt/codecs.hpp"

#include <cctype>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace testing {

/// Oracle-generated valid addresses per chain (tests/oracle/make_address_vectors.py).
inline std::map<scamhunt::Chain, std::vector<std::string>> oracle_addresses() {
    std::map<scamhunt::Chain, std::vector<std::string>> out;
    for (const auto& row : read_tsv(fixture("oracle/valid_addresses.tsv"))) {
        out[*scamhunt::parse_chain(row[0])].push_back(row[1]);
    }
    return out;
}

inline bool is_mixed_case(const std::string& s) {
    bool upper = false, lower = false;
    for (char c : s.substr(2)) {
        upper = upper || std::isupper(static_cast<unsigned char>(c));
        lower = lower || std::islower(static_cast<unsigned char>(c));
    }
    return upper && lower;
}

/// Replaces one character after the fixed prefix with a different character
/// from the same alphabet.
inline std::string corrupt(const std::string& addr, scamhunt::Chain chain, std::mt19937_64& rng) {
    using scamhunt::Chain;
    std::string_view alphabet;
    std::size_t prefix = 0;
    static const std::string kHex = "0123456789abcdefABCDEF";
    if (chain == Chain::ETH || chain == Chain::BNB) {
        alphabet = kHex;
        prefix = 2;
    } else if (chain == Chain::ADA) {
        alphabet = scamhunt::codec::kBech32Charset;
        prefix = 5;
    } else if (chain == Chain::BTC && addr.starts_with("bc1")) {
        alphabet = scamhunt::codec::kBech32Charset;
        prefix = 3;
    } else if (chain == Chain::XRP) {
        alphabet = scamhunt::codec::kRippleBase58;
    } else {
        alphabet = scamhunt::codec::kBitcoinBase58;
    }
    std::string out = addr;
    const std::size_t pos = prefix + static_cast<std::size_t>(rng() % (addr.size() - prefix));
    char c;
    do {
        c = alphabet[static_cast<std::size_t>(rng() % alphabet.size())];
    } while (c == out[pos]);
    out[pos] = c;
    return out;
}

}  // namespace testing
