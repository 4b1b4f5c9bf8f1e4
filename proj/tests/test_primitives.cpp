#include "doctest.h"
#include "test_support.hpp"

#include "scamhunt/codecs.hpp"
#include "scamhunt/decimal.hpp"
#include "scamhunt/errors.hpp"
#include "scamhunt/hashing.hpp"
#include "scamhunt/timeutil.hpp"

#include <random>

using namespace scamhunt;

TEST_CASE("rfc3339 parsing normalizes to UTC") {
    auto t = parse_rfc3339("2022-02-27T00:43:00Z");
    REQUIRE(t);
    CHECK(format_rfc3339(*t) == "2022-02-27T00:43:00Z");

    auto offset = parse_rfc3339("2022-02-27T02:43:00.123+02:00");
    REQUIRE(offset);
    CHECK(*offset == *t);

    auto neg = parse_rfc3339("2022-02-26T23:43:00-01:00");
    REQUIRE(neg);
    CHECK(*neg == *t);

    CHECK(parse_rfc3339("2022-02-27 00:43:00") == t);
    CHECK_FALSE(parse_rfc3339("2022-02-30T00:00:00Z"));
    CHECK_FALSE(parse_rfc3339("yesterday"));
    CHECK_FALSE(parse_rfc3339("2022-02-27T00:43:00Zjunk"));
    CHECK(format_date(*t) == "2022-02-27");
}

TEST_CASE("dates") {
    auto d = parse_date("2022-12-24");
    REQUIRE(d);
    CHECK(format_date(*d) == "2022-12-24");
    CHECK_FALSE(parse_date("2022-13-01"));
    CHECK_FALSE(parse_date("2022-1-01"));
}

TEST_CASE("decimal arithmetic is exact") {
    CHECK(Decimal::from_string("130") * Decimal::from_string("1200") == Decimal::from_string("156000"));
    CHECK((Decimal::from_string("0.1") + Decimal::from_string("0.2")).to_string() == "0.3");
    CHECK(Decimal::from_string("1.50").to_string() == "1.5");
    CHECK(Decimal::from_string("-0.000001").to_string() == "-0.000001");
    CHECK(Decimal::from_string("156000").to_fixed(2) == "156000.00");
    CHECK(Decimal::from_string("413.05").rounded(1).to_string() == "413.1");
    CHECK(Decimal::from_string("-413.05").rounded(1).to_string() == "-413.1");
    CHECK(Decimal::from_string("0.04").rounded(1).to_fixed(1) == "0.0");
    CHECK(Decimal::from_string("85200").shifted(-3).to_string() == "85.2");
    CHECK(Decimal::from_string("2.5").shifted(2).to_string() == "250");
    CHECK(Decimal::from_string("1.0") < Decimal::from_string("1.01"));
    CHECK(Decimal::from_string("2") == Decimal::from_string("2.000"));

    CHECK_FALSE(Decimal::parse(""));
    CHECK_FALSE(Decimal::parse("1."));
    CHECK_FALSE(Decimal::parse(".5"));
    CHECK_FALSE(Decimal::parse("1e5"));
    CHECK_FALSE(Decimal::parse("+1"));
    CHECK_THROWS_AS(Decimal::from_string("abc"), PreconditionError);
}

TEST_CASE("base unit conversion") {
    auto wei = Decimal::from_base_units("130000000000000000000", 18);
    REQUIRE(wei);
    CHECK(wei->to_string() == "130");
    auto sat = Decimal::from_base_units("539958000", 8);
    CHECK(sat->to_string() == "5.39958");
    CHECK_FALSE(Decimal::from_string("0.123").to_base_units(2));
    CHECK(*Decimal::from_string("0.12").to_base_units(6) == 120000);
}

TEST_CASE("unit conversion round-trips native -> base -> native for 10^6 amounts") {
    std::mt19937_64 rng(42);
    const unsigned decimals[] = {8, 18, 6};
    for (int i = 0; i < 1'000'000; ++i) {
        const unsigned dec = decimals[i % 3];
        BigInt units = rng();
        if (i % 7 == 0) units = units * rng() + rng();  // beyond 2^64
        const Decimal native = Decimal::from_base_units(units, dec);
        const auto back = native.to_base_units(dec);
        REQUIRE(back);
        REQUIRE(*back == units);
    }
}

TEST_CASE("keccak256 matches frozen reference vectors") {
    const auto rows = testing::read_tsv(testing::fixture("oracle/keccak256.tsv"));
    REQUIRE(rows.size() >= 26);
    for (const auto& row : rows) {
        std::vector<std::uint8_t> msg;
        if (row[0] != "-") {
            for (std::size_t i = 0; i < row[0].size(); i += 2) {
                msg.push_back(static_cast<std::uint8_t>(std::stoi(row[0].substr(i, 2), nullptr, 16)));
            }
        }
        CHECK(to_hex(keccak256(msg)) == row[1]);
    }
}

TEST_CASE("sha256 known answer") {
    CHECK(to_hex(sha256(std::string_view("abc"))) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("base58 round trip over random payloads") {
    std::mt19937 rng(7);
    for (auto alphabet : {codec::kBitcoinBase58, codec::kRippleBase58}) {
        for (int i = 0; i < 500; ++i) {
            codec::Bytes data(rng() % 40);
            for (auto& b : data) b = static_cast<std::uint8_t>(rng() % (i % 3 == 0 ? 2 : 256));
            const auto text = codec::base58_encode(data, alphabet);
            const auto back = codec::base58_decode(text, alphabet);
            REQUIRE(back);
            CHECK(*back == data);
        }
    }
    CHECK_FALSE(codec::base58_decode("0OIl"));
}

TEST_CASE("base58check of the all-zero payload is the burn address") {
    const codec::Bytes zero(21, 0);
    CHECK(codec::base58check_encode(zero) == "1111111111111111111114oLvT2");
    auto back = codec::base58check_decode("1111111111111111111114oLvT2");
    REQUIRE(back);
    CHECK(*back == zero);
    CHECK_FALSE(codec::base58check_decode("1111111111111111111114oLvT3"));
}

TEST_CASE("bech32 and bech32m reference vectors") {
    auto v0 = codec::segwit_decode("bc", "BC1QW508D6QEJXTDG4Y5R3ZARVARY0C5XW7KV8F3T4");
    REQUIRE(v0);
    CHECK(v0->version == 0);
    CHECK(to_hex(v0->program) == "751e76e8199196d454941c45d1b3a323f1433bd6");
    CHECK(codec::segwit_encode("bc", 0, v0->program) == "bc1qw508d6qejxtdg4y5r3zarvary0c5xw7kv8f3t4");

    auto v1 = codec::segwit_decode("bc", "bc1p0xlxvlhemja6c4dqv22uapctqupfhlxm9h8z3k2e72q4k9hcz7vqzk5jj0");
    REQUIRE(v1);
    CHECK(v1->version == 1);

    // witness v1 with a Bech32 (not Bech32m) checksum
    CHECK_FALSE(codec::segwit_decode("bc", "bc1p0xlxvlhemja6c4dqv22uapctqupfhlxm9h8z3k2e72q4k9hcz7vqh2y7hd"));
    // mixed case
    CHECK_FALSE(codec::bech32_decode("bc1qW508d6qejxtdg4y5r3zarvary0c5xw7kv8f3t4"));
    // wrong hrp
    CHECK_FALSE(codec::segwit_decode("tb", "bc1qw508d6qejxtdg4y5r3zarvary0c5xw7kv8f3t4"));
}

TEST_CASE("eip55 canonical form") {
    CHECK(codec::eip55_checksum("0xc4be4a14d4e61b2da5dd7ee64cba8e85766dfd3d") ==
          "0xc4BE4a14d4E61b2DA5dd7eE64cbA8E85766dFD3d");
    CHECK_FALSE(codec::eip55_checksum("0x123"));
    CHECK_FALSE(codec::eip55_checksum("0xzz4be4a14d4e61b2da5dd7ee64cba8e85766dfd3"));
}
