#include "doctest.h"
#include "address_vectors.hpp"
#include "fake_transport.hpp"

#include "scamhunt/errors.hpp"
#include "scamhunt/extractor.hpp"

using namespace scamhunt;
using namespace scamhunt::extractor;

namespace {

std::vector<std::string> normalized(const std::vector<UrlCandidate>& v) {
    std::vector<std::string> out;
    for (const auto& c : v) out.push_back(c.normalized);
    return out;
}

const net::Sleeper kNoSleep = [](std::chrono::milliseconds) {};

}  // namespace

TEST_CASE("extract_urls: bare and scheme-qualified") {
    CHECK(normalized(extract_urls("giveaway hosted on www.buterinofficial.com today")) ==
          std::vector<std::string>{"https://www.buterinofficial.com"});
    CHECK(normalized(extract_urls("see https://merge-ethx2.info now")) ==
          std::vector<std::string>{"https://merge-ethx2.info"});
    CHECK(extract_urls("no links here").empty());
}

TEST_CASE("extract_urls: normalization, order and duplicates") {
    const auto urls = extract_urls(
        "Go to WWW.ETH-Event.COM/Claim?id=7, or eth-event.com! Also http://x2.btc-gift.net/. and "
        "https://www.eth-event.com/Claim?id=7",
        "L9");
    CHECK(normalized(urls) == std::vector<std::string>{"https://www.eth-event.com/Claim?id=7",
                                                       "https://eth-event.com", "http://x2.btc-gift.net"});
    CHECK(urls[0].raw == "WWW.ETH-Event.COM/Claim?id=7");
    CHECK(urls[0].source_list_id == "L9");
}

TEST_CASE("extract_urls: things that are not domains") {
    CHECK(extract_urls("send 0.5 eth to win 2.0x").empty());
    CHECK(extract_urls("mail admin@giveaway.com").empty());
    CHECK(extract_urls("version v1.2.3 and file.txt").empty());
    CHECK(extract_urls("co.uk alone is a public suffix").empty());
    CHECK(normalized(extract_urls("shop.example.co.uk")) == std::vector<std::string>{"https://shop.example.co.uk"});
    CHECK(extract_urls("https://localhost:8080/x").empty());
}

TEST_CASE("public suffix rules: wildcard and exception") {
    const auto psl = PublicSuffixList::parse("// comment\ncom\nuk\nco.uk\n*.ck\n!www.ck\n");
    CHECK(psl.public_suffix("a.b.com") == "com");
    CHECK(psl.public_suffix("x.co.uk") == "co.uk");
    CHECK(psl.public_suffix("foo.ck") == "foo.ck");
    CHECK(psl.public_suffix("bar.foo.ck") == "foo.ck");
    CHECK(psl.public_suffix("www.ck") == "ck");
    CHECK_FALSE(psl.public_suffix("example.zz"));
    CHECK(psl.is_registrable_host("www.ck"));
    CHECK_FALSE(psl.is_registrable_host("foo.ck"));
    CHECK(psl.is_registrable_host("bar.foo.ck"));
    CHECK(PublicSuffixList::builtin().size() > 5000);
}

TEST_CASE("extract_urls is stable under surrounding non-URL text") {
    const std::string core = "claim at merge-ethx2.info and https://btc-x2.live/go";
    const auto base = normalized(extract_urls(core));
    for (const char* pre : {"", "hello ", "🚀🚀 ", "50000 ETH! "}) {
        for (const char* post : {"", " today", " !!", " 🎁 x2"}) {
            CHECK(normalized(extract_urls(std::string(pre) + core + post)) == base);
        }
    }
}

TEST_CASE("fetch_page over fixtures") {
    FixtureTransport fixtures(testing::fixture("pages"));
    PageFetcher fetcher(fixtures, {}, kNoSleep);

    const auto page = fetcher.fetch("https://merge-ethx2.info");
    CHECK(page.ok());
    CHECK(page.status == 200);
    CHECK(page.body.find("0xc4BE4a14d4E61b2DA5dd7eE64cbA8E85766dFD3d") != std::string::npos);
    CHECK(format_rfc3339(page.fetched_at) == "2022-12-26T10:00:00Z");

    const auto dead = fetcher.fetch("https://dead-giveaway.example.com");
    CHECK(dead.failure == FetchFailure::Connect);
    CHECK(dead.status == 0);
    CHECK(fetcher.fetch("https://slow-giveaway.net").failure == FetchFailure::Timeout);

    const auto loop = fetcher.fetch("https://loop.test/0");
    CHECK(loop.failure == FetchFailure::RedirectLoop);
    CHECK(loop.redirect_chain.size() == 6);

    const auto hops = fetcher.fetch("https://hops.test/0");
    CHECK(hops.ok());
    CHECK(hops.final_url == "https://hops.test/5");
    CHECK(hops.redirect_chain.size() == 6);

    const auto gone = fetcher.fetch("https://gone.test");
    CHECK(gone.ok());
    CHECK(gone.status == 404);

    CHECK(fetcher.fetch("https://unknown.test").failure == FetchFailure::MissingFixture);
}

TEST_CASE("fetch_all keeps input order and continues past failures") {
    FixtureTransport fixtures(testing::fixture("pages"));
    PageFetcher fetcher(fixtures, {5, std::chrono::milliseconds(1), 4}, kNoSleep);
    const std::vector<std::string> urls = {"https://dead-giveaway.example.com", "https://merge-ethx2.info",
                                           "https://hops.test/0", "https://unknown.test", "https://gone.test"};
    const auto pages = fetcher.fetch_all(urls);
    REQUIRE(pages.size() == urls.size());
    for (std::size_t i = 0; i < urls.size(); ++i) CHECK(pages[i].url == urls[i]);
    CHECK(pages[1].status == 200);
}

TEST_CASE("per-host politeness spaces requests to the same host") {
    testing::FakeTransport http;
    http.on("https://a.test/1", 200, "one");
    http.on("https://a.test/2", 200, "two");
    http.on("https://b.test/1", 200, "three");
    std::vector<long long> waits;
    PageFetcher fetcher(http, {}, [&](std::chrono::milliseconds d) { waits.push_back(d.count()); });
    fetcher.fetch("https://a.test/1");
    fetcher.fetch("https://b.test/1");
    fetcher.fetch("https://a.test/2");
    REQUIRE(waits.size() == 1);
    CHECK(waits[0] > 900);
    CHECK(waits[0] <= 1000);
}

TEST_CASE("recording transport writes a store that replays identically") {
    testing::TempDir tmp;
    testing::FakeTransport http;
    http.on("https://rec.test/", 200, "<p>0xc4BE4a14d4E61b2DA5dd7eE64cbA8E85766dFD3d</p>");
    http.on("https://rec.test/r", 302, "", {{"location", "https://rec.test/"}});
    http.fail("https://down.test", net::TransportFailure::Dns);
    RecordingTransport recorder(http, tmp / "store");
    PageFetcher live(recorder, {}, kNoSleep);
    const auto a = live.fetch("https://rec.test/r");
    const auto dead = live.fetch("https://down.test");
    CHECK(dead.failure == FetchFailure::Dns);

    FixtureTransport replay(tmp / "store");
    PageFetcher offline(replay, {}, kNoSleep);
    const auto b = offline.fetch("https://rec.test/r");
    CHECK(b.body == a.body);
    CHECK(b.final_url == a.final_url);
    CHECK(b.redirect_chain == a.redirect_chain);
    CHECK(offline.fetch("https://down.test").failure == FetchFailure::Dns);
}

TEST_CASE("scan_addresses") {
    const auto btc = scan_addresses("pay to 13i79MkvCijL6MqjHL1ojyqmDREKHiYdbk now");
    REQUIRE(btc.size() == 1);
    CHECK(btc[0].chain == Chain::BTC);
    const auto evm = scan_addresses("<b>0xc4BE4a14d4E61b2DA5dd7eE64cbA8E85766dFD3d</b>");
    REQUIRE(evm.size() == 1);
    CHECK(evm[0].chain == Chain::ETH);
    CHECK(scan_addresses("hello world").empty());

    // tx hashes are longer than addresses and must not match
    CHECK(scan_addresses("0x154a98e68828721ba1f0ca70ee2787d0ebb98ebf2926a30cb77cb25017ac8e80").empty());
}

TEST_CASE("grammars never match inside a longer token") {
    for (const auto& [chain, addrs] : testing::oracle_addresses()) {
        for (std::size_t i = 0; i < addrs.size(); i += 50) {
            const auto& a = addrs[i];
            CHECK(scan_addresses(" " + a + " ").size() == 1);
            CHECK(scan_addresses("x" + a).empty());
            for (const auto& c : scan_addresses(a + "9")) CHECK(c.text == a + "9");
            CHECK(scan_addresses("_" + a).empty());
            CHECK(scan_addresses(a + "_q").empty());
        }
    }
}

TEST_CASE("validate_address on the case-study addresses") {
    for (const auto& row : testing::read_tsv(testing::fixture("oracle/case_study_addresses.tsv"))) {
        const auto chain = *parse_chain(row[0]);
        const auto v = validate_address(row[1], chain);
        CHECK(v.checksum_ok == (row[2] == "1"));
        CHECK(v.text == row[1]);
    }
}

TEST_CASE("oracle addresses validate and single-character corruptions fail") {
    std::mt19937_64 rng(2024);
    for (const auto& [chain, addrs] : testing::oracle_addresses()) {
        std::vector<std::string> checksummed;
        for (const auto& a : addrs) {
            const auto scanned = scan_addresses("addr: " + a + "\n");
            REQUIRE(scanned.size() == 1);
            CHECK(validate_address(a, chain).checksum_ok);
            if ((chain == Chain::ETH || chain == Chain::BNB) && !testing::is_mixed_case(a)) continue;
            checksummed.push_back(a);
        }
        REQUIRE_FALSE(checksummed.empty());
        std::size_t rejected = 0;
        const std::size_t tried = 1000;
        for (std::size_t i = 0; i < tried; ++i) {
            const auto bad = testing::corrupt(checksummed[i % checksummed.size()], chain, rng);
            if (!validate_address(bad, chain).checksum_ok) ++rejected;
        }
        INFO(chain_name(chain));
        CHECK(rejected * 1000 >= tried * 999);
    }
}

TEST_CASE("validate_address only changes EVM letter case") {
    const auto lower = validate_address("0xc4be4a14d4e61b2da5dd7ee64cba8e85766dfd3d", Chain::ETH);
    CHECK(lower.checksum_ok);
    CHECK(lower.text == "0xc4BE4a14d4E61b2DA5dd7eE64cbA8E85766dFD3d");
    const auto upper = validate_address("0xC4BE4A14D4E61B2DA5DD7EE64CBA8E85766DFD3D", Chain::BNB);
    CHECK(upper.checksum_ok);
    CHECK(upper.chain == Chain::BNB);
    const auto bad = validate_address("0xC4be4a14d4E61b2DA5dd7eE64cbA8E85766dFD3d", Chain::ETH);
    CHECK_FALSE(bad.checksum_ok);
    CHECK(bad.text == "0xC4be4a14d4E61b2DA5dd7eE64cbA8E85766dFD3d");
    CHECK_FALSE(validate_address("hello", Chain::BTC).checksum_ok);
    CHECK_FALSE(validate_address("13i79MkvCijL6MqjHL1ojyqmDREKHiYdbk", Chain::XRP).checksum_ok);
}

TEST_CASE("disambiguate_evm") {
    CHECK(disambiguate_evm("Join the BNB giveaway") == Chain::BNB);
    CHECK(disambiguate_evm("Ethereum only") == Chain::ETH);
    CHECK(disambiguate_evm("Ethereum and BNB") == Chain::BNB);
    CHECK(disambiguate_evm("Send Binance Coin now") == Chain::BNB);
    CHECK(disambiguate_evm("on the bsc network") == Chain::BNB);
    CHECK(disambiguate_evm("bnbx2.com promo") == Chain::ETH);
    CHECK(disambiguate_evm("eth", {"eth"}) == Chain::BNB);
}

TEST_CASE("extract_addresses on the giveaway page fixture") {
    FixtureTransport fixtures(testing::fixture("pages"));
    PageFetcher fetcher(fixtures, {}, kNoSleep);
    const auto page = fetcher.fetch("https://merge-ethx2.info");
    const auto addrs = extract_addresses(page.body);
    REQUIRE(addrs.size() == 2);
    CHECK(addrs[0] == ChainAddress{Chain::ETH, "0xc4BE4a14d4E61b2DA5dd7eE64cbA8E85766dFD3d", true});
    CHECK(addrs[1] == ChainAddress{Chain::BTC, "13i79MkvCijL6MqjHL1ojyqmDREKHiYdbk", true});

    const auto bnb = extract_addresses(fetcher.fetch("https://hops.test/0").body);
    REQUIRE(bnb.size() == 1);
    CHECK(bnb[0].chain == Chain::BNB);
    CHECK(bnb[0].checksum_ok);
}
