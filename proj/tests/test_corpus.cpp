#include "doctest.h"
#include "fake_transport.hpp"
#include "test_support.hpp"

#include "scamhunt/corpus.hpp"
#include "scamhunt/errors.hpp"

#include <random>

using namespace scamhunt;
using namespace scamhunt::corpus;

namespace {

const net::Sleeper kNoSleep = [](std::chrono::milliseconds) {};

std::vector<std::string> ids_of(const std::vector<ListRecord>& rs) {
    std::vector<std::string> out;
    for (const auto& r : rs) out.push_back(r.list_id);
    return out;
}

}  // namespace

TEST_CASE("parse_list_record: giveaway list with two members") {
    const auto r = parse_list_record(
        R"({"list_id":"L1","title":"50000 ETH","description":"giveaway at www.buterinofficial.com","creator_id":"U9","created_at":"2022-02-27T00:43:00Z","member_ids":["a","b"],"follower_count":0})");
    CHECK(r.list_id == "L1");
    CHECK(r.title == "50000 ETH");
    CHECK(r.description == "giveaway at www.buterinofficial.com");
    CHECK(r.creator_id == "U9");
    CHECK(format_rfc3339(r.created_at) == "2022-02-27T00:43:00Z");
    CHECK(r.member_ids.size() == 2);
    CHECK(r.follower_count == 0);
}

TEST_CASE("parse_list_record: empty texts are accepted") {
    const auto r = parse_list_record(
        R"({"list_id":"L2","title":"","description":"","creator_id":"U1","created_at":"2022-01-01T00:00:00Z","member_ids":[],"follower_count":0})");
    CHECK(r.title.empty());
    CHECK(r.description.empty());
    CHECK(r.member_ids.empty());
}

TEST_CASE("parse_list_record: errors") {
    CHECK_THROWS_AS(parse_list_record("{not json", 7), ParseError);
    try {
        parse_list_record("{not json", 7);
    } catch (const ParseError& e) {
        CHECK(e.line() == 7);
        CHECK(std::string(e.what()).find("line 7") != std::string::npos);
    }
    for (const char* key : {"list_id", "title", "created_at"}) {
        nlohmann::json j = {{"list_id", "L"}, {"title", "t"}, {"created_at", "2022-01-01T00:00:00Z"}};
        j.erase(key);
        try {
            parse_list_record(j.dump(), 3);
            FAIL("expected SchemaError");
        } catch (const SchemaError& e) {
            CHECK(e.key() == key);
            CHECK(std::string(e.what()).find(key) != std::string::npos);
        }
    }
    CHECK_THROWS_AS(parse_list_record(R"({"list_id":"","title":"t","created_at":"2022-01-01T00:00:00Z"})"),
                    SchemaError);
    CHECK_THROWS_AS(parse_list_record(R"({"list_id":"x","title":"t","created_at":"2005-12-31T23:59:59Z"})"),
                    SchemaError);
    CHECK_THROWS_AS(parse_list_record(R"({"list_id":"x","title":"t","created_at":"soon"})"), SchemaError);
    CHECK_THROWS_AS(
        parse_list_record(R"({"list_id":"x","title":"t","created_at":"2022-01-01T00:00:00Z","follower_count":-1})"),
        SchemaError);
}

TEST_CASE("parse_list_record: defaults, unknown keys, member dedup, timezone normalization") {
    const auto r = parse_list_record(
        R"({"list_id":12345,"title":"t","created_at":"2022-02-27T02:43:00+02:00","member_ids":["a","b","a"],"extra":{"x":1}})");
    CHECK(r.list_id == "12345");
    CHECK(r.follower_count == 0);
    CHECK(r.member_ids == std::vector<std::string>{"a", "b"});
    CHECK(serialize_list_record(r).find("\"created_at\":\"2022-02-27T00:43:00Z\"") != std::string::npos);
}

TEST_CASE("member lists are capped with an overflow flag") {
    nlohmann::json j = {{"list_id", "big"}, {"title", "t"}, {"created_at", "2022-01-01T00:00:00Z"}};
    auto members = nlohmann::json::array();
    for (std::size_t i = 0; i < kMaxMembers + 5; ++i) members.push_back("m" + std::to_string(i));
    j["member_ids"] = members;
    const auto r = list_record_from_json(j);
    CHECK(r.member_ids.size() == kMaxMembers);
    CHECK(r.member_overflow);
    CHECK(parse_list_record(serialize_list_record(r)) == r);
}

TEST_CASE("round trip: serialize then parse yields an equal record") {
    std::mt19937 rng(99);
    const std::vector<std::string> texts = {"50000 ETH", "", "🚀 BTC x2 🚀", "quote \" and \\ slash", "日本語のリスト",
                                            "line\nbreak", "tab\tchar"};
    for (int i = 0; i < 300; ++i) {
        ListRecord r;
        r.list_id = "L" + std::to_string(rng());
        r.title = texts[rng() % texts.size()];
        r.description = texts[rng() % texts.size()];
        r.creator_id = "U" + std::to_string(rng() % 50);
        r.created_at = Timestamp(std::chrono::seconds(1136073600LL + rng() % 600000000));
        const auto n = rng() % 6;
        for (unsigned k = 0; k < n; ++k) r.member_ids.push_back("m" + std::to_string(k * 7 + rng() % 7));
        std::sort(r.member_ids.begin(), r.member_ids.end());
        r.member_ids.erase(std::unique(r.member_ids.begin(), r.member_ids.end()), r.member_ids.end());
        r.follower_count = rng() % 1000;
        REQUIRE(parse_list_record(serialize_list_record(r)) == r);
    }
}

TEST_CASE("collect_lists: fixture with three records is exhausted in one call") {
    testing::TempDir tmp;
    ReplayListSource source(testing::fixture("corpus/three"));
    CorpusStore store(tmp / "corpus.jsonl");
    const auto res = collect_lists(source, store, {}, 10, {}, kNoSleep);
    CHECK(res.records.size() == 3);
    CHECK(res.exhausted);
    CHECK(res.cursor.fetched_count == 3);
    CHECK_FALSE(res.error);

    // cursor at end: resuming yields nothing
    const auto again = collect_lists(source, store, res.cursor, 10, {}, kNoSleep);
    CHECK(again.records.empty());
    CHECK(again.exhausted);
    CHECK(store.size() == 3);
}

TEST_CASE("collect_lists: limit two twice gives records 1-2 then 3-4") {
    testing::TempDir tmp;
    ReplayListSource source(testing::fixture("corpus/five"));
    CorpusStore store(tmp / "corpus.jsonl");
    const auto first = collect_lists(source, store, {}, 2, {}, kNoSleep);
    const auto second = collect_lists(source, store, first.cursor, 2, {}, kNoSleep);
    CHECK(ids_of(first.records) == std::vector<std::string>{"L1", "L2"});
    CHECK(ids_of(second.records) == std::vector<std::string>{"L3", "L4"});
    CHECK(second.cursor.fetched_count == 4);
}

TEST_CASE("resumability: collect(k) then collect(n-k) equals collect(n) for every split") {
    const std::size_t n = 5;
    testing::TempDir whole_dir;
    ReplayListSource source(testing::fixture("corpus/five"));
    CorpusStore whole_store(whole_dir / "c.jsonl");
    const auto whole = collect_lists(source, whole_store, {}, n, {}, kNoSleep);
    for (std::size_t k = 1; k < n; ++k) {
        testing::TempDir tmp;
        CorpusStore store(tmp / "c.jsonl");
        auto a = collect_lists(source, store, {}, k, {}, kNoSleep);
        auto b = collect_lists(source, store, a.cursor, n - k, {}, kNoSleep);
        auto joined = a.records;
        joined.insert(joined.end(), b.records.begin(), b.records.end());
        CHECK(joined == whole.records);
        CHECK(b.cursor == whole.cursor);
        CHECK(testing::slurp(tmp / "c.jsonl") == testing::slurp(whole_dir / "c.jsonl"));
    }
}

TEST_CASE("collect_lists: duplicate id is stored once but counted as fetched twice") {
    testing::TempDir tmp;
    ReplayListSource source(testing::fixture("corpus/dup"));
    CorpusStore store(tmp / "corpus.jsonl");
    const auto res = collect_lists(source, store, {}, 10, {}, kNoSleep);
    CHECK(res.cursor.fetched_count == 3);
    CHECK(res.stored == 2);
    CHECK(store.size() == 2);
    const auto loaded = load_corpus(tmp / "corpus.jsonl");
    CHECK(ids_of(loaded) == std::vector<std::string>{"L1", "L2"});
}

TEST_CASE("corpus store reopens with its id index intact") {
    testing::TempDir tmp;
    {
        CorpusStore store(tmp / "c.jsonl");
        ReplayListSource source(testing::fixture("corpus/three"));
        collect_lists(source, store, {}, 10, {}, kNoSleep);
    }
    CorpusStore reopened(tmp / "c.jsonl");
    CHECK(reopened.size() == 3);
    CHECK(reopened.contains("L2"));
    ListRecord r = load_corpus(tmp / "c.jsonl")[0];
    CHECK_FALSE(reopened.append(r));
}

namespace {

/// Throttles the first `throttles` calls, then fails permanently after `ok_calls` successes.
class ScriptedSource : public ListSource {
public:
    ScriptedSource(int throttles, int ok_calls) : throttles_(throttles), ok_calls_(ok_calls) {}
    SourcePage fetch(const std::string& position, std::size_t max) override {
        ++calls;
        if (throttles_ > 0) {
            --throttles_;
            throw net::RateLimited(std::chrono::seconds(2));
        }
        if (ok_calls_-- <= 0) throw net::PermanentError("HTTP 403");
        const std::size_t start = position.empty() ? 0 : std::stoul(position);
        SourcePage page;
        for (std::size_t i = start; i < start + std::min<std::size_t>(max, 2); ++i) {
            ListRecord r;
            r.list_id = "S" + std::to_string(i);
            r.title = "t";
            r.created_at = *parse_rfc3339("2022-01-01T00:00:00Z");
            page.records.push_back(r);
        }
        page.next_position = std::to_string(start + page.records.size());
        return page;
    }
    int calls = 0;

private:
    int throttles_;
    int ok_calls_;
};

}  // namespace

TEST_CASE("collect_lists: rate limits are absorbed with exponential backoff") {
    testing::TempDir tmp;
    CorpusStore store(tmp / "c.jsonl");
    ScriptedSource source(3, 100);
    std::vector<long long> waits;
    net::BackoffPolicy policy{5, std::chrono::milliseconds(100), 2.0, std::chrono::milliseconds(1000)};
    const auto res = collect_lists(source, store, {}, 4, policy,
                                   [&](std::chrono::milliseconds d) { waits.push_back(d.count()); });
    CHECK(res.records.size() == 4);
    CHECK_FALSE(res.error);
    // retry-after of 2 s dominates the first delays, the cap is 1 s but retry-after wins
    CHECK(waits == std::vector<long long>{2000, 2000, 2000});
}

TEST_CASE("collect_lists: exhausted retries or permanent error return partial results") {
    testing::TempDir tmp;
    CorpusStore store(tmp / "c.jsonl");
    ScriptedSource source(0, 1);
    const auto res = collect_lists(source, store, {}, 10, {}, kNoSleep);
    CHECK(res.records.size() == 2);
    REQUIRE(res.error);
    CHECK(res.error->find("403") != std::string::npos);
    CHECK(res.cursor.position == "2");

    ScriptedSource throttled(100, 100);
    net::BackoffPolicy policy{2, std::chrono::milliseconds(1), 2.0, std::chrono::milliseconds(4)};
    const auto res2 = collect_lists(throttled, store, {}, 10, policy, kNoSleep);
    CHECK(res2.records.empty());
    CHECK(res2.error);
    CHECK(throttled.calls == 3);
}

TEST_CASE("backoff delays grow geometrically up to the cap") {
    net::BackoffPolicy p{5, std::chrono::milliseconds(1000), 2.0, std::chrono::milliseconds(5000)};
    CHECK(p.delay(0).count() == 1000);
    CHECK(p.delay(1).count() == 2000);
    CHECK(p.delay(2).count() == 4000);
    CHECK(p.delay(3).count() == 5000);
}

TEST_CASE("rate limiter spaces acquisitions") {
    auto now = std::chrono::steady_clock::time_point{};
    std::vector<long long> slept;
    net::RateLimiter limiter(
        4.0, [&](std::chrono::milliseconds d) { slept.push_back(d.count()); now += d; }, [&] { return now; });
    for (int i = 0; i < 5; ++i) limiter.acquire();
    CHECK(slept == std::vector<long long>{250, 250, 250, 250});
}

TEST_CASE("SourceCursor serializes and resumes") {
    SourceCursor c{"p2#1", 4};
    CHECK(SourceCursor::from_json(nlohmann::json::parse(c.to_json().dump())) == c);
}

TEST_CASE("lookup_profiles over replay fixtures") {
    ReplayProfileSource source(testing::fixture("corpus/five"));
    const auto out = lookup_profiles(source, {"U1", "U2", "U404"}, {}, kNoSleep);
    REQUIRE(out.size() == 3);
    CHECK(out.at("U1").status == AccountStatus::Suspended);
    CHECK_FALSE(out.at("U1").follower_count);
    CHECK(out.at("U2").status == AccountStatus::Active);
    CHECK(out.at("U2").follower_count == 0u);
    CHECK(out.at("U2").tweet_count == 0u);
    CHECK(out.at("U404").status == AccountStatus::NotFound);
    CHECK_THROWS_AS(lookup_profiles(source, {}, {}, kNoSleep), PreconditionError);
}

namespace {

class FlakyProfiles : public ProfileSource {
public:
    explicit FlakyProfiles(int failures) : failures_(failures) {}
    std::map<std::string, AccountProfile> lookup(const std::vector<std::string>& ids) override {
        if (failures_-- > 0) throw net::TransportError(net::TransportFailure::Timeout, "timeout");
        std::map<std::string, AccountProfile> out;
        for (const auto& id : ids) out[id] = {id, "u" + id, 5, 6, AccountStatus::Active};
        return out;
    }
    std::size_t batch_size() const override { return 2; }

private:
    int failures_;
};

}  // namespace

TEST_CASE("lookup_profiles retries network failures and reports unresolved ids") {
    FlakyProfiles flaky(2);
    const auto out = lookup_profiles(flaky, {"a", "b", "c"}, {}, kNoSleep);
    CHECK(out.size() == 3);
    CHECK(out.at("c").follower_count == 5u);

    FlakyProfiles dead(1000);
    net::BackoffPolicy quick{1, std::chrono::milliseconds(1), 2.0, std::chrono::milliseconds(1)};
    try {
        lookup_profiles(dead, {"a", "b", "c"}, quick, kNoSleep);
        FAIL("expected LookupError");
    } catch (const LookupError& e) {
        CHECK(e.unresolved() == std::vector<std::string>{"a", "b", "c"});
    }
}

TEST_CASE("live list source maps the v2 list and member endpoints") {
    testing::FakeTransport http;
    http.on("https://api.test/2/lists/77?list.fields=created_at,description,follower_count,owner_id", 200,
            R"({"data":{"id":"77","name":"50000 ETH","description":"giveaway at www.buterinofficial.com",
                "owner_id":"U9","created_at":"2022-02-27T00:43:00.000Z","follower_count":3}})");
    http.on("https://api.test/2/lists/77/members?max_results=100", 200,
            R"({"data":[{"id":"a"},{"id":"b"}],"meta":{"next_token":"T2"}})");
    http.on("https://api.test/2/lists/77/members?max_results=100&pagination_token=T2", 200,
            R"({"data":[{"id":"c"}],"meta":{}})");
    http.on("https://api.test/2/lists/78?list.fields=created_at,description,follower_count,owner_id", 200,
            R"({"errors":[{"title":"Not Found Error"}]})");
    LiveListSource source(http, {"77", "78"}, "tok", "https://api.test");
    const auto page = source.fetch("", 10);
    REQUIRE(page.records.size() == 1);
    CHECK(page.records[0].title == "50000 ETH");
    CHECK(page.records[0].member_ids == std::vector<std::string>{"a", "b", "c"});
    CHECK(page.records[0].follower_count == 3);
    CHECK(page.exhausted);
    CHECK(http.last_headers.at("Authorization") == "Bearer tok");
}

TEST_CASE("live list source surfaces 429 as a retryable rate limit") {
    testing::FakeTransport http;
    http.on("https://api.test/2/lists/77?list.fields=created_at,description,follower_count,owner_id", 429, "",
            {{"retry-after", "15"}});
    LiveListSource source(http, {"77"}, "tok", "https://api.test");
    CHECK_THROWS_AS(source.fetch("", 1), net::RateLimited);
}

TEST_CASE("live profile source distinguishes suspended from missing accounts") {
    testing::FakeTransport http;
    http.on("https://api.test/2/users?ids=U1%2CU2%2CU3&user.fields=public_metrics", 200,
            R"({"data":[{"id":"U2","username":"spam01","public_metrics":{"followers_count":0,"tweet_count":0}}],
                "errors":[{"resource_id":"U1","title":"Forbidden","detail":"User has been suspended: [U1]."},
                          {"resource_id":"U3","title":"Not Found Error","detail":"Could not find user with ids: [U3]."}]})");
    LiveProfileSource source(http, "tok", "https://api.test");
    const auto out = lookup_profiles(source, {"U1", "U2", "U3"}, {}, kNoSleep);
    CHECK(out.at("U1").status == AccountStatus::Suspended);
    CHECK(out.at("U2").status == AccountStatus::Active);
    CHECK(out.at("U2").follower_count == 0u);
    CHECK(out.at("U3").status == AccountStatus::NotFound);
}
