#pragma once

#include "scamhunt/net.hpp"
#include "scamhunt/timeutil.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

namespace scamhunt::corpus {

inline constexpr std::size_t kMaxMembers = 100'000;

/// One social-media list, the unit of detection.
struct ListRecord {
    std::string list_id;
    std::string title;
    std::string description;
    std::string creator_id;
    Timestamp created_at{};
    std::vector<std::string> member_ids;  // distinct, in source order
    std::uint64_t follower_count = 0;
    bool member_overflow = false;  // set when member_ids was truncated to kMaxMembers

    friend bool operator==(const ListRecord&, const ListRecord&) = default;
};

enum class AccountStatus { Active, Suspended, NotFound };

std::string_view status_name(AccountStatus s);
std::optional<AccountStatus> parse_status(std::string_view s);

/// Public metrics of a list creator. Counts are absent for suspended or
/// missing accounts; they are never filled with made-up values.
struct AccountProfile {
    std::string account_id;
    std::string username;
    std::optional<std::uint64_t> follower_count;
    std::optional<std::uint64_t> tweet_count;
    AccountStatus status = AccountStatus::NotFound;

    friend bool operator==(const AccountProfile&, const AccountProfile&) = default;
};

/// Resumable read position in a source.
struct SourceCursor {
    std::string position;
    std::uint64_t fetched_count = 0;

    nlohmann::json to_json() const;
    static SourceCursor from_json(const nlohmann::json& j);
    friend bool operator==(const SourceCursor&, const SourceCursor&) = default;
};

/// Parses one JSONL line. `line_no` (1-based, 0 = unknown) is reported in errors.
/// Throws ParseError on malformed JSON and SchemaError on missing/invalid keys.
ListRecord parse_list_record(std::string_view line, std::size_t line_no = 0);
ListRecord list_record_from_json(const nlohmann::json& j, std::size_t line_no = 0);
nlohmann::json to_json(const ListRecord& r);
/// Single-line JSON with a fixed key order.
std::string serialize_list_record(const ListRecord& r);

nlohmann::json to_json(const AccountProfile& p);
AccountProfile account_profile_from_json(const nlohmann::json& j);

/// Append-only JSONL corpus with an in-memory id index. Writes are serialized.
class CorpusStore {
public:
    /// Opens (creating if needed) the file and indexes existing records.
    explicit CorpusStore(std::filesystem::path path);

    /// Appends unless the list_id is already stored. Returns true if written.
    bool append(const ListRecord& r);
    bool contains(const std::string& list_id) const;
    std::size_t size() const;
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    mutable std::mutex mu_;
    std::unordered_set<std::string> ids_;
    std::ofstream out_;
};

std::vector<ListRecord> load_corpus(const std::filesystem::path& path);

/// Maps (endpoint, cursor) pairs onto page files under a fixture directory.
///
/// index.json: {"pages": [{"endpoint": "lists", "cursor": "", "file": "lists/001.json"}, ...]}
/// page file:  {"data": [...], "next_cursor": "c2" | null}
class FixtureIndex {
public:
    explicit FixtureIndex(std::filesystem::path root);

    struct Page {
        nlohmann::json data;  // array
        std::optional<std::string> next_cursor;
    };

    /// Throws MissingFixtureError when no page is registered.
    Page page(const std::string& endpoint, const std::string& cursor) const;
    bool has(const std::string& endpoint, const std::string& cursor) const;
    const std::filesystem::path& root() const noexcept { return root_; }

private:
    std::filesystem::path root_;
    std::map<std::pair<std::string, std::string>, std::filesystem::path> files_;
};

struct SourcePage {
    std::vector<ListRecord> records;
    std::string next_position;
    bool exhausted = false;
};

/// Where list records come from. `fetch` must be idempotent for a given
/// position so a rate-limited call can be retried.
class ListSource {
public:
    virtual ~ListSource() = default;
    virtual SourcePage fetch(const std::string& position, std::size_t max) = 0;
};

/// Serves the "lists" endpoint of a fixture directory. Positions are
/// "<page cursor>#<offset within page>".
class ReplayListSource final : public ListSource {
public:
    explicit ReplayListSource(std::filesystem::path root);
    SourcePage fetch(const std::string& position, std::size_t max) override;

private:
    FixtureIndex index_;
};

/// Reads an existing corpus JSONL file; the position is a line offset.
class JsonlListSource final : public ListSource {
public:
    explicit JsonlListSource(std::filesystem::path path);
    SourcePage fetch(const std::string& position, std::size_t max) override;

private:
    std::vector<std::string> lines_;
};

/// Twitter API v2 list lookup over a queue of candidate list ids. The
/// position is an index into the candidate queue.
class LiveListSource final : public ListSource {
public:
    LiveListSource(net::HttpTransport& transport, std::vector<std::string> candidate_ids,
                   std::string bearer_token, std::string api_base = "https://api.twitter.com");
    SourcePage fetch(const std::string& position, std::size_t max) override;

private:
    std::optional<ListRecord> lookup(const std::string& id);
    net::Headers auth() const;

    net::HttpTransport& transport_;
    std::vector<std::string> candidates_;
    std::string token_;
    std::string base_;
};

/// Reads SOURCE_API_TOKEN; throws PreconditionError when unset.
std::string source_token_from_env();

struct CollectResult {
    std::vector<ListRecord> records;  // in source order, duplicates included
    SourceCursor cursor;
    std::size_t stored = 0;            // records newly written to the store
    std::optional<std::string> error;  // permanent source failure, if any
    bool exhausted = false;
};

/// Pulls up to `limit` records starting at `cursor`, appending unseen ids to
/// `store`. Rate limits are absorbed by `backoff`; a permanent failure ends
/// the call early with partial results and a resumable cursor.
CollectResult collect_lists(ListSource& source, CorpusStore& store, const SourceCursor& cursor,
                            std::size_t limit, const net::BackoffPolicy& backoff = {},
                            const net::Sleeper& sleep = net::real_sleeper());

class ProfileSource {
public:
    virtual ~ProfileSource() = default;
    /// Returns profiles for the ids it can resolve; may omit the rest.
    virtual std::map<std::string, AccountProfile> lookup(const std::vector<std::string>& ids) = 0;
    virtual std::size_t batch_size() const { return 100; }
};

/// Serves every page of the "users" endpoint of a fixture directory.
class ReplayProfileSource final : public ProfileSource {
public:
    explicit ReplayProfileSource(std::filesystem::path root);
    std::map<std::string, AccountProfile> lookup(const std::vector<std::string>& ids) override;

private:
    std::map<std::string, AccountProfile> profiles_;
};

/// Twitter API v2 users lookup (public_metrics).
class LiveProfileSource final : public ProfileSource {
public:
    LiveProfileSource(net::HttpTransport& transport, std::string bearer_token,
                      std::string api_base = "https://api.twitter.com");
    std::map<std::string, AccountProfile> lookup(const std::vector<std::string>& ids) override;

private:
    net::HttpTransport& transport_;
    std::string token_;
    std::string base_;
};

/// Raised when retries are exhausted; lists the ids left unresolved.
class LookupError : public Error {
public:
    explicit LookupError(std::vector<std::string> unresolved);
    const std::vector<std::string>& unresolved() const noexcept { return unresolved_; }

private:
    std::vector<std::string> unresolved_;
};

/// Every input id appears in the result; unresolvable ids map to NotFound.
std::map<std::string, AccountProfile> lookup_profiles(ProfileSource& source,
                                                      const std::set<std::string>& ids,
                                                      const net::BackoffPolicy& backoff = {},
                                                      const net::Sleeper& sleep = net::real_sleeper());

}  // namespace scamhunt::corpus
