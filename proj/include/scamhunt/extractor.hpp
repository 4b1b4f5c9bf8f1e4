#pragma once

#include "scamhunt/chain.hpp"
#include "scamhunt/net.hpp"
#include "scamhunt/timeutil.hpp"

#include "json.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace scamhunt::extractor {

// ---------------------------------------------------------------- URLs

/// Public Suffix List matcher (normal, wildcard and exception rules).
class PublicSuffixList {
public:
    static PublicSuffixList parse(std::string_view text);
    static const PublicSuffixList& builtin();

    /// The public suffix of `host` under an explicit rule, or nullopt when
    /// only the implicit "*" rule would apply.
    std::optional<std::string> public_suffix(std::string_view host) const;
    /// True if host is strictly longer than a listed public suffix.
    bool is_registrable_host(std::string_view host) const;
    std::size_t size() const noexcept { return rules_.size() + wildcards_.size() + exceptions_.size(); }

private:
    std::unordered_set<std::string> rules_;
    std::unordered_set<std::string> wildcards_;   // "ck" for "*.ck"
    std::unordered_set<std::string> exceptions_;  // "www.ck" for "!www.ck"
};

struct UrlCandidate {
    std::string raw;         // as found in the text
    std::string normalized;  // scheme://host[:port][/path], host lowercased
    std::string source_list_id;

    friend bool operator==(const UrlCandidate&, const UrlCandidate&) = default;
};

/// Scheme-qualified URLs and bare domains, in order of first appearance,
/// duplicates (by normalized form) collapsed.
std::vector<UrlCandidate> extract_urls(std::string_view text, std::string_view list_id = {},
                                       const PublicSuffixList& psl = PublicSuffixList::builtin());

/// Host of a normalized URL ("https://a.b/c" -> "a.b").
std::string url_host(std::string_view url);

// ---------------------------------------------------------------- pages

enum class FetchFailure { None, Dns, Connect, Timeout, RedirectLoop, MissingFixture, Other };

std::string_view failure_name(FetchFailure f);

struct ScamPage {
    std::string url;        // as requested
    std::string final_url;  // after redirects
    int status = 0;         // 0 when no response arrived
    std::string body;       // verbatim bytes
    Timestamp fetched_at{};
    std::vector<std::string> redirect_chain;  // every URL requested, in order
    FetchFailure failure = FetchFailure::None;
    std::string error;

    bool ok() const noexcept { return failure == FetchFailure::None; }
    nlohmann::ordered_json to_json(bool include_body = false) const;
};

struct FetchPolicy {
    int max_redirects = 5;
    std::chrono::milliseconds per_host_interval{1000};
    std::size_t concurrency = 4;
};

/// Fetches pages without running scripts: plain GETs, manual redirects,
/// one request per host per interval, bounded parallelism.
class PageFetcher {
public:
    using Clock = std::function<Timestamp()>;

    PageFetcher(net::HttpTransport& transport, FetchPolicy policy = {},
                net::Sleeper sleep = net::real_sleeper(), Clock clock = {});

    /// Never throws for network trouble; failures are recorded on the page.
    ScamPage fetch(const std::string& url);
    /// Results keep the order of `urls`.
    std::vector<ScamPage> fetch_all(const std::vector<std::string>& urls);

private:
    struct HostGate {
        explicit HostGate(double per_second, net::Sleeper sleep) : limiter(per_second, std::move(sleep)) {}
        net::RateLimiter limiter;
        std::mutex busy;  // one request in flight per host
    };
    HostGate& gate_for(const std::string& host);

    net::HttpTransport& transport_;
    FetchPolicy policy_;
    net::Sleeper sleep_;
    Clock clock_;
    std::mutex mu_;
    std::map<std::string, std::unique_ptr<HostGate>> gates_;
};

/// Directory of recorded responses keyed by sha256(url): <key>.json holds
/// {url, status, headers, error, fetched_at, redirect_chain}, <key>.body the bytes.
class PageStore {
public:
    explicit PageStore(std::filesystem::path dir);

    static std::string key(std::string_view url);

    struct Entry {
        std::string url;
        int status = 0;
        net::Headers headers;
        std::string body;
        std::optional<std::string> error;  // "dns" | "connect" | "timeout"
        std::string fetched_at;            // RFC 3339
        std::vector<std::string> redirect_chain;
    };

    std::optional<Entry> find(std::string_view url) const;
    void put(const Entry& e) const;
    const std::filesystem::path& dir() const noexcept { return dir_; }

private:
    std::filesystem::path dir_;
};

/// Replays a PageStore. Fixture error fields become TransportErrors; the
/// recorded fetch time is surfaced as the "x-fetched-at" header. Unknown
/// URLs raise MissingFixtureError.
class FixtureTransport final : public net::HttpTransport {
public:
    explicit FixtureTransport(std::filesystem::path dir);
    net::HttpResponse get(const std::string& url, const net::Headers& headers) override;
    net::HttpResponse post(const std::string& url, const net::Headers& headers, const std::string& body,
                           const std::string& content_type) override;

private:
    PageStore store_;
};

/// Passes requests through to `inner` and records every answer into a PageStore.
class RecordingTransport final : public net::HttpTransport {
public:
    RecordingTransport(net::HttpTransport& inner, std::filesystem::path dir);
    net::HttpResponse get(const std::string& url, const net::Headers& headers) override;
    net::HttpResponse post(const std::string& url, const net::Headers& headers, const std::string& body,
                           const std::string& content_type) override;

private:
    net::HttpTransport& inner_;
    PageStore store_;
    std::mutex mu_;
};

// ---------------------------------------------------------------- addresses

struct AddressCandidate {
    Chain chain;  // EVM hex is tagged ETH until disambiguated
    std::string text;

    friend bool operator==(const AddressCandidate&, const AddressCandidate&) = default;
};

struct ChainAddress {
    Chain chain;
    std::string text;  // canonical form
    bool checksum_ok = false;

    friend bool operator==(const ChainAddress&, const ChainAddress&) = default;
    friend auto operator<=>(const ChainAddress&, const ChainAddress&) = default;
};

/// Whole-token grammar match per chain; distinct candidates in order of
/// first appearance. Bytes outside [A-Za-z0-9_] separate tokens.
std::vector<AddressCandidate> scan_addresses(std::string_view body);

/// Grammar predicates, anchored on the full string.
bool matches_grammar(std::string_view token, Chain chain);
bool is_evm_shape(std::string_view token);

/// Checksum verification. EVM addresses that pass come back in EIP-55 case.
ChainAddress validate_address(std::string_view candidate, Chain chain);

inline const std::vector<std::string>& default_bnb_keywords() {
    static const std::vector<std::string> k = {"bnb", "binance coin", "bsc"};
    return k;
}

/// BNB when the page mentions any keyword as a whole word (case-insensitive), else ETH.
Chain disambiguate_evm(std::string_view page_body,
                       const std::vector<std::string>& keywords = default_bnb_keywords());

/// scan -> validate -> EVM disambiguation over one page body.
std::vector<ChainAddress> extract_addresses(std::string_view page_body,
                                            const std::vector<std::string>& keywords = default_bnb_keywords());

}  // namespace scamhunt::extractor
