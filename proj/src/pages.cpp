#include "scamhunt/errors.hpp"
#include "scamhunt/extractor.hpp"
#include "scamhunt/hashing.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

namespace scamhunt::extractor {

using nlohmann::json;

namespace {

bool is_redirect(int status) {
    return status == 301 || status == 302 || status == 303 || status == 307 || status == 308;
}

FetchFailure from_transport(net::TransportFailure f) {
    switch (f) {
        case net::TransportFailure::Dns: return FetchFailure::Dns;
        case net::TransportFailure::Connect: return FetchFailure::Connect;
        case net::TransportFailure::Timeout: return FetchFailure::Timeout;
        case net::TransportFailure::Other: return FetchFailure::Other;
    }
    return FetchFailure::Other;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& data) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + p.string());
    out << data;
}

Timestamp now_seconds() { return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()); }

}  // namespace

std::string_view failure_name(FetchFailure f) {
    switch (f) {
        case FetchFailure::None: return "none";
        case FetchFailure::Dns: return "dns";
        case FetchFailure::Connect: return "connect";
        case FetchFailure::Timeout: return "timeout";
        case FetchFailure::RedirectLoop: return "redirect_loop";
        case FetchFailure::MissingFixture: return "missing_fixture";
        case FetchFailure::Other: return "other";
    }
    return "other";
}

nlohmann::ordered_json ScamPage::to_json(bool include_body) const {
    nlohmann::ordered_json j;
    j["url"] = url;
    j["final_url"] = final_url;
    j["status"] = status;
    j["fetched_at"] = format_rfc3339(fetched_at);
    j["redirect_chain"] = redirect_chain;
    j["failure"] = failure_name(failure);
    if (!error.empty()) j["error"] = error;
    j["body_sha256"] = to_hex(sha256(body));
    j["body_bytes"] = body.size();
    if (include_body) j["body"] = body;
    return j;
}

PageFetcher::PageFetcher(net::HttpTransport& transport, FetchPolicy policy, net::Sleeper sleep, Clock clock)
    : transport_(transport),
      policy_(policy),
      sleep_(std::move(sleep)),
      clock_(clock ? std::move(clock) : Clock(now_seconds)) {}

PageFetcher::HostGate& PageFetcher::gate_for(const std::string& host) {
    std::lock_guard lock(mu_);
    auto& slot = gates_[host];
    if (!slot) {
        const auto interval_ms = std::max<long long>(1, policy_.per_host_interval.count());
        slot = std::make_unique<HostGate>(1000.0 / static_cast<double>(interval_ms), sleep_);
    }
    return *slot;
}

ScamPage PageFetcher::fetch(const std::string& url) {
    ScamPage page;
    page.url = url;
    std::string current = url;
    for (int hop = 0;; ++hop) {
        page.redirect_chain.push_back(current);
        page.final_url = current;
        auto& gate = gate_for(url_host(current));
        std::unique_lock busy(gate.busy);
        gate.limiter.acquire();
        net::HttpResponse resp;
        try {
            resp = transport_.get(current, {{"User-Agent", "scamhunt/1.0 (research crawler)"}});
        } catch (const net::TransportError& e) {
            page.failure = from_transport(e.kind());
            page.error = e.what();
        } catch (const MissingFixtureError& e) {
            page.failure = FetchFailure::MissingFixture;
            page.error = e.what();
        } catch (const std::exception& e) {
            page.failure = FetchFailure::Other;
            page.error = e.what();
        }
        busy.unlock();
        if (page.failure != FetchFailure::None) {
            page.fetched_at = clock_();
            return page;
        }
        page.status = resp.status;
        auto stamp = resp.headers.find("x-fetched-at");
        auto parsed = stamp != resp.headers.end() ? parse_rfc3339(stamp->second) : std::nullopt;
        page.fetched_at = parsed ? *parsed : clock_();

        auto loc = resp.headers.find("location");
        if (is_redirect(resp.status) && loc != resp.headers.end()) {
            if (hop >= policy_.max_redirects) {
                page.failure = FetchFailure::RedirectLoop;
                page.error = "more than " + std::to_string(policy_.max_redirects) + " redirects starting at " + url;
                return page;
            }
            current = net::resolve_location(current, loc->second);
            continue;
        }
        page.body = std::move(resp.body);
        return page;
    }
}

std::vector<ScamPage> PageFetcher::fetch_all(const std::vector<std::string>& urls) {
    std::vector<ScamPage> out(urls.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < urls.size(); i = next++) out[i] = fetch(urls[i]);
    };
    const std::size_t n = std::min(std::max<std::size_t>(1, policy_.concurrency), urls.size());
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    return out;
}

PageStore::PageStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string PageStore::key(std::string_view url) { return to_hex(sha256(url)).substr(0, 32); }

std::optional<PageStore::Entry> PageStore::find(std::string_view url) const {
    const auto meta = dir_ / (key(url) + ".json");
    if (!std::filesystem::exists(meta)) return std::nullopt;
    json j = json::parse(read_file(meta), nullptr, false);
    if (j.is_discarded()) throw ParseError(0, "corrupt page fixture: " + meta.string());
    Entry e;
    e.url = j.value("url", "");
    if (e.url != url) return std::nullopt;  // hash prefix collision
    e.status = j.value("status", 0);
    const json headers = j.value("headers", json::object());
    for (auto& [k, v] : headers.items()) e.headers[k] = v.get<std::string>();
    if (j.contains("error") && j["error"].is_string()) e.error = j["error"].get<std::string>();
    e.fetched_at = j.value("fetched_at", "");
    e.redirect_chain = j.value("redirect_chain", std::vector<std::string>{});
    const auto body = dir_ / (key(url) + ".body");
    if (std::filesystem::exists(body)) e.body = read_file(body);
    return e;
}

void PageStore::put(const Entry& e) const {
    std::filesystem::create_directories(dir_);
    nlohmann::ordered_json j;
    j["url"] = e.url;
    j["status"] = e.status;
    j["headers"] = e.headers;
    j["error"] = e.error ? json(*e.error) : json(nullptr);
    j["fetched_at"] = e.fetched_at;
    j["redirect_chain"] = e.redirect_chain;
    write_file(dir_ / (key(e.url) + ".json"), j.dump(1) + "\n");
    write_file(dir_ / (key(e.url) + ".body"), e.body);
}

FixtureTransport::FixtureTransport(std::filesystem::path dir) : store_(std::move(dir)) {}

net::HttpResponse FixtureTransport::get(const std::string& url, const net::Headers&) {
    auto e = store_.find(url);
    if (!e) throw MissingFixtureError("no recorded page for " + url);
    if (e->error) {
        const auto& kind = *e->error;
        const auto failure = kind == "dns"       ? net::TransportFailure::Dns
                             : kind == "connect" ? net::TransportFailure::Connect
                             : kind == "timeout" ? net::TransportFailure::Timeout
                                                 : net::TransportFailure::Other;
        throw net::TransportError(failure, url + ": recorded " + kind + " failure");
    }
    net::HttpResponse r{e->status, e->headers, e->body};
    if (!e->fetched_at.empty()) r.headers["x-fetched-at"] = e->fetched_at;
    return r;
}

net::HttpResponse FixtureTransport::post(const std::string& url, const net::Headers&, const std::string&,
                                         const std::string&) {
    throw MissingFixtureError("page fixtures do not record POST requests: " + url);
}

RecordingTransport::RecordingTransport(net::HttpTransport& inner, std::filesystem::path dir)
    : inner_(inner), store_(std::move(dir)) {}

net::HttpResponse RecordingTransport::get(const std::string& url, const net::Headers& headers) {
    PageStore::Entry e;
    e.url = url;
    e.fetched_at = format_rfc3339(now_seconds());
    try {
        auto r = inner_.get(url, headers);
        e.status = r.status;
        if (auto loc = r.headers.find("location"); loc != r.headers.end()) e.headers["location"] = loc->second;
        if (auto ct = r.headers.find("content-type"); ct != r.headers.end()) e.headers["content-type"] = ct->second;
        e.body = r.body;
        std::lock_guard lock(mu_);
        store_.put(e);
        return r;
    } catch (const net::TransportError& err) {
        switch (err.kind()) {
            case net::TransportFailure::Dns: e.error = "dns"; break;
            case net::TransportFailure::Connect: e.error = "connect"; break;
            case net::TransportFailure::Timeout: e.error = "timeout"; break;
            case net::TransportFailure::Other: e.error = "other"; break;
        }
        std::lock_guard lock(mu_);
        store_.put(e);
        throw;
    }
}

net::HttpResponse RecordingTransport::post(const std::string& url, const net::Headers& headers,
                                           const std::string& body, const std::string& content_type) {
    return inner_.post(url, headers, body, content_type);
}

}  // namespace scamhunt::extractor
