#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "scamhunt/net.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace scamhunt::net {

namespace {

std::atomic<std::size_t> g_live_transports{0};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

TransportError to_transport_error(httplib::Error err, const std::string& url) {
    const std::string msg = url + ": " + httplib::to_string(err);
    switch (err) {
        case httplib::Error::Connection:
            return TransportError(TransportFailure::Connect, msg);
        case httplib::Error::ConnectionTimeout:
        case httplib::Error::Read:
        case httplib::Error::Write:
            return TransportError(TransportFailure::Timeout, msg);
        default:
            return TransportError(TransportFailure::Other, msg);
    }
}

HttpResponse convert(const httplib::Result& res, const std::string& url) {
    if (!res) throw to_transport_error(res.error(), url);
    HttpResponse out;
    out.status = res->status;
    out.body = res->body;
    for (const auto& [k, v] : res->headers) out.headers.emplace(lower(k), v);
    return out;
}

httplib::Client make_client(const UrlParts& parts, std::chrono::seconds timeout) {
    std::string origin = parts.scheme + "://" + parts.host;
    if (parts.port) origin += ":" + std::to_string(parts.port);
    httplib::Client cli(origin);
    cli.set_follow_location(false);
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);
    return cli;
}

}  // namespace

HttplibTransport::HttplibTransport(std::chrono::seconds timeout) : timeout_(timeout) {
    ++g_live_transports;
}

std::size_t HttplibTransport::instances() noexcept { return g_live_transports.load(); }

HttpResponse HttplibTransport::get(const std::string& url, const Headers& headers) {
    auto parts = split_url(url);
    if (!parts) throw TransportError(TransportFailure::Other, "unsupported URL: " + url);
    auto cli = make_client(*parts, timeout_);
    httplib::Headers h(headers.begin(), headers.end());
    return convert(cli.Get(parts->target, h), url);
}

HttpResponse HttplibTransport::post(const std::string& url, const Headers& headers,
                                    const std::string& body, const std::string& content_type) {
    auto parts = split_url(url);
    if (!parts) throw TransportError(TransportFailure::Other, "unsupported URL: " + url);
    auto cli = make_client(*parts, timeout_);
    httplib::Headers h(headers.begin(), headers.end());
    return convert(cli.Post(parts->target, h, body, content_type), url);
}

HttpResponse OfflineTransport::get(const std::string& url, const Headers&) {
    throw TransportError(TransportFailure::Connect, "network disabled: " + url);
}

HttpResponse OfflineTransport::post(const std::string& url, const Headers&, const std::string&,
                                    const std::string&) {
    throw TransportError(TransportFailure::Connect, "network disabled: " + url);
}

Sleeper real_sleeper() {
    return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::chrono::milliseconds BackoffPolicy::delay(int attempt) const {
    const double ms = static_cast<double>(base.count()) * std::pow(factor, attempt);
    if (ms >= static_cast<double>(cap.count())) return cap;
    return std::chrono::milliseconds(static_cast<long long>(ms));
}

RateLimiter::RateLimiter(double per_second, Sleeper sleep, Clock clock)
    : interval_(std::chrono::nanoseconds(static_cast<long long>(1e9 / per_second))),
      sleep_(std::move(sleep)),
      clock_(std::move(clock)) {}

void RateLimiter::acquire() {
    std::chrono::nanoseconds wait{0};
    {
        std::lock_guard lock(mu_);
        const auto now = clock_();
        const auto slot = (next_ && *next_ > now) ? *next_ : now;
        next_ = slot + interval_;
        wait = slot - now;
    }
    if (wait > std::chrono::nanoseconds::zero()) {
        sleep_(std::chrono::ceil<std::chrono::milliseconds>(wait));
    }
}

void raise_for_status(const HttpResponse& r, const std::string& url) {
    if (r.status == 429) {
        std::optional<std::chrono::seconds> after;
        if (auto it = r.headers.find("retry-after"); it != r.headers.end()) {
            try {
                after = std::chrono::seconds(std::stol(it->second));
            } catch (...) {
            }
        }
        throw RateLimited(after);
    }
    if (r.status >= 500) throw TransientError(url + ": HTTP " + std::to_string(r.status));
    if (r.status >= 400) throw PermanentError(url + ": HTTP " + std::to_string(r.status));
}

std::optional<UrlParts> split_url(const std::string& url) {
    const auto sep = url.find("://");
    if (sep == std::string::npos) return std::nullopt;
    UrlParts p;
    p.scheme = lower(url.substr(0, sep));
    if (p.scheme != "http" && p.scheme != "https") return std::nullopt;
    const auto rest = url.substr(sep + 3);
    const auto slash = rest.find_first_of("/?#");
    std::string authority = rest.substr(0, slash);
    p.target = slash == std::string::npos ? "/" : rest.substr(slash);
    if (!p.target.empty() && p.target[0] != '/') p.target.insert(0, "/");
    if (auto hash = p.target.find('#'); hash != std::string::npos) p.target.resize(hash);
    if (auto at = authority.rfind('@'); at != std::string::npos) authority = authority.substr(at + 1);
    if (auto colon = authority.rfind(':'); colon != std::string::npos) {
        try {
            p.port = std::stoi(authority.substr(colon + 1));
        } catch (...) {
            return std::nullopt;
        }
        authority.resize(colon);
    }
    if (authority.empty()) return std::nullopt;
    p.host = lower(authority);
    return p;
}

std::string resolve_location(const std::string& base, const std::string& location) {
    if (location.find("://") != std::string::npos) return location;
    auto parts = split_url(base);
    if (!parts) return location;
    std::string origin = parts->scheme + "://" + parts->host;
    if (parts->port) origin += ":" + std::to_string(parts->port);
    if (location.rfind("//", 0) == 0) return parts->scheme + ":" + location;
    if (!location.empty() && location[0] == '/') return origin + location;
    std::string dir = parts->target.substr(0, parts->target.find('?'));
    dir = dir.substr(0, dir.rfind('/') + 1);
    return origin + dir + location;
}

std::string url_encode(const std::string& s) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += kHex[c >> 4];
            out += kHex[c & 15];
        }
    }
    return out;
}

}  // namespace scamhunt::net
