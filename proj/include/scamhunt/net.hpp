#pragma once

#include "scamhunt/errors.hpp"

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>

namespace scamhunt::net {

using Headers = std::map<std::string, std::string>;

struct HttpResponse {
    int status = 0;
    Headers headers;  // keys lowercased
    std::string body;
};

enum class TransportFailure { Dns, Connect, Timeout, Other };

/// A request that produced no HTTP response at all.
class TransportError : public Error {
public:
    TransportError(TransportFailure kind, const std::string& what) : Error(what), kind_(kind) {}
    TransportFailure kind() const noexcept { return kind_; }

private:
    TransportFailure kind_;
};

/// The remote asked us to slow down (HTTP 429 or an API-level throttle).
class RateLimited : public Error {
public:
    explicit RateLimited(std::optional<std::chrono::seconds> retry_after = std::nullopt)
        : Error("rate limited"), retry_after_(retry_after) {}
    std::optional<std::chrono::seconds> retry_after() const noexcept { return retry_after_; }

private:
    std::optional<std::chrono::seconds> retry_after_;
};

/// A failure worth retrying (5xx, dropped connection).
class TransientError : public Error {
public:
    using Error::Error;
};

/// A failure that will not go away by retrying (4xx other than 429, bad payload).
class PermanentError : public Error {
public:
    using Error::Error;
};

/// Minimal HTTP client contract. Implementations never follow redirects.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse get(const std::string& url, const Headers& headers) = 0;
    virtual HttpResponse post(const std::string& url, const Headers& headers,
                              const std::string& body, const std::string& content_type) = 0;
};

/// Live transport over cpp-httplib (HTTP and HTTPS).
class HttplibTransport final : public HttpTransport {
public:
    explicit HttplibTransport(std::chrono::seconds timeout = std::chrono::seconds(10));
    HttpResponse get(const std::string& url, const Headers& headers) override;
    HttpResponse post(const std::string& url, const Headers& headers, const std::string& body,
                      const std::string& content_type) override;

    /// Count of live transports ever constructed in this process.
    static std::size_t instances() noexcept;

private:
    std::chrono::seconds timeout_;
};

/// Transport that refuses every request; used where the network must stay untouched.
class OfflineTransport final : public HttpTransport {
public:
    HttpResponse get(const std::string& url, const Headers&) override;
    HttpResponse post(const std::string& url, const Headers&, const std::string&,
                      const std::string&) override;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;
Sleeper real_sleeper();

/// Bounded exponential backoff: delay_n = min(base * factor^n, cap).
struct BackoffPolicy {
    int max_retries = 5;
    std::chrono::milliseconds base{1000};
    double factor = 2.0;
    std::chrono::milliseconds cap{60000};

    std::chrono::milliseconds delay(int attempt) const;
};

/// Runs `op`, retrying on RateLimited / TransientError / TransportError per
/// `policy`. The final failure is rethrown unchanged. PermanentError is
/// never retried.
template <typename Op>
auto with_backoff(const BackoffPolicy& policy, const Sleeper& sleep, Op&& op) -> decltype(op()) {
    for (int attempt = 0;; ++attempt) {
        try {
            return op();
        } catch (const RateLimited& e) {
            if (attempt >= policy.max_retries) throw;
            auto wait = policy.delay(attempt);
            if (e.retry_after()) wait = std::max(wait, std::chrono::milliseconds(*e.retry_after()));
            sleep(wait);
        } catch (const TransientError&) {
            if (attempt >= policy.max_retries) throw;
            sleep(policy.delay(attempt));
        } catch (const TransportError&) {
            if (attempt >= policy.max_retries) throw;
            sleep(policy.delay(attempt));
        }
    }
}

/// Token spacing limiter: at most `per_second` acquisitions per second.
class RateLimiter {
public:
    using Clock = std::function<std::chrono::steady_clock::time_point()>;

    explicit RateLimiter(double per_second, Sleeper sleep = real_sleeper(),
                         Clock clock = [] { return std::chrono::steady_clock::now(); });
    void acquire();

private:
    std::chrono::nanoseconds interval_;
    Sleeper sleep_;
    Clock clock_;
    std::mutex mu_;
    std::optional<std::chrono::steady_clock::time_point> next_;
};

/// Maps a response status onto the retry taxonomy; returns normally for 2xx/3xx.
void raise_for_status(const HttpResponse& r, const std::string& url);

struct UrlParts {
    std::string scheme;  // lowercase
    std::string host;    // lowercase, no port
    int port = 0;        // 0 when absent
    std::string target;  // path + query, at least "/"
};

std::optional<UrlParts> split_url(const std::string& url);

/// Resolves a Location header against the URL that returned it.
std::string resolve_location(const std::string& base, const std::string& location);

/// Percent-encodes a query component.
std::string url_encode(const std::string& s);

}  // namespace scamhunt::net
