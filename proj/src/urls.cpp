#include "scamhunt/extractor.hpp"
#include "scamhunt/tables.hpp"

#include <algorithm>
#include <cctype>

namespace scamhunt::extractor {

namespace {

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool istarts_with(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
    }
    return true;
}

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool url_stop(char c) {
    return is_space(c) || c == '"' || c == '\'' || c == '<' || c == '>' || c == '`' ||
           static_cast<unsigned char>(c) >= 0x80;
}

constexpr std::string_view kTrailing = ".,;:!?)]}'\"";

std::string_view strip_trailing(std::string_view s) {
    while (!s.empty() && kTrailing.find(s.back()) != std::string_view::npos) s.remove_suffix(1);
    return s;
}

bool valid_hostname(std::string_view host) {
    if (host.empty() || host.size() > 253 || host.find('.') == std::string_view::npos) return false;
    std::size_t start = 0;
    std::string_view last;
    while (start <= host.size()) {
        auto dot = host.find('.', start);
        if (dot == std::string_view::npos) dot = host.size();
        auto label = host.substr(start, dot - start);
        if (label.empty() || label.size() > 63 || label.front() == '-' || label.back() == '-') return false;
        if (!std::all_of(label.begin(), label.end(), [](char c) { return is_alnum(c) || c == '-'; })) return false;
        last = label;
        start = dot + 1;
    }
    return std::any_of(last.begin(), last.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)); });
}

std::optional<std::string> normalize(std::string_view raw, bool has_scheme, const PublicSuffixList& psl) {
    const std::string full = has_scheme ? std::string(raw) : "https://" + std::string(raw);
    auto parts = net::split_url(full);
    if (!parts || !valid_hostname(parts->host) || !psl.is_registrable_host(parts->host)) return std::nullopt;
    std::string out = parts->scheme + "://" + parts->host;
    if (parts->port) out += ":" + std::to_string(parts->port);
    if (parts->target != "/") out += parts->target;
    return out;
}

}  // namespace

PublicSuffixList PublicSuffixList::parse(std::string_view text) {
    PublicSuffixList psl;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        const auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string_view::npos) continue;
        line.remove_prefix(begin);
        if (line.starts_with("//")) continue;
        line = line.substr(0, line.find_first_of(" \t\r"));
        std::string rule = ascii_lower(line);
        if (rule.starts_with("!")) {
            psl.exceptions_.insert(rule.substr(1));
        } else if (rule.starts_with("*.")) {
            psl.wildcards_.insert(rule.substr(2));
        } else {
            psl.rules_.insert(std::move(rule));
        }
    }
    return psl;
}

const PublicSuffixList& PublicSuffixList::builtin() {
    static const PublicSuffixList psl = parse(tables::load("public_suffix.dat"));
    return psl;
}

std::optional<std::string> PublicSuffixList::public_suffix(std::string_view host_in) const {
    const std::string host = ascii_lower(host_in);
    // Walk candidate suffixes from longest to shortest; the first rule hit
    // is the longest match, and exceptions are checked before the wildcard
    // they carve out of.
    for (std::size_t start = 0; start < host.size();) {
        const std::string_view cand = std::string_view(host).substr(start);
        const auto dot = cand.find('.');
        const std::string_view parent = dot == std::string_view::npos ? std::string_view{} : cand.substr(dot + 1);
        if (exceptions_.count(std::string(cand))) return std::string(parent);
        if (rules_.count(std::string(cand))) return std::string(cand);
        if (!parent.empty() && wildcards_.count(std::string(parent))) return std::string(cand);
        if (dot == std::string_view::npos) break;
        start += dot + 1;
    }
    return std::nullopt;
}

bool PublicSuffixList::is_registrable_host(std::string_view host) const {
    auto suffix = public_suffix(host);
    return suffix && !suffix->empty() && suffix->size() < host.size();
}

std::vector<UrlCandidate> extract_urls(std::string_view text, std::string_view list_id,
                                       const PublicSuffixList& psl) {
    std::vector<UrlCandidate> out;
    std::unordered_set<std::string> seen;
    auto add = [&](std::string_view raw, bool has_scheme) {
        if (auto norm = normalize(raw, has_scheme, psl); norm && seen.insert(*norm).second) {
            out.push_back({std::string(raw), std::move(*norm), std::string(list_id)});
        }
    };

    std::size_t pos = 0;
    while (pos < text.size()) {
        const char prev = pos ? text[pos - 1] : ' ';
        const std::string_view rest = text.substr(pos);
        if ((istarts_with(rest, "http://") || istarts_with(rest, "https://")) && !is_alnum(prev)) {
            std::size_t end = pos;
            while (end < text.size() && !url_stop(text[end])) ++end;
            add(strip_trailing(text.substr(pos, end - pos)), true);
            pos = end;
            continue;
        }
        if (!is_alnum(text[pos])) {
            ++pos;
            continue;
        }
        std::size_t end = pos;
        while (end < text.size() && (is_alnum(text[end]) || text[end] == '.' || text[end] == '-')) ++end;
        // A bare domain is a standalone token: not part of an e-mail address,
        // a path, or an identifier.
        const char next = end < text.size() ? text[end] : ' ';
        const bool attached = prev == '@' || prev == '/' || prev == ':' || prev == '_' || next == '@' ||
                              next == '_';
        std::size_t stop = end;
        if (next == '/') {
            while (stop < text.size() && !url_stop(text[stop])) ++stop;
        }
        if (!attached) add(strip_trailing(text.substr(pos, stop - pos)), false);
        pos = stop;
    }
    return out;
}

std::string url_host(std::string_view url) {
    auto parts = net::split_url(std::string(url));
    return parts ? parts->host : std::string();
}

}  // namespace scamhunt::extractor
