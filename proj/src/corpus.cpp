#include "scamhunt/corpus.hpp"

#include "scamhunt/errors.hpp"

#include <cstdlib>

namespace scamhunt::corpus {

using nlohmann::json;

namespace {

const Timestamp kEarliest = *parse_rfc3339("2006-01-01T00:00:00Z");

std::string where(std::size_t line_no) {
    return line_no ? "line " + std::to_string(line_no) + ": " : std::string();
}

std::string id_string(const json& v, const char* key, std::size_t line_no) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_unsigned() || v.is_number_integer()) return std::to_string(v.get<long long>());
    throw SchemaError(key, where(line_no) + "key '" + key + "' must be a string id");
}

std::string text_field(const json& j, const char* key, bool required, std::size_t line_no) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        if (required) throw SchemaError(key, where(line_no) + "missing required key '" + key + "'");
        return {};
    }
    if (!it->is_string()) throw SchemaError(key, where(line_no) + "key '" + key + "' must be a string");
    return it->get<std::string>();
}

std::optional<std::uint64_t> count_field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_number_integer() || it->get<long long>() < 0) {
        throw SchemaError(key, std::string("key '") + key + "' must be a non-negative integer");
    }
    return it->get<std::uint64_t>();
}

std::pair<std::string, std::size_t> split_position(const std::string& position) {
    const auto hash = position.rfind('#');
    if (hash == std::string::npos) return {position, 0};
    return {position.substr(0, hash), std::stoul(position.substr(hash + 1))};
}

}  // namespace

std::string_view status_name(AccountStatus s) {
    switch (s) {
        case AccountStatus::Active: return "active";
        case AccountStatus::Suspended: return "suspended";
        case AccountStatus::NotFound: return "not_found";
    }
    return "not_found";
}

std::optional<AccountStatus> parse_status(std::string_view s) {
    if (s == "active") return AccountStatus::Active;
    if (s == "suspended") return AccountStatus::Suspended;
    if (s == "not_found") return AccountStatus::NotFound;
    return std::nullopt;
}

json SourceCursor::to_json() const { return {{"position", position}, {"fetched_count", fetched_count}}; }

SourceCursor SourceCursor::from_json(const json& j) {
    return {j.at("position").get<std::string>(), j.at("fetched_count").get<std::uint64_t>()};
}

ListRecord list_record_from_json(const json& j, std::size_t line_no) {
    if (!j.is_object()) throw ParseError(line_no, "expected a JSON object");
    ListRecord r;

    auto id = j.find("list_id");
    if (id == j.end() || id->is_null()) {
        throw SchemaError("list_id", where(line_no) + "missing required key 'list_id'");
    }
    r.list_id = id_string(*id, "list_id", line_no);
    if (r.list_id.empty()) throw SchemaError("list_id", where(line_no) + "list_id must be non-empty");

    r.title = text_field(j, "title", true, line_no);
    r.description = text_field(j, "description", false, line_no);
    if (auto c = j.find("creator_id"); c != j.end() && !c->is_null()) {
        r.creator_id = id_string(*c, "creator_id", line_no);
    }

    const std::string created = text_field(j, "created_at", true, line_no);
    auto ts = parse_rfc3339(created);
    if (!ts) throw SchemaError("created_at", where(line_no) + "unparseable created_at '" + created + "'");
    if (*ts < kEarliest) throw SchemaError("created_at", where(line_no) + "created_at before 2006-01-01");
    r.created_at = *ts;

    if (auto m = j.find("member_ids"); m != j.end() && !m->is_null()) {
        if (!m->is_array()) throw SchemaError("member_ids", where(line_no) + "member_ids must be an array");
        std::unordered_set<std::string> seen;
        for (const auto& v : *m) {
            std::string mid = id_string(v, "member_ids", line_no);
            if (!seen.insert(mid).second) continue;
            if (r.member_ids.size() == kMaxMembers) {
                r.member_overflow = true;
                break;
            }
            r.member_ids.push_back(std::move(mid));
        }
    }
    try {
        r.follower_count = count_field(j, "follower_count").value_or(0);
    } catch (const SchemaError& e) {
        throw SchemaError(e.key(), where(line_no) + e.what());
    }
    if (auto o = j.find("member_overflow"); o != j.end() && o->is_boolean() && o->get<bool>()) {
        r.member_overflow = true;
    }
    return r;
}

ListRecord parse_list_record(std::string_view line, std::size_t line_no) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(line_no, std::string("malformed JSON: ") + e.what());
    }
    return list_record_from_json(j, line_no);
}

namespace {

nlohmann::ordered_json ordered(const ListRecord& r) {
    nlohmann::ordered_json j;
    j["list_id"] = r.list_id;
    j["title"] = r.title;
    j["description"] = r.description;
    j["creator_id"] = r.creator_id;
    j["created_at"] = format_rfc3339(r.created_at);
    j["member_ids"] = r.member_ids;
    j["follower_count"] = r.follower_count;
    if (r.member_overflow) j["member_overflow"] = true;
    return j;
}

}  // namespace

json to_json(const ListRecord& r) { return json::parse(serialize_list_record(r)); }

std::string serialize_list_record(const ListRecord& r) {
    return ordered(r).dump(-1, ' ', false, json::error_handler_t::replace);
}

json to_json(const AccountProfile& p) {
    json j;
    j["account_id"] = p.account_id;
    j["username"] = p.username;
    j["follower_count"] = p.follower_count ? json(*p.follower_count) : json(nullptr);
    j["tweet_count"] = p.tweet_count ? json(*p.tweet_count) : json(nullptr);
    j["status"] = status_name(p.status);
    return j;
}

AccountProfile account_profile_from_json(const json& j) {
    AccountProfile p;
    p.account_id = id_string(j.at("account_id"), "account_id", 0);
    p.username = j.value("username", "");
    auto status = parse_status(j.value("status", "active"));
    if (!status) throw SchemaError("status", "unknown account status");
    p.status = *status;
    if (p.status == AccountStatus::Active) {
        p.follower_count = count_field(j, "follower_count");
        p.tweet_count = count_field(j, "tweet_count");
    }
    return p;
}

CorpusStore::CorpusStore(std::filesystem::path path) : path_(std::move(path)) {
    if (std::filesystem::exists(path_)) {
        for (const auto& r : load_corpus(path_)) ids_.insert(r.list_id);
    } else if (path_.has_parent_path()) {
        std::filesystem::create_directories(path_.parent_path());
    }
    out_.open(path_, std::ios::app | std::ios::binary);
    if (!out_) throw Error("cannot open corpus for append: " + path_.string());
}

bool CorpusStore::append(const ListRecord& r) {
    std::lock_guard lock(mu_);
    if (!ids_.insert(r.list_id).second) return false;
    out_ << serialize_list_record(r) << '\n';
    out_.flush();
    return true;
}

bool CorpusStore::contains(const std::string& list_id) const {
    std::lock_guard lock(mu_);
    return ids_.count(list_id) > 0;
}

std::size_t CorpusStore::size() const {
    std::lock_guard lock(mu_);
    return ids_.size();
}

std::vector<ListRecord> load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read corpus: " + path.string());
    std::vector<ListRecord> out;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ListRecord r = parse_list_record(line, line_no);
        if (seen.insert(r.list_id).second) out.push_back(std::move(r));
    }
    return out;
}

FixtureIndex::FixtureIndex(std::filesystem::path root) : root_(std::move(root)) {
    const auto index_path = root_ / "index.json";
    std::ifstream in(index_path);
    if (!in) throw MissingFixtureError("fixture index not found: " + index_path.string());
    json idx;
    try {
        idx = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(0, index_path.string() + ": " + e.what());
    }
    for (const auto& p : idx.at("pages")) {
        files_[{p.at("endpoint").get<std::string>(), p.value("cursor", "")}] =
            root_ / p.at("file").get<std::string>();
    }
}

bool FixtureIndex::has(const std::string& endpoint, const std::string& cursor) const {
    return files_.count({endpoint, cursor}) > 0;
}

FixtureIndex::Page FixtureIndex::page(const std::string& endpoint, const std::string& cursor) const {
    auto it = files_.find({endpoint, cursor});
    if (it == files_.end()) {
        throw MissingFixtureError("no fixture page for endpoint '" + endpoint + "' cursor '" + cursor + "'");
    }
    std::ifstream in(it->second);
    if (!in) throw MissingFixtureError("fixture page missing on disk: " + it->second.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(0, it->second.string() + ": " + e.what());
    }
    Page page;
    page.data = j.value("data", json::array());
    if (auto n = j.find("next_cursor"); n != j.end() && n->is_string()) page.next_cursor = n->get<std::string>();
    return page;
}

ReplayListSource::ReplayListSource(std::filesystem::path root) : index_(std::move(root)) {}

SourcePage ReplayListSource::fetch(const std::string& position, std::size_t max) {
    auto [page_cursor, offset] = split_position(position);
    const auto page = index_.page("lists", page_cursor);
    SourcePage out;
    const std::size_t n = page.data.size();
    std::size_t i = std::min(offset, n);
    for (; i < n && out.records.size() < max; ++i) {
        out.records.push_back(list_record_from_json(page.data[i], i + 1));
    }
    if (i == n && page.next_cursor) {
        out.next_position = *page.next_cursor + "#0";
    } else {
        out.next_position = page_cursor + "#" + std::to_string(i);
        out.exhausted = (i == n);
    }
    return out;
}

JsonlListSource::JsonlListSource(std::filesystem::path path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read corpus: " + path.string());
    std::string line;
    while (std::getline(in, line)) lines_.push_back(line);
}

SourcePage JsonlListSource::fetch(const std::string& position, std::size_t max) {
    std::size_t i = position.empty() ? 0 : std::stoul(position);
    SourcePage out;
    for (; i < lines_.size() && out.records.size() < max; ++i) {
        if (lines_[i].empty()) continue;
        out.records.push_back(parse_list_record(lines_[i], i + 1));
    }
    out.next_position = std::to_string(i);
    out.exhausted = i >= lines_.size();
    return out;
}

std::string source_token_from_env() {
    const char* token = std::getenv("SOURCE_API_TOKEN");
    if (!token || !*token) throw PreconditionError("SOURCE_API_TOKEN is not set (required in live mode)");
    return token;
}

LiveListSource::LiveListSource(net::HttpTransport& transport, std::vector<std::string> candidate_ids,
                               std::string bearer_token, std::string api_base)
    : transport_(transport),
      candidates_(std::move(candidate_ids)),
      token_(std::move(bearer_token)),
      base_(std::move(api_base)) {}

net::Headers LiveListSource::auth() const { return {{"Authorization", "Bearer " + token_}}; }

std::optional<ListRecord> LiveListSource::lookup(const std::string& id) {
    const std::string url = base_ + "/2/lists/" + net::url_encode(id) +
                            "?list.fields=created_at,description,follower_count,owner_id";
    auto resp = transport_.get(url, auth());
    net::raise_for_status(resp, url);
    json body = json::parse(resp.body, nullptr, false);
    if (body.is_discarded()) throw net::TransientError(url + ": unparseable response");
    if (!body.contains("data")) return std::nullopt;  // deleted or private list

    const json& d = body["data"];
    json rec;
    rec["list_id"] = d.at("id");
    rec["title"] = d.value("name", "");
    rec["description"] = d.value("description", "");
    rec["creator_id"] = d.value("owner_id", "");
    rec["created_at"] = d.value("created_at", "");
    rec["follower_count"] = d.value("follower_count", 0);

    json members = json::array();
    std::string token;
    while (members.size() < kMaxMembers + 1) {
        std::string murl = base_ + "/2/lists/" + net::url_encode(id) + "/members?max_results=100";
        if (!token.empty()) murl += "&pagination_token=" + net::url_encode(token);
        auto mresp = transport_.get(murl, auth());
        net::raise_for_status(mresp, murl);
        json mb = json::parse(mresp.body, nullptr, false);
        if (mb.is_discarded()) throw net::TransientError(murl + ": unparseable response");
        for (const auto& u : mb.value("data", json::array())) members.push_back(u.at("id"));
        const auto meta = mb.value("meta", json::object());
        if (!meta.contains("next_token")) break;
        token = meta["next_token"].get<std::string>();
    }
    rec["member_ids"] = members;
    return list_record_from_json(rec);
}

SourcePage LiveListSource::fetch(const std::string& position, std::size_t max) {
    std::size_t i = position.empty() ? 0 : std::stoul(position);
    SourcePage out;
    // Each candidate is committed only after its lookup succeeds, so a
    // throttled call can be retried from the same position.
    for (; i < candidates_.size() && out.records.size() < max; ++i) {
        if (auto r = lookup(candidates_[i])) out.records.push_back(std::move(*r));
    }
    out.next_position = std::to_string(i);
    out.exhausted = i >= candidates_.size();
    return out;
}

CollectResult collect_lists(ListSource& source, CorpusStore& store, const SourceCursor& cursor,
                            std::size_t limit, const net::BackoffPolicy& backoff,
                            const net::Sleeper& sleep) {
    if (limit == 0) throw PreconditionError("collect limit must be positive");
    CollectResult result;
    result.cursor = cursor;
    while (result.records.size() < limit) {
        SourcePage page;
        try {
            page = net::with_backoff(backoff, sleep, [&] {
                return source.fetch(result.cursor.position, limit - result.records.size());
            });
        } catch (const Error& e) {
            result.error = e.what();
            return result;
        }
        const std::string previous = result.cursor.position;
        for (auto& r : page.records) {
            if (store.append(r)) ++result.stored;
            ++result.cursor.fetched_count;
            result.records.push_back(std::move(r));
        }
        result.cursor.position = page.next_position;
        if (page.exhausted) {
            result.exhausted = true;
            break;
        }
        if (page.records.empty() && page.next_position == previous) break;
    }
    return result;
}

ReplayProfileSource::ReplayProfileSource(std::filesystem::path root) {
    FixtureIndex index(std::move(root));
    std::string cursor;
    for (std::set<std::string> visited; visited.insert(cursor).second;) {
        const auto page = index.page("users", cursor);
        for (const auto& u : page.data) {
            AccountProfile p = account_profile_from_json(u);
            profiles_[p.account_id] = p;
        }
        if (!page.next_cursor) break;
        cursor = *page.next_cursor;
    }
}

std::map<std::string, AccountProfile> ReplayProfileSource::lookup(const std::vector<std::string>& ids) {
    std::map<std::string, AccountProfile> out;
    for (const auto& id : ids) {
        if (auto it = profiles_.find(id); it != profiles_.end()) out.emplace(id, it->second);
    }
    return out;
}

LiveProfileSource::LiveProfileSource(net::HttpTransport& transport, std::string bearer_token,
                                     std::string api_base)
    : transport_(transport), token_(std::move(bearer_token)), base_(std::move(api_base)) {}

std::map<std::string, AccountProfile> LiveProfileSource::lookup(const std::vector<std::string>& ids) {
    std::string joined;
    for (const auto& id : ids) joined += (joined.empty() ? "" : ",") + id;
    const std::string url = base_ + "/2/users?ids=" + net::url_encode(joined) + "&user.fields=public_metrics";
    auto resp = transport_.get(url, {{"Authorization", "Bearer " + token_}});
    net::raise_for_status(resp, url);
    json body = json::parse(resp.body, nullptr, false);
    if (body.is_discarded()) throw net::TransientError(url + ": unparseable response");

    std::map<std::string, AccountProfile> out;
    for (const auto& u : body.value("data", json::array())) {
        AccountProfile p;
        p.account_id = u.at("id").get<std::string>();
        p.username = u.value("username", "");
        p.status = AccountStatus::Active;
        const auto metrics = u.value("public_metrics", json::object());
        if (metrics.contains("followers_count")) p.follower_count = metrics["followers_count"].get<std::uint64_t>();
        if (metrics.contains("tweet_count")) p.tweet_count = metrics["tweet_count"].get<std::uint64_t>();
        out[p.account_id] = p;
    }
    for (const auto& e : body.value("errors", json::array())) {
        const std::string id = e.value("resource_id", e.value("value", ""));
        if (id.empty()) continue;
        AccountProfile p;
        p.account_id = id;
        p.status = e.value("detail", "").find("suspended") != std::string::npos ? AccountStatus::Suspended
                                                                                 : AccountStatus::NotFound;
        out[id] = p;
    }
    return out;
}

LookupError::LookupError(std::vector<std::string> unresolved)
    : Error([&] {
          std::string msg = "profile lookup failed after retries; unresolved ids:";
          for (const auto& id : unresolved) msg += " " + id;
          return msg;
      }()),
      unresolved_(std::move(unresolved)) {}

std::map<std::string, AccountProfile> lookup_profiles(ProfileSource& source, const std::set<std::string>& ids,
                                                      const net::BackoffPolicy& backoff,
                                                      const net::Sleeper& sleep) {
    if (ids.empty()) throw PreconditionError("lookup_profiles requires at least one id");
    std::map<std::string, AccountProfile> out;
    std::vector<std::string> unresolved;
    const std::vector<std::string> all(ids.begin(), ids.end());
    const std::size_t batch = std::max<std::size_t>(1, source.batch_size());
    for (std::size_t start = 0; start < all.size(); start += batch) {
        const std::vector<std::string> chunk(all.begin() + static_cast<std::ptrdiff_t>(start),
                                             all.begin() + static_cast<std::ptrdiff_t>(std::min(all.size(), start + batch)));
        try {
            auto found = net::with_backoff(backoff, sleep, [&] { return source.lookup(chunk); });
            for (const auto& id : chunk) {
                auto it = found.find(id);
                if (it != found.end()) {
                    AccountProfile p = it->second;
                    if (p.status != AccountStatus::Active) p.follower_count = p.tweet_count = std::nullopt;
                    out[id] = std::move(p);
                } else {
                    out[id] = AccountProfile{id, "", std::nullopt, std::nullopt, AccountStatus::NotFound};
                }
            }
        } catch (const net::RateLimited&) {
            unresolved.insert(unresolved.end(), chunk.begin(), chunk.end());
        } catch (const net::TransientError&) {
            unresolved.insert(unresolved.end(), chunk.begin(), chunk.end());
        } catch (const net::TransportError&) {
            unresolved.insert(unresolved.end(), chunk.begin(), chunk.end());
        }
    }
    if (!unresolved.empty()) throw LookupError(std::move(unresolved));
    return out;
}

}  // namespace scamhunt::corpus
