#include "scamhunt/forensics.hpp"

#include "scamhunt/errors.hpp"
#include "scamhunt/tables.hpp"
#include "scamhunt/textprep.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>
#include <tuple>
#include <unordered_set>

namespace scamhunt::forensics {

using chainlens::Transfer;

namespace {

std::string ratio_text(double r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", r);
    return buf;
}

/// Lowercase ASCII alphanumeric runs; anything else separates words.
std::vector<std::string> words_of(std::string_view text) {
    const std::string lower = textprep::lowercase(text);
    std::vector<std::string> out;
    std::string cur;
    for (char c : lower) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur += c;
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::string address_key(Chain chain, std::string_view address) {
    std::string key(address);
    if (chain == Chain::ETH || chain == Chain::BNB) {
        for (auto& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return key;
}

using ScamKeys = std::set<std::pair<Chain, std::string>>;

ScamKeys scam_keys(const std::vector<extractor::ChainAddress>& scam_set) {
    ScamKeys keys;
    for (const auto& a : scam_set) keys.emplace(a.chain, address_key(a.chain, a.text));
    return keys;
}

std::size_t chain_index(Chain c) {
    return static_cast<std::size_t>(std::find(kAllChains.begin(), kAllChains.end(), c) - kAllChains.begin());
}

}  // namespace

DistributionTable DistributionTable::from_counts(const std::vector<std::pair<std::string, std::size_t>>& counts) {
    DistributionTable t;
    for (const auto& [label, n] : counts) t.total += n;
    for (const auto& [label, n] : counts) {
        const double ratio = t.total == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(t.total);
        t.buckets.push_back({label, n, ratio});
    }
    return t;
}

const Bucket* DistributionTable::find(std::string_view label) const {
    auto it = std::find_if(buckets.begin(), buckets.end(), [&](const Bucket& b) { return b.label == label; });
    return it == buckets.end() ? nullptr : &*it;
}

std::string DistributionTable::to_csv() const {
    std::string out = "bucket,count,ratio\n";
    for (const auto& b : buckets) out += b.label + "," + std::to_string(b.count) + "," + ratio_text(b.ratio) + "\n";
    return out;
}

nlohmann::ordered_json DistributionTable::to_json() const {
    nlohmann::ordered_json j;
    j["total"] = total;
    j["buckets"] = nlohmann::ordered_json::array();
    for (const auto& b : buckets) {
        j["buckets"].push_back({{"label", b.label}, {"count", b.count}, {"ratio", ratio_text(b.ratio)}});
    }
    return j;
}

AssetTable AssetTable::parse(std::string_view tsv) {
    AssetTable table;
    std::istringstream in{std::string(tsv)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw ParseError(lineno, "asset row needs alias<TAB>tag");
        auto words = words_of(line.substr(0, tab));
        const std::string tag = line.substr(tab + 1);
        if (words.empty() || tag.empty()) throw ParseError(lineno, "empty alias or tag");
        table.aliases_.emplace_back(std::move(words), tag);
    }
    return table;
}

const AssetTable& AssetTable::builtin() {
    static const AssetTable table = parse(tables::load("assets.tsv"));
    return table;
}

std::set<std::string> AssetTable::categorize(std::string_view text) const {
    const auto words = words_of(text);
    std::set<std::string> tags;
    for (const auto& [alias, tag] : aliases_) {
        if (alias.size() > words.size()) continue;
        for (std::size_t i = 0; i + alias.size() <= words.size(); ++i) {
            if (std::equal(alias.begin(), alias.end(), words.begin() + static_cast<std::ptrdiff_t>(i))) {
                tags.insert(tag);
                break;
            }
        }
    }
    return tags;
}

std::set<std::string> crypto_category(std::string_view title, const AssetTable& assets) {
    return assets.categorize(title);
}

std::string join_categories(const std::set<std::string>& tags) {
    std::string out;
    for (const auto& t : tags) out += (out.empty() ? "" : " & ") + t;
    return out;
}

DistributionTable timeline_histogram(const std::vector<corpus::ListRecord>& lists, Granularity granularity) {
    using namespace std::chrono;
    std::map<year_month, std::size_t> by_month;
    for (const auto& l : lists) {
        const year_month_day ymd{floor<days>(l.created_at)};
        const year_month key = granularity == Granularity::Year ? ymd.year() / January : ymd.year() / ymd.month();
        ++by_month[key];
    }
    std::vector<std::pair<std::string, std::size_t>> counts;
    if (by_month.empty()) return DistributionTable::from_counts(counts);
    const auto step = granularity == Granularity::Year ? months(12) : months(1);
    for (auto ym = by_month.begin()->first; ym <= by_month.rbegin()->first; ym += step) {
        char label[16];
        if (granularity == Granularity::Year) {
            std::snprintf(label, sizeof label, "%d", static_cast<int>(ym.year()));
        } else {
            std::snprintf(label, sizeof label, "%04d-%02u", static_cast<int>(ym.year()),
                          static_cast<unsigned>(ym.month()));
        }
        auto it = by_month.find(ym);
        counts.emplace_back(label, it == by_month.end() ? 0 : it->second);
    }
    return DistributionTable::from_counts(counts);
}

DistributionTable creator_distribution(const std::vector<corpus::ListRecord>& scam_lists) {
    std::map<std::string, std::size_t> per_creator;
    for (const auto& l : scam_lists) ++per_creator[l.creator_id];
    std::size_t one = 0, two = 0, more = 0;
    for (const auto& [creator, n] : per_creator) {
        (n == 1 ? one : n == 2 ? two : more) += 1;
    }
    return DistributionTable::from_counts({{"1", one}, {"2", two}, {">2", more}});
}

DistributionTable member_distribution(const std::vector<corpus::ListRecord>& scam_lists) {
    std::size_t low = 0, mid = 0, high = 0;
    for (const auto& l : scam_lists) {
        const auto n = l.member_ids.size();
        (n <= 50 ? low : n <= 100 ? mid : high) += 1;
    }
    return DistributionTable::from_counts({{"0-50", low}, {"50-100", mid}, {">100", high}});
}

DistributionTable follower_distribution(const std::vector<corpus::ListRecord>& scam_lists) {
    std::array<std::size_t, 5> n{};
    for (const auto& l : scam_lists) ++n[std::min<std::uint64_t>(l.follower_count, 4)];
    return DistributionTable::from_counts({{"0", n[0]}, {"1", n[1]}, {"2", n[2]}, {"3", n[3]}, {">3", n[4]}});
}

std::vector<UrlFrequency> url_frequency(const std::vector<corpus::ListRecord>& scam_lists,
                                        const std::map<std::string, std::vector<std::string>>& urls_by_list,
                                        const AssetTable& assets) {
    std::map<std::string, UrlFrequency> by_url;
    std::set<std::pair<std::string, std::string>> counted;  // (url, list_id)
    for (const auto& l : scam_lists) {
        auto it = urls_by_list.find(l.list_id);
        if (it == urls_by_list.end()) continue;
        const auto tags = crypto_category(l.title, assets);
        for (const auto& url : it->second) {
            if (!counted.emplace(url, l.list_id).second) continue;
            auto& row = by_url[url];
            row.url = url;
            ++row.list_count;
            row.categories.insert(tags.begin(), tags.end());
        }
    }
    std::vector<UrlFrequency> out;
    for (auto& [url, row] : by_url) out.push_back(std::move(row));
    std::stable_sort(out.begin(), out.end(),
                     [](const UrlFrequency& a, const UrlFrequency& b) { return a.list_count > b.list_count; });
    return out;
}

std::size_t unique_member_reach(const std::vector<corpus::ListRecord>& scam_lists) {
    std::unordered_set<std::string> members;
    for (const auto& l : scam_lists) members.insert(l.member_ids.begin(), l.member_ids.end());
    return members.size();
}

Partition filter_internal(const std::vector<Transfer>& transfers, const std::vector<extractor::ChainAddress>& scam_set) {
    if (scam_set.empty()) throw PreconditionError("internal-transfer filtering needs at least one scam address");
    const auto keys = scam_keys(scam_set);
    Partition out;
    std::set<std::tuple<Chain, std::string, std::string, std::string>> seen;
    for (const auto& t : transfers) {
        const auto from = address_key(t.chain, t.from_addr);
        const auto to = address_key(t.chain, t.to_addr);
        if (!seen.emplace(t.chain, t.tx_hash, from, to).second) continue;
        const bool from_scam = keys.contains({t.chain, from});
        const bool to_scam = keys.contains({t.chain, to});
        if (from_scam && to_scam) {
            out.internal.push_back(t);
        } else if (to_scam) {
            out.victim.push_back(t);
        } else {
            out.ignored.push_back(t);
        }
    }
    return out;
}

std::vector<VictimStats> victim_stats(const std::vector<Transfer>& victim_transfers,
                                      const chainlens::PriceSeries& prices, const chainlens::PriceOptions& options) {
    std::vector<VictimStats> rows;
    for (Chain c : kAllChains) {
        VictimStats row;
        row.chain = c;
        rows.push_back(std::move(row));
    }
    const auto usd = chainlens::usd_ranges(victim_transfers, prices, options);
    std::array<std::set<std::string>, kAllChains.size()> senders;
    for (std::size_t i = 0; i < victim_transfers.size(); ++i) {
        const auto& t = victim_transfers[i];
        const auto idx = chain_index(t.chain);
        auto& row = rows[idx];
        ++row.victim_tx_count;
        senders[idx].insert(address_key(t.chain, t.from_addr));
        row.total_amount += t.amount;
        row.usd_min += usd[i].min_usd;
        row.usd_max += usd[i].max_usd;
    }
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].victim_address_count = senders[i].size();
    return rows;
}

std::vector<VictimStats> chain_summary(const Partition& partition, const std::vector<extractor::ChainAddress>& scam_set,
                                       const chainlens::PriceSeries& prices, const chainlens::PriceOptions& options) {
    auto rows = victim_stats(partition.victim, prices, options);
    for (const auto& t : partition.internal) ++rows[chain_index(t.chain)].internal_tx_count;
    for (const auto& [chain, key] : scam_keys(scam_set)) ++rows[chain_index(chain)].scam_address_count;
    return rows;
}

std::string format_thousands(const Decimal& usd) { return usd.shifted(-3).to_fixed(1) + "K"; }

std::string ProfitReport::to_csv() const {
    std::string out =
        "scam_type,cryptocurrency,scam_addresses,internal_txs,victim_txs,victim_addresses,total_amount,"
        "usd_min,usd_max,usd_range\n";
    auto line = [&](std::string_view type, std::string_view crypto, const std::string& counts,
                    const std::string& amount, const Decimal& lo, const Decimal& hi) {
        out += std::string(type) + "," + std::string(crypto) + "," + counts + "," + amount + "," + lo.to_fixed(2) +
               "," + hi.to_fixed(2) + "," + format_thousands(lo) + " - " + format_thousands(hi) + "\n";
    };
    std::size_t scam = 0, internal = 0, txs = 0, victims = 0;
    for (const auto& r : rows) {
        const std::string crypto = std::string(chain_long_name(r.chain)) + " (" + std::string(chain_name(r.chain)) + ")";
        line("Free giveaway", crypto,
             std::to_string(r.scam_address_count) + "," + std::to_string(r.internal_tx_count) + "," +
                 std::to_string(r.victim_tx_count) + "," + std::to_string(r.victim_address_count),
             r.total_amount.to_string(), r.usd_min, r.usd_max);
        scam += r.scam_address_count;
        internal += r.internal_tx_count;
        txs += r.victim_tx_count;
        victims += r.victim_address_count;
    }
    line("TOTAL", "",
         std::to_string(scam) + "," + std::to_string(internal) + "," + std::to_string(txs) + "," +
             std::to_string(victims),
         "", total_min, total_max);
    return out;
}

nlohmann::ordered_json ProfitReport::to_json() const {
    nlohmann::ordered_json j;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        j["rows"].push_back({{"chain", chain_name(r.chain)},
                             {"scam_addresses", r.scam_address_count},
                             {"internal_txs", r.internal_tx_count},
                             {"victim_txs", r.victim_tx_count},
                             {"victim_addresses", r.victim_address_count},
                             {"total_amount", r.total_amount.to_string()},
                             {"usd_min", r.usd_min.to_fixed(2)},
                             {"usd_max", r.usd_max.to_fixed(2)}});
    }
    j["total_usd_min"] = total_min.to_fixed(2);
    j["total_usd_max"] = total_max.to_fixed(2);
    j["total_usd_range"] = grand_min() + " - " + grand_max();
    return j;
}

ProfitReport profit_report(const std::vector<VictimStats>& stats) {
    ProfitReport report;
    std::set<Chain> chains;
    for (const auto& s : stats) {
        if (!chains.insert(s.chain).second) {
            throw PreconditionError("profit report has two rows for " + std::string(chain_name(s.chain)));
        }
        report.total_min += s.usd_min;
        report.total_max += s.usd_max;
    }
    report.rows = stats;
    return report;
}

std::vector<CrossChainVictim> cross_chain_victims(const std::vector<Transfer>& victim_transfers) {
    std::map<std::string, std::set<Chain>> chains_by_sender;
    for (const auto& t : victim_transfers) {
        const bool evm = t.chain == Chain::ETH || t.chain == Chain::BNB;
        chains_by_sender[address_key(evm ? Chain::ETH : t.chain, t.from_addr)].insert(t.chain);
    }
    std::vector<CrossChainVictim> out;
    for (auto& [address, chains] : chains_by_sender) {
        if (chains.size() > 1) out.push_back({address, std::move(chains)});
    }
    return out;
}

std::vector<AddressCount> address_counts(const std::vector<extractor::ChainAddress>& addresses) {
    std::array<std::set<std::string>, kAllChains.size()> raw, valid;
    for (const auto& a : addresses) {
        const auto idx = chain_index(a.chain);
        const auto key = address_key(a.chain, a.text);
        raw[idx].insert(key);
        if (a.checksum_ok) valid[idx].insert(key);
    }
    std::vector<AddressCount> out;
    for (std::size_t i = 0; i < kAllChains.size(); ++i) out.push_back({kAllChains[i], raw[i].size(), valid[i].size()});
    return out;
}

}  // namespace scamhunt::forensics
