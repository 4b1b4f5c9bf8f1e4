#pragma once

#include "scamhunt/chainlens.hpp"
#include "scamhunt/corpus.hpp"
#include "scamhunt/decimal.hpp"
#include "scamhunt/extractor.hpp"

#include "json.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace scamhunt::forensics {

struct Bucket {
    std::string label;
    std::size_t count = 0;
    double ratio = 0.0;  // count / total; 0 when the table is empty
};

/// Ordered buckets whose counts sum to `total`.
struct DistributionTable {
    std::vector<Bucket> buckets;
    std::size_t total = 0;

    static DistributionTable from_counts(const std::vector<std::pair<std::string, std::size_t>>& counts);
    const Bucket* find(std::string_view label) const;
    /// "bucket,count,ratio" with ratios to four decimals.
    std::string to_csv() const;
    nlohmann::ordered_json to_json() const;
};

/// Asset alias table: "alias<TAB>TAG" rows, "#" comments.
class AssetTable {
public:
    static AssetTable parse(std::string_view tsv);
    static const AssetTable& builtin();

    /// Tags whose alias occurs as a whole word sequence in `text`,
    /// case-insensitively.
    std::set<std::string> categorize(std::string_view text) const;
    std::size_t size() const noexcept { return aliases_.size(); }

private:
    std::vector<std::pair<std::vector<std::string>, std::string>> aliases_;  // alias words -> tag
};

std::set<std::string> crypto_category(std::string_view title, const AssetTable& assets = AssetTable::builtin());

/// "BTC & ETH"; empty set gives "".
std::string join_categories(const std::set<std::string>& tags);

// ---- list analytics ----

enum class Granularity { Year, Month };

/// Buckets by UTC year ("2022") or month ("2022-02") of created_at, with
/// zero-count buckets filling every gap between the first and last.
DistributionTable timeline_histogram(const std::vector<corpus::ListRecord>& lists, Granularity granularity);

/// Creators bucketed by how many of the given lists they created: 1, 2, >2.
DistributionTable creator_distribution(const std::vector<corpus::ListRecord>& scam_lists);

/// Member buckets "0-50" (<= 50), "50-100" (51..100), ">100".
DistributionTable member_distribution(const std::vector<corpus::ListRecord>& scam_lists);

/// Follower buckets "0", "1", "2", "3", ">3".
DistributionTable follower_distribution(const std::vector<corpus::ListRecord>& scam_lists);

struct UrlFrequency {
    std::string url;
    std::size_t list_count = 0;
    std::set<std::string> categories;  // union over the lists carrying the URL
};

/// Distinct lists per URL, most frequent first (ties by URL).
/// `urls_by_list` maps list_id to the normalized URLs found in it.
std::vector<UrlFrequency> url_frequency(const std::vector<corpus::ListRecord>& scam_lists,
                                        const std::map<std::string, std::vector<std::string>>& urls_by_list,
                                        const AssetTable& assets = AssetTable::builtin());

/// Size of the union of member ids.
std::size_t unique_member_reach(const std::vector<corpus::ListRecord>& scam_lists);

struct ScamRate {
    std::size_t total = 0;
    std::size_t scam = 0;
    double ratio() const { return total == 0 ? 0.0 : static_cast<double>(scam) / static_cast<double>(total); }
};

// ---- ledger analytics ----

/// Every distinct transfer lands in exactly one of the three groups.
struct Partition {
    std::vector<chainlens::Transfer> victim;    // outsider -> scam address
    std::vector<chainlens::Transfer> internal;  // scam address -> scam address
    std::vector<chainlens::Transfer> ignored;   // scam address -> outsider, or unrelated
};

/// Transfers repeated across address histories (same chain, hash, sender
/// and recipient) are counted once. Throws PreconditionError for an empty
/// scam set.
Partition filter_internal(const std::vector<chainlens::Transfer>& transfers,
                          const std::vector<extractor::ChainAddress>& scam_set);

struct VictimStats {
    Chain chain = Chain::BTC;
    std::size_t scam_address_count = 0;
    std::size_t internal_tx_count = 0;
    std::size_t victim_tx_count = 0;
    std::size_t victim_address_count = 0;
    Decimal total_amount;
    Decimal usd_min;
    Decimal usd_max;
};

/// One row per chain (all five, in fixed order). Victim identity is the
/// sender address. Missing prices raise one MissingPriceError for all of
/// them.
std::vector<VictimStats> victim_stats(const std::vector<chainlens::Transfer>& victim_transfers,
                                      const chainlens::PriceSeries& prices,
                                      const chainlens::PriceOptions& options = {});

/// victim_stats plus internal-transfer and scam-address counts per chain.
std::vector<VictimStats> chain_summary(const Partition& partition,
                                       const std::vector<extractor::ChainAddress>& scam_set,
                                       const chainlens::PriceSeries& prices,
                                       const chainlens::PriceOptions& options = {});

/// "85.2K": USD in thousands, rounded half away from zero to one decimal.
std::string format_thousands(const Decimal& usd);

struct ProfitReport {
    std::vector<VictimStats> rows;
    Decimal total_min;  // exact sums of the row values
    Decimal total_max;

    std::string grand_min() const { return format_thousands(total_min); }
    std::string grand_max() const { return format_thousands(total_max); }
    /// One row per chain followed by a TOTAL row.
    std::string to_csv() const;
    nlohmann::ordered_json to_json() const;
};

/// Throws PreconditionError when a chain appears twice.
ProfitReport profit_report(const std::vector<VictimStats>& stats);

struct CrossChainVictim {
    std::string address;
    std::set<Chain> chains;
};

/// Sender addresses seen paying scam addresses on more than one chain.
/// Joins on the address string only (EVM hex compared case-insensitively).
std::vector<CrossChainVictim> cross_chain_victims(const std::vector<chainlens::Transfer>& victim_transfers);

struct AddressCount {
    Chain chain = Chain::BTC;
    std::size_t candidates = 0;  // grammar matches, checksum ignored
    std::size_t validated = 0;   // checksum_ok
};

/// Distinct address counts per chain, before and after checksum filtering.
std::vector<AddressCount> address_counts(const std::vector<extractor::ChainAddress>& addresses);

}  // namespace scamhunt::forensics
