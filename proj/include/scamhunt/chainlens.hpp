#pragma once

#include "scamhunt/chain.hpp"
#include "scamhunt/decimal.hpp"
#include "scamhunt/extractor.hpp"
#include "scamhunt/net.hpp"
#include "scamhunt/timeutil.hpp"

#include "json.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace scamhunt::chainlens {

/// One native-coin movement between two addresses.
struct Transfer {
    Chain chain = Chain::BTC;
    std::string tx_hash;
    std::string from_addr;
    std::string to_addr;
    Decimal amount;  // native units (BTC, ETH, ...)
    Timestamp timestamp{};
    bool self_transfer = false;

    /// Throws PreconditionError when amount <= 0 or from == to without the flag.
    void check() const;

    nlohmann::ordered_json to_json() const;
    /// Throws SchemaError on missing or malformed fields.
    static Transfer from_json(const nlohmann::json& j);

    friend bool operator==(const Transfer&, const Transfer&) = default;
};

/// Address equality as the chain defines it (EVM hex is case-insensitive).
bool same_address(Chain chain, std::string_view a, std::string_view b);

bool is_inbound(const Transfer& t, std::string_view address);

struct TransferPage {
    std::vector<Transfer> transfers;
    std::optional<std::string> next_cursor;  // nullopt on the last page
    std::optional<std::size_t> declared_total;
};

/// Source of transfer history for one chain. `page` must be idempotent for a
/// given (address, cursor) so throttled calls can be retried.
class ExplorerClient {
public:
    virtual ~ExplorerClient() = default;
    virtual Chain chain() const = 0;
    virtual TransferPage page(const std::string& address, const std::string& cursor) = 0;
};

/// Stitched result did not match the count the source declared.
class PaginationError : public Error {
public:
    using Error::Error;
};

/// All transfers touching `address`, in source order with duplicate tx
/// hashes dropped. Rate limits and transient failures are retried.
std::vector<Transfer> fetch_transfers(ExplorerClient& client, const extractor::ChainAddress& address,
                                      const net::BackoffPolicy& backoff = {},
                                      const net::Sleeper& sleep = net::real_sleeper());

struct AddressHistory {
    extractor::ChainAddress address;
    std::vector<Transfer> transfers;
    std::optional<std::string> error;
};

/// Fetches every address; one worker per chain, chains in parallel. Output
/// order follows `addresses`. A failing address records its error and the
/// rest continue.
std::vector<AddressHistory> fetch_histories(std::map<Chain, ExplorerClient*> clients,
                                            const std::vector<extractor::ChainAddress>& addresses,
                                            const net::BackoffPolicy& backoff = {},
                                            const net::Sleeper& sleep = net::real_sleeper());

/// Fixture ledgers.
///
/// index.json: {"addresses": [{"address": "0x..", "chain": "ETH",
///              "pages": ["eth/0xc4be-1.jsonl", ...], "total": 4}, ...]}
/// A single-page entry may use "file" instead of "pages". Each page file is
/// JSONL with one Transfer object per line.
class ReplayExplorer final : public ExplorerClient {
public:
    ReplayExplorer(Chain chain, std::filesystem::path root);
    Chain chain() const override { return chain_; }
    TransferPage page(const std::string& address, const std::string& cursor) override;

private:
    struct Entry {
        std::vector<std::filesystem::path> pages;
        std::optional<std::size_t> total;
    };
    const Entry& entry(const std::string& address) const;

    Chain chain_;
    std::filesystem::path root_;
    std::map<std::string, Entry> entries_;  // keyed by lowercased address for EVM chains
};

/// Writes fixture ledgers in the layout ReplayExplorer reads.
class LedgerRecorder {
public:
    explicit LedgerRecorder(std::filesystem::path root);
    void record(const extractor::ChainAddress& address, const std::vector<Transfer>& transfers);

private:
    std::filesystem::path root_;
};

/// Live clients. Each owns a request-spacing limiter (default 4 req/s).
struct LiveOptions {
    double requests_per_second = 4.0;
    std::string api_key;
    std::string base_url;  // empty = public default for the chain
};

/// Etherscan-family account API (Etherscan for ETH, BscScan for BNB).
class EtherscanExplorer final : public ExplorerClient {
public:
    EtherscanExplorer(Chain chain, net::HttpTransport& transport, LiveOptions options,
                      net::Sleeper sleep = net::real_sleeper());
    Chain chain() const override { return chain_; }
    TransferPage page(const std::string& address, const std::string& cursor) override;

private:
    Chain chain_;
    net::HttpTransport& transport_;
    LiveOptions options_;
    net::RateLimiter limiter_;
};

/// Esplora API (blockstream.info) for Bitcoin.
class EsploraExplorer final : public ExplorerClient {
public:
    EsploraExplorer(net::HttpTransport& transport, LiveOptions options, net::Sleeper sleep = net::real_sleeper());
    Chain chain() const override { return Chain::BTC; }
    TransferPage page(const std::string& address, const std::string& cursor) override;

private:
    net::HttpTransport& transport_;
    LiveOptions options_;
    net::RateLimiter limiter_;
};

/// Blockfrost API for Cardano.
class BlockfrostExplorer final : public ExplorerClient {
public:
    BlockfrostExplorer(net::HttpTransport& transport, LiveOptions options, net::Sleeper sleep = net::real_sleeper());
    Chain chain() const override { return Chain::ADA; }
    TransferPage page(const std::string& address, const std::string& cursor) override;

private:
    nlohmann::json get(const std::string& path);

    net::HttpTransport& transport_;
    LiveOptions options_;
    net::RateLimiter limiter_;
};

/// rippled JSON-RPC account_tx for the XRP Ledger.
class RippledExplorer final : public ExplorerClient {
public:
    RippledExplorer(net::HttpTransport& transport, LiveOptions options, net::Sleeper sleep = net::real_sleeper());
    Chain chain() const override { return Chain::XRP; }
    TransferPage page(const std::string& address, const std::string& cursor) override;

private:
    net::HttpTransport& transport_;
    LiveOptions options_;
    net::RateLimiter limiter_;
};

/// Builds the live client for `chain`.
std::unique_ptr<ExplorerClient> make_live_explorer(Chain chain, net::HttpTransport& transport, LiveOptions options,
                                                   net::Sleeper sleep = net::real_sleeper());

struct UtxoLeg {
    std::string address;
    BigInt value;  // base units
};

/// Collapses a UTXO transaction into one transfer relative to `address`:
/// inbound when the address only receives (amount = outputs paid to it,
/// sender = first input), outbound when it spends (amount = outputs paid to
/// others, recipient = first such output). Returns nullopt when the address
/// is not involved or nothing moves.
std::optional<Transfer> collapse_utxo(Chain chain, const std::string& address, const std::string& tx_hash,
                                      Timestamp time, const std::vector<UtxoLeg>& inputs,
                                      const std::vector<UtxoLeg>& outputs);

/// Daily USD price band per unit of a chain's native coin.
struct PriceBand {
    Decimal low;
    Decimal high;
};

class PriceSeries {
public:
    /// CSV with header "chain,date,low_usd,high_usd". Throws ParseError /
    /// SchemaError on malformed rows, duplicates or a band with low > high.
    static PriceSeries parse_csv(std::string_view text);
    static PriceSeries load(const std::filesystem::path& path);

    void add(Chain chain, std::chrono::sys_days day, PriceBand band);
    const PriceBand* find(Chain chain, std::chrono::sys_days day) const;

    /// Exact day, or with `window_days` > 0 the closest covered day within
    /// the window (ties resolve to the earlier day).
    std::optional<std::pair<std::chrono::sys_days, PriceBand>> nearest(Chain chain, std::chrono::sys_days day,
                                                                       int window_days) const;
    std::size_t size() const noexcept { return bands_.size(); }

private:
    std::map<std::pair<Chain, std::chrono::sys_days>, PriceBand> bands_;
};

/// USD value band of one transfer. Values are exact; report them with
/// to_fixed(2).
struct UsdRange {
    Decimal min_usd;
    Decimal max_usd;
    std::string price_date;  // day whose band was used
    bool substituted = false;
};

struct PriceOptions {
    int nearest_day_window = 0;  // 0 = exact day only; the CLI flag sets 3
};

inline constexpr int kMaxNearestDayWindow = 3;

/// Throws PreconditionError for a non-positive amount and MissingPriceError
/// naming the uncovered "CHAIN YYYY-MM-DD".
UsdRange usd_range(const Transfer& transfer, const PriceSeries& prices, const PriceOptions& options = {});

/// Values every transfer, or throws one MissingPriceError listing all
/// uncovered (chain, day) pairs.
std::vector<UsdRange> usd_ranges(const std::vector<Transfer>& transfers, const PriceSeries& prices,
                                 const PriceOptions& options = {});

}  // namespace scamhunt::chainlens
