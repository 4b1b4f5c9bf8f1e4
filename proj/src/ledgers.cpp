#include "scamhunt/chainlens.hpp"
#include "scamhunt/errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

namespace scamhunt::chainlens {

using nlohmann::json;

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_evm(Chain c) { return c == Chain::ETH || c == Chain::BNB; }

std::string address_key(Chain chain, std::string_view address) {
    return is_evm(chain) ? lower(address) : std::string(address);
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw MissingFixtureError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::string& require_string(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string()) throw SchemaError(key, std::string("transfer needs string field '") + key + "'");
    return j[key].get_ref<const std::string&>();
}

json get_json(net::HttpTransport& transport, net::RateLimiter& limiter, const std::string& url,
              const net::Headers& headers = {}) {
    limiter.acquire();
    auto resp = transport.get(url, headers);
    net::raise_for_status(resp, url);
    json body = json::parse(resp.body, nullptr, false);
    if (body.is_discarded()) throw net::TransientError(url + ": unparseable response");
    return body;
}

std::size_t page_number(const std::string& cursor) {
    if (cursor.empty()) return 1;
    try {
        return std::stoul(cursor);
    } catch (const std::exception&) {
        throw PreconditionError("bad page cursor '" + cursor + "'");
    }
}

constexpr long long kRippleEpoch = 946684800;  // 2000-01-01T00:00:00Z

}  // namespace

void Transfer::check() const {
    if (amount.sign() <= 0) {
        throw PreconditionError("transfer " + tx_hash + " has non-positive amount " + amount.to_string());
    }
    if (!self_transfer && same_address(chain, from_addr, to_addr)) {
        throw PreconditionError("transfer " + tx_hash + " sends to its own source without the self_transfer flag");
    }
}

nlohmann::ordered_json Transfer::to_json() const {
    nlohmann::ordered_json j;
    j["chain"] = chain_name(chain);
    j["tx_hash"] = tx_hash;
    j["from_addr"] = from_addr;
    j["to_addr"] = to_addr;
    j["amount"] = amount.to_string();
    j["timestamp"] = format_rfc3339(timestamp);
    if (self_transfer) j["self_transfer"] = true;
    return j;
}

Transfer Transfer::from_json(const json& j) {
    if (!j.is_object()) throw SchemaError("", "transfer must be a JSON object");
    Transfer t;
    auto chain = parse_chain(require_string(j, "chain"));
    if (!chain) throw SchemaError("chain", "unknown chain '" + j["chain"].get<std::string>() + "'");
    t.chain = *chain;
    t.tx_hash = require_string(j, "tx_hash");
    t.from_addr = require_string(j, "from_addr");
    t.to_addr = require_string(j, "to_addr");
    std::optional<Decimal> amount;
    if (j.contains("amount") && j["amount"].is_string()) amount = Decimal::parse(j["amount"].get<std::string>());
    if (j.contains("amount") && j["amount"].is_number_integer()) amount = Decimal(j["amount"].get<long long>());
    if (!amount) throw SchemaError("amount", "transfer amount must be a decimal string");
    t.amount = *amount;
    auto ts = parse_rfc3339(require_string(j, "timestamp"));
    if (!ts) throw SchemaError("timestamp", "bad transfer timestamp '" + j["timestamp"].get<std::string>() + "'");
    t.timestamp = *ts;
    t.self_transfer = j.value("self_transfer", false);
    return t;
}

bool same_address(Chain chain, std::string_view a, std::string_view b) {
    return address_key(chain, a) == address_key(chain, b);
}

bool is_inbound(const Transfer& t, std::string_view address) {
    return same_address(t.chain, t.to_addr, address) && !t.self_transfer;
}

std::vector<Transfer> fetch_transfers(ExplorerClient& client, const extractor::ChainAddress& address,
                                      const net::BackoffPolicy& backoff, const net::Sleeper& sleep) {
    if (!address.checksum_ok) throw PreconditionError("address " + address.text + " failed checksum validation");
    if (client.chain() != address.chain) {
        throw PreconditionError(std::string("explorer for ") + std::string(chain_name(client.chain())) +
                                " cannot serve " + std::string(chain_name(address.chain)) + " address " + address.text);
    }
    std::vector<Transfer> out;
    std::unordered_set<std::string> seen;
    std::optional<std::size_t> declared;
    std::set<std::string> visited;
    std::string cursor;
    for (;;) {
        auto page = net::with_backoff(backoff, sleep, [&] { return client.page(address.text, cursor); });
        if (page.declared_total) declared = page.declared_total;
        for (auto& t : page.transfers) {
            if (t.chain != address.chain) throw SchemaError("chain", "transfer " + t.tx_hash + " is on another chain");
            t.check();
            if (seen.insert(t.tx_hash).second) out.push_back(std::move(t));
        }
        if (!page.next_cursor) break;
        if (!visited.insert(*page.next_cursor).second) {
            throw PaginationError("explorer repeated cursor '" + *page.next_cursor + "' for " + address.text);
        }
        cursor = *page.next_cursor;
    }
    if (declared && out.size() != *declared) {
        throw PaginationError("stitched " + std::to_string(out.size()) + " transfers for " + address.text +
                              " but the source declared " + std::to_string(*declared));
    }
    return out;
}

std::vector<AddressHistory> fetch_histories(std::map<Chain, ExplorerClient*> clients,
                                            const std::vector<extractor::ChainAddress>& addresses,
                                            const net::BackoffPolicy& backoff, const net::Sleeper& sleep) {
    std::vector<AddressHistory> out(addresses.size());
    std::map<Chain, std::vector<std::size_t>> by_chain;
    for (std::size_t i = 0; i < addresses.size(); ++i) {
        out[i].address = addresses[i];
        by_chain[addresses[i].chain].push_back(i);
    }
    auto run_chain = [&](Chain chain, const std::vector<std::size_t>& indices) {
        auto it = clients.find(chain);
        for (std::size_t i : indices) {
            if (it == clients.end() || !it->second) {
                out[i].error = "no explorer configured for " + std::string(chain_name(chain));
                continue;
            }
            try {
                out[i].transfers = fetch_transfers(*it->second, addresses[i], backoff, sleep);
            } catch (const std::exception& e) {
                out[i].error = e.what();
            }
        }
    };
    {
        std::vector<std::jthread> workers;
        for (const auto& [chain, indices] : by_chain) workers.emplace_back(run_chain, chain, std::cref(indices));
    }
    return out;
}

ReplayExplorer::ReplayExplorer(Chain chain, std::filesystem::path root) : chain_(chain), root_(std::move(root)) {
    const auto index_path = root_ / "index.json";
    if (!std::filesystem::exists(index_path)) return;
    json index = json::parse(read_file(index_path), nullptr, false);
    if (index.is_discarded()) throw ParseError(0, "corrupt ledger index " + index_path.string());
    for (const auto& e : index.value("addresses", json::array())) {
        auto c = parse_chain(e.value("chain", ""));
        if (!c) throw SchemaError("chain", "ledger index entry without a known chain");
        if (*c != chain_) continue;
        Entry entry;
        if (e.contains("pages")) {
            for (const auto& p : e["pages"]) entry.pages.push_back(p.get<std::string>());
        } else if (e.contains("file")) {
            entry.pages.push_back(e["file"].get<std::string>());
        }
        if (e.contains("total")) entry.total = e["total"].get<std::size_t>();
        entries_[address_key(chain_, e.at("address").get<std::string>())] = std::move(entry);
    }
}

const ReplayExplorer::Entry& ReplayExplorer::entry(const std::string& address) const {
    auto it = entries_.find(address_key(chain_, address));
    if (it == entries_.end()) {
        throw MissingFixtureError("no " + std::string(chain_name(chain_)) + " ledger fixture for " + address);
    }
    return it->second;
}

TransferPage ReplayExplorer::page(const std::string& address, const std::string& cursor) {
    const auto& e = entry(address);
    TransferPage out;
    out.declared_total = e.total;
    if (e.pages.empty()) return out;
    const std::size_t i = cursor.empty() ? 0 : page_number(cursor);
    if (i >= e.pages.size()) throw MissingFixtureError("ledger page " + cursor + " out of range for " + address);

    std::istringstream in(read_file(root_ / e.pages[i]));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw ParseError(lineno, "invalid JSON in " + e.pages[i].string());
        out.transfers.push_back(Transfer::from_json(j));
    }
    if (i + 1 < e.pages.size()) out.next_cursor = std::to_string(i + 1);
    return out;
}

LedgerRecorder::LedgerRecorder(std::filesystem::path root) : root_(std::move(root)) {}

void LedgerRecorder::record(const extractor::ChainAddress& address, const std::vector<Transfer>& transfers) {
    const std::string chain = lower(chain_name(address.chain));
    const std::filesystem::path rel = std::filesystem::path(chain) / (address.text + ".jsonl");
    std::filesystem::create_directories(root_ / chain);
    {
        std::ofstream out(root_ / rel, std::ios::binary | std::ios::trunc);
        for (const auto& t : transfers) out << t.to_json().dump() << "\n";
        if (!out) throw Error("cannot write " + (root_ / rel).string());
    }

    const auto index_path = root_ / "index.json";
    nlohmann::ordered_json index = {{"addresses", nlohmann::ordered_json::array()}};
    if (std::filesystem::exists(index_path)) {
        index = nlohmann::ordered_json::parse(read_file(index_path), nullptr, false);
        if (index.is_discarded()) throw ParseError(0, "corrupt ledger index " + index_path.string());
    }
    auto& list = index["addresses"];
    nlohmann::ordered_json entry;
    entry["address"] = address.text;
    entry["chain"] = chain_name(address.chain);
    entry["pages"] = {rel.generic_string()};
    entry["total"] = transfers.size();
    auto same = std::find_if(list.begin(), list.end(), [&](const auto& e) {
        return e.value("chain", "") == chain_name(address.chain) &&
               same_address(address.chain, e.value("address", ""), address.text);
    });
    if (same != list.end()) {
        *same = entry;
    } else {
        list.push_back(entry);
    }
    std::ofstream out(index_path, std::ios::binary | std::ios::trunc);
    out << index.dump(1) << "\n";
}

std::optional<Transfer> collapse_utxo(Chain chain, const std::string& address, const std::string& tx_hash,
                                      Timestamp time, const std::vector<UtxoLeg>& inputs,
                                      const std::vector<UtxoLeg>& outputs) {
    BigInt spent = 0, received = 0, to_others = 0;
    for (const auto& in : inputs) {
        if (in.address == address) spent += in.value;
    }
    std::string first_other;
    for (const auto& o : outputs) {
        if (o.address == address) {
            received += o.value;
        } else {
            to_others += o.value;
            if (first_other.empty()) first_other = o.address;
        }
    }
    Transfer t;
    t.chain = chain;
    t.tx_hash = tx_hash;
    t.timestamp = time;
    const unsigned decimals = chain_decimals(chain);
    if (spent == 0) {
        if (received == 0) return std::nullopt;
        auto sender = std::find_if(inputs.begin(), inputs.end(), [](const auto& l) { return !l.address.empty(); });
        t.from_addr = sender != inputs.end() ? sender->address : "coinbase";
        t.to_addr = address;
        t.amount = Decimal::from_base_units(received, decimals);
        return t;
    }
    t.from_addr = address;
    if (to_others == 0) {
        if (received == 0) return std::nullopt;
        t.to_addr = address;
        t.amount = Decimal::from_base_units(received, decimals);
        t.self_transfer = true;
        return t;
    }
    t.to_addr = first_other;
    t.amount = Decimal::from_base_units(to_others, decimals);
    return t;
}

EtherscanExplorer::EtherscanExplorer(Chain chain, net::HttpTransport& transport, LiveOptions options,
                                     net::Sleeper sleep)
    : chain_(chain), transport_(transport), options_(std::move(options)), limiter_(options_.requests_per_second, sleep) {
    if (!is_evm(chain)) throw PreconditionError("Etherscan-family explorers serve ETH and BNB only");
    if (options_.base_url.empty()) {
        options_.base_url = chain == Chain::ETH ? "https://api.etherscan.io/api" : "https://api.bscscan.com/api";
    }
}

TransferPage EtherscanExplorer::page(const std::string& address, const std::string& cursor) {
    constexpr std::size_t kPageSize = 1000;
    const std::size_t n = page_number(cursor);
    std::string url = options_.base_url + "?module=account&action=txlist&address=" + net::url_encode(address) +
                      "&startblock=0&endblock=99999999&page=" + std::to_string(n) +
                      "&offset=" + std::to_string(kPageSize) + "&sort=asc";
    if (!options_.api_key.empty()) url += "&apikey=" + net::url_encode(options_.api_key);
    const json body = get_json(transport_, limiter_, url);

    TransferPage out;
    const json result = body.value("result", json());
    if (body.value("status", "") != "1") {
        const std::string message = body.value("message", "");
        const std::string detail = result.is_string() ? result.get<std::string>() : message;
        if (lower(detail).find("rate limit") != std::string::npos) throw net::RateLimited();
        if (lower(message).find("no transactions") != std::string::npos) return out;
        throw net::PermanentError(url + ": " + detail);
    }
    if (!result.is_array()) throw net::TransientError(url + ": result is not a list");
    for (const auto& tx : result) {
        if (tx.value("isError", "0") == "1") continue;
        auto amount = Decimal::from_base_units(tx.value("value", ""), chain_decimals(chain_));
        if (!amount || amount->is_zero()) continue;  // contract calls move no native coin
        Transfer t;
        t.chain = chain_;
        t.tx_hash = tx.value("hash", "");
        t.from_addr = tx.value("from", "");
        t.to_addr = tx.value("to", "");
        t.amount = *amount;
        t.timestamp = Timestamp(std::chrono::seconds(std::stoll(tx.value("timeStamp", "0"))));
        t.self_transfer = same_address(chain_, t.from_addr, t.to_addr);
        out.transfers.push_back(std::move(t));
    }
    if (result.size() == kPageSize) out.next_cursor = std::to_string(n + 1);
    return out;
}

EsploraExplorer::EsploraExplorer(net::HttpTransport& transport, LiveOptions options, net::Sleeper sleep)
    : transport_(transport), options_(std::move(options)), limiter_(options_.requests_per_second, sleep) {
    if (options_.base_url.empty()) options_.base_url = "https://blockstream.info/api";
}

TransferPage EsploraExplorer::page(const std::string& address, const std::string& cursor) {
    constexpr std::size_t kPageSize = 25;  // fixed by the API
    std::string url = options_.base_url + "/address/" + address + "/txs/chain";
    if (!cursor.empty()) url += "/" + cursor;
    const json txs = get_json(transport_, limiter_, url);
    if (!txs.is_array()) throw net::TransientError(url + ": expected a list of transactions");

    TransferPage out;
    for (const auto& tx : txs) {
        std::vector<UtxoLeg> inputs, outputs;
        for (const auto& vin : tx.value("vin", json::array())) {
            const json prev = vin.value("prevout", json());
            if (!prev.is_object()) continue;  // coinbase
            inputs.push_back({prev.value("scriptpubkey_address", ""), BigInt(prev.value("value", 0ULL))});
        }
        for (const auto& vout : tx.value("vout", json::array())) {
            outputs.push_back({vout.value("scriptpubkey_address", ""), BigInt(vout.value("value", 0ULL))});
        }
        const auto status = tx.value("status", json::object());
        const Timestamp time(std::chrono::seconds(status.value("block_time", 0LL)));
        if (auto t = collapse_utxo(Chain::BTC, address, tx.value("txid", ""), time, inputs, outputs)) {
            out.transfers.push_back(std::move(*t));
        }
    }
    if (txs.size() == kPageSize) out.next_cursor = txs.back().value("txid", "");
    return out;
}

BlockfrostExplorer::BlockfrostExplorer(net::HttpTransport& transport, LiveOptions options, net::Sleeper sleep)
    : transport_(transport), options_(std::move(options)), limiter_(options_.requests_per_second, sleep) {
    if (options_.base_url.empty()) options_.base_url = "https://cardano-mainnet.blockfrost.io/api/v0";
}

json BlockfrostExplorer::get(const std::string& path) {
    return get_json(transport_, limiter_, options_.base_url + path, {{"project_id", options_.api_key}});
}

TransferPage BlockfrostExplorer::page(const std::string& address, const std::string& cursor) {
    constexpr std::size_t kPageSize = 100;
    const std::size_t n = page_number(cursor);
    TransferPage out;
    json txs;
    try {
        txs = get("/addresses/" + address + "/transactions?count=" + std::to_string(kPageSize) +
                  "&page=" + std::to_string(n) + "&order=asc");
    } catch (const net::PermanentError&) {
        // Blockfrost answers 404 for addresses that never appeared on chain.
        if (n == 1) return out;
        throw;
    }
    if (!txs.is_array()) throw net::TransientError("blockfrost: expected a list of transactions");

    auto lovelace = [](const json& leg) {
        BigInt total = 0;
        for (const auto& a : leg.value("amount", json::array())) {
            if (a.value("unit", "") == "lovelace") total += BigInt(a.value("quantity", "0"));
        }
        return total;
    };
    for (const auto& item : txs) {
        const std::string hash = item.value("tx_hash", "");
        const json utxos = get("/txs/" + hash + "/utxos");
        std::vector<UtxoLeg> inputs, outputs;
        for (const auto& in : utxos.value("inputs", json::array())) {
            inputs.push_back({in.value("address", ""), lovelace(in)});
        }
        for (const auto& o : utxos.value("outputs", json::array())) {
            outputs.push_back({o.value("address", ""), lovelace(o)});
        }
        const Timestamp time(std::chrono::seconds(item.value("block_time", 0LL)));
        if (auto t = collapse_utxo(Chain::ADA, address, hash, time, inputs, outputs)) {
            out.transfers.push_back(std::move(*t));
        }
    }
    if (txs.size() == kPageSize) out.next_cursor = std::to_string(n + 1);
    return out;
}

RippledExplorer::RippledExplorer(net::HttpTransport& transport, LiveOptions options, net::Sleeper sleep)
    : transport_(transport), options_(std::move(options)), limiter_(options_.requests_per_second, sleep) {
    if (options_.base_url.empty()) options_.base_url = "https://s1.ripple.com:51234/";
}

TransferPage RippledExplorer::page(const std::string& address, const std::string& cursor) {
    json params = {{"account", address}, {"ledger_index_min", -1}, {"ledger_index_max", -1},
                   {"limit", 200}, {"forward", true}};
    if (!cursor.empty()) {
        json marker = json::parse(cursor, nullptr, false);
        if (marker.is_discarded()) throw PreconditionError("bad account_tx marker " + cursor);
        params["marker"] = marker;
    }
    const json request = {{"method", "account_tx"}, {"params", json::array({params})}};

    limiter_.acquire();
    auto resp = transport_.post(options_.base_url, {}, request.dump(), "application/json");
    net::raise_for_status(resp, options_.base_url);
    const json body = json::parse(resp.body, nullptr, false);
    if (body.is_discarded()) throw net::TransientError(options_.base_url + ": unparseable response");
    const json result = body.value("result", json::object());
    if (result.value("status", "") != "success") {
        const std::string err = result.value("error", "unknown");
        if (err == "slowDown" || err == "tooBusy") throw net::RateLimited();
        if (err == "actNotFound") return {};
        throw net::PermanentError("account_tx " + address + ": " + err);
    }

    TransferPage out;
    for (const auto& item : result.value("transactions", json::array())) {
        const json tx = item.contains("tx") ? item["tx"] : item.value("tx_json", json::object());
        const json meta = item.value("meta", json::object());
        if (tx.value("TransactionType", "") != "Payment") continue;
        if (meta.value("TransactionResult", "") != "tesSUCCESS") continue;
        const json delivered = meta.contains("delivered_amount") ? meta["delivered_amount"] : tx.value("Amount", json());
        if (!delivered.is_string()) continue;  // issued currency, not XRP
        auto amount = Decimal::from_base_units(delivered.get<std::string>(), chain_decimals(Chain::XRP));
        if (!amount || amount->is_zero()) continue;
        Transfer t;
        t.chain = Chain::XRP;
        t.tx_hash = tx.contains("hash") ? tx["hash"].get<std::string>() : item.value("hash", "");
        t.from_addr = tx.value("Account", "");
        t.to_addr = tx.value("Destination", "");
        t.amount = *amount;
        t.timestamp = Timestamp(std::chrono::seconds(tx.value("date", 0LL) + kRippleEpoch));
        t.self_transfer = t.from_addr == t.to_addr;
        out.transfers.push_back(std::move(t));
    }
    if (result.contains("marker")) out.next_cursor = result["marker"].dump();
    return out;
}

std::unique_ptr<ExplorerClient> make_live_explorer(Chain chain, net::HttpTransport& transport, LiveOptions options,
                                                   net::Sleeper sleep) {
    switch (chain) {
        case Chain::ETH:
        case Chain::BNB: return std::make_unique<EtherscanExplorer>(chain, transport, std::move(options), std::move(sleep));
        case Chain::BTC: return std::make_unique<EsploraExplorer>(transport, std::move(options), std::move(sleep));
        case Chain::ADA: return std::make_unique<BlockfrostExplorer>(transport, std::move(options), std::move(sleep));
        case Chain::XRP: return std::make_unique<RippledExplorer>(transport, std::move(options), std::move(sleep));
    }
    throw PreconditionError("no live explorer for chain");
}

}  // namespace scamhunt::chainlens
