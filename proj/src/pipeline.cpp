#include "scamhunt/pipeline.hpp"

#include "scamhunt/chainlens.hpp"
#include "scamhunt/corpus.hpp"
#include "scamhunt/extractor.hpp"
#include "scamhunt/forensics.hpp"
#include "scamhunt/hashing.hpp"
#include "scamhunt/tables.hpp"
#include "scamhunt/textprep.hpp"
#include "scamhunt/timeutil.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace scamhunt::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

// ---- config helpers ----

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

bool looks_like_secret(std::string_view key) {
    for (std::string_view marker : {"token", "secret", "password", "api_key", "apikey", "project_id"}) {
        if (key.find(marker) != std::string_view::npos) return true;
    }
    return false;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end) throw ConfigError(key + ": '" + value + "' is not a valid number");
    return out;
}

// ---- artifact I/O ----

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out.flush()) throw Error("cannot write " + path.string());
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("missing artifact " + path.string() + " (run the earlier stage first)");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <typename Rows>
void write_jsonl(const fs::path& path, const Rows& rows) {
    std::string text;
    for (const auto& row : rows) text += row.dump() + "\n";
    write_text(path, text);
}

std::vector<json> read_jsonl(const fs::path& path) {
    std::istringstream in(read_text(path));
    std::vector<json> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            rows.push_back(json::parse(line));
        } catch (const json::parse_error& e) {
            throw ParseError(lineno, path.filename().string() + ": " + e.what());
        }
    }
    return rows;
}

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> cells(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cells.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cells.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.emplace_back();
        } else {
            cells.back() += c;
        }
    }
    return cells;
}

std::string getenv_or_empty(const char* name) {
    const char* v = std::getenv(name);
    return v ? v : "";
}

const net::Sleeper& no_sleep() {
    static const net::Sleeper s = [](std::chrono::milliseconds) {};
    return s;
}

// ---- shared stage inputs ----

struct AddressRow {
    std::string list_id;
    std::string url;
    extractor::ChainAddress address;
};

std::vector<AddressRow> read_address_rows(const fs::path& path) {
    std::istringstream in(read_text(path));
    std::vector<AddressRow> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        if (++lineno == 1 || line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 5) throw ParseError(lineno, "addresses.csv: expected 5 columns");
        const auto chain = parse_chain(cells[2]);
        if (!chain) throw ParseError(lineno, "addresses.csv: unknown chain '" + cells[2] + "'");
        rows.push_back({cells[0], cells[1], {*chain, cells[3], cells[4] == "true"}});
    }
    return rows;
}

/// Distinct validated addresses, sorted.
std::vector<extractor::ChainAddress> scam_set_of(const std::vector<AddressRow>& rows) {
    std::set<extractor::ChainAddress> set;
    for (const auto& r : rows) {
        if (r.address.checksum_ok) set.insert(r.address);
    }
    return {set.begin(), set.end()};
}

std::set<std::string> scam_list_ids(const fs::path& classified) {
    std::set<std::string> ids;
    for (const auto& row : read_jsonl(classified)) {
        if (row.at("label") == "scam") ids.insert(row.at("list_id").get<std::string>());
    }
    return ids;
}

}  // namespace

// ---- config ----

std::map<std::string, std::string> parse_key_values(std::string_view text) {
    std::map<std::string, std::string> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view body = line;
        bool in_quotes = false;
        for (std::size_t i = 0; i < body.size(); ++i) {
            if (body[i] == '"') in_quotes = !in_quotes;
            if (body[i] == '#' && !in_quotes) {
                body = body.substr(0, i);
                break;
            }
        }
        const auto stripped = trim(body);
        if (stripped.empty()) continue;
        if (stripped.front() == '[') throw ConfigError("line " + std::to_string(lineno) + ": tables are not supported");
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const auto key = trim(std::string_view(stripped).substr(0, eq));
        auto value = trim(std::string_view(stripped).substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        if (!out.emplace(key, value).second) {
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
    }
    return out;
}

PipelineConfig PipelineConfig::from_pairs(const std::map<std::string, std::string>& pairs, const fs::path& base_dir) {
    PipelineConfig c;
    auto path_of = [&](const std::string& v) { return v.empty() ? fs::path{} : (base_dir / v).lexically_normal(); };
    for (const auto& [key, value] : pairs) {
        if (looks_like_secret(key)) {
            throw ConfigError("'" + key + "' looks like a credential; secrets are read from the environment only");
        }
        if (key == "corpus") c.corpus = path_of(value);
        else if (key == "labeled") c.labeled = path_of(value);
        else if (key == "model") c.model = path_of(value);
        else if (key == "pages") c.pages = path_of(value);
        else if (key == "ledgers") c.ledgers = path_of(value);
        else if (key == "prices") c.prices = path_of(value);
        else if (key == "out") c.out = path_of(value);
        else if (key == "emoji_table") c.emoji_table = path_of(value);
        else if (key == "slang_table") c.slang_table = path_of(value);
        else if (key == "asset_table") c.asset_table = path_of(value);
        else if (key == "candidate_ids") c.candidate_ids = path_of(value);
        else if (key == "mode") {
            if (value == "replay") c.mode = FetchMode::Replay;
            else if (value == "live") c.mode = FetchMode::Live;
            else throw ConfigError("mode must be 'replay' or 'live', got '" + value + "'");
        } else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
        else if (key == "folds") c.folds = parse_number<std::size_t>(key, value);
        else if (key == "nearest_day") c.nearest_day = parse_number<int>(key, value);
        else if (key == "collect_limit") c.collect_limit = parse_number<std::size_t>(key, value);
        else if (key == "epochs") c.train.epochs = parse_number<int>(key, value);
        else if (key == "learning_rate") c.train.learning_rate = parse_number<double>(key, value);
        else if (key == "l2") c.train.l2 = parse_number<double>(key, value);
        else if (key == "threshold") c.train.threshold = parse_number<double>(key, value);
        else throw ConfigError("unknown config key '" + key + "'");
        if (key != "out") c.echo[key] = value;
    }
    if (c.folds < 2) throw ConfigError("folds must be at least 2");
    if (c.nearest_day < 0 || c.nearest_day > chainlens::kMaxNearestDayWindow) {
        throw ConfigError("nearest_day must be between 0 and " + std::to_string(chainlens::kMaxNearestDayWindow));
    }
    if (c.train.epochs <= 0 || c.train.learning_rate <= 0 || c.train.l2 < 0 || c.train.threshold <= 0 ||
        c.train.threshold >= 1) {
        throw ConfigError("classifier settings out of range");
    }
    if (c.seed) c.train.seed = *c.seed;
    if (c.mode == FetchMode::Replay) {
        for (const auto* root : {&c.corpus, &c.pages, &c.ledgers}) {
            if (!root->empty() && !fs::exists(*root)) throw ConfigError("fixture root " + root->string() + " does not exist");
        }
    }
    return c;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return from_pairs(parse_key_values(ss.str()), path.parent_path());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void PipelineConfig::require(std::string_view stage) const {
    auto need = [&](const fs::path& p, const char* key) {
        if (p.empty()) throw ConfigError(std::string(stage) + " needs '" + key + "' in the config");
        if (!fs::exists(p)) throw ConfigError(std::string(key) + " path " + p.string() + " does not exist");
    };
    if (stage == "collect") {
        if (mode == FetchMode::Replay) need(corpus, "corpus");
        else need(candidate_ids, "candidate_ids");
    } else if (stage == "train" || stage == "cv") {
        if (!seed) throw ConfigError(std::string(stage) + " needs a seed (config 'seed' or --seed)");
        need(labeled, "labeled");
    } else if (stage == "extract") {
        if (mode == FetchMode::Replay) need(pages, "pages");
    } else if (stage == "trace") {
        if (mode == FetchMode::Replay) need(ledgers, "ledgers");
    } else if (stage == "report") {
        if (!prices.empty()) need(prices, "prices");
    }
}

fs::path PipelineConfig::model_path() const { return model.empty() ? out / "model.json" : model; }

TransportFactory default_transport_factory() {
    return [] { return std::make_unique<net::HttplibTransport>(); };
}

// ---- pipeline ----

Pipeline::Pipeline(PipelineConfig config, TransportFactory transports)
    : config_(std::move(config)), transports_(std::move(transports)) {}

net::HttpTransport& Pipeline::transport() {
    if (config_.mode == FetchMode::Replay) throw Error("network transport requested in replay mode");
    if (!transport_) transport_ = transports_();
    return *transport_;
}

textprep::Normalizer Pipeline::make_normalizer() {
    auto emoji = textprep::EmojiTable::parse(tables::load(
        "emoji.tsv", config_.emoji_table.empty() ? std::nullopt : std::optional(config_.emoji_table)));
    auto slang = textprep::SlangTable::parse(tables::load(
        "slang.tsv", config_.slang_table.empty() ? std::nullopt : std::optional(config_.slang_table)));
    std::shared_ptr<textprep::Translator> translator = std::make_shared<textprep::IdentityTranslator>();
    if (const auto endpoint = getenv_or_empty("TRANSLATE_ENDPOINT");
        config_.mode == FetchMode::Live && !endpoint.empty()) {
        translator = std::make_shared<textprep::HttpTranslator>(transport(), endpoint,
                                                                getenv_or_empty("TRANSLATE_API_KEY"));
    }
    return textprep::Normalizer(std::move(emoji), std::move(slang), translator);
}

std::vector<classifier::LabeledExample> Pipeline::labeled_examples() {
    auto labeled = classifier::load_labeled(config_.labeled);
    const auto normalizer = make_normalizer();
    for (auto& e : labeled) e.text = normalizer.normalize_text(e.text, "");
    return labeled;
}

void Pipeline::collect() {
    config_.require("collect");
    std::unique_ptr<corpus::ListSource> source;
    if (config_.mode == FetchMode::Live) {
        std::vector<std::string> ids;
        std::istringstream in(read_text(config_.candidate_ids));
        for (std::string id; std::getline(in, id);) {
            if (auto t = trim(id); !t.empty()) ids.push_back(t);
        }
        std::string token;
        try {
            token = corpus::source_token_from_env();
        } catch (const PreconditionError& e) {
            throw ConfigError(e.what());
        }
        source = std::make_unique<corpus::LiveListSource>(transport(), std::move(ids), std::move(token));
    } else if (fs::is_directory(config_.corpus)) {
        source = std::make_unique<corpus::ReplayListSource>(config_.corpus);
    } else {
        source = std::make_unique<corpus::JsonlListSource>(config_.corpus);
    }

    // a fresh store each run so a rerun reproduces the artifact
    fs::create_directories(config_.out);
    fs::remove(out(artifact::kLists));
    corpus::CorpusStore store(out(artifact::kLists));
    const auto& sleep = config_.mode == FetchMode::Live ? net::real_sleeper() : no_sleep();
    const auto result = corpus::collect_lists(*source, store, {}, config_.collect_limit, {}, sleep);
    ojson cursor = result.cursor.to_json();
    cursor["exhausted"] = result.exhausted;
    write_text(out(artifact::kCursor), cursor.dump(2) + "\n");
    if (result.error) throw Error("collect: " + *result.error);
}

void Pipeline::prep() {
    config_.require("prep");
    const auto lists = corpus::load_corpus(out(artifact::kLists));
    const auto normalizer = make_normalizer();
    std::vector<textprep::NormalizedText> texts;
    texts.reserve(lists.size());
    for (const auto& l : lists) texts.push_back(normalizer.normalize(l.list_id, l.title, l.description));

    std::vector<ojson> rows;
    for (const auto& t : textprep::dedup_and_filter(std::move(texts))) {
        rows.push_back({{"list_id", t.source_list_id}, {"text", t.text}, {"word_count", t.word_count}});
    }
    write_jsonl(out(artifact::kPrepped), rows);
}

void Pipeline::train() {
    config_.require("train");
    const auto labeled = labeled_examples();
    const auto split = classifier::build_training_split(labeled, *config_.seed);
    const auto model = classifier::Model::train(split.train, config_.train);
    fs::create_directories(config_.model_path().parent_path());
    model.save(config_.model_path());

    ojson metrics;
    metrics["seed"] = *config_.seed;
    metrics["train_examples"] = split.train.size();
    metrics["test_examples"] = split.test.size();
    metrics["test"] = classifier::evaluate(model, split.test).to_json();
    write_text(out("train_metrics.json"), metrics.dump(2) + "\n");
}

void Pipeline::cv() {
    config_.require("cv");
    // folds are drawn from the sampled, oversampled training split
    const auto split = classifier::build_training_split(labeled_examples(), *config_.seed);
    const auto result = classifier::cross_validate(split.train, config_.folds, config_.train, *config_.seed);
    ojson j;
    j["k"] = config_.folds;
    j["seed"] = *config_.seed;
    j["folds"] = ojson::array();
    for (const auto& m : result.folds) j["folds"].push_back(m.to_json());
    j["mean"] = result.mean.to_json();
    write_text(out(artifact::kCv), j.dump(2) + "\n");
}

void Pipeline::classify() {
    config_.require("classify");
    const auto model = classifier::Model::load(config_.model_path());
    std::vector<ojson> rows;
    forensics::ScamRate rate;
    for (const auto& row : read_jsonl(out(artifact::kPrepped))) {
        const auto p = model.predict(row.at("text").get<std::string>());
        rows.push_back({{"list_id", row.at("list_id")}, {"label", classifier::label_name(p.label)}, {"score", p.score}});
        ++rate.total;
        if (p.label == classifier::Label::Scam) ++rate.scam;
    }
    write_jsonl(out(artifact::kClassified), rows);
    ojson summary{{"total", rate.total}, {"scam", rate.scam}, {"ratio", rate.ratio()}};
    write_text(out(artifact::kClassifySummary), summary.dump(2) + "\n");
}

void Pipeline::extract() {
    config_.require("extract");
    const auto lists = corpus::load_corpus(out(artifact::kLists));
    const auto scam_ids = scam_list_ids(out(artifact::kClassified));

    std::vector<ojson> url_rows;
    std::vector<std::string> urls;  // distinct, first-seen order
    std::map<std::string, std::vector<std::string>> lists_by_url;
    for (const auto& l : lists) {
        if (!scam_ids.contains(l.list_id)) continue;
        for (const auto& u : extractor::extract_urls(l.title + "\n" + l.description, l.list_id)) {
            url_rows.push_back({{"list_id", l.list_id}, {"raw", u.raw}, {"url", u.normalized}});
            auto& carriers = lists_by_url[u.normalized];
            if (carriers.empty()) urls.push_back(u.normalized);
            carriers.push_back(l.list_id);
        }
    }
    write_jsonl(out(artifact::kUrls), url_rows);

    std::unique_ptr<net::HttpTransport> recorder;
    std::unique_ptr<net::HttpTransport> replay;
    net::HttpTransport* http = nullptr;
    extractor::FetchPolicy policy;
    net::Sleeper sleep = net::real_sleeper();
    if (config_.mode == FetchMode::Replay) {
        replay = std::make_unique<extractor::FixtureTransport>(config_.pages);
        http = replay.get();
        sleep = no_sleep();
    } else if (!config_.pages.empty()) {
        recorder = std::make_unique<extractor::RecordingTransport>(transport(), config_.pages);
        http = recorder.get();
    } else {
        http = &transport();
    }
    extractor::PageFetcher fetcher(*http, policy, sleep);
    const auto pages = fetcher.fetch_all(urls);

    std::vector<ojson> page_rows;
    std::string csv = "list_id,url,chain,address,checksum_ok\n";
    std::vector<std::tuple<std::string, std::string, extractor::ChainAddress>> found;
    for (const auto& page : pages) {
        page_rows.push_back(page.to_json(false));
        if (!page.ok() || page.status != 200) continue;
        const auto addresses = extractor::extract_addresses(page.body);
        for (const auto& list_id : lists_by_url[page.url]) {
            for (const auto& a : addresses) found.emplace_back(list_id, page.url, a);
        }
    }
    // list order of the corpus, then URL order within the list
    std::map<std::string, std::size_t> list_rank;
    for (std::size_t i = 0; i < lists.size(); ++i) list_rank.emplace(lists[i].list_id, i);
    std::stable_sort(found.begin(), found.end(),
                     [&](const auto& a, const auto& b) { return list_rank[std::get<0>(a)] < list_rank[std::get<0>(b)]; });
    for (const auto& [list_id, url, a] : found) {
        csv += csv_field(list_id) + "," + csv_field(url) + "," + std::string(chain_name(a.chain)) + "," + a.text + "," +
               (a.checksum_ok ? "true" : "false") + "\n";
    }
    write_jsonl(out(artifact::kPages), page_rows);
    write_text(out(artifact::kAddresses), csv);
}

void Pipeline::trace() {
    config_.require("trace");
    const auto scam_set = scam_set_of(read_address_rows(out(artifact::kAddresses)));
    std::set<Chain> chains;
    for (const auto& a : scam_set) chains.insert(a.chain);

    std::vector<std::unique_ptr<chainlens::ExplorerClient>> owned;
    std::map<Chain, chainlens::ExplorerClient*> clients;
    net::Sleeper sleep = no_sleep();
    if (config_.mode == FetchMode::Live) sleep = net::real_sleeper();
    for (Chain c : chains) {
        if (config_.mode == FetchMode::Replay) {
            owned.push_back(std::make_unique<chainlens::ReplayExplorer>(c, config_.ledgers));
        } else {
            chainlens::LiveOptions options;
            if (c == Chain::ETH) options.api_key = getenv_or_empty("ETHERSCAN_API_KEY");
            if (c == Chain::BNB) options.api_key = getenv_or_empty("BSCSCAN_API_KEY");
            if (c == Chain::ADA) options.api_key = getenv_or_empty("BLOCKFROST_PROJECT_ID");
            owned.push_back(chainlens::make_live_explorer(c, transport(), options, sleep));
        }
        clients[c] = owned.back().get();
    }
    const auto histories = chainlens::fetch_histories(clients, scam_set, {}, sleep);

    std::vector<ojson> rows;
    std::vector<std::string> failures;
    std::optional<chainlens::LedgerRecorder> recorder;
    if (config_.mode == FetchMode::Live && !config_.ledgers.empty()) recorder.emplace(config_.ledgers);
    for (const auto& h : histories) {
        if (h.error) {
            failures.push_back(std::string(chain_name(h.address.chain)) + " " + h.address.text + ": " + *h.error);
            continue;
        }
        if (recorder) recorder->record(h.address, h.transfers);
        for (const auto& t : h.transfers) rows.push_back(t.to_json());
    }
    write_jsonl(out(artifact::kTransfers), rows);
    if (!failures.empty()) {
        std::string msg = "transaction history unavailable for " + std::to_string(failures.size()) + " address(es)";
        for (const auto& f : failures) msg += "\n  " + f;
        throw Error(msg);
    }
}

void Pipeline::report() {
    config_.require("report");
    const auto lists_bytes = read_text(out(artifact::kLists));
    const auto lists = corpus::load_corpus(out(artifact::kLists));
    const auto scam_ids = scam_list_ids(out(artifact::kClassified));
    const auto summary = json::parse(read_text(out(artifact::kClassifySummary)));
    const auto address_rows = read_address_rows(out(artifact::kAddresses));
    const auto scam_set = scam_set_of(address_rows);

    std::vector<corpus::ListRecord> scam_lists;
    for (const auto& l : lists) {
        if (scam_ids.contains(l.list_id)) scam_lists.push_back(l);
    }
    std::map<std::string, std::vector<std::string>> urls_by_list;
    for (const auto& row : read_jsonl(out(artifact::kUrls))) {
        urls_by_list[row.at("list_id").get<std::string>()].push_back(row.at("url").get<std::string>());
    }
    std::vector<chainlens::Transfer> transfers;
    for (const auto& row : read_jsonl(out(artifact::kTransfers))) transfers.push_back(chainlens::Transfer::from_json(row));

    const auto assets =
        forensics::AssetTable::parse(tables::load("assets.tsv", config_.asset_table.empty()
                                                                    ? std::nullopt
                                                                    : std::optional(config_.asset_table)));
    const auto prices = config_.prices.empty() ? chainlens::PriceSeries{} : chainlens::PriceSeries::load(config_.prices);

    forensics::Partition partition;
    if (!scam_set.empty()) partition = forensics::filter_internal(transfers, scam_set);
    const chainlens::PriceOptions price_options{config_.nearest_day};
    const auto profit = forensics::profit_report(forensics::chain_summary(partition, scam_set, prices, price_options));

    std::vector<extractor::ChainAddress> all_addresses;
    for (const auto& r : address_rows) all_addresses.push_back(r.address);
    const auto counts = forensics::address_counts(all_addresses);
    const auto frequency = forensics::url_frequency(scam_lists, urls_by_list, assets);
    const auto cross = forensics::cross_chain_victims(partition.victim);

    const fs::path dir = out(artifact::kReportDir);
    fs::remove_all(dir);
    const std::map<std::string, forensics::DistributionTable> distributions = {
        {"timeline_year", forensics::timeline_histogram(scam_lists, forensics::Granularity::Year)},
        {"timeline_month", forensics::timeline_histogram(scam_lists, forensics::Granularity::Month)},
        {"creators", forensics::creator_distribution(scam_lists)},
        {"members", forensics::member_distribution(scam_lists)},
        {"followers", forensics::follower_distribution(scam_lists)},
    };
    for (const auto& [name, table] : distributions) write_text(dir / (name + ".csv"), table.to_csv());
    write_text(dir / "profit.csv", profit.to_csv());

    std::string freq_csv = "url,list_count,categories\n";
    for (const auto& f : frequency) {
        freq_csv += csv_field(f.url) + "," + std::to_string(f.list_count) + "," +
                    csv_field(forensics::join_categories(f.categories)) + "\n";
    }
    write_text(dir / "url_frequency.csv", freq_csv);

    std::string counts_csv = "chain,candidates,validated\n";
    for (const auto& c : counts) {
        counts_csv += std::string(chain_name(c.chain)) + "," + std::to_string(c.candidates) + "," +
                      std::to_string(c.validated) + "\n";
    }
    write_text(dir / "address_counts.csv", counts_csv);

    std::vector<ojson> victim_rows;
    for (const auto& t : partition.victim) victim_rows.push_back(t.to_json());
    write_jsonl(dir / "victim_transfers.jsonl", victim_rows);

    ojson bundle;
    ojson& meta = bundle["metadata"];
    meta["corpus_sha256"] = to_hex(sha256(lists_bytes));
    meta["config"] = ojson::object();
    for (const auto& [k, v] : config_.echo) meta["config"][k] = v;
    meta["price_convention"] = "daily-low-high";
    meta["nearest_day_window"] = config_.nearest_day;

    bundle["scam_rate"] = {{"total", summary.at("total")}, {"scam", summary.at("scam")}, {"ratio", summary.at("ratio")}};
    bundle["scam_lists"] = scam_lists.size();
    bundle["unique_member_reach"] = forensics::unique_member_reach(scam_lists);
    std::size_t url_mentions = 0;
    for (const auto& [id, urls] : urls_by_list) url_mentions += urls.size();
    bundle["url_mentions"] = url_mentions;
    bundle["validated_addresses"] = scam_set.size();
    bundle["victim_txs"] = partition.victim.size();
    bundle["internal_txs"] = partition.internal.size();
    for (const auto& [name, table] : distributions) bundle["distributions"][name] = table.to_json();
    bundle["address_counts"] = ojson::array();
    for (const auto& c : counts) {
        bundle["address_counts"].push_back(
            {{"chain", chain_name(c.chain)}, {"candidates", c.candidates}, {"validated", c.validated}});
    }
    bundle["url_frequency"] = ojson::array();
    for (const auto& f : frequency) {
        bundle["url_frequency"].push_back(
            {{"url", f.url}, {"list_count", f.list_count}, {"categories", forensics::join_categories(f.categories)}});
    }
    bundle["cross_chain_victims"] = ojson::array();
    for (const auto& v : cross) {
        ojson chains = ojson::array();
        for (Chain c : v.chains) chains.push_back(chain_name(c));
        bundle["cross_chain_victims"].push_back({{"address", v.address}, {"chains", chains}});
    }
    bundle["profit"] = profit.to_json();
    write_text(dir / "bundle.json", bundle.dump(2) + "\n");
}

void Pipeline::run(std::string_view stage) {
    if (stage == "collect") collect();
    else if (stage == "prep") prep();
    else if (stage == "train") train();
    else if (stage == "cv") cv();
    else if (stage == "classify") classify();
    else if (stage == "extract") extract();
    else if (stage == "trace") trace();
    else if (stage == "report") report();
    else throw ConfigError("unknown stage '" + std::string(stage) + "'");
}

void Pipeline::run_all() {
    for (const char* s : {"collect", "prep", "train", "classify", "extract", "trace", "report"}) run(s);
}

int run_stages(Pipeline& pipeline, const std::vector<std::string>& stages) {
    const auto& out = pipeline.config().out;
    auto now = [] { return format_rfc3339(std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now())); };
    ojson info;
    info["stages"] = ojson::array();
    int code = 0;
    ojson error;
    for (const auto& stage : stages) {
        ojson entry{{"stage", stage}, {"started_at", now()}};
        try {
            pipeline.run(stage);
        } catch (const ConfigError& e) {
            code = 2;
            error = {{"stage", stage}, {"kind", "config"}, {"message", e.what()}};
        } catch (const MissingPriceError& e) {
            code = 1;
            error = {{"stage", stage}, {"kind", "missing_price"}, {"message", e.what()}, {"missing", e.dates()}};
        } catch (const std::exception& e) {
            code = 1;
            error = {{"stage", stage}, {"kind", "stage"}, {"message", e.what()}};
        }
        entry["finished_at"] = now();
        entry["status"] = code == 0 ? "ok" : "failed";
        info["stages"].push_back(entry);
        if (code != 0) break;
    }
    info["exit_code"] = code;
    std::error_code ec;
    fs::create_directories(out, ec);
    if (code != 0) {
        write_text(out / artifact::kErrors, error.dump(2) + "\n");
    } else {
        fs::remove(out / artifact::kErrors, ec);
    }
    write_text(out / artifact::kRunInfo, info.dump(2) + "\n");
    return code;
}

}  // namespace scamhunt::pipeline
