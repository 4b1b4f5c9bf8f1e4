#pragma once

#include "scamhunt/classifier.hpp"
#include "scamhunt/errors.hpp"
#include "scamhunt/net.hpp"
#include "scamhunt/textprep.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace scamhunt::pipeline {

/// Bad or incomplete configuration; the CLI maps it to exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

enum class FetchMode { Replay, Live };

/// Parses "key = value" lines. "#" starts a comment, values may be double
/// quoted, and a repeated key is an error. Table headers are not supported.
std::map<std::string, std::string> parse_key_values(std::string_view text);

struct PipelineConfig {
    std::filesystem::path corpus;   // JSONL file, or a replay fixture directory
    std::filesystem::path labeled;  // labeled examples for train/cv
    std::filesystem::path model;    // defaults to <out>/model.json
    std::filesystem::path pages;    // page fixture root (replay) or recording dir (live)
    std::filesystem::path ledgers;  // ledger fixture root (replay) or recording dir (live)
    std::filesystem::path prices;
    std::filesystem::path out = "out";
    std::filesystem::path emoji_table, slang_table, asset_table;  // empty: built-in tables
    std::filesystem::path candidate_ids;                          // live collect only

    FetchMode mode = FetchMode::Replay;
    std::optional<std::uint64_t> seed;
    std::size_t folds = 5;
    int nearest_day = 0;
    std::size_t collect_limit = 1'000'000;
    classifier::TrainConfig train;

    /// Loads a config file; relative paths resolve against its directory.
    /// Keys that look like credentials are refused: secrets come from the
    /// environment only.
    static PipelineConfig load(const std::filesystem::path& path);
    static PipelineConfig from_pairs(const std::map<std::string, std::string>& pairs,
                                     const std::filesystem::path& base_dir = {});

    /// Checks what `stage` needs: replay fixture roots present, a seed for
    /// train/cv, and so on.
    void require(std::string_view stage) const;

    std::filesystem::path model_path() const;
    /// Settings echoed into report metadata, in key order, with paths as given.
    std::map<std::string, std::string> echo;
};

inline const std::vector<std::string>& stage_names() {
    static const std::vector<std::string> s = {"collect", "prep",  "train", "cv",
                                               "classify", "extract", "trace", "report"};
    return s;
}

/// Artifact file names under the output directory.
namespace artifact {
inline constexpr const char* kLists = "lists.jsonl";
inline constexpr const char* kCursor = "cursor.json";
inline constexpr const char* kPrepped = "prepped.jsonl";
inline constexpr const char* kCv = "cv.json";
inline constexpr const char* kClassified = "classified.jsonl";
inline constexpr const char* kClassifySummary = "classify_summary.json";
inline constexpr const char* kUrls = "urls.jsonl";
inline constexpr const char* kPages = "pages.jsonl";
inline constexpr const char* kAddresses = "addresses.csv";
inline constexpr const char* kTransfers = "transfers.jsonl";
inline constexpr const char* kReportDir = "report";
inline constexpr const char* kErrors = "errors.json";
inline constexpr const char* kRunInfo = "run_info.json";
}  // namespace artifact

/// Creates network transports on demand, so replay runs never construct one.
using TransportFactory = std::function<std::unique_ptr<net::HttpTransport>()>;
TransportFactory default_transport_factory();

class Pipeline {
public:
    explicit Pipeline(PipelineConfig config, TransportFactory transports = default_transport_factory());

    void collect();
    void prep();
    void train();
    void cv();
    void classify();
    void extract();
    void trace();
    void report();

    /// Runs one stage by name. Throws ConfigError for an unknown name.
    void run(std::string_view stage);
    /// collect, prep, train, classify, extract, trace, report.
    void run_all();

    const PipelineConfig& config() const noexcept { return config_; }

private:
    net::HttpTransport& transport();
    textprep::Normalizer make_normalizer();
    /// Labeled examples normalized like prep does for the corpus.
    std::vector<classifier::LabeledExample> labeled_examples();
    std::filesystem::path out(const char* name) const { return config_.out / name; }

    PipelineConfig config_;
    TransportFactory transports_;
    std::unique_ptr<net::HttpTransport> transport_;
};

/// Runs `stages` in order, stopping at the first failure. Writes
/// errors.json on failure (and removes a stale one on success) and
/// run_info.json with per-stage timings. Returns the exit code: 0, 1 for a
/// stage error, 2 for a config error.
int run_stages(Pipeline& pipeline, const std::vector<std::string>& stages);

}  // namespace scamhunt::pipeline
