#pragma once

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scamhunt::classifier {

enum class Label { Normal, Scam };

std::string_view label_name(Label l);
std::optional<Label> parse_label(std::string_view s);

struct LabeledExample {
    std::string text;  // normalized
    Label label = Label::Normal;

    friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

/// JSONL rows {"text": ..., "label": "scam"|"normal"}.
std::vector<LabeledExample> load_labeled(const std::filesystem::path& path);

/// Splits on non-alphanumeric boundaries, keeping `:shortcode:` tokens and
/// dotted names (domains, decimals) whole. Bytes >= 0x80 count as letters.
std::vector<std::string> tokenize(std::string_view text);

/// Token -> dense feature index, ordered by token.
class Vocabulary {
public:
    Vocabulary() = default;
    static Vocabulary build(const std::vector<std::vector<std::string>>& docs);

    std::optional<std::size_t> index(const std::string& token) const;
    std::size_t size() const noexcept { return tokens_.size(); }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }
    const std::vector<std::size_t>& doc_freq() const noexcept { return doc_freq_; }
    std::size_t doc_count() const noexcept { return doc_count_; }

private:
    friend class Model;
    std::vector<std::string> tokens_;
    std::map<std::string, std::size_t, std::less<>> index_;
    std::vector<std::size_t> doc_freq_;
    std::size_t doc_count_ = 0;
};

struct TrainConfig {
    int epochs = 200;
    double learning_rate = 0.1;
    double l2 = 1e-4;
    std::uint64_t seed = 42;
    double threshold = 0.5;
};

struct Prediction {
    Label label = Label::Normal;
    double score = 0.0;  // probability of Scam
};

using SparseVector = std::vector<std::pair<std::size_t, double>>;

/// TF-IDF features + logistic regression fitted by seeded SGD.
class Model {
public:
    /// Throws PreconditionError unless both labels are present, and Error when
    /// the loss stops being finite.
    static Model train(const std::vector<LabeledExample>& examples, const TrainConfig& config = {});

    Prediction predict(std::string_view text) const;
    double score(std::string_view text) const;
    /// L2-normalized tf-idf vector over this model's vocabulary.
    SparseVector features(std::string_view text) const;

    const Vocabulary& vocabulary() const noexcept { return vocab_; }
    const std::vector<double>& idf() const noexcept { return idf_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    double bias() const noexcept { return bias_; }
    double threshold() const noexcept { return config_.threshold; }
    const TrainConfig& config() const noexcept { return config_; }

    nlohmann::ordered_json to_json() const;
    static Model from_json(const nlohmann::json& j);
    /// Canonical single-line JSON; byte-identical for identical models.
    std::string serialize() const;
    void save(const std::filesystem::path& path) const;
    static Model load(const std::filesystem::path& path);

private:
    Vocabulary vocab_;
    std::vector<double> idf_;
    std::vector<double> weights_;
    double bias_ = 0.0;
    TrainConfig config_;
};

/// Confusion counts with Scam as the positive class.
struct Metrics {
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
    double accuracy = 0, precision = 0, recall = 0, f1 = 0;

    /// Precision (recall) is 1.0 when nothing was predicted (present) positive;
    /// f1 is 0 when precision + recall is 0.
    static Metrics from_counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t tn, std::uint64_t fn);
    nlohmann::ordered_json to_json() const;
};

/// Throws PreconditionError on an empty test set.
Metrics evaluate(const Model& model, const std::vector<LabeledExample>& test);

struct TrainingSplit {
    std::vector<LabeledExample> train;  // chosen scam examples appear twice
    std::vector<LabeledExample> test;   // everything not chosen, in input order
};

/// Samples n_scam scam and 2*n_scam normal examples for training; each scam
/// example is duplicated once. Without n_scam, 300 per 2000 examples is used
/// (capped at 300).
TrainingSplit build_training_split(const std::vector<LabeledExample>& labeled, std::uint64_t seed,
                                   std::optional<std::size_t> n_scam = std::nullopt);

std::size_t default_scam_sample(std::size_t total);

/// Label-stratified fold assignment (fold index per example). Identical
/// (text, label) pairs share a fold so duplicated examples never straddle
/// train and test.
std::vector<std::size_t> stratified_folds(const std::vector<LabeledExample>& labeled, std::size_t k,
                                          std::uint64_t seed);

struct CrossValidation {
    std::vector<Metrics> folds;
    Metrics mean;  // counts summed, rates averaged over folds
};

CrossValidation cross_validate(const std::vector<LabeledExample>& labeled, std::size_t k,
                               const TrainConfig& config, std::uint64_t seed);

/// Uniform index in [0, n) from a 64-bit Mersenne Twister; stable across
/// standard libraries, unlike std::uniform_int_distribution.
template <typename Rng>
std::size_t draw_index(Rng& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

template <typename T, typename Rng>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[draw_index(rng, i)]);
}

}  // namespace scamhunt::classifier
