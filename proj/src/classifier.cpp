#include "scamhunt/classifier.hpp"

#include "scamhunt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>

namespace scamhunt::classifier {

using nlohmann::json;

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

bool is_shortcode_byte(unsigned char c) { return std::isalnum(c) || c == '_' || c == '+' || c == '-'; }

/// Length of a `:name:` shortcode starting at `pos`, or 0.
std::size_t shortcode_at(std::string_view s, std::size_t pos) {
    if (s[pos] != ':') return 0;
    bool has_alnum = false;
    for (std::size_t i = pos + 1; i < s.size(); ++i) {
        const auto c = static_cast<unsigned char>(s[i]);
        if (c == ':') return (has_alnum && i > pos + 1) ? i - pos + 1 : 0;
        if (!is_shortcode_byte(c)) return 0;
        has_alnum = has_alnum || std::isalnum(c);
    }
    return 0;
}

/// A dot with word characters on both sides marks a domain or decimal.
bool has_inner_dot(std::string_view run) {
    for (std::size_t i = 1; i + 1 < run.size(); ++i) {
        if (run[i] == '.' && is_word_byte(run[i - 1]) && is_word_byte(run[i + 1])) return true;
    }
    return false;
}

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

/// -log p(y | z) computed without overflow.
double log_loss(double z, double y) {
    return std::max(z, 0.0) - y * z + std::log1p(std::exp(-std::abs(z)));
}

double target(Label l) { return l == Label::Scam ? 1.0 : 0.0; }

}  // namespace

std::string_view label_name(Label l) { return l == Label::Scam ? "scam" : "normal"; }

std::optional<Label> parse_label(std::string_view s) {
    if (s == "scam") return Label::Scam;
    if (s == "normal") return Label::Normal;
    return std::nullopt;
}

std::vector<LabeledExample> load_labeled(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read labeled corpus: " + path.string());
    std::vector<LabeledExample> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) throw ParseError(line_no, "malformed JSON");
        if (!j.contains("text") || !j["text"].is_string()) {
            throw SchemaError("text", "line " + std::to_string(line_no) + ": missing string key 'text'");
        }
        auto label = parse_label(j.value("label", ""));
        if (!label) {
            throw SchemaError("label", "line " + std::to_string(line_no) + ": label must be \"scam\" or \"normal\"");
        }
        out.push_back({j["text"].get<std::string>(), *label});
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        if (auto len = shortcode_at(text, pos)) {
            out.emplace_back(text.substr(pos, len));
            pos += len;
            continue;
        }
        const auto c = static_cast<unsigned char>(text[pos]);
        if (!is_word_byte(c)) {
            ++pos;
            continue;
        }
        std::size_t end = pos;
        while (end < text.size()) {
            const auto d = static_cast<unsigned char>(text[end]);
            if (!(is_word_byte(d) || d == '.' || d == '-')) break;
            ++end;
        }
        std::string_view run = text.substr(pos, end - pos);
        while (!run.empty() && (run.back() == '.' || run.back() == '-')) run.remove_suffix(1);
        if (has_inner_dot(run)) {
            out.emplace_back(run);
        } else {
            std::size_t i = 0;
            while (i < run.size()) {
                while (i < run.size() && !is_word_byte(run[i])) ++i;
                std::size_t j = i;
                while (j < run.size() && is_word_byte(run[j])) ++j;
                if (j > i) out.emplace_back(run.substr(i, j - i));
                i = j;
            }
        }
        pos = end;
    }
    return out;
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& docs) {
    std::map<std::string, std::size_t, std::less<>> df;
    for (const auto& doc : docs) {
        std::vector<std::string> uniq(doc);
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        for (auto& t : uniq) ++df[t];
    }
    Vocabulary v;
    v.doc_count_ = docs.size();
    for (auto& [token, count] : df) {
        v.index_.emplace(token, v.tokens_.size());
        v.tokens_.push_back(token);
        v.doc_freq_.push_back(count);
    }
    return v;
}

std::optional<std::size_t> Vocabulary::index(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

SparseVector Model::features(std::string_view text) const {
    std::map<std::size_t, double> counts;
    for (const auto& tok : tokenize(text)) {
        if (auto idx = vocab_.index(tok)) counts[*idx] += 1.0;
    }
    SparseVector x;
    double norm = 0;
    for (auto [idx, tf] : counts) {
        const double v = tf * idf_[idx];
        x.emplace_back(idx, v);
        norm += v * v;
    }
    if (norm > 0) {
        norm = std::sqrt(norm);
        for (auto& [idx, v] : x) v /= norm;
    }
    return x;
}

Model Model::train(const std::vector<LabeledExample>& examples, const TrainConfig& config) {
    const bool has_scam = std::any_of(examples.begin(), examples.end(), [](auto& e) { return e.label == Label::Scam; });
    const bool has_normal =
        std::any_of(examples.begin(), examples.end(), [](auto& e) { return e.label == Label::Normal; });
    if (!has_scam || !has_normal) throw PreconditionError("training set must contain both scam and normal examples");
    if (config.epochs <= 0) throw PreconditionError("epochs must be positive");
    if (!(config.threshold > 0 && config.threshold < 1)) throw PreconditionError("threshold must lie in (0, 1)");

    std::vector<std::vector<std::string>> docs;
    docs.reserve(examples.size());
    for (const auto& e : examples) docs.push_back(tokenize(e.text));

    Model m;
    m.config_ = config;
    m.vocab_ = Vocabulary::build(docs);
    const double n = static_cast<double>(examples.size());
    m.idf_.resize(m.vocab_.size());
    for (std::size_t i = 0; i < m.vocab_.size(); ++i) {
        m.idf_[i] = std::log((1.0 + n) / (1.0 + static_cast<double>(m.vocab_.doc_freq_[i]))) + 1.0;
    }

    std::vector<SparseVector> xs;
    xs.reserve(examples.size());
    for (const auto& e : examples) xs.push_back(m.features(e.text));

    // Weights are stored as scale * v so the L2 shrink is O(1) per step.
    std::vector<double> v(m.vocab_.size(), 0.0);
    double scale = 1.0;
    double bias = 0.0;
    std::mt19937_64 rng(config.seed);
    std::vector<std::size_t> order(examples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    const double lr = config.learning_rate;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        shuffle(order, rng);
        double loss = 0;
        for (std::size_t idx : order) {
            const auto& x = xs[idx];
            double z = bias;
            for (auto [j, val] : x) z += scale * v[j] * val;
            const double y = target(examples[idx].label);
            loss += log_loss(z, y);
            const double g = sigmoid(z) - y;

            scale *= 1.0 - lr * config.l2;
            if (scale < 1e-9) {
                for (auto& w : v) w *= scale;
                scale = 1.0;
            }
            for (auto [j, val] : x) v[j] -= lr * g * val / scale;
            bias -= lr * g;
        }
        double sq = 0;
        for (double w : v) sq += w * w;
        loss = loss / n + 0.5 * config.l2 * scale * scale * sq;
        if (!std::isfinite(loss) || !std::isfinite(bias)) {
            throw Error("training diverged: non-finite loss at epoch " + std::to_string(epoch));
        }
    }
    m.weights_.resize(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) m.weights_[j] = scale * v[j];
    m.bias_ = bias;
    return m;
}

double Model::score(std::string_view text) const {
    double z = bias_;
    for (auto [j, val] : features(text)) z += weights_[j] * val;
    return sigmoid(z);
}

Prediction Model::predict(std::string_view text) const {
    const double s = score(text);
    return {s >= config_.threshold ? Label::Scam : Label::Normal, s};
}

nlohmann::ordered_json Model::to_json() const {
    nlohmann::ordered_json j;
    nlohmann::ordered_json vocab = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < vocab_.tokens_.size(); ++i) vocab[vocab_.tokens_[i]] = i;
    j["vocabulary"] = vocab;
    j["doc_freq"] = vocab_.doc_freq_;
    j["doc_count"] = vocab_.doc_count_;
    j["idf"] = idf_;
    j["weights"] = weights_;
    j["bias"] = bias_;
    j["threshold"] = config_.threshold;
    j["seed"] = config_.seed;
    j["config"] = {{"epochs", config_.epochs},
                   {"learning_rate", config_.learning_rate},
                   {"l2", config_.l2},
                   {"seed", config_.seed},
                   {"threshold", config_.threshold}};
    return j;
}

Model Model::from_json(const json& j) {
    Model m;
    try {
        const auto& c = j.at("config");
        m.config_.epochs = c.at("epochs").get<int>();
        m.config_.learning_rate = c.at("learning_rate").get<double>();
        m.config_.l2 = c.at("l2").get<double>();
        m.config_.seed = c.at("seed").get<std::uint64_t>();
        m.config_.threshold = j.at("threshold").get<double>();

        const auto& vocab = j.at("vocabulary");
        m.vocab_.tokens_.resize(vocab.size());
        for (auto it = vocab.begin(); it != vocab.end(); ++it) {
            const auto idx = it.value().get<std::size_t>();
            if (idx >= vocab.size()) throw SchemaError("vocabulary", "feature index out of range");
            m.vocab_.tokens_[idx] = it.key();
            m.vocab_.index_.emplace(it.key(), idx);
        }
        m.vocab_.doc_freq_ = j.value("doc_freq", std::vector<std::size_t>(vocab.size(), 0));
        m.vocab_.doc_count_ = j.value("doc_count", std::size_t{0});
        m.idf_ = j.at("idf").get<std::vector<double>>();
        m.weights_ = j.at("weights").get<std::vector<double>>();
        m.bias_ = j.at("bias").get<double>();
    } catch (const json::exception& e) {
        throw SchemaError("model", std::string("invalid model file: ") + e.what());
    }
    if (m.idf_.size() != m.vocab_.size() || m.weights_.size() != m.vocab_.size()) {
        throw SchemaError("weights", "model weight/idf length does not match vocabulary size");
    }
    return m;
}

std::string Model::serialize() const { return to_json().dump(); }

void Model::save(const std::filesystem::path& path) const {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write model: " + path.string());
    out << serialize() << '\n';
}

Model Model::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read model: " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ParseError(0, "model file is not valid JSON: " + path.string());
    return from_json(j);
}

Metrics Metrics::from_counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t tn, std::uint64_t fn) {
    Metrics m;
    m.tp = tp;
    m.fp = fp;
    m.tn = tn;
    m.fn = fn;
    const auto total = tp + fp + tn + fn;
    m.accuracy = total ? static_cast<double>(tp + tn) / static_cast<double>(total) : 1.0;
    m.precision = (tp + fp) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 1.0;
    m.recall = (tp + fn) ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 1.0;
    m.f1 = (m.precision + m.recall) > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    return m;
}

nlohmann::ordered_json Metrics::to_json() const {
    return {{"accuracy", accuracy}, {"precision", precision}, {"recall", recall}, {"f1", f1},
            {"tp", tp},             {"fp", fp},               {"tn", tn},         {"fn", fn}};
}

Metrics evaluate(const Model& model, const std::vector<LabeledExample>& test) {
    if (test.empty()) throw PreconditionError("evaluation set is empty");
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (const auto& e : test) {
        const bool predicted = model.predict(e.text).label == Label::Scam;
        const bool actual = e.label == Label::Scam;
        if (predicted && actual) ++tp;
        else if (predicted) ++fp;
        else if (actual) ++fn;
        else ++tn;
    }
    return Metrics::from_counts(tp, fp, tn, fn);
}

std::size_t default_scam_sample(std::size_t total) { return std::min<std::size_t>(300, total * 300 / 2000); }

TrainingSplit build_training_split(const std::vector<LabeledExample>& labeled, std::uint64_t seed,
                                   std::optional<std::size_t> n_scam) {
    std::vector<std::size_t> scam, normal;
    for (std::size_t i = 0; i < labeled.size(); ++i) {
        (labeled[i].label == Label::Scam ? scam : normal).push_back(i);
    }
    const std::size_t want = n_scam.value_or(default_scam_sample(labeled.size()));
    if (want == 0) throw PreconditionError("training split needs at least one scam example");
    if (scam.size() < want) {
        throw PreconditionError("need " + std::to_string(want) + " scam examples, have " + std::to_string(scam.size()) +
                                " (short by " + std::to_string(want - scam.size()) + ")");
    }
    if (normal.size() < 2 * want) {
        throw PreconditionError("need " + std::to_string(2 * want) + " normal examples, have " +
                                std::to_string(normal.size()) + " (short by " +
                                std::to_string(2 * want - normal.size()) + ")");
    }
    std::mt19937_64 rng(seed);
    shuffle(scam, rng);
    shuffle(normal, rng);
    scam.resize(want);
    normal.resize(2 * want);
    std::sort(scam.begin(), scam.end());
    std::sort(normal.begin(), normal.end());

    std::vector<bool> chosen(labeled.size(), false);
    TrainingSplit split;
    for (auto i : scam) {
        chosen[i] = true;
        split.train.push_back(labeled[i]);
        split.train.push_back(labeled[i]);
    }
    for (auto i : normal) {
        chosen[i] = true;
        split.train.push_back(labeled[i]);
    }
    for (std::size_t i = 0; i < labeled.size(); ++i) {
        if (!chosen[i]) split.test.push_back(labeled[i]);
    }
    return split;
}

std::vector<std::size_t> stratified_folds(const std::vector<LabeledExample>& labeled, std::size_t k,
                                          std::uint64_t seed) {
    if (k < 2) throw PreconditionError("cross-validation needs k >= 2, got " + std::to_string(k));
    std::vector<std::size_t> fold(labeled.size(), 0);
    std::mt19937_64 rng(seed);
    for (Label cls : {Label::Scam, Label::Normal}) {
        // group identical texts of this class, in first-appearance order
        std::unordered_map<std::string, std::size_t> group_of;
        std::vector<std::vector<std::size_t>> groups;
        for (std::size_t i = 0; i < labeled.size(); ++i) {
            if (labeled[i].label != cls) continue;
            auto [it, fresh] = group_of.emplace(labeled[i].text, groups.size());
            if (fresh) groups.emplace_back();
            groups[it->second].push_back(i);
        }
        shuffle(groups, rng);
        std::vector<std::size_t> load(k, 0);
        for (const auto& g : groups) {
            const auto target_fold =
                static_cast<std::size_t>(std::min_element(load.begin(), load.end()) - load.begin());
            for (auto i : g) fold[i] = target_fold;
            load[target_fold] += g.size();
        }
        for (std::size_t f = 0; f < k; ++f) {
            if (load[f] == 0) {
                throw PreconditionError("class '" + std::string(label_name(cls)) + "' is absent from fold " +
                                        std::to_string(f) + " (too few distinct examples for k=" +
                                        std::to_string(k) + ")");
            }
        }
    }
    return fold;
}

CrossValidation cross_validate(const std::vector<LabeledExample>& labeled, std::size_t k,
                               const TrainConfig& config, std::uint64_t seed) {
    const auto fold = stratified_folds(labeled, k, seed);
    CrossValidation cv;
    double acc = 0, prec = 0, rec = 0, f1 = 0;
    for (std::size_t f = 0; f < k; ++f) {
        std::vector<LabeledExample> train, test;
        for (std::size_t i = 0; i < labeled.size(); ++i) (fold[i] == f ? test : train).push_back(labeled[i]);
        const auto model = Model::train(train, config);
        const auto m = evaluate(model, test);
        cv.folds.push_back(m);
        cv.mean.tp += m.tp;
        cv.mean.fp += m.fp;
        cv.mean.tn += m.tn;
        cv.mean.fn += m.fn;
        acc += m.accuracy;
        prec += m.precision;
        rec += m.recall;
        f1 += m.f1;
    }
    const double kk = static_cast<double>(k);
    cv.mean.accuracy = acc / kk;
    cv.mean.precision = prec / kk;
    cv.mean.recall = rec / kk;
    cv.mean.f1 = f1 / kk;
    return cv;
}

}  // namespace scamhunt::classifier
