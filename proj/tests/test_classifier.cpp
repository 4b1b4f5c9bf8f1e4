#include "doctest.h"
#include "test_support.hpp"

#include "scamhunt/classifier.hpp"
#include "scamhunt/errors.hpp"
#include "scamhunt/textprep.hpp"

#include <cmath>
#include <random>
#include <set>

using namespace scamhunt;
using namespace scamhunt::classifier;

namespace {

using Strings = std::vector<std::string>;

LabeledExample scam(std::string t) { return {std::move(t), Label::Scam}; }
LabeledExample normal(std::string t) { return {std::move(t), Label::Normal}; }

std::vector<LabeledExample> synthetic(std::size_t n_scam, std::size_t n_normal) {
    std::vector<LabeledExample> out;
    for (std::size_t i = 0; i < n_scam; ++i) out.push_back(scam("giveaway eth x2 s" + std::to_string(i)));
    for (std::size_t i = 0; i < n_normal; ++i) out.push_back(normal("jazz photography n" + std::to_string(i)));
    return out;
}

std::size_t count(const std::vector<LabeledExample>& v, Label l) {
    return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [&](auto& e) { return e.label == l; }));
}

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

TEST_CASE("tokenize") {
    CHECK(tokenize("50000 eth giveaway!") == Strings{"50000", "eth", "giveaway"});
    CHECK(tokenize("visit www.buterinofficial.com now") == Strings{"visit", "www.buterinofficial.com", "now"});
    CHECK(tokenize("").empty());
    CHECK(tokenize(":rocket: btc :rocket::fire:") == Strings{":rocket:", "btc", ":rocket:", ":fire:"});
    CHECK(tokenize("see https://merge-ethx2.info/claim.") == Strings{"see", "https", "merge-ethx2.info", "claim"});
    CHECK(tokenize("send 0.5 eth, x2-event") == Strings{"send", "0.5", "eth", "x2", "event"});
    CHECK(tokenize("time: 10:30") == Strings{"time", "10", "30"});
    CHECK(tokenize("биткоин раздача") == Strings{"биткоин", "раздача"});
}

TEST_CASE("build_training_split at full scale") {
    const auto labeled = synthetic(532, 2000 - 532);
    const auto split = build_training_split(labeled, 7, 300);
    CHECK(count(split.train, Label::Scam) == 600);
    CHECK(count(split.train, Label::Normal) == 600);
    CHECK(split.test.size() == 1100);
    std::set<std::string> unique_scam;
    for (const auto& e : split.train) {
        if (e.label == Label::Scam) unique_scam.insert(e.text);
    }
    CHECK(unique_scam.size() == 300);
    CHECK(default_scam_sample(2000) == 300);
}

TEST_CASE("build_training_split on a small corpus") {
    const auto labeled = synthetic(10, 20);
    const auto split = build_training_split(labeled, 1, 10);
    CHECK(count(split.train, Label::Scam) == 20);
    CHECK(count(split.train, Label::Normal) == 20);
    CHECK(split.test.empty());
}

TEST_CASE("build_training_split is seeded and reports deficits") {
    const auto labeled = synthetic(50, 120);
    CHECK(build_training_split(labeled, 3, 20).train == build_training_split(labeled, 3, 20).train);
    CHECK(build_training_split(labeled, 3, 20).train != build_training_split(labeled, 4, 20).train);
    try {
        build_training_split(labeled, 3, 51);
        FAIL("expected deficit error");
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find("short by 1") != std::string::npos);
    }
    CHECK_THROWS_AS(build_training_split(labeled, 3, 61), PreconditionError);
}

TEST_CASE("oversampling balances classes whenever the input ratio is 1:2") {
    for (std::size_t n : {1u, 5u, 17u, 40u}) {
        const auto split = build_training_split(synthetic(n, 2 * n + 3), 11, n);
        CHECK(count(split.train, Label::Scam) == count(split.train, Label::Normal));
        CHECK(split.test.size() == 3);
    }
}

TEST_CASE("train on a separable toy set") {
    const std::vector<LabeledExample> toy = {scam("free eth giveaway"), scam("btc x2 giveaway"),
                                             normal("jazz music fans"), normal("photography club")};
    const auto m = Model::train(toy);
    const auto metrics = evaluate(m, toy);
    CHECK(metrics.accuracy == 1.0);
    CHECK(m.predict("free eth giveaway").label == Label::Scam);
    CHECK(m.threshold() == 0.5);
    CHECK(m.weights().size() == m.vocabulary().size());

    // out-of-vocabulary text scores exactly logistic(bias)
    CHECK(m.score("zzz qqq") == doctest::Approx(logistic(m.bias())).epsilon(1e-15));
    CHECK(m.score("") == doctest::Approx(logistic(m.bias())).epsilon(1e-15));

    const auto p = m.predict("50000 eth giveaway www.buterinofficial.com \xc3\x97");
    CHECK(p.label == Label::Scam);
    CHECK(p.score > 0.5);
    CHECK(p.score < 1.0);
}

TEST_CASE("duplicating every example keeps the decision signs") {
    const std::vector<LabeledExample> base = {scam("free eth giveaway"), scam("btc x2 giveaway now"),
                                              scam("send eth get double"), normal("jazz music fans"),
                                              normal("photography club"), normal("eth research group")};
    auto doubled = base;
    doubled.insert(doubled.end(), base.begin(), base.end());
    const auto a = Model::train(base);
    const auto b = Model::train(doubled);
    for (const auto& e : base) CHECK((a.score(e.text) >= 0.5) == (b.score(e.text) >= 0.5));
}

TEST_CASE("identical texts with a 2:1 label ratio score near 2/3") {
    // One feature plus bias: the loss minimum sits where the predicted
    // probability equals the empirical scam rate, 2/3.
    const std::vector<LabeledExample> data = {scam("same words"), scam("same words"), normal("same words")};
    const auto m = Model::train(data);
    CHECK(std::abs(m.score("same words") - 2.0 / 3.0) < 0.05);
}

TEST_CASE("training errors") {
    CHECK_THROWS_AS(Model::train({scam("a b"), scam("c d")}), PreconditionError);
    CHECK_THROWS_AS(Model::train({}), PreconditionError);
    TrainConfig wild;
    wild.learning_rate = 1e308;
    try {
        Model::train({scam("a b"), normal("c d")}, wild);
        FAIL("expected divergence");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("epoch") != std::string::npos);
    }
}

TEST_CASE("model file round trip and byte-identical determinism") {
    const auto labeled = synthetic(20, 40);
    TrainConfig cfg;
    cfg.seed = 99;
    cfg.epochs = 30;
    const auto a = Model::train(labeled, cfg);
    const auto b = Model::train(labeled, cfg);
    CHECK(a.serialize() == b.serialize());

    testing::TempDir tmp;
    a.save(tmp / "model.json");
    const auto loaded = Model::load(tmp / "model.json");
    CHECK(loaded.serialize() == a.serialize());
    CHECK(loaded.score("giveaway eth") == a.score("giveaway eth"));

    cfg.seed = 100;
    CHECK(Model::train(labeled, cfg).serialize() != a.serialize());
}

TEST_CASE("vocabulary comes from training data only") {
    const auto labeled = synthetic(10, 20);
    const auto split = build_training_split(labeled, 5, 4);
    const auto m = Model::train(split.train);
    std::set<std::string> train_tokens;
    for (const auto& e : split.train) {
        for (const auto& t : tokenize(e.text)) train_tokens.insert(t);
    }
    for (const auto& e : split.test) {
        for (const auto& t : tokenize(e.text)) {
            if (!train_tokens.count(t)) CHECK_FALSE(m.vocabulary().index(t));
        }
    }
}

TEST_CASE("metrics: worked example and identities") {
    const auto m = Metrics::from_counts(2, 0, 7, 1);
    CHECK(m.precision == 1.0);
    CHECK(m.recall == doctest::Approx(0.6667).epsilon(1e-4));
    CHECK(m.accuracy == doctest::Approx(0.9));
    CHECK(Metrics::from_counts(5, 0, 5, 0).f1 == 1.0);
    CHECK(Metrics::from_counts(0, 0, 9, 0).precision == 1.0);
    CHECK(Metrics::from_counts(0, 3, 0, 4).f1 == 0.0);

    std::mt19937_64 rng(1);
    for (int i = 0; i < 2000; ++i) {
        const std::uint64_t tp = rng() % 50, fp = rng() % 50, tn = rng() % 50, fn = rng() % 50;
        const auto x = Metrics::from_counts(tp, fp, tn, fn);
        if (tp + fp) CHECK(x.precision == static_cast<double>(tp) / static_cast<double>(tp + fp));
        if (tp + fn) CHECK(x.recall == static_cast<double>(tp) / static_cast<double>(tp + fn));
        if (tp + fp + tn + fn) {
            CHECK(x.accuracy == static_cast<double>(tp + tn) / static_cast<double>(tp + fp + tn + fn));
        }
    }
}

TEST_CASE("evaluate needs data") {
    const auto m = Model::train({scam("a b"), normal("c d")});
    CHECK_THROWS_AS(evaluate(m, {}), PreconditionError);
}

TEST_CASE("stratified folds partition the data and keep duplicates together") {
    auto labeled = synthetic(30, 70);
    labeled.push_back(labeled[0]);
    labeled.push_back(labeled[0]);
    const auto fold = stratified_folds(labeled, 5, 3);
    REQUIRE(fold.size() == labeled.size());
    std::vector<std::size_t> scam_per(5, 0), normal_per(5, 0);
    for (std::size_t i = 0; i < labeled.size(); ++i) {
        REQUIRE(fold[i] < 5);
        (labeled[i].label == Label::Scam ? scam_per : normal_per)[fold[i]]++;
    }
    for (std::size_t f = 0; f < 5; ++f) {
        CHECK(scam_per[f] >= 6);
        CHECK(normal_per[f] == 14);
    }
    CHECK(fold[labeled.size() - 1] == fold[0]);
    CHECK(fold[labeled.size() - 2] == fold[0]);
    CHECK_THROWS_AS(stratified_folds(synthetic(3, 10), 5, 1), PreconditionError);
}

TEST_CASE("cross_validate") {
    const auto separable = synthetic(20, 30);
    const auto cv = cross_validate(separable, 5, {}, 1);
    CHECK(cv.folds.size() == 5);
    CHECK(cv.mean.accuracy == 1.0);
    CHECK(cv.mean.precision == 1.0);
    CHECK(cv.mean.recall == 1.0);
    CHECK(cv.mean.f1 == 1.0);
    CHECK(cv.mean.tp + cv.mean.fp + cv.mean.tn + cv.mean.fn == 50);

    CHECK_THROWS_AS(cross_validate(separable, 1, {}, 1), PreconditionError);
}

TEST_CASE("cross_validate with shuffled labels stays near the majority rate") {
    auto labeled = classifier::load_labeled(testing::fixture("labeled/mini_corpus.jsonl"));
    std::vector<Label> labels;
    for (const auto& e : labeled) labels.push_back(e.label);
    std::mt19937_64 rng(17);
    classifier::shuffle(labels, rng);
    for (std::size_t i = 0; i < labeled.size(); ++i) labeled[i].label = labels[i];
    const double majority = 1.0 - static_cast<double>(count(labeled, Label::Scam)) / labeled.size();
    TrainConfig cfg;
    cfg.epochs = 50;
    const auto cv = cross_validate(labeled, 5, cfg, 2);
    CHECK(std::abs(cv.mean.accuracy - majority) <= 0.15);
}

TEST_CASE("mini corpus protocol reaches the reported quality") {
    textprep::Normalizer norm;
    auto labeled = classifier::load_labeled(testing::fixture("labeled/mini_corpus.jsonl"));
    for (auto& e : labeled) e.text = norm.normalize_text(e.text, "");
    CHECK(labeled.size() == 500);
    CHECK(count(labeled, Label::Scam) == 140);
    const auto split = build_training_split(labeled, 42);
    const auto cv = cross_validate(split.train, 5, {}, 42);
    const auto model = Model::train(split.train);
    const auto test = evaluate(model, split.test);
    CHECK(cv.mean.f1 >= 0.95);
    CHECK(test.f1 >= 0.95);
}

TEST_CASE("load_labeled validates rows") {
    testing::TempDir tmp;
    testing::spit(tmp / "a.jsonl", "{\"text\":\"a b\",\"label\":\"spam\"}\n");
    CHECK_THROWS_AS(load_labeled(tmp / "a.jsonl"), SchemaError);
    testing::spit(tmp / "b.jsonl", "{\"text\":\"a b\",\"label\":\"scam\"}\n\n{oops\n");
    CHECK_THROWS_AS(load_labeled(tmp / "b.jsonl"), ParseError);
}
