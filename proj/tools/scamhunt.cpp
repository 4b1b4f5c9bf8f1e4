// scamhunt: command-line driver for the giveaway-scam pipeline.

#include "scamhunt/pipeline.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace scamhunt;

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> mode;
    std::optional<std::string> out;
    std::optional<std::size_t> k;
    std::optional<int> nearest_day;
};

pipeline::PipelineConfig load_config(const fs::path& path, const Overrides& o) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw pipeline::ConfigError("cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    auto pairs = pipeline::parse_key_values(ss.str());
    if (o.seed) pairs["seed"] = std::to_string(*o.seed);
    if (o.mode) pairs["mode"] = *o.mode;
    if (o.k) pairs["folds"] = std::to_string(*o.k);
    if (o.nearest_day) pairs["nearest_day"] = std::to_string(*o.nearest_day);
    // --out is relative to the working directory, config paths to the config file
    if (o.out) pairs["out"] = fs::absolute(*o.out).string();
    return pipeline::PipelineConfig::from_pairs(pairs, path.parent_path());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Giveaway scam hunter: collect lists, classify, extract scam addresses, trace victim payments"};
    app.require_subcommand(1);

    fs::path config_path;
    Overrides o;
    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* opt = sub->add_option("--config", config_path, "Config file (key = value)");
        if (config_required) opt->required();
        sub->add_option("--seed", o.seed, "RNG seed for train and cv");
        sub->add_option("--mode", o.mode, "replay or live")->check(CLI::IsMember({"replay", "live"}));
        sub->add_option("--out", o.out, "Output directory");
        sub->add_option("--k", o.k, "Cross-validation folds");
        sub->add_option("--nearest-day", o.nearest_day, "Use the nearest priced day within N days (0-3)");
    };

    std::map<CLI::App*, std::vector<std::string>> stages;
    for (const auto& name : pipeline::stage_names()) {
        auto* sub = app.add_subcommand(name, "Run the " + name + " stage");
        add_common(sub, true);
        stages[sub] = {name};
    }
    auto* run = app.add_subcommand("run", "Run every stage except cv");
    add_common(run, true);
    stages[run] = {"collect", "prep", "train", "classify", "extract", "trace", "report"};

    auto* demo = app.add_subcommand("demo", "Run the offline demo end to end (replay fixtures only)");
    add_common(demo, false);
    stages[demo] = stages[run];

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    CLI::App* chosen = app.get_subcommands().front();
    try {
        if (chosen == demo) {
            if (config_path.empty()) config_path = "demo/scamhunt.toml";
            if (o.mode && *o.mode != "replay") throw pipeline::ConfigError("the demo runs in replay mode only");
            o.mode = "replay";
        }
        auto config = load_config(config_path, o);
        auto transports = chosen == demo ? pipeline::TransportFactory([] { return std::make_unique<net::OfflineTransport>(); })
                                         : pipeline::default_transport_factory();
        pipeline::Pipeline p(std::move(config), std::move(transports));
        const int rc = pipeline::run_stages(p, stages[chosen]);
        if (rc != 0) {
            std::cerr << "scamhunt: failed, see " << (p.config().out / pipeline::artifact::kErrors).string() << "\n";
            std::ifstream err(p.config().out / pipeline::artifact::kErrors);
            std::cerr << err.rdbuf();
        } else {
            std::cout << "scamhunt: " << chosen->get_name() << " finished, artifacts in " << p.config().out.string()
                      << "\n";
        }
        return rc;
    } catch (const pipeline::ConfigError& e) {
        std::cerr << "scamhunt: config error: " << e.what() << "\n";
        return 2;
    }
}
