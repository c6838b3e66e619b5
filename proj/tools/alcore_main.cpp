// alcore command-line front end.
//
//   alcore select    one-shot batch selection on feature/index files
//   alcore simulate  full active-learning protocol from a config file
//   alcore generate  synthetic dataset files
//
// Exit codes: 0 success, 2 argument/config error, 3 I/O error, 4 internal
// invariant violation.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "alcore/alcore.hpp"

namespace {

struct SelectArgs {
    std::string features_path;
    std::string labeled_path;
    std::string strategy;
    std::size_t budget = 1;
    double alpha = 0.25;
    std::string uncertainty_path;
    std::uint64_t seed = 0;
    std::string out_path;
};

struct GenerateArgs {
    std::string kind = "gaussian-mixture";
    std::size_t n = 0;
    std::size_t d = 2;
    int classes = 2;
    std::string priors;
    double spread = 0.1;
    std::uint64_t seed = 0;
    std::string out_features;
    std::string out_labels;
};

alcore::ScoreVector candidate_scores(const std::vector<double>& scores,
                                     const alcore::PoolState& pool) {
    if (scores.size() != pool.size())
        throw alcore::argument_error("uncertainty file has " + std::to_string(scores.size()) +
                                     " scores but the pool has " + std::to_string(pool.size()) +
                                     " samples");
    alcore::ScoreVector out;
    out.index_map = pool.candidates();
    out.values.reserve(out.index_map.size());
    for (std::size_t idx : out.index_map) out.values.push_back(scores[idx]);
    return out;
}

void run_select(const SelectArgs& args) {
    using namespace alcore;
    const StrategyId id = parse_strategy_id(args.strategy);
    if (needs_uncertainty(id) && args.uncertainty_path.empty())
        throw argument_error("strategy '" + args.strategy + "' requires --uncertainty");
    if (!(args.alpha >= 0.0 && args.alpha <= 1.0))
        throw argument_error("--alpha must be in [0, 1]");

    const FeatureMatrix features = load_features(args.features_path);
    const PoolState pool(features.rows(), load_indices(args.labeled_path));

    ScoreVector scores;
    if (!args.uncertainty_path.empty())
        scores = candidate_scores(load_scores(args.uncertainty_path), pool);

    SelectionResult result;
    switch (id) {
        case StrategyId::random:
            result = random_select(pool.candidates(), args.budget, args.seed);
            break;
        case StrategyId::coreset:
            result = kcenter_greedy(features, pool, args.budget);
            break;
        case StrategyId::entropy:
        case StrategyId::learning_loss:
            // One-shot mode has no model; both select the top-B of the
            // supplied score file.
            result = top_b_select(scores, args.budget);
            break;
        case StrategyId::confident_coreset:
            result = confident_kcenter(features, pool, scores, args.budget, args.alpha,
                                       Combiner::product);
            break;
        case StrategyId::confident_coreset_sum:
            result = confident_kcenter(features, pool, scores, args.budget, args.alpha,
                                       Combiner::sum);
            break;
        case StrategyId::rank_fusion: {
            const MinDistState state(features, pool.labeled());
            ScoreVector dist_scores;
            dist_scores.index_map = pool.candidates();
            for (std::size_t idx : dist_scores.index_map)
                dist_scores.values.push_back(state.dist(idx));
            result = rank_fusion_select(dist_scores, scores, args.budget);
            break;
        }
        case StrategyId::sequential:
            result = sequential_select(features, pool, scores, args.budget);
            break;
    }
    write_indices(args.out_path, result.selected);
}

void run_simulate(const std::string& config_path, const std::string& out_path) {
    const alcore::SimulationConfig config = alcore::load_simulation_config(config_path);
    const alcore::CurveTable table = alcore::run_simulation(config);
    alcore::write_curves_file(out_path, table);
}

void run_generate(const GenerateArgs& args) {
    using namespace alcore;
    SyntheticSpec spec;
    if (args.kind == "gaussian-mixture") {
        spec.kind = SyntheticKind::gaussian_mixture;
    } else if (args.kind == "two-moons") {
        spec.kind = SyntheticKind::two_moons;
    } else {
        throw argument_error("unknown synthetic kind '" + args.kind + "'");
    }
    spec.n = args.n;
    spec.d = args.d;
    spec.num_classes = args.classes;
    spec.spread = args.spread;
    spec.seed = args.seed;
    if (args.priors.empty()) {
        spec.priors.assign(static_cast<std::size_t>(args.classes),
                           1.0 / static_cast<double>(args.classes));
    } else {
        for (const auto& item : detail::split_list(args.priors)) {
            try {
                spec.priors.push_back(parse_double(item, "--priors"));
            } catch (const format_error& e) {
                throw argument_error(e.what());
            }
        }
        spec.num_classes = static_cast<int>(spec.priors.size());
    }

    const auto [features, labels] = generate_synthetic(spec);
    write_features(args.out_features, features);
    write_labels(args.out_labels, labels);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Batch active-learning query strategies and simulation harness"};
    app.require_subcommand(1);

    SelectArgs select_args;
    auto* select = app.add_subcommand("select", "Select a batch from feature/index files");
    select->add_option("--features", select_args.features_path, "Features CSV")->required();
    select->add_option("--labeled", select_args.labeled_path, "Labeled index file")->required();
    select->add_option("--strategy", select_args.strategy, "Strategy id")->required();
    select->add_option("--budget", select_args.budget, "Batch size B")->required();
    select->add_option("--alpha", select_args.alpha, "Coverage weight for confident variants");
    select->add_option("--uncertainty", select_args.uncertainty_path,
                       "Score file, one float per pool row");
    select->add_option("--seed", select_args.seed, "Seed for random selection");
    select->add_option("--out", select_args.out_path, "Output index file")->required();

    std::string config_path, simulate_out;
    auto* simulate = app.add_subcommand("simulate", "Run the active-learning protocol");
    simulate->add_option("--config", config_path, "Config file")->required();
    simulate->add_option("--out", simulate_out, "Output CSV")->required();

    GenerateArgs generate_args;
    auto* generate = app.add_subcommand("generate", "Write a synthetic dataset");
    generate->add_option("--kind", generate_args.kind, "gaussian-mixture or two-moons");
    generate->add_option("--n", generate_args.n, "Sample count")->required();
    generate->add_option("--d", generate_args.d, "Feature dimension");
    generate->add_option("--classes", generate_args.classes, "Class count");
    generate->add_option("--priors", generate_args.priors, "Comma-separated class priors");
    generate->add_option("--spread", generate_args.spread, "Noise standard deviation");
    generate->add_option("--seed", generate_args.seed, "Generator seed");
    generate->add_option("--out-features", generate_args.out_features, "Features CSV path")
        ->required();
    generate->add_option("--out-labels", generate_args.out_labels, "Labels file path")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (select->parsed()) {
            run_select(select_args);
        } else if (simulate->parsed()) {
            run_simulate(config_path, simulate_out);
        } else if (generate->parsed()) {
            run_generate(generate_args);
        }
        return 0;
    } catch (const alcore::argument_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const alcore::io_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const alcore::format_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 4;
    }
}
