#pragma once

// Pool-based active-learning simulation: for every (strategy, seed) cell,
// retrain the target model from scratch each round, evaluate on the held-out
// test split, let the strategy pick B samples, reveal their labels, repeat.
// Emits per-round records plus mean / standard-error aggregates over seeds.
//
// Each master seed drives independent sub-streams (dataset + split, initial
// labeled draw, per-round training, per-round random selection) so changing
// one stage never perturbs the others.  By default the dataset and its
// train/test split are fixed across master seeds and only the initial
// labeled set varies.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "alcore/errors.hpp"
#include "alcore/format.hpp"
#include "alcore/matrix.hpp"
#include "alcore/neural.hpp"
#include "alcore/pool.hpp"
#include "alcore/rng.hpp"
#include "alcore/strategies.hpp"

namespace alcore {

enum class DatasetSource { synthetic, files };

struct SimulationConfig {
    DatasetSource source = DatasetSource::synthetic;
    SyntheticSpec synthetic;
    std::string features_path;
    std::string labels_path;
    int file_classes = 0;  // 0 = infer from the labels file

    double test_fraction = 0.2;
    bool vary_split = false;  // redraw dataset/split per master seed

    double initial_fraction = 0.10;
    double budget_fraction = 0.05;
    std::size_t rounds = 5;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    bool shared_initial = true;  // same S^0 for every strategy within a seed
    std::vector<StrategySpec> strategies;
    TrainConfig train;
    RenormMode renorm = RenormMode::per_iteration;

    void validate() const {
        if (source == DatasetSource::synthetic) {
            synthetic.validate();
        } else if (features_path.empty() || labels_path.empty()) {
            throw argument_error("SimulationConfig: files dataset needs feature and label paths");
        }
        if (!(test_fraction > 0.0) || !(test_fraction < 1.0))
            throw argument_error("SimulationConfig: test_fraction must be in (0, 1)");
        if (!(initial_fraction > 0.0) || initial_fraction > 1.0)
            throw argument_error("SimulationConfig: initial_fraction must be in (0, 1]");
        if (!(budget_fraction > 0.0))
            throw argument_error("SimulationConfig: budget_fraction must be positive");
        if (rounds < 1) throw argument_error("SimulationConfig: rounds must be at least 1");
        if (initial_fraction + static_cast<double>(rounds) * budget_fraction > 1.0 + 1e-12)
            throw argument_error(
                "SimulationConfig: initial_fraction + rounds*budget_fraction exceeds 1");
        if (seeds.empty()) throw argument_error("SimulationConfig: need at least one seed");
        if (strategies.empty())
            throw argument_error("SimulationConfig: need at least one strategy");
        for (const auto& s : strategies) {
            if (!(s.alpha >= 0.0 && s.alpha <= 1.0))
                throw argument_error("SimulationConfig: alpha must be in [0, 1]");
        }
        train.validate();
    }
};

struct RoundRecord {
    std::string strategy;
    std::uint64_t seed = 0;
    std::size_t round = 0;
    std::size_t num_labeled = 0;
    double fraction_labeled = 0.0;
    double test_accuracy = 0.0;
    double macro_recall = 0.0;
};

struct AggregateRecord {
    std::string strategy;
    std::size_t round = 0;
    double mean_num_labeled = 0.0, stderr_num_labeled = 0.0;
    double mean_fraction = 0.0, stderr_fraction = 0.0;
    double mean_accuracy = 0.0, stderr_accuracy = 0.0;
    double mean_recall = 0.0, stderr_recall = 0.0;
};

struct CurveTable {
    std::vector<RoundRecord> records;
    std::vector<AggregateRecord> aggregates;
};

namespace detail {

// Purposes of the sub-streams derived from one master seed.
enum SeedPurpose : std::uint64_t {
    kDataStream = 0,
    kInitStream = 1,
    kTrainStream = 2,
    kSelectStream = 3,
};

inline std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

}  // namespace detail

// Mean and standard error (sample std / sqrt(k); zero for a single value).
inline std::pair<double, double> mean_stderr(const std::vector<double>& values) {
    if (values.empty()) throw argument_error("mean_stderr: empty cell");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    if (values.size() == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sample_std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    return {mean, sample_std / std::sqrt(static_cast<double>(values.size()))};
}

// Per-(strategy, round) aggregates over seeds, sorted by (strategy, round).
inline std::vector<AggregateRecord> aggregate(const std::vector<RoundRecord>& records) {
    if (records.empty()) throw argument_error("aggregate: no records");
    std::vector<RoundRecord> sorted = records;
    std::sort(sorted.begin(), sorted.end(), [](const RoundRecord& a, const RoundRecord& b) {
        if (a.strategy != b.strategy) return a.strategy < b.strategy;
        if (a.round != b.round) return a.round < b.round;
        return a.seed < b.seed;
    });
    std::vector<AggregateRecord> out;
    std::size_t start = 0;
    while (start < sorted.size()) {
        std::size_t end = start;
        while (end < sorted.size() && sorted[end].strategy == sorted[start].strategy &&
               sorted[end].round == sorted[start].round)
            ++end;
        std::vector<double> num, frac, acc, rec;
        for (std::size_t i = start; i < end; ++i) {
            num.push_back(static_cast<double>(sorted[i].num_labeled));
            frac.push_back(sorted[i].fraction_labeled);
            acc.push_back(sorted[i].test_accuracy);
            rec.push_back(sorted[i].macro_recall);
        }
        AggregateRecord agg;
        agg.strategy = sorted[start].strategy;
        agg.round = sorted[start].round;
        std::tie(agg.mean_num_labeled, agg.stderr_num_labeled) = mean_stderr(num);
        std::tie(agg.mean_fraction, agg.stderr_fraction) = mean_stderr(frac);
        std::tie(agg.mean_accuracy, agg.stderr_accuracy) = mean_stderr(acc);
        std::tie(agg.mean_recall, agg.stderr_recall) = mean_stderr(rec);
        out.push_back(std::move(agg));
        start = end;
    }
    return out;
}

// One acquisition step: dispatch to the strategy and return its picks.
// `features` and `labels` are the training split; the model bundle supplies
// probabilities, predicted uncertainty and the embedding space.
inline SelectionResult run_round(const FeatureMatrix& features, const PoolState& pool,
                                 const NetBundle& bundle, const StrategySpec& strategy,
                                 std::size_t budget, std::uint64_t seed,
                                 RenormMode renorm = RenormMode::per_iteration) {
    const auto candidates = pool.candidates();
    if (budget > candidates.size())
        throw argument_error("run_round: budget exceeds unlabeled pool");

    std::vector<std::size_t> all_indices(pool.size());
    for (std::size_t i = 0; i < all_indices.size(); ++i) all_indices[i] = i;

    switch (strategy.id) {
        case StrategyId::random:
            return random_select(candidates, budget, seed);
        case StrategyId::entropy: {
            const FeatureMatrix probs = predict_proba(bundle.mlp, features, candidates);
            return top_b_select(entropy_scores(probs, candidates), budget);
        }
        case StrategyId::learning_loss:
            return top_b_select(
                predict_uncertainty(bundle.mlp, bundle.head, features, candidates), budget);
        case StrategyId::coreset: {
            const FeatureMatrix emb = embed(bundle.mlp, features, all_indices);
            return kcenter_greedy(emb, pool, budget);
        }
        case StrategyId::confident_coreset:
        case StrategyId::confident_coreset_sum: {
            const FeatureMatrix emb = embed(bundle.mlp, features, all_indices);
            const ScoreVector unc =
                predict_uncertainty(bundle.mlp, bundle.head, features, candidates);
            const Combiner combiner = strategy.id == StrategyId::confident_coreset
                                          ? Combiner::product
                                          : Combiner::sum;
            return confident_kcenter(emb, pool, unc, budget, strategy.alpha, combiner, renorm);
        }
        case StrategyId::rank_fusion: {
            const FeatureMatrix emb = embed(bundle.mlp, features, all_indices);
            const MinDistState state(emb, pool.labeled());
            ScoreVector dist_scores;
            dist_scores.index_map = candidates;
            for (std::size_t idx : candidates) dist_scores.values.push_back(state.dist(idx));
            const ScoreVector unc =
                predict_uncertainty(bundle.mlp, bundle.head, features, candidates);
            ScoreVector unc_aligned;
            unc_aligned.index_map = candidates;
            unc_aligned.values = unc.values;
            return rank_fusion_select(dist_scores, unc_aligned, budget);
        }
        case StrategyId::sequential: {
            const FeatureMatrix emb = embed(bundle.mlp, features, all_indices);
            const ScoreVector unc =
                predict_uncertainty(bundle.mlp, bundle.head, features, candidates);
            return sequential_select(emb, pool, unc, budget);
        }
    }
    throw internal_error("run_round: unhandled strategy");
}

namespace detail {

struct SeedData {
    SplitResult split;
    PoolState initial_pool{1, {0}};
    std::size_t budget = 0;
};

inline SeedData prepare_seed_data(const SimulationConfig& config, std::uint64_t master_seed) {
    SeedData data;
    // synthetic.seed doubles as the fixed data seed for file datasets, where
    // it only steers the train/test split.
    const std::uint64_t data_seed =
        config.vary_split ? derive_seed(master_seed, kDataStream) : config.synthetic.seed;

    FeatureMatrix features;
    LabelVector labels;
    if (config.source == DatasetSource::synthetic) {
        SyntheticSpec spec = config.synthetic;
        if (config.vary_split) spec.seed = data_seed;
        auto generated = generate_synthetic(spec);
        features = std::move(generated.first);
        labels = std::move(generated.second);
    } else {
        features = load_features(config.features_path);
        labels = load_labels(config.labels_path, config.file_classes);
        if (labels.size() != features.rows())
            throw argument_error("simulation: feature/label row count mismatch");
    }
    data.split = split_train_test(features, labels, config.test_fraction,
                                  derive_seed(data_seed, 1));

    const std::size_t n_train = data.split.train_features.rows();
    data.budget = std::max<std::size_t>(1, floor_fraction(config.budget_fraction, n_train));
    data.initial_pool = init_labeled(n_train, config.initial_fraction,
                                     derive_seed(master_seed, kInitStream));
    const std::size_t needed =
        data.initial_pool.labeled_count() + config.rounds * data.budget;
    if (needed > n_train)
        throw argument_error("simulation: initial set plus " + std::to_string(config.rounds) +
                             " rounds of budget " + std::to_string(data.budget) +
                             " exceeds the training pool (" + std::to_string(n_train) + ")");
    return data;
}

inline std::vector<RoundRecord> run_cell(const SimulationConfig& config, const SeedData& data,
                                         const StrategySpec& strategy,
                                         std::uint64_t master_seed) {
    const std::size_t n_train = data.split.train_features.rows();
    std::vector<std::size_t> test_indices(data.split.test_features.rows());
    for (std::size_t i = 0; i < test_indices.size(); ++i) test_indices[i] = i;

    PoolState pool = data.initial_pool;
    if (!config.shared_initial) {
        const std::uint64_t init_seed =
            derive_seed(master_seed, kInitStream) ^ fnv1a(strategy.label());
        pool = init_labeled(n_train, config.initial_fraction, init_seed);
    }

    const std::uint64_t train_stream = derive_seed(master_seed, kTrainStream);
    const std::uint64_t select_stream = derive_seed(master_seed, kSelectStream);

    std::vector<RoundRecord> records;
    records.reserve(config.rounds + 1);
    for (std::size_t round = 0; round <= config.rounds; ++round) {
        TrainConfig train_config = config.train;
        train_config.seed = derive_seed(train_stream, round);
        const NetBundle bundle = train(data.split.train_features, data.split.train_labels,
                                       pool.labeled(), train_config);
        const EvalResult eval = evaluate(bundle.mlp, data.split.test_features,
                                         data.split.test_labels, test_indices);
        RoundRecord record;
        record.strategy = strategy.label();
        record.seed = master_seed;
        record.round = round;
        record.num_labeled = pool.labeled_count();
        record.fraction_labeled =
            static_cast<double>(pool.labeled_count()) / static_cast<double>(n_train);
        record.test_accuracy = eval.accuracy;
        record.macro_recall = eval.macro_recall;
        records.push_back(std::move(record));

        if (round < config.rounds) {
            const SelectionResult picks =
                run_round(data.split.train_features, pool, bundle, strategy, data.budget,
                          derive_seed(select_stream, round), config.renorm);
            pool = pool.with_added(picks.selected);
        }
    }
    return records;
}

}  // namespace detail

// Full protocol over every (strategy, seed) cell.  Cells are independent and
// run on a small thread pool; records are sorted afterwards so the result is
// a pure function of the config.
inline CurveTable run_simulation(const SimulationConfig& config) {
    config.validate();

    std::vector<detail::SeedData> seed_data;
    seed_data.reserve(config.seeds.size());
    for (std::uint64_t seed : config.seeds)
        seed_data.push_back(detail::prepare_seed_data(config, seed));

    struct Cell {
        std::size_t seed_pos;
        std::size_t strategy_pos;
    };
    std::vector<Cell> cells;
    for (std::size_t s = 0; s < config.seeds.size(); ++s)
        for (std::size_t t = 0; t < config.strategies.size(); ++t)
            cells.push_back({s, t});

    std::vector<std::vector<RoundRecord>> cell_records(cells.size());
    std::atomic<std::size_t> next_cell{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t c = next_cell.fetch_add(1);
            if (c >= cells.size()) return;
            const Cell& cell = cells[c];
            cell_records[c] =
                detail::run_cell(config, seed_data[cell.seed_pos],
                                 config.strategies[cell.strategy_pos],
                                 config.seeds[cell.seed_pos]);
        }
    };
    const std::size_t thread_count =
        std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), cells.size());
    if (thread_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(thread_count);
        for (std::size_t t = 0; t < thread_count; ++t) threads.emplace_back(worker);
        for (auto& thread : threads) thread.join();
    }

    CurveTable table;
    for (auto& records : cell_records)
        table.records.insert(table.records.end(), records.begin(), records.end());
    std::sort(table.records.begin(), table.records.end(),
              [](const RoundRecord& a, const RoundRecord& b) {
                  if (a.strategy != b.strategy) return a.strategy < b.strategy;
                  if (a.seed != b.seed) return a.seed < b.seed;
                  return a.round < b.round;
              });
    table.aggregates = aggregate(table.records);
    return table;
}

// CSV layout: one row per record, then per-(strategy, round) aggregate rows
// with `mean` / `stderr` in the seed column.
inline void write_curves(std::ostream& out, const CurveTable& table) {
    out << "strategy,seed,round,num_labeled,fraction_labeled,test_accuracy,macro_recall\n";
    for (const auto& r : table.records) {
        out << r.strategy << ',' << r.seed << ',' << r.round << ',' << r.num_labeled << ','
            << format_double(r.fraction_labeled) << ',' << format_double(r.test_accuracy)
            << ',' << format_double(r.macro_recall) << '\n';
    }
    for (const auto& a : table.aggregates) {
        out << a.strategy << ",mean," << a.round << ',' << format_double(a.mean_num_labeled)
            << ',' << format_double(a.mean_fraction) << ',' << format_double(a.mean_accuracy)
            << ',' << format_double(a.mean_recall) << '\n';
        out << a.strategy << ",stderr," << a.round << ','
            << format_double(a.stderr_num_labeled) << ',' << format_double(a.stderr_fraction)
            << ',' << format_double(a.stderr_accuracy) << ','
            << format_double(a.stderr_recall) << '\n';
    }
}

inline void write_curves_file(const std::string& path, const CurveTable& table) {
    auto out = detail::open_out(path);
    write_curves(out, table);
    if (!out) throw io_error("write failure: " + path);
}

}  // namespace alcore
