#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "alcore/neural.hpp"
#include "alcore/pool.hpp"

using namespace alcore;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "alcore_test_neural";
    std::filesystem::create_directories(dir);
    return dir / name;
}

FeatureMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    FeatureMatrix m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t k = 0; k < rows[i].size(); ++k) m.at(i, k) = rows[i][k];
    return m;
}

// Simple-rank Spearman correlation (inputs are continuous, ties negligible).
double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    REQUIRE(a.size() == b.size());
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> order(v.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
        std::vector<double> r(v.size());
        for (std::size_t pos = 0; pos < order.size(); ++pos)
            r[order[pos]] = static_cast<double>(pos);
        return r;
    };
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    const double n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0, va = 0, vb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    return cov / std::sqrt(va * vb);
}

std::vector<std::vector<double>*> param_vectors(NetBundle& bundle) {
    std::vector<std::vector<double>*> out;
    for (auto& layer : bundle.mlp.layers) {
        out.push_back(&layer.weight);
        out.push_back(&layer.bias);
    }
    for (auto& proj : bundle.head.projections) {
        out.push_back(&proj.weight);
        out.push_back(&proj.bias);
    }
    out.push_back(&bundle.head.output.weight);
    out.push_back(&bundle.head.output.bias);
    return out;
}

std::vector<const std::vector<double>*> grad_vectors(const JointLossResult& result) {
    std::vector<const std::vector<double>*> out;
    for (const auto& layer : result.body_grad.layers) {
        out.push_back(&layer.weight);
        out.push_back(&layer.bias);
    }
    for (const auto& proj : result.head_grad.projections) {
        out.push_back(&proj.weight);
        out.push_back(&proj.bias);
    }
    out.push_back(&result.head_grad.output.weight);
    out.push_back(&result.head_grad.output.bias);
    return out;
}

// Replicates the parameter initialization order used by train().
NetBundle init_bundle(const std::vector<std::size_t>& sizes, const TrainConfig& config) {
    Rng rng(config.seed);
    NetBundle bundle;
    bundle.mlp = MlpParams::zeros(sizes);
    for (auto& layer : bundle.mlp.layers) detail::init_layer(layer, rng);
    bundle.head = UncertaintyHead::zeros(sizes, config.head_width);
    for (auto& proj : bundle.head.projections) detail::init_layer(proj, rng);
    detail::init_layer(bundle.head.output, rng);
    return bundle;
}

// True iff every rectifier pre-activation and hinge pre-activation in the
// batch is comfortably away from its kink, so central differences are valid.
bool away_from_kinks(const NetBundle& bundle, const FeatureMatrix& features,
                     const LabelVector& labels, const std::vector<std::size_t>& batch,
                     const TrainConfig& config) {
    std::vector<double> target(batch.size()), predicted(batch.size());
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const ForwardTrace trace = mlp_forward(bundle.mlp, features.row(batch[b]));
        for (std::size_t l = 0; l + 1 < bundle.mlp.layers.size(); ++l)
            for (double pre : trace.pre[l])
                if (std::abs(pre) < 1e-4) return false;
        target[b] = cross_entropy(trace.probabilities, labels.labels[batch[b]]);
        predicted[b] = head_forward(bundle.head, trace);
    }
    for (std::size_t p = 0; p < batch.size(); p += 2) {
        if (std::abs(target[p] - target[p + 1]) < 1e-6) return false;
        const double f = target[p] > target[p + 1] ? 1.0 : -1.0;
        const double preact = -f * (predicted[p] - predicted[p + 1]) + config.margin;
        if (std::abs(preact) < 1e-3) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("forward pass matches a hand-computed trace") {
    MlpParams params = MlpParams::zeros({2, 2, 2});
    params.layers[0].weight = {1.0, 0.0, 0.0, -1.0};
    params.layers[0].bias = {0.5, 0.5};
    params.layers[1].weight = {2.0, 0.0, 0.0, 1.0};
    params.layers[1].bias = {0.0, 0.0};

    const std::vector<double> x{1.0, 2.0};
    const ForwardTrace trace = mlp_forward(params, x);
    CHECK(trace.pre[0] == std::vector<double>{1.5, -1.5});
    CHECK(trace.post[0] == std::vector<double>{1.5, 0.0});
    CHECK(trace.logits() == std::vector<double>{3.0, 0.0});

    const double z = std::exp(3.0) + 1.0;
    CHECK(trace.probabilities[0] == Catch::Approx(std::exp(3.0) / z).margin(1e-15));
    CHECK(trace.probabilities[1] == Catch::Approx(1.0 / z).margin(1e-15));

    CHECK_THROWS_AS(mlp_forward(params, std::vector<double>{1.0}), argument_error);
}

TEST_CASE("softmax is shift-invariant and overflow-safe") {
    std::vector<double> probs;
    detail::softmax({1000.0, 1001.0}, probs);
    CHECK(probs[0] == Catch::Approx(1.0 / (1.0 + std::exp(1.0))).margin(1e-12));
    CHECK(probs[0] + probs[1] == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("cross_entropy") {
    CHECK(cross_entropy({0.5, 0.5}, 0) == Catch::Approx(std::log(2.0)).margin(1e-12));
    CHECK(cross_entropy({1.0, 0.0}, 0) == Catch::Approx(0.0).margin(1e-12));
    // Zero probability is floored, not infinite.
    CHECK(cross_entropy({1.0, 0.0}, 1) == Catch::Approx(-std::log(1e-12)).margin(1e-9));
    CHECK_THROWS_AS(cross_entropy({0.5, 0.5}, 2), argument_error);
    CHECK_THROWS_AS(cross_entropy({0.5, 0.5}, -1), argument_error);
}

TEST_CASE("head_forward concatenates fixed-width projections") {
    MlpParams params = MlpParams::zeros({2, 2, 2});
    UncertaintyHead head = UncertaintyHead::zeros({2, 2, 2}, 2);
    head.projections[0].weight = {1.0, 0.0, 0.0, 1.0};
    head.projections[0].bias = {0.1, 0.2};
    head.output.weight = {1.0, 2.0};
    head.output.bias = {0.3};

    ForwardTrace trace;
    trace.pre.resize(2);
    trace.post.resize(1);
    trace.post[0] = {1.5, 0.0};
    // projected = (1.6, 0.2); value = 0.3 + 1*1.6 + 2*0.2 = 2.3
    CHECK(head_forward(head, trace) == Catch::Approx(2.3).margin(1e-12));

    trace.post[0] = {1.5};
    CHECK_THROWS_AS(head_forward(head, trace), argument_error);
}

TEST_CASE("margin pair loss follows the sign of the true-loss difference") {
    CHECK(margin_pair_loss(0.2, 0.6, 0.9, 0.3, 0.5) == Catch::Approx(0.9).margin(1e-9));
    CHECK(margin_pair_loss(1.5, 0.2, 0.9, 0.3, 0.5) == 0.0);
    // Equal true losses fall to the negative branch.
    CHECK(margin_pair_loss(1.0, 0.0, 0.5, 0.5, 0.5) == Catch::Approx(1.5).margin(1e-12));
    CHECK_THROWS_AS(margin_pair_loss(0.0, 0.0, 0.0, 0.0, 0.0), argument_error);
    CHECK_THROWS_AS(margin_pair_loss(std::nan(""), 0.0, 0.0, 1.0, 0.5), argument_error);
}

TEST_CASE("joint loss combines mean target loss with weighted pair losses") {
    const std::vector<double> target{1.0, 2.0, 3.0, 4.0};
    const std::vector<double> predicted{0.1, 0.4, 0.9, 0.2};
    CHECK(joint_loss_value(target, predicted, 1.0, 0.5) == Catch::Approx(3.2).margin(1e-9));
    // lambda scales only the pair term: 2.5 + 2*(0.5*1.4) = 3.9
    CHECK(joint_loss_value(target, predicted, 2.0, 0.5) == Catch::Approx(3.9).margin(1e-9));
    CHECK(joint_loss_value(target, predicted, 0.0, 0.5) == Catch::Approx(2.5).margin(1e-12));

    CHECK_THROWS_AS(joint_loss_value({1.0, 2.0, 3.0}, {0.1, 0.2, 0.3}, 1.0, 0.5),
                    argument_error);
    CHECK_THROWS_AS(joint_loss_value({}, {}, 1.0, 0.5), argument_error);
    CHECK_THROWS_AS(joint_loss_value(target, {0.1, 0.2}, 1.0, 0.5), argument_error);
}

TEST_CASE("joint_batch_loss total agrees with the scalar formula") {
    SyntheticSpec spec;
    spec.n = 16;
    spec.d = 3;
    spec.num_classes = 2;
    spec.priors = {0.5, 0.5};
    spec.spread = 0.8;
    spec.seed = 21;
    const auto [features, labels] = generate_synthetic(spec);

    TrainConfig config;
    config.hidden_sizes = {5};
    config.head_width = 3;
    config.seed = 3;
    const NetBundle bundle = init_bundle({3, 5, 2}, config);

    const std::vector<std::size_t> batch{0, 9, 3, 12, 5, 15};
    const JointLossResult result =
        joint_batch_loss(bundle.mlp, bundle.head, features, labels, batch, config);
    CHECK(result.total == Catch::Approx(joint_loss_value(result.target_losses,
                                                         result.predicted_losses, config.lambda,
                                                         config.margin))
                              .margin(1e-12));
    REQUIRE(result.target_losses.size() == 6);
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const ForwardTrace trace = mlp_forward(bundle.mlp, features.row(batch[b]));
        CHECK(result.target_losses[b] ==
              Catch::Approx(cross_entropy(trace.probabilities, labels.labels[batch[b]]))
                  .margin(1e-12));
        CHECK(result.predicted_losses[b] ==
              Catch::Approx(head_forward(bundle.head, trace)).margin(1e-12));
    }

    const std::vector<std::size_t> odd{0, 1, 2};
    CHECK_THROWS_AS(joint_batch_loss(bundle.mlp, bundle.head, features, labels, odd, config),
                    argument_error);
    const std::vector<std::size_t> oob{0, 99};
    CHECK_THROWS_AS(joint_batch_loss(bundle.mlp, bundle.head, features, labels, oob, config),
                    argument_error);
}

TEST_CASE("analytic gradients match central finite differences") {
    const double h = 1e-5;
    int checked_configs = 0;
    std::uint64_t seed = 100;
    while (checked_configs < 8 && seed < 400) {
        ++seed;
        Rng meta(seed);
        SyntheticSpec spec;
        spec.n = 12;
        spec.d = 2 + meta.below(2);
        spec.num_classes = 2 + static_cast<int>(meta.below(2));
        spec.priors.assign(static_cast<std::size_t>(spec.num_classes),
                           1.0 / spec.num_classes);
        spec.spread = 0.9;
        spec.seed = seed;
        const auto [features, labels] = generate_synthetic(spec);

        TrainConfig config;
        config.seed = seed * 7 + 1;
        config.head_width = 2 + meta.below(2);
        config.hidden_sizes = meta.below(2) == 0 ? std::vector<std::size_t>{4}
                                                 : std::vector<std::size_t>{4, 3};
        config.lambda = meta.below(2) == 0 ? 1.0 : 0.5;

        std::vector<std::size_t> sizes{features.cols()};
        sizes.insert(sizes.end(), config.hidden_sizes.begin(), config.hidden_sizes.end());
        sizes.push_back(static_cast<std::size_t>(labels.num_classes));
        NetBundle bundle = init_bundle(sizes, config);

        std::vector<std::size_t> batch{0, 5, 9, 2};
        if (!away_from_kinks(bundle, features, labels, batch, config)) continue;
        ++checked_configs;

        const JointLossResult analytic =
            joint_batch_loss(bundle.mlp, bundle.head, features, labels, batch, config);
        const auto params = param_vectors(bundle);
        const auto grads = grad_vectors(analytic);
        REQUIRE(params.size() == grads.size());

        for (std::size_t v = 0; v < params.size(); ++v) {
            for (std::size_t i = 0; i < params[v]->size(); ++i) {
                const double saved = (*params[v])[i];
                (*params[v])[i] = saved + h;
                const double up = joint_batch_loss(bundle.mlp, bundle.head, features, labels,
                                                   batch, config)
                                      .total;
                (*params[v])[i] = saved - h;
                const double down = joint_batch_loss(bundle.mlp, bundle.head, features, labels,
                                                     batch, config)
                                        .total;
                (*params[v])[i] = saved;
                const double numeric = (up - down) / (2.0 * h);
                const double ana = (*grads[v])[i];
                const double tol = 1e-4 * std::max({std::abs(numeric), std::abs(ana), 1.0e-3});
                REQUIRE(std::abs(numeric - ana) <= tol + 1e-8);
            }
        }
    }
    REQUIRE(checked_configs == 8);
}

TEST_CASE("detached head gradients leave the target model untouched") {
    SyntheticSpec spec;
    spec.n = 14;
    spec.d = 3;
    spec.num_classes = 3;
    spec.priors = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    spec.spread = 0.7;
    spec.seed = 8;
    const auto [features, labels] = generate_synthetic(spec);

    TrainConfig plain;
    plain.hidden_sizes = {6, 4};
    plain.head_width = 3;
    plain.seed = 19;
    const NetBundle bundle = init_bundle({3, 6, 4, 3}, plain);
    const std::vector<std::size_t> batch{1, 7, 4, 11, 0, 13};

    TrainConfig detached = plain;
    detached.detach_head_gradient = true;
    TrainConfig ce_only = plain;
    ce_only.lambda = 0.0;

    const auto plain_result =
        joint_batch_loss(bundle.mlp, bundle.head, features, labels, batch, plain);
    const auto detached_result =
        joint_batch_loss(bundle.mlp, bundle.head, features, labels, batch, detached);
    const auto ce_result =
        joint_batch_loss(bundle.mlp, bundle.head, features, labels, batch, ce_only);

    // Same loss value; the switch only reroutes gradients.
    CHECK(detached_result.total == plain_result.total);

    // Detached body gradients equal the pure cross-entropy body gradients.
    for (std::size_t l = 0; l < plain_result.body_grad.layers.size(); ++l) {
        CHECK(detached_result.body_grad.layers[l].weight == ce_result.body_grad.layers[l].weight);
        CHECK(detached_result.body_grad.layers[l].bias == ce_result.body_grad.layers[l].bias);
    }
    // Head gradients are unaffected by the detach switch.
    for (std::size_t l = 0; l < plain_result.head_grad.projections.size(); ++l) {
        CHECK(detached_result.head_grad.projections[l].weight ==
              plain_result.head_grad.projections[l].weight);
        CHECK(detached_result.head_grad.projections[l].bias ==
              plain_result.head_grad.projections[l].bias);
    }
    CHECK(detached_result.head_grad.output.weight == plain_result.head_grad.output.weight);
    CHECK(detached_result.head_grad.output.bias == plain_result.head_grad.output.bias);

    // The attached run really does move the body differently.
    bool any_difference = false;
    for (std::size_t l = 0; l < plain_result.body_grad.layers.size(); ++l)
        if (plain_result.body_grad.layers[l].weight != ce_result.body_grad.layers[l].weight)
            any_difference = true;
    CHECK(any_difference);
}

TEST_CASE("Glorot initialization is bounded with zero biases") {
    Rng rng(55);
    LayerParams layer = LayerParams::zeros(10, 6);
    detail::init_layer(layer, rng);
    const double limit = std::sqrt(6.0 / 16.0);
    for (double w : layer.weight) {
        CHECK(std::abs(w) <= limit);
    }
    for (double b : layer.bias) CHECK(b == 0.0);
    // Not degenerate: weights actually vary.
    const auto [lo, hi] = std::minmax_element(layer.weight.begin(), layer.weight.end());
    CHECK(*hi - *lo > limit);
}

TEST_CASE("training is deterministic per seed") {
    SyntheticSpec spec;
    spec.n = 40;
    spec.d = 2;
    spec.num_classes = 2;
    spec.priors = {0.5, 0.5};
    spec.spread = 0.5;
    spec.seed = 5;
    const auto [features, labels] = generate_synthetic(spec);
    std::vector<std::size_t> labeled(40);
    std::iota(labeled.begin(), labeled.end(), 0);

    TrainConfig config;
    config.epochs = 10;
    config.batch_size = 8;
    config.hidden_sizes = {6};
    config.seed = 77;

    const NetBundle a = train(features, labels, labeled, config);
    const NetBundle b = train(features, labels, labeled, config);
    for (std::size_t l = 0; l < a.mlp.layers.size(); ++l) {
        CHECK(a.mlp.layers[l].weight == b.mlp.layers[l].weight);
        CHECK(a.mlp.layers[l].bias == b.mlp.layers[l].bias);
    }
    CHECK(a.head.output.weight == b.head.output.weight);

    TrainConfig other = config;
    other.seed = 78;
    const NetBundle c = train(features, labels, labeled, other);
    CHECK(a.mlp.layers[0].weight != c.mlp.layers[0].weight);
}

TEST_CASE("training handles an odd labeled count by sitting one sample out") {
    SyntheticSpec spec;
    spec.n = 21;
    spec.d = 2;
    spec.num_classes = 2;
    spec.priors = {0.5, 0.5};
    spec.spread = 0.4;
    spec.seed = 2;
    const auto [features, labels] = generate_synthetic(spec);
    std::vector<std::size_t> labeled(21);
    std::iota(labeled.begin(), labeled.end(), 0);

    TrainConfig config;
    config.epochs = 5;
    config.batch_size = 4;
    config.hidden_sizes = {4};
    CHECK_NOTHROW(train(features, labels, labeled, config));

    CHECK_THROWS_AS(train(features, labels, {0}, config), argument_error);
    CHECK_THROWS_AS(train(features, labels, {0, 99}, config), argument_error);
    TrainConfig bad = config;
    bad.batch_size = 3;
    CHECK_THROWS_AS(train(features, labels, labeled, bad), argument_error);
}

TEST_CASE("two separated points are fit perfectly") {
    const FeatureMatrix features = from_rows({{-2.0}, {2.0}});
    const LabelVector labels({0, 1}, 2);
    TrainConfig config;
    config.epochs = 200;
    config.batch_size = 2;
    config.hidden_sizes = {4};
    config.seed = 1;

    const NetBundle bundle = train(features, labels, {0, 1}, config);
    const EvalResult eval = evaluate(bundle.mlp, features, labels, {0, 1});
    CHECK(eval.accuracy == 1.0);
    CHECK(eval.macro_recall == 1.0);
}

TEST_CASE("training lowers the joint loss on a separable toy set") {
    const FeatureMatrix features =
        from_rows({{-2.1}, {-1.9}, {-2.3}, {-1.7}, {1.8}, {2.2}, {1.6}, {2.4}});
    const LabelVector labels({0, 0, 0, 0, 1, 1, 1, 1}, 2);
    std::vector<std::size_t> labeled(8);
    std::iota(labeled.begin(), labeled.end(), 0);

    TrainConfig config;
    config.epochs = 50;
    config.batch_size = 4;
    config.hidden_sizes = {4};
    config.seed = 13;

    const NetBundle before = init_bundle({1, 4, 2}, config);
    const NetBundle after = train(features, labels, labeled, config);

    const auto loss_of = [&](const NetBundle& b) {
        return joint_batch_loss(b.mlp, b.head, features, labels, labeled, config).total;
    };
    CHECK(loss_of(after) <= loss_of(before));
    CHECK(loss_of(after) < 0.9 * loss_of(before));
}

TEST_CASE("predicted uncertainty ranks held-out samples like their true loss") {
    SyntheticSpec spec;
    spec.n = 240;
    spec.d = 2;
    spec.num_classes = 2;
    spec.priors = {0.5, 0.5};
    spec.spread = 1.6;  // enough overlap that per-sample difficulty varies
    spec.seed = 33;
    const auto [features, labels] = generate_synthetic(spec);

    const SplitResult split = split_train_test(features, labels, 0.4, 5);
    TrainConfig config;
    config.epochs = 80;
    config.batch_size = 16;
    config.hidden_sizes = {16};
    config.learning_rate = 0.05;
    config.seed = 9;

    std::vector<std::size_t> train_ids(split.train_features.rows());
    std::iota(train_ids.begin(), train_ids.end(), 0);
    const NetBundle bundle = train(split.train_features, split.train_labels, train_ids, config);

    std::vector<std::size_t> test_ids(split.test_features.rows());
    std::iota(test_ids.begin(), test_ids.end(), 0);
    const ScoreVector predicted =
        predict_uncertainty(bundle.mlp, bundle.head, split.test_features, test_ids);
    const FeatureMatrix probs = predict_proba(bundle.mlp, split.test_features, test_ids);
    std::vector<double> true_loss(test_ids.size());
    for (std::size_t i = 0; i < test_ids.size(); ++i) {
        std::vector<double> row(probs.row(i).begin(), probs.row(i).end());
        true_loss[i] = cross_entropy(row, split.test_labels.labels[i]);
    }
    CHECK(spearman(predicted.values, true_loss) >= 0.3);
}

TEST_CASE("predict_proba rows are distributions") {
    SyntheticSpec spec;
    spec.n = 20;
    spec.d = 3;
    spec.num_classes = 3;
    spec.priors = {0.4, 0.3, 0.3};
    spec.seed = 3;
    const auto [features, labels] = generate_synthetic(spec);
    TrainConfig config;
    config.epochs = 3;
    config.batch_size = 4;
    config.hidden_sizes = {5};
    std::vector<std::size_t> all(20);
    std::iota(all.begin(), all.end(), 0);
    const NetBundle bundle = train(features, labels, all, config);

    const FeatureMatrix probs = predict_proba(bundle.mlp, features, {0, 7, 19});
    REQUIRE(probs.rows() == 3);
    REQUIRE(probs.cols() == 3);
    for (std::size_t i = 0; i < probs.rows(); ++i) {
        double sum = 0.0;
        for (std::size_t c = 0; c < probs.cols(); ++c) {
            CHECK(probs.at(i, c) >= 0.0);
            sum += probs.at(i, c);
        }
        CHECK(sum == Catch::Approx(1.0).margin(1e-9));
    }
    CHECK_THROWS_AS(predict_proba(bundle.mlp, features, {25}), argument_error);

    const ScoreVector unc = predict_uncertainty(bundle.mlp, bundle.head, features, {7, 2});
    CHECK(unc.index_map == std::vector<std::size_t>{7, 2});
    CHECK(unc.values.size() == 2);
}

TEST_CASE("embed returns the last hidden activations (or raw input without hidden layers)") {
    MlpParams direct = MlpParams::zeros({2, 2});
    direct.layers[0].weight = {1.0, 0.0, 0.0, 1.0};
    const FeatureMatrix features = from_rows({{3.0, -1.0}, {0.5, 2.0}});
    const FeatureMatrix raw = embed(direct, features, {0, 1});
    CHECK(raw.at(0, 0) == 3.0);
    CHECK(raw.at(0, 1) == -1.0);
    CHECK(raw.at(1, 1) == 2.0);

    MlpParams two = MlpParams::zeros({2, 3, 2});
    Rng rng(12);
    for (auto& layer : two.layers) detail::init_layer(layer, rng);
    const FeatureMatrix emb = embed(two, features, {1});
    const ForwardTrace trace = mlp_forward(two, features.row(1));
    REQUIRE(emb.cols() == 3);
    for (std::size_t k = 0; k < 3; ++k) CHECK(emb.at(0, k) == trace.post.back()[k]);
}

TEST_CASE("evaluate computes accuracy and macro recall over present classes") {
    MlpParams params = MlpParams::zeros({2, 2});
    params.layers[0].weight = {1.0, 0.0, 0.0, 1.0};  // prediction = argmax of input
    const FeatureMatrix features =
        from_rows({{2.0, 0.0}, {0.0, 2.0}, {2.0, 0.0}, {0.0, 2.0}});
    const LabelVector labels({0, 1, 1, 1}, 2);

    const EvalResult eval = evaluate(params, features, labels, {0, 1, 2, 3});
    CHECK(eval.accuracy == Catch::Approx(0.75).margin(1e-12));
    CHECK(eval.macro_recall == Catch::Approx(5.0 / 6.0).margin(1e-12));

    // A subset missing one class averages recall over the classes present.
    const EvalResult only_zero = evaluate(params, features, labels, {0});
    CHECK(only_zero.macro_recall == 1.0);

    // Argmax ties resolve to the lowest class id.
    const FeatureMatrix tied = from_rows({{1.0, 1.0}});
    CHECK(evaluate(params, tied, LabelVector({0}, 2), {0}).accuracy == 1.0);
    CHECK(evaluate(params, tied, LabelVector({1}, 2), {0}).accuracy == 0.0);

    CHECK_THROWS_AS(evaluate(params, features, labels, {}), argument_error);
    CHECK_THROWS_AS(evaluate(params, features, labels, {9}), argument_error);
}

TEST_CASE("checkpoints round-trip bit-for-bit") {
    SyntheticSpec spec;
    spec.n = 24;
    spec.d = 2;
    spec.num_classes = 2;
    spec.priors = {0.5, 0.5};
    spec.seed = 6;
    const auto [features, labels] = generate_synthetic(spec);
    std::vector<std::size_t> all(24);
    std::iota(all.begin(), all.end(), 0);
    TrainConfig config;
    config.epochs = 4;
    config.batch_size = 4;
    config.hidden_sizes = {5, 3};
    config.head_width = 4;
    const NetBundle bundle = train(features, labels, all, config);

    const auto path = temp_file("net.txt").string();
    save_checkpoint(path, bundle);
    const NetBundle loaded = load_checkpoint(path);

    REQUIRE(loaded.mlp.layer_sizes == bundle.mlp.layer_sizes);
    for (std::size_t l = 0; l < bundle.mlp.layers.size(); ++l) {
        CHECK(loaded.mlp.layers[l].weight == bundle.mlp.layers[l].weight);
        CHECK(loaded.mlp.layers[l].bias == bundle.mlp.layers[l].bias);
    }
    CHECK(loaded.head.width == bundle.head.width);
    for (std::size_t l = 0; l < bundle.head.projections.size(); ++l)
        CHECK(loaded.head.projections[l].weight == bundle.head.projections[l].weight);
    CHECK(loaded.head.output.weight == bundle.head.output.weight);
    CHECK(loaded.head.output.bias == bundle.head.output.bias);

    // Identical predictions after the round trip.
    const ScoreVector before = predict_uncertainty(bundle.mlp, bundle.head, features, all);
    const ScoreVector after = predict_uncertainty(loaded.mlp, loaded.head, features, all);
    CHECK(before.values == after.values);
}

TEST_CASE("checkpoint loading rejects malformed files") {
    const auto write_text = [](const std::string& name, const std::string& text) {
        const auto path = temp_file(name);
        std::ofstream out(path, std::ios::binary);
        out << text;
        return path.string();
    };
    CHECK_THROWS_AS(load_checkpoint("/nonexistent/net.txt"), io_error);
    CHECK_THROWS_AS(load_checkpoint(write_text("magic.txt", "alcore-nut 1\nmlp 2 2 2\n")),
                    format_error);
    CHECK_THROWS_AS(load_checkpoint(write_text("version.txt", "alcore-net 9\nmlp 2 2 2\n")),
                    format_error);
    CHECK_THROWS_AS(load_checkpoint(write_text("trunc.txt", "alcore-net 1\nmlp 2 2 2\n0.5 0.5\n")),
                    format_error);
    CHECK_THROWS_AS(load_checkpoint(write_text("header.txt", "alcore-net 1\nnet 2 2 2\n")),
                    format_error);
}
