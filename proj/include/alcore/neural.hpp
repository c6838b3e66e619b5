#pragma once

// Feed-forward target classifier with hand-written backpropagation, plus the
// uncertainty-predictor head that learns to rank samples by the target
// model's loss.  The head projects every hidden activation vector to a fixed
// width (average pooling over a length-1 spatial extent is the identity),
// concatenates the projections and maps them to one scalar predicted loss.
//
// Training minimizes
//     (1/N_b) sum CE  +  lambda * (2/N_b) * sum_pairs hinge
// where the hinge compares predicted-loss differences against the sign of
// true-loss differences with margin xi, and pairs are consecutive elements
// of the shuffled batch (N_b/2 pairs).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "alcore/errors.hpp"
#include "alcore/format.hpp"
#include "alcore/matrix.hpp"
#include "alcore/rng.hpp"
#include "alcore/strategies.hpp"

namespace alcore {

// One affine layer, weight row-major out x in.
struct LayerParams {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> weight;
    std::vector<double> bias;

    static LayerParams zeros(std::size_t in, std::size_t out) {
        LayerParams layer;
        layer.in = in;
        layer.out = out;
        layer.weight.assign(in * out, 0.0);
        layer.bias.assign(out, 0.0);
        return layer;
    }

    void validate() const {
        if (weight.size() != in * out || bias.size() != out)
            throw argument_error("LayerParams: shape mismatch");
        for (double v : weight)
            if (!std::isfinite(v)) throw argument_error("LayerParams: non-finite weight");
        for (double v : bias)
            if (!std::isfinite(v)) throw argument_error("LayerParams: non-finite bias");
    }
};

// Rectifier hidden layers, softmax output.
struct MlpParams {
    std::vector<std::size_t> layer_sizes;  // [d, hidden..., C]
    std::vector<LayerParams> layers;

    static MlpParams zeros(const std::vector<std::size_t>& sizes) {
        if (sizes.size() < 2)
            throw argument_error("MlpParams: need at least input and output sizes");
        for (std::size_t s : sizes)
            if (s < 1) throw argument_error("MlpParams: zero-width layer");
        MlpParams params;
        params.layer_sizes = sizes;
        for (std::size_t l = 0; l + 1 < sizes.size(); ++l)
            params.layers.push_back(LayerParams::zeros(sizes[l], sizes[l + 1]));
        return params;
    }

    std::size_t input_dim() const { return layer_sizes.front(); }
    std::size_t output_dim() const { return layer_sizes.back(); }
    std::size_t hidden_count() const { return layer_sizes.size() - 2; }

    void validate() const {
        if (layer_sizes.size() < 2 || layers.size() + 1 != layer_sizes.size())
            throw argument_error("MlpParams: layer count mismatch");
        for (std::size_t l = 0; l < layers.size(); ++l) {
            if (layers[l].in != layer_sizes[l] || layers[l].out != layer_sizes[l + 1])
                throw argument_error("MlpParams: layer shape mismatch");
            layers[l].validate();
        }
    }
};

// One projection per hidden layer of the target model, then a scalar output
// layer on the concatenation.
struct UncertaintyHead {
    std::size_t width = 16;
    std::vector<LayerParams> projections;
    LayerParams output;  // 1 x (width * hidden_count)

    static UncertaintyHead zeros(const std::vector<std::size_t>& mlp_sizes, std::size_t width) {
        if (width < 1) throw argument_error("UncertaintyHead: width must be positive");
        UncertaintyHead head;
        head.width = width;
        const std::size_t hidden = mlp_sizes.size() - 2;
        for (std::size_t l = 0; l < hidden; ++l)
            head.projections.push_back(LayerParams::zeros(mlp_sizes[l + 1], width));
        head.output = LayerParams::zeros(width * hidden, 1);
        return head;
    }

    void validate() const {
        for (const auto& p : projections) {
            if (p.out != width) throw argument_error("UncertaintyHead: projection width mismatch");
            p.validate();
        }
        if (output.in != width * projections.size() || output.out != 1)
            throw argument_error("UncertaintyHead: output shape mismatch");
        output.validate();
    }
};

struct NetBundle {
    MlpParams mlp;
    UncertaintyHead head;
};

struct TrainConfig {
    double learning_rate = 0.1;
    std::size_t epochs = 100;
    std::size_t batch_size = 32;  // N_b, must be even
    double lambda = 1.0;          // weight of the uncertainty term
    double margin = 0.5;          // xi
    std::uint64_t seed = 0;
    bool detach_head_gradient = false;
    std::vector<std::size_t> hidden_sizes = {64, 32};
    std::size_t head_width = 16;

    void validate() const {
        if (!(learning_rate > 0.0)) throw argument_error("TrainConfig: learning_rate must be positive");
        if (epochs < 1) throw argument_error("TrainConfig: epochs must be at least 1");
        if (batch_size < 2 || batch_size % 2 != 0)
            throw argument_error("TrainConfig: batch_size must be even and at least 2");
        if (!(lambda >= 0.0)) throw argument_error("TrainConfig: lambda must be non-negative");
        if (!(margin > 0.0)) throw argument_error("TrainConfig: margin must be positive");
        if (head_width < 1) throw argument_error("TrainConfig: head_width must be positive");
    }
};

struct ForwardTrace {
    std::vector<std::vector<double>> pre;   // per layer, pre-activation
    std::vector<std::vector<double>> post;  // per hidden layer, after rectifier
    std::vector<double> input;
    std::vector<double> probabilities;

    const std::vector<double>& logits() const { return pre.back(); }
};

namespace detail {

inline void affine(const LayerParams& layer, std::span<const double> x,
                   std::vector<double>& out) {
    out.resize(layer.out);
    for (std::size_t j = 0; j < layer.out; ++j) {
        double acc = layer.bias[j];
        const double* w = layer.weight.data() + j * layer.in;
        for (std::size_t k = 0; k < layer.in; ++k) acc += w[k] * x[k];
        out[j] = acc;
    }
}

inline void softmax(const std::vector<double>& logits, std::vector<double>& probs) {
    probs.resize(logits.size());
    const double peak = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < logits.size(); ++c) {
        probs[c] = std::exp(logits[c] - peak);
        sum += probs[c];
    }
    for (double& p : probs) p /= sum;
}

}  // namespace detail

inline void mlp_forward_into(const MlpParams& params, std::span<const double> x,
                             ForwardTrace& trace) {
    if (x.size() != params.input_dim())
        throw argument_error("mlp_forward: input dimension mismatch");
    const std::size_t num_layers = params.layers.size();
    trace.pre.resize(num_layers);
    trace.post.resize(params.hidden_count());
    trace.input.assign(x.begin(), x.end());
    std::span<const double> current = trace.input;
    for (std::size_t l = 0; l < num_layers; ++l) {
        detail::affine(params.layers[l], current, trace.pre[l]);
        if (l + 1 < num_layers) {
            auto& post = trace.post[l];
            post.resize(trace.pre[l].size());
            for (std::size_t j = 0; j < post.size(); ++j)
                post[j] = trace.pre[l][j] > 0.0 ? trace.pre[l][j] : 0.0;
            current = post;
        }
    }
    detail::softmax(trace.pre.back(), trace.probabilities);
}

inline ForwardTrace mlp_forward(const MlpParams& params, std::span<const double> x) {
    ForwardTrace trace;
    mlp_forward_into(params, x, trace);
    return trace;
}

// -ln p_y with a numerical floor on p_y.
inline double cross_entropy(const std::vector<double>& probabilities, int label) {
    if (label < 0 || static_cast<std::size_t>(label) >= probabilities.size())
        throw argument_error("cross_entropy: label out of range");
    return -std::log(std::max(probabilities[static_cast<std::size_t>(label)], 1e-12));
}

// Predicted loss G(x) from the layer activations of one forward pass.
inline double head_forward(const UncertaintyHead& head, const ForwardTrace& trace) {
    if (trace.post.size() != head.projections.size())
        throw argument_error("head_forward: trace/head layer count mismatch");
    double value = head.output.bias[0];
    std::vector<double> projected;
    for (std::size_t l = 0; l < head.projections.size(); ++l) {
        if (trace.post[l].size() != head.projections[l].in)
            throw argument_error("head_forward: activation width mismatch");
        detail::affine(head.projections[l], trace.post[l], projected);
        const double* w = head.output.weight.data() + l * head.width;
        for (std::size_t j = 0; j < head.width; ++j) value += w[j] * projected[j];
    }
    return value;
}

// Hinge on the signed difference of predicted losses; the sign is +1 only
// when l_1 > l_2, equality falls to the -1 branch.
inline double margin_pair_loss(double lhat_1, double lhat_2, double l_1, double l_2,
                               double xi) {
    if (!(xi > 0.0)) throw argument_error("margin_pair_loss: margin must be positive");
    if (!std::isfinite(lhat_1) || !std::isfinite(lhat_2) || !std::isfinite(l_1) ||
        !std::isfinite(l_2))
        throw argument_error("margin_pair_loss: non-finite input");
    const double f = l_1 > l_2 ? 1.0 : -1.0;
    return std::max(0.0, -f * (lhat_1 - lhat_2) + xi);
}

// Scalar joint loss from already-computed per-sample losses; pairs are the
// consecutive elements (0,1), (2,3), ... of the batch order.
inline double joint_loss_value(const std::vector<double>& target_losses,
                               const std::vector<double>& predicted_losses, double lambda,
                               double xi) {
    const std::size_t n = target_losses.size();
    if (n == 0 || n % 2 != 0) throw argument_error("joint_loss_value: batch size must be even");
    if (predicted_losses.size() != n)
        throw argument_error("joint_loss_value: loss vector length mismatch");
    double target_term = 0.0;
    for (double l : target_losses) target_term += l;
    target_term /= static_cast<double>(n);
    double pair_term = 0.0;
    for (std::size_t p = 0; p < n; p += 2)
        pair_term += margin_pair_loss(predicted_losses[p], predicted_losses[p + 1],
                                      target_losses[p], target_losses[p + 1], xi);
    return target_term + lambda * (2.0 / static_cast<double>(n)) * pair_term;
}

struct JointLossResult {
    double total = 0.0;
    std::vector<double> target_losses;
    std::vector<double> predicted_losses;
    MlpParams body_grad;
    UncertaintyHead head_grad;
};

// Joint loss over one batch plus gradients for every parameter, computed by
// hand-written backpropagation.  With detach_head_gradient the uncertainty
// term does not propagate into the target model.
inline JointLossResult joint_batch_loss(const MlpParams& params, const UncertaintyHead& head,
                                        const FeatureMatrix& features,
                                        const LabelVector& labels,
                                        std::span<const std::size_t> batch,
                                        const TrainConfig& config) {
    config.validate();
    const std::size_t n = batch.size();
    if (n == 0 || n % 2 != 0)
        throw argument_error("joint_batch_loss: batch size must be even");
    if (labels.size() != features.rows())
        throw argument_error("joint_batch_loss: feature/label count mismatch");

    JointLossResult result;
    result.body_grad = MlpParams::zeros(params.layer_sizes);
    result.head_grad = UncertaintyHead::zeros(params.layer_sizes, head.width);
    result.target_losses.resize(n);
    result.predicted_losses.resize(n);

    const std::size_t hidden = params.hidden_count();
    std::vector<ForwardTrace> traces(n);
    std::vector<std::vector<double>> head_projected(n);  // concatenated projections

    for (std::size_t b = 0; b < n; ++b) {
        const std::size_t idx = batch[b];
        if (idx >= features.rows())
            throw argument_error("joint_batch_loss: batch index out of range");
        mlp_forward_into(params, features.row(idx), traces[b]);
        result.target_losses[b] = cross_entropy(traces[b].probabilities, labels.labels[idx]);

        auto& concat = head_projected[b];
        concat.resize(head.width * hidden);
        double lhat = head.output.bias[0];
        std::vector<double> projected;
        for (std::size_t l = 0; l < hidden; ++l) {
            detail::affine(head.projections[l], traces[b].post[l], projected);
            std::copy(projected.begin(), projected.end(), concat.begin() + l * head.width);
            const double* w = head.output.weight.data() + l * head.width;
            for (std::size_t j = 0; j < head.width; ++j) lhat += w[j] * projected[j];
        }
        result.predicted_losses[b] = lhat;
    }
    result.total = joint_loss_value(result.target_losses, result.predicted_losses,
                                    config.lambda, config.margin);

    // d(total)/d(lhat_b): each sample sits in exactly one pair.
    std::vector<double> dlhat(n, 0.0);
    const double pair_weight = config.lambda * 2.0 / static_cast<double>(n);
    for (std::size_t p = 0; p < n; p += 2) {
        const double f = result.target_losses[p] > result.target_losses[p + 1] ? 1.0 : -1.0;
        const double preact =
            -f * (result.predicted_losses[p] - result.predicted_losses[p + 1]) + config.margin;
        if (preact > 0.0) {
            dlhat[p] += pair_weight * (-f);
            dlhat[p + 1] += pair_weight * f;
        }
    }

    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<std::vector<double>> dpost(hidden);
    std::vector<double> delta, delta_prev;
    for (std::size_t b = 0; b < n; ++b) {
        const ForwardTrace& trace = traces[b];
        const int y = labels.labels[batch[b]];

        // Head gradients and the head's pull on the hidden activations.
        for (std::size_t l = 0; l < hidden; ++l)
            dpost[l].assign(trace.post[l].size(), 0.0);
        if (dlhat[b] != 0.0) {
            auto& out_grad = result.head_grad.output;
            out_grad.bias[0] += dlhat[b];
            for (std::size_t k = 0; k < out_grad.in; ++k)
                out_grad.weight[k] += dlhat[b] * head_projected[b][k];
            for (std::size_t l = 0; l < hidden; ++l) {
                auto& proj = head.projections[l];
                auto& proj_grad = result.head_grad.projections[l];
                const double* w_out = head.output.weight.data() + l * head.width;
                for (std::size_t j = 0; j < head.width; ++j) {
                    const double dv = dlhat[b] * w_out[j];
                    proj_grad.bias[j] += dv;
                    const double* w_row = proj.weight.data() + j * proj.in;
                    double* g_row = proj_grad.weight.data() + j * proj.in;
                    for (std::size_t k = 0; k < proj.in; ++k) {
                        g_row[k] += dv * trace.post[l][k];
                        if (!config.detach_head_gradient) dpost[l][k] += dv * w_row[k];
                    }
                }
            }
        }

        // Softmax + cross-entropy gradient at the logits.
        delta.resize(params.output_dim());
        for (std::size_t c = 0; c < delta.size(); ++c)
            delta[c] = (trace.probabilities[c] - (static_cast<int>(c) == y ? 1.0 : 0.0)) * inv_n;

        // Walk the layers backwards.
        for (std::size_t l = params.layers.size(); l-- > 0;) {
            const LayerParams& layer = params.layers[l];
            LayerParams& grad = result.body_grad.layers[l];
            const std::span<const double> below =
                l == 0 ? std::span<const double>(trace.input) : std::span<const double>(trace.post[l - 1]);
            for (std::size_t j = 0; j < layer.out; ++j) {
                grad.bias[j] += delta[j];
                double* g_row = grad.weight.data() + j * layer.in;
                for (std::size_t k = 0; k < layer.in; ++k) g_row[k] += delta[j] * below[k];
            }
            if (l == 0) break;
            delta_prev.assign(layer.in, 0.0);
            for (std::size_t j = 0; j < layer.out; ++j) {
                const double* w_row = layer.weight.data() + j * layer.in;
                for (std::size_t k = 0; k < layer.in; ++k)
                    delta_prev[k] += w_row[k] * delta[j];
            }
            // Add the head's pull, then gate through the rectifier.
            for (std::size_t k = 0; k < layer.in; ++k) {
                delta_prev[k] += dpost[l - 1][k];
                if (trace.pre[l - 1][k] <= 0.0) delta_prev[k] = 0.0;
            }
            delta = delta_prev;
        }
    }
    return result;
}

namespace detail {

// Scaled uniform (Glorot) initialization.
inline void init_layer(LayerParams& layer, Rng& rng) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
    for (double& w : layer.weight) w = (2.0 * rng.uniform01() - 1.0) * limit;
    std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
}

inline void axpy(std::vector<double>& target, const std::vector<double>& grad, double scale) {
    for (std::size_t i = 0; i < target.size(); ++i) target[i] += scale * grad[i];
}

}  // namespace detail

// Minibatch gradient descent from seed-deterministic initialization. Batches
// are consecutive chunks of a fresh shuffle each epoch; when the labeled
// count is odd the last shuffled sample sits out that epoch so every batch
// stays pairable.
inline NetBundle train(const FeatureMatrix& features, const LabelVector& labels,
                       const std::vector<std::size_t>& labeled_indices,
                       const TrainConfig& config) {
    config.validate();
    if (labels.size() != features.rows())
        throw argument_error("train: feature/label count mismatch");
    if (labeled_indices.size() < 2)
        throw argument_error("train: need at least 2 labeled samples");
    for (std::size_t idx : labeled_indices)
        if (idx >= features.rows()) throw argument_error("train: labeled index out of range");

    std::vector<std::size_t> sizes;
    sizes.push_back(features.cols());
    sizes.insert(sizes.end(), config.hidden_sizes.begin(), config.hidden_sizes.end());
    sizes.push_back(static_cast<std::size_t>(labels.num_classes));

    Rng rng(config.seed);
    NetBundle bundle;
    bundle.mlp = MlpParams::zeros(sizes);
    for (auto& layer : bundle.mlp.layers) detail::init_layer(layer, rng);
    bundle.head = UncertaintyHead::zeros(sizes, config.head_width);
    for (auto& proj : bundle.head.projections) detail::init_layer(proj, rng);
    detail::init_layer(bundle.head.output, rng);

    std::vector<std::size_t> order = labeled_indices;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        const std::size_t usable = order.size() - order.size() % 2;
        for (std::size_t start = 0; start < usable; start += config.batch_size) {
            const std::size_t count = std::min(config.batch_size, usable - start);
            const auto batch = std::span<const std::size_t>(order).subspan(start, count);
            const JointLossResult step =
                joint_batch_loss(bundle.mlp, bundle.head, features, labels, batch, config);
            const double lr = -config.learning_rate;
            for (std::size_t l = 0; l < bundle.mlp.layers.size(); ++l) {
                detail::axpy(bundle.mlp.layers[l].weight, step.body_grad.layers[l].weight, lr);
                detail::axpy(bundle.mlp.layers[l].bias, step.body_grad.layers[l].bias, lr);
            }
            for (std::size_t l = 0; l < bundle.head.projections.size(); ++l) {
                detail::axpy(bundle.head.projections[l].weight,
                             step.head_grad.projections[l].weight, lr);
                detail::axpy(bundle.head.projections[l].bias, step.head_grad.projections[l].bias,
                             lr);
            }
            detail::axpy(bundle.head.output.weight, step.head_grad.output.weight, lr);
            detail::axpy(bundle.head.output.bias, step.head_grad.output.bias, lr);
        }
    }
    return bundle;
}

inline FeatureMatrix predict_proba(const MlpParams& params, const FeatureMatrix& features,
                                   const std::vector<std::size_t>& indices) {
    FeatureMatrix out(indices.size(), params.output_dim());
    ForwardTrace trace;
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= features.rows())
            throw argument_error("predict_proba: index out of range");
        mlp_forward_into(params, features.row(indices[i]), trace);
        for (std::size_t c = 0; c < trace.probabilities.size(); ++c)
            out.at(i, c) = trace.probabilities[c];
    }
    return out;
}

inline ScoreVector predict_uncertainty(const MlpParams& params, const UncertaintyHead& head,
                                       const FeatureMatrix& features,
                                       const std::vector<std::size_t>& indices) {
    ScoreVector out;
    out.index_map = indices;
    out.values.reserve(indices.size());
    ForwardTrace trace;
    for (std::size_t idx : indices) {
        if (idx >= features.rows())
            throw argument_error("predict_uncertainty: index out of range");
        mlp_forward_into(params, features.row(idx), trace);
        out.values.push_back(head_forward(head, trace));
    }
    return out;
}

// Last hidden-layer activations, the feature space the distance metric acts
// on.  For a [d, C] network this is the raw input.
inline FeatureMatrix embed(const MlpParams& params, const FeatureMatrix& features,
                           const std::vector<std::size_t>& indices) {
    const std::size_t width =
        params.layer_sizes[params.layer_sizes.size() - 2];
    FeatureMatrix out(indices.size(), width);
    ForwardTrace trace;
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= features.rows()) throw argument_error("embed: index out of range");
        if (params.hidden_count() == 0) {
            for (std::size_t k = 0; k < width; ++k) out.at(i, k) = features.at(indices[i], k);
            continue;
        }
        mlp_forward_into(params, features.row(indices[i]), trace);
        const auto& last_hidden = trace.post.back();
        for (std::size_t k = 0; k < width; ++k) out.at(i, k) = last_hidden[k];
    }
    return out;
}

struct EvalResult {
    double accuracy = 0.0;
    double macro_recall = 0.0;
};

// Accuracy plus mean per-class recall over the classes present in the
// evaluation subset.  Argmax ties go to the lowest class id.
inline EvalResult evaluate(const MlpParams& params, const FeatureMatrix& features,
                           const LabelVector& labels,
                           const std::vector<std::size_t>& indices) {
    if (indices.empty()) throw argument_error("evaluate: empty evaluation set");
    if (labels.size() != features.rows())
        throw argument_error("evaluate: feature/label count mismatch");
    const std::size_t C = static_cast<std::size_t>(labels.num_classes);
    std::vector<std::size_t> per_class_total(C, 0), per_class_hit(C, 0);
    std::size_t correct = 0;
    ForwardTrace trace;
    for (std::size_t idx : indices) {
        if (idx >= features.rows()) throw argument_error("evaluate: index out of range");
        mlp_forward_into(params, features.row(idx), trace);
        std::size_t argmax = 0;
        for (std::size_t c = 1; c < trace.probabilities.size(); ++c)
            if (trace.probabilities[c] > trace.probabilities[argmax]) argmax = c;
        const std::size_t truth = static_cast<std::size_t>(labels.labels[idx]);
        ++per_class_total[truth];
        if (argmax == truth) {
            ++correct;
            ++per_class_hit[truth];
        }
    }
    EvalResult out;
    out.accuracy = static_cast<double>(correct) / static_cast<double>(indices.size());
    double recall_sum = 0.0;
    std::size_t present = 0;
    for (std::size_t c = 0; c < C; ++c) {
        if (per_class_total[c] == 0) continue;
        ++present;
        recall_sum +=
            static_cast<double>(per_class_hit[c]) / static_cast<double>(per_class_total[c]);
    }
    out.macro_recall = recall_sum / static_cast<double>(present);
    return out;
}

// ---------------------------------------------------------------------------
// Checkpoint format: versioned decimal text, 17 significant digits so
// parameters round-trip exactly.
//
//   alcore-net 1
//   mlp <k> <size_0> ... <size_{k-1}>
//   <per layer: one line of out*in weights, one line of out biases>
//   head <width> <hidden>
//   <per projection: weights line, bias line>
//   <output weights line>
//   <output bias line>

inline void save_checkpoint(const std::string& path, const NetBundle& bundle) {
    bundle.mlp.validate();
    bundle.head.validate();
    auto out = detail::open_out(path);
    out << "alcore-net 1\n";
    out << "mlp " << bundle.mlp.layer_sizes.size();
    for (std::size_t s : bundle.mlp.layer_sizes) out << ' ' << s;
    out << '\n';
    auto write_layer = [&out](const LayerParams& layer) {
        for (std::size_t i = 0; i < layer.weight.size(); ++i)
            out << (i ? " " : "") << format_double(layer.weight[i], 17);
        out << '\n';
        for (std::size_t i = 0; i < layer.bias.size(); ++i)
            out << (i ? " " : "") << format_double(layer.bias[i], 17);
        out << '\n';
    };
    for (const auto& layer : bundle.mlp.layers) write_layer(layer);
    out << "head " << bundle.head.width << ' ' << bundle.head.projections.size() << '\n';
    for (const auto& proj : bundle.head.projections) write_layer(proj);
    write_layer(bundle.head.output);
    if (!out) throw io_error("write failure: " + path);
}

inline NetBundle load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open file: " + path);
    auto fail = [&path](const std::string& why) -> format_error {
        return format_error(path + ": " + why);
    };

    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != "alcore-net")
        throw fail("not a checkpoint file");
    if (version != 1) throw fail("unsupported checkpoint version");

    std::string tag;
    std::size_t k = 0;
    if (!(in >> tag >> k) || tag != "mlp" || k < 2) throw fail("bad mlp header");
    std::vector<std::size_t> sizes(k);
    for (auto& s : sizes)
        if (!(in >> s) || s < 1) throw fail("bad layer size");

    auto read_layer = [&](LayerParams& layer) {
        for (double& w : layer.weight)
            if (!(in >> w)) throw fail("truncated weights");
        for (double& b : layer.bias)
            if (!(in >> b)) throw fail("truncated biases");
    };

    NetBundle bundle;
    bundle.mlp = MlpParams::zeros(sizes);
    for (auto& layer : bundle.mlp.layers) read_layer(layer);

    std::size_t width = 0, hidden = 0;
    if (!(in >> tag >> width >> hidden) || tag != "head" || width < 1)
        throw fail("bad head header");
    if (hidden != sizes.size() - 2) throw fail("head/mlp layer count mismatch");
    bundle.head = UncertaintyHead::zeros(sizes, width);
    for (auto& proj : bundle.head.projections) read_layer(proj);
    read_layer(bundle.head.output);

    bundle.mlp.validate();
    bundle.head.validate();
    return bundle;
}

}  // namespace alcore
