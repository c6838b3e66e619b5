#pragma once

// Batch query strategies: greedy K-center coverage, the confident K-center
// fusion of coverage and predicted uncertainty (product and sum combiners),
// rank fusion, a sequential hybrid, entropy / top-score selection and random
// sampling.  Every operation is a pure function of its arguments; all
// argmax/top-B ties break toward the lowest pool index.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "alcore/errors.hpp"
#include "alcore/matrix.hpp"
#include "alcore/pool.hpp"
#include "alcore/rng.hpp"

namespace alcore {

enum class StrategyId {
    random,
    entropy,
    learning_loss,
    coreset,
    confident_coreset,
    confident_coreset_sum,
    rank_fusion,
    sequential,
};

inline const char* to_string(StrategyId id) {
    switch (id) {
        case StrategyId::random: return "random";
        case StrategyId::entropy: return "entropy";
        case StrategyId::learning_loss: return "learning-loss";
        case StrategyId::coreset: return "coreset";
        case StrategyId::confident_coreset: return "confident-coreset";
        case StrategyId::confident_coreset_sum: return "confident-coreset-sum";
        case StrategyId::rank_fusion: return "rank-fusion";
        case StrategyId::sequential: return "sequential";
    }
    throw internal_error("to_string: unhandled strategy id");
}

inline StrategyId parse_strategy_id(const std::string& name) {
    for (StrategyId id : {StrategyId::random, StrategyId::entropy, StrategyId::learning_loss,
                          StrategyId::coreset, StrategyId::confident_coreset,
                          StrategyId::confident_coreset_sum, StrategyId::rank_fusion,
                          StrategyId::sequential}) {
        if (name == to_string(id)) return id;
    }
    throw argument_error("unknown strategy: '" + name + "'");
}

// Does the strategy consume predicted-uncertainty scores?
inline bool needs_uncertainty(StrategyId id) {
    switch (id) {
        case StrategyId::learning_loss:
        case StrategyId::confident_coreset:
        case StrategyId::confident_coreset_sum:
        case StrategyId::rank_fusion:
        case StrategyId::sequential:
            return true;
        default:
            return false;
    }
}

enum class Combiner { product, sum };

// Whether the uncertainty term of confident K-center is min-max normalized
// over the shrinking candidate set at every greedy iteration or once per
// selection round.
enum class RenormMode { per_iteration, per_round };

struct StrategySpec {
    StrategyId id = StrategyId::random;
    double alpha = 0.25;     // coverage weight of the confident variants
    std::size_t budget = 1;  // B

    void validate() const {
        if (budget < 1) throw argument_error("StrategySpec: budget must be at least 1");
        if (!(alpha >= 0.0 && alpha <= 1.0))
            throw argument_error("StrategySpec: alpha must be in [0, 1]");
    }

    // Record label; the product variant carries its alpha so sweeps stay
    // distinguishable in output files.
    std::string label() const {
        std::string name = to_string(id);
        if (id == StrategyId::confident_coreset) name += "-a" + format_double(alpha);
        return name;
    }
};

// Scores for an explicit list of pool indices.
struct ScoreVector {
    std::vector<double> values;
    std::vector<std::size_t> index_map;

    void validate() const {
        if (values.size() != index_map.size())
            throw argument_error("ScoreVector: value/index length mismatch");
        for (double v : values)
            if (!std::isfinite(v)) throw argument_error("ScoreVector: non-finite score");
    }
};

struct SelectionResult {
    std::vector<std::size_t> selected;  // selection order
};

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw argument_error("euclidean_distance: dimension mismatch");
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = a[k] - b[k];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

// dist[i] = min over labeled j of ||x_i - x_j||, maintained exactly while
// points are added.
class MinDistState {
  public:
    MinDistState(const FeatureMatrix& features, const std::vector<std::size_t>& labeled)
        : dist_(features.rows(), std::numeric_limits<double>::infinity()),
          labeled_(features.rows(), false) {
        if (labeled.empty()) throw argument_error("MinDistState: empty labeled set");
        for (std::size_t j : labeled) {
            if (j >= features.rows())
                throw argument_error("MinDistState: labeled index out of range");
            labeled_[j] = true;
        }
        for (std::size_t i = 0; i < features.rows(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t j : labeled)
                best = std::min(best, euclidean_distance(features.row(i), features.row(j)));
            dist_[i] = best;
        }
    }

    // dist'[i] = min(dist[i], ||x_i - x_new||); new_idx must be unlabeled.
    void add(const FeatureMatrix& features, std::size_t new_idx) {
        if (new_idx >= dist_.size())
            throw argument_error("MinDistState::add: index out of range");
        if (labeled_[new_idx])
            throw argument_error("MinDistState::add: index already labeled");
        for (std::size_t i = 0; i < dist_.size(); ++i)
            dist_[i] = std::min(dist_[i],
                                euclidean_distance(features.row(i), features.row(new_idx)));
        labeled_[new_idx] = true;
    }

    double dist(std::size_t i) const { return dist_[i]; }
    const std::vector<double>& distances() const { return dist_; }
    bool is_labeled(std::size_t i) const { return labeled_[i]; }

  private:
    std::vector<double> dist_;
    std::vector<bool> labeled_;
};

inline MinDistState init_min_distances(const FeatureMatrix& features,
                                       const std::vector<std::size_t>& labeled) {
    return MinDistState(features, labeled);
}

inline MinDistState update_min_distances(const MinDistState& state,
                                         const FeatureMatrix& features, std::size_t new_idx) {
    MinDistState next = state;
    next.add(features, new_idx);
    return next;
}

// Affine rescale to [0, 1].  A constant vector maps to all 0.5 so that the
// product combiner is not annihilated for every candidate at once.
inline std::vector<double> minmax_normalize(const std::vector<double>& values) {
    if (values.empty()) throw argument_error("minmax_normalize: empty input");
    double lo = values[0], hi = values[0];
    for (double v : values) {
        if (!std::isfinite(v)) throw argument_error("minmax_normalize: non-finite value");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::vector<double> out(values.size());
    if (lo == hi) {
        std::fill(out.begin(), out.end(), 0.5);
    } else {
        const double range = hi - lo;
        for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - lo) / range;
    }
    return out;
}

namespace detail {

inline void check_budget(std::size_t budget, std::size_t candidate_count) {
    if (budget < 1) throw argument_error("budget must be at least 1");
    if (budget > candidate_count)
        throw argument_error("budget " + std::to_string(budget) +
                             " exceeds unlabeled pool of size " +
                             std::to_string(candidate_count));
}

// Dense per-pool-index score table; every candidate must be covered.
inline std::vector<double> dense_scores(const ScoreVector& scores, std::size_t n,
                                        const std::vector<std::size_t>& candidates) {
    scores.validate();
    std::vector<double> dense(n, 0.0);
    std::vector<bool> present(n, false);
    for (std::size_t k = 0; k < scores.index_map.size(); ++k) {
        const std::size_t idx = scores.index_map[k];
        if (idx >= n) throw argument_error("ScoreVector: index out of range");
        dense[idx] = scores.values[k];
        present[idx] = true;
    }
    for (std::size_t idx : candidates)
        if (!present[idx])
            throw argument_error("missing uncertainty score for candidate " +
                                 std::to_string(idx));
    return dense;
}

}  // namespace detail

// Greedy K-center: repeatedly pick the candidate farthest from its closest
// labeled point.
inline SelectionResult kcenter_greedy(const FeatureMatrix& features, const PoolState& pool,
                                      std::size_t budget) {
    if (features.rows() != pool.size())
        throw argument_error("kcenter_greedy: feature/pool size mismatch");
    detail::check_budget(budget, pool.size() - pool.labeled_count());
    MinDistState state(features, pool.labeled());
    SelectionResult result;
    result.selected.reserve(budget);
    for (std::size_t k = 0; k < budget; ++k) {
        std::size_t best = pool.size();
        double best_dist = -1.0;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (state.is_labeled(i)) continue;
            if (state.dist(i) > best_dist) {
                best_dist = state.dist(i);
                best = i;
            }
        }
        result.selected.push_back(best);
        state.add(features, best);
    }
    return result;
}

// Confident K-center: per iteration, fuse the min-max normalized coverage
// distance with the min-max normalized predicted uncertainty over the current
// candidate set and pick the argmax.  Product combiner uses
// N(dist)^alpha * N(G)^(1-alpha) with the 0^0 = 1 convention, so alpha = 1
// recovers plain K-center and alpha = 0 recovers top-uncertainty selection.
// Sum combiner adds the two normalized scores and ignores alpha.
inline SelectionResult confident_kcenter(const FeatureMatrix& features, const PoolState& pool,
                                         const ScoreVector& uncertainty, std::size_t budget,
                                         double alpha, Combiner combiner,
                                         RenormMode renorm = RenormMode::per_iteration) {
    if (features.rows() != pool.size())
        throw argument_error("confident_kcenter: feature/pool size mismatch");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw argument_error("confident_kcenter: alpha must be in [0, 1]");
    std::vector<std::size_t> candidates = pool.candidates();
    detail::check_budget(budget, candidates.size());
    const std::vector<double> unc = detail::dense_scores(uncertainty, pool.size(), candidates);

    // Fixed normalization over the round-start candidate set.
    std::vector<double> round_norm_unc(pool.size(), 0.0);
    if (renorm == RenormMode::per_round) {
        std::vector<double> vals(candidates.size());
        for (std::size_t k = 0; k < candidates.size(); ++k) vals[k] = unc[candidates[k]];
        const auto normed = minmax_normalize(vals);
        for (std::size_t k = 0; k < candidates.size(); ++k)
            round_norm_unc[candidates[k]] = normed[k];
    }

    MinDistState state(features, pool.labeled());
    SelectionResult result;
    result.selected.reserve(budget);
    for (std::size_t k = 0; k < budget; ++k) {
        std::vector<double> dist_vals(candidates.size());
        std::vector<double> unc_vals(candidates.size());
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            dist_vals[c] = state.dist(candidates[c]);
            unc_vals[c] = unc[candidates[c]];
        }
        const auto norm_dist = minmax_normalize(dist_vals);
        std::vector<double> norm_unc;
        if (renorm == RenormMode::per_iteration) {
            norm_unc = minmax_normalize(unc_vals);
        } else {
            norm_unc.resize(candidates.size());
            for (std::size_t c = 0; c < candidates.size(); ++c)
                norm_unc[c] = round_norm_unc[candidates[c]];
        }

        std::size_t best_pos = candidates.size();
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            double score;
            if (combiner == Combiner::product) {
                // std::pow(x, 0) == 1 for every x, which is exactly the
                // 0^0 = 1 convention the reductions rely on.
                score = std::pow(norm_dist[c], alpha) * std::pow(norm_unc[c], 1.0 - alpha);
            } else {
                score = norm_dist[c] + norm_unc[c];
            }
            if (score > best_score) {
                best_score = score;
                best_pos = c;
            }
        }
        const std::size_t u = candidates[best_pos];
        result.selected.push_back(u);
        state.add(features, u);
        candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(best_pos));
    }
    return result;
}

// Late fusion: rank both criteria once (rank 1 = largest value, ties share
// the lowest applicable rank) and take the B candidates with the lowest
// average rank.
inline SelectionResult rank_fusion_select(const ScoreVector& min_dist_scores,
                                          const ScoreVector& uncertainty_scores,
                                          std::size_t budget) {
    min_dist_scores.validate();
    uncertainty_scores.validate();
    if (min_dist_scores.index_map != uncertainty_scores.index_map)
        throw argument_error("rank_fusion_select: score vectors cover different candidates");
    const std::size_t m = min_dist_scores.values.size();
    detail::check_budget(budget, m);

    auto competition_ranks = [](const std::vector<double>& values) {
        std::vector<double> ranks(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            std::size_t greater = 0;
            for (std::size_t j = 0; j < values.size(); ++j)
                if (values[j] > values[i]) ++greater;
            ranks[i] = static_cast<double>(1 + greater);
        }
        return ranks;
    };
    const auto rank_dist = competition_ranks(min_dist_scores.values);
    const auto rank_unc = competition_ranks(uncertainty_scores.values);

    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double avg_a = 0.5 * (rank_dist[a] + rank_unc[a]);
        const double avg_b = 0.5 * (rank_dist[b] + rank_unc[b]);
        if (avg_a != avg_b) return avg_a < avg_b;
        return min_dist_scores.index_map[a] < min_dist_scores.index_map[b];
    });

    SelectionResult result;
    result.selected.reserve(budget);
    for (std::size_t k = 0; k < budget; ++k)
        result.selected.push_back(min_dist_scores.index_map[order[k]]);
    return result;
}

// B largest scores, ties toward the lowest pool index, in descending-score
// order.
inline SelectionResult top_b_select(const ScoreVector& scores, std::size_t budget) {
    scores.validate();
    detail::check_budget(budget, scores.values.size());
    std::vector<std::size_t> order(scores.values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores.values[a] != scores.values[b]) return scores.values[a] > scores.values[b];
        return scores.index_map[a] < scores.index_map[b];
    });
    SelectionResult result;
    result.selected.reserve(budget);
    for (std::size_t k = 0; k < budget; ++k) result.selected.push_back(scores.index_map[order[k]]);
    return result;
}

// Hybrid: the first ceil(B/2) picks are top-uncertainty, the remaining
// floor(B/2) are K-center picks after those joins.
inline SelectionResult sequential_select(const FeatureMatrix& features, const PoolState& pool,
                                         const ScoreVector& uncertainty, std::size_t budget) {
    if (budget < 2) throw argument_error("sequential_select: budget must be at least 2");
    const auto candidates = pool.candidates();
    detail::check_budget(budget, candidates.size());
    const std::vector<double> dense =
        detail::dense_scores(uncertainty, pool.size(), candidates);

    ScoreVector candidate_scores;
    candidate_scores.index_map = candidates;
    candidate_scores.values.reserve(candidates.size());
    for (std::size_t idx : candidates) candidate_scores.values.push_back(dense[idx]);

    const std::size_t uncertainty_picks = (budget + 1) / 2;
    SelectionResult result = top_b_select(candidate_scores, uncertainty_picks);

    const std::size_t coverage_picks = budget / 2;
    if (coverage_picks > 0) {
        const PoolState grown = pool.with_added(result.selected);
        const SelectionResult rest = kcenter_greedy(features, grown, coverage_picks);
        result.selected.insert(result.selected.end(), rest.selected.begin(),
                               rest.selected.end());
    }
    return result;
}

// Shannon entropy of each probability row, 0*ln(0) = 0.
inline ScoreVector entropy_scores(const FeatureMatrix& probabilities,
                                  std::vector<std::size_t> index_map = {}) {
    if (index_map.empty()) {
        index_map.resize(probabilities.rows());
        for (std::size_t i = 0; i < index_map.size(); ++i) index_map[i] = i;
    }
    if (index_map.size() != probabilities.rows())
        throw argument_error("entropy_scores: index map size mismatch");
    ScoreVector out;
    out.index_map = std::move(index_map);
    out.values.reserve(probabilities.rows());
    for (std::size_t i = 0; i < probabilities.rows(); ++i) {
        double sum = 0.0;
        double entropy = 0.0;
        for (std::size_t c = 0; c < probabilities.cols(); ++c) {
            const double p = probabilities.at(i, c);
            if (p < 0.0) throw argument_error("entropy_scores: negative probability");
            sum += p;
            if (p > 0.0) entropy -= p * std::log(p);
        }
        if (std::abs(sum - 1.0) > 1e-6)
            throw argument_error("entropy_scores: row does not sum to 1");
        out.values.push_back(entropy);
    }
    return out;
}

// Uniform subset without replacement in draw order, deterministic per seed.
inline SelectionResult random_select(const std::vector<std::size_t>& candidates,
                                     std::size_t budget, std::uint64_t seed) {
    detail::check_budget(budget, candidates.size());
    std::vector<std::size_t> cand = candidates;
    Rng rng(seed);
    SelectionResult result;
    result.selected.reserve(budget);
    for (std::size_t k = 0; k < budget; ++k) {
        const std::size_t j = k + static_cast<std::size_t>(rng.below(cand.size() - k));
        std::swap(cand[k], cand[j]);
        result.selected.push_back(cand[k]);
    }
    return result;
}

}  // namespace alcore
