#pragma once

// Labeled/unlabeled pool bookkeeping, dataset file formats and deterministic
// synthetic dataset generation.
//
// File formats (all plain text, '\n' line ends, no header):
//   features  n rows of d comma-separated decimal floats
//   labels    one non-negative decimal integer per line
//   indices   one 0-based decimal integer per line
//   scores    one decimal float per line

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "alcore/errors.hpp"
#include "alcore/format.hpp"
#include "alcore/matrix.hpp"
#include "alcore/rng.hpp"

namespace alcore {

// Partition of [0, n) into the labeled set S and unlabeled candidates.
// S^0 is the round-start set; selections only ever grow S.  Immutable;
// with_added returns a new state.
class PoolState {
  public:
    PoolState(std::size_t n, std::vector<std::size_t> labeled)
        : PoolState(n, labeled, labeled) {}

    PoolState(std::size_t n, std::vector<std::size_t> labeled,
              std::vector<std::size_t> initial)
        : n_(n), labeled_(std::move(labeled)), initial_(std::move(initial)) {
        check_index_set(labeled_, n_, "PoolState.labeled");
        check_index_set(initial_, n_, "PoolState.initial");
        if (!std::includes(labeled_.begin(), labeled_.end(),
                           initial_.begin(), initial_.end()))
            throw argument_error("PoolState: initial set is not a subset of labeled set");
    }

    std::size_t size() const { return n_; }
    std::size_t labeled_count() const { return labeled_.size(); }

    // Sorted ascending.
    const std::vector<std::size_t>& labeled() const { return labeled_; }
    const std::vector<std::size_t>& initial() const { return initial_; }

    bool is_labeled(std::size_t index) const {
        return std::binary_search(labeled_.begin(), labeled_.end(), index);
    }

    // Unlabeled indices in ascending order.
    std::vector<std::size_t> candidates() const {
        std::vector<std::size_t> out;
        out.reserve(n_ - labeled_.size());
        auto it = labeled_.begin();
        for (std::size_t i = 0; i < n_; ++i) {
            if (it != labeled_.end() && *it == i) {
                ++it;
            } else {
                out.push_back(i);
            }
        }
        return out;
    }

    PoolState with_added(const std::vector<std::size_t>& picks) const {
        std::vector<std::size_t> grown = labeled_;
        for (std::size_t idx : picks) {
            if (idx >= n_)
                throw argument_error("PoolState::with_added: index out of range");
            if (std::binary_search(labeled_.begin(), labeled_.end(), idx))
                throw argument_error("PoolState::with_added: index already labeled");
            grown.push_back(idx);
        }
        std::sort(grown.begin(), grown.end());
        for (std::size_t i = 1; i < grown.size(); ++i)
            if (grown[i] == grown[i - 1])
                throw argument_error("PoolState::with_added: duplicate pick");
        return PoolState(n_, std::move(grown), initial_);
    }

  private:
    static void check_index_set(std::vector<std::size_t>& indices, std::size_t n,
                                const std::string& what) {
        std::sort(indices.begin(), indices.end());
        for (std::size_t i = 0; i < indices.size(); ++i) {
            if (indices[i] >= n)
                throw argument_error(what + ": index " + std::to_string(indices[i]) +
                                     " out of range for pool of size " + std::to_string(n));
            if (i > 0 && indices[i] == indices[i - 1])
                throw argument_error(what + ": duplicate index " + std::to_string(indices[i]));
        }
    }

    std::size_t n_;
    std::vector<std::size_t> labeled_;
    std::vector<std::size_t> initial_;
};

enum class SyntheticKind { gaussian_mixture, two_moons };

// Deterministic synthetic dataset description.  Identical specs produce
// bit-identical datasets.
struct SyntheticSpec {
    SyntheticKind kind = SyntheticKind::gaussian_mixture;
    std::size_t n = 0;
    std::size_t d = 2;
    int num_classes = 2;
    std::vector<double> priors;     // one per class, sums to 1
    double spread = 0.1;            // isotropic noise std
    std::uint64_t seed = 0;

    void validate() const {
        if (n < 1) throw argument_error("SyntheticSpec: n must be at least 1");
        if (d < 1) throw argument_error("SyntheticSpec: d must be at least 1");
        if (num_classes < 2) throw argument_error("SyntheticSpec: need at least 2 classes");
        if (n < static_cast<std::size_t>(num_classes))
            throw argument_error("SyntheticSpec: n must be at least the class count");
        if (priors.size() != static_cast<std::size_t>(num_classes))
            throw argument_error("SyntheticSpec: need one prior per class");
        double sum = 0.0;
        for (double p : priors) {
            if (!(p > 0.0)) throw argument_error("SyntheticSpec: priors must be positive");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw argument_error("SyntheticSpec: priors must sum to 1");
        if (!(spread >= 0.0) || !std::isfinite(spread))
            throw argument_error("SyntheticSpec: spread must be non-negative");
        if (kind == SyntheticKind::two_moons) {
            if (num_classes != 2) throw argument_error("SyntheticSpec: two-moons needs C=2");
            if (d != 2) throw argument_error("SyntheticSpec: two-moons needs d=2");
        }
    }
};

namespace detail {

// floor(fraction*n) with a tiny slack so exact decimal fractions
// (0.1*200, 0.2*100, ...) are not undercut by binary rounding.
inline std::size_t floor_fraction(double fraction, std::size_t n) {
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

// count_c = floor(priors[c]*n); the remainder goes to the largest-prior
// class (lowest id on ties).
inline std::vector<std::size_t> class_counts(const SyntheticSpec& spec) {
    std::vector<std::size_t> counts(spec.priors.size());
    std::size_t total = 0;
    for (std::size_t c = 0; c < spec.priors.size(); ++c) {
        counts[c] = floor_fraction(spec.priors[c], spec.n);
        total += counts[c];
    }
    std::size_t largest = 0;
    for (std::size_t c = 1; c < spec.priors.size(); ++c)
        if (spec.priors[c] > spec.priors[largest]) largest = c;
    counts[largest] += spec.n - total;
    return counts;
}

}  // namespace detail

// Gaussian mixture with class means placed deterministically on a d-sphere
// of fixed radius; rows are laid out class by class.
inline std::pair<FeatureMatrix, LabelVector>
generate_gaussian_mixture(const SyntheticSpec& spec) {
    spec.validate();
    if (spec.kind != SyntheticKind::gaussian_mixture)
        throw argument_error("generate_gaussian_mixture: wrong kind");

    constexpr double kMeanRadius = 3.0;
    Rng rng(spec.seed);

    const std::size_t C = spec.priors.size();
    std::vector<double> means(C * spec.d);
    for (std::size_t c = 0; c < C; ++c) {
        double norm_sq = 0.0;
        for (std::size_t k = 0; k < spec.d; ++k) {
            means[c * spec.d + k] = rng.normal();
            norm_sq += means[c * spec.d + k] * means[c * spec.d + k];
        }
        double norm = std::sqrt(norm_sq);
        if (norm < 1e-300) {
            std::fill_n(&means[c * spec.d], spec.d, 0.0);
            means[c * spec.d] = 1.0;
            norm = 1.0;
        }
        for (std::size_t k = 0; k < spec.d; ++k)
            means[c * spec.d + k] *= kMeanRadius / norm;
    }

    const auto counts = detail::class_counts(spec);
    FeatureMatrix features(spec.n, spec.d);
    std::vector<int> labels(spec.n);
    std::size_t row = 0;
    for (std::size_t c = 0; c < C; ++c) {
        for (std::size_t s = 0; s < counts[c]; ++s, ++row) {
            labels[row] = static_cast<int>(c);
            for (std::size_t k = 0; k < spec.d; ++k)
                features.at(row, k) = means[c * spec.d + k] + spec.spread * rng.normal();
        }
    }
    return {std::move(features), LabelVector(std::move(labels), static_cast<int>(C))};
}

// Two interleaving half circles in 2-D: class 0 on the upper unit arc,
// class 1 on a shifted lower arc, plus isotropic noise.
inline std::pair<FeatureMatrix, LabelVector>
generate_two_moons(const SyntheticSpec& spec) {
    spec.validate();
    if (spec.kind != SyntheticKind::two_moons)
        throw argument_error("generate_two_moons: wrong kind");

    Rng rng(spec.seed);
    const auto counts = detail::class_counts(spec);
    FeatureMatrix features(spec.n, 2);
    std::vector<int> labels(spec.n);
    std::size_t row = 0;
    for (int moon = 0; moon < 2; ++moon) {
        const std::size_t m = counts[moon];
        for (std::size_t s = 0; s < m; ++s, ++row) {
            const double t = (m > 1)
                ? std::numbers::pi * static_cast<double>(s) / static_cast<double>(m - 1)
                : 0.0;
            double x = std::cos(t);
            double y = std::sin(t);
            if (moon == 1) {
                x = 1.0 - x;
                y = 0.5 - y;
            }
            features.at(row, 0) = x + spec.spread * rng.normal();
            features.at(row, 1) = y + spec.spread * rng.normal();
            labels[row] = moon;
        }
    }
    return {std::move(features), LabelVector(std::move(labels), 2)};
}

inline std::pair<FeatureMatrix, LabelVector> generate_synthetic(const SyntheticSpec& spec) {
    return spec.kind == SyntheticKind::gaussian_mixture ? generate_gaussian_mixture(spec)
                                                        : generate_two_moons(spec);
}

// Uniform random initial labeled set of size floor(fraction*n), no class
// stratification.
inline PoolState init_labeled(std::size_t n, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0) || fraction > 1.0)
        throw argument_error("init_labeled: fraction must be in (0, 1]");
    const std::size_t k = detail::floor_fraction(fraction, n);
    if (k < 1)
        throw argument_error("init_labeled: fraction too small, floor(fraction*n) = 0");
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    Rng rng(seed);
    rng.shuffle(perm);
    perm.resize(k);
    return PoolState(n, std::move(perm));
}

struct SplitResult {
    FeatureMatrix train_features;
    LabelVector train_labels;
    FeatureMatrix test_features;
    LabelVector test_labels;
    std::vector<std::size_t> train_indices;  // into the original matrix, ascending
    std::vector<std::size_t> test_indices;
};

// Disjoint, exhaustive train/test split, deterministic per seed.
inline SplitResult split_train_test(const FeatureMatrix& features, const LabelVector& labels,
                                    double test_fraction, std::uint64_t seed) {
    if (labels.size() != features.rows())
        throw argument_error("split_train_test: feature/label count mismatch");
    if (!(test_fraction > 0.0) || !(test_fraction < 1.0))
        throw argument_error("split_train_test: test_fraction must be in (0, 1)");
    const std::size_t n = features.rows();
    const std::size_t n_test = detail::floor_fraction(test_fraction, n);
    if (n_test < 1 || n_test >= n)
        throw argument_error("split_train_test: degenerate split");

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    Rng rng(seed);
    rng.shuffle(perm);

    SplitResult out;
    out.test_indices.assign(perm.begin(), perm.begin() + n_test);
    out.train_indices.assign(perm.begin() + n_test, perm.end());
    std::sort(out.test_indices.begin(), out.test_indices.end());
    std::sort(out.train_indices.begin(), out.train_indices.end());

    auto take = [&](const std::vector<std::size_t>& idx) {
        FeatureMatrix sub(idx.size(), features.cols());
        std::vector<int> sub_labels(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) {
            for (std::size_t k = 0; k < features.cols(); ++k)
                sub.at(i, k) = features.at(idx[i], k);
            sub_labels[i] = labels.labels[idx[i]];
        }
        return std::make_pair(std::move(sub),
                              LabelVector(std::move(sub_labels), labels.num_classes));
    };
    auto train = take(out.train_indices);
    auto test = take(out.test_indices);
    out.train_features = std::move(train.first);
    out.train_labels = std::move(train.second);
    out.test_features = std::move(test.first);
    out.test_labels = std::move(test.second);
    return out;
}

// ---------------------------------------------------------------------------
// File I/O

namespace detail {

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    if (in.bad()) throw io_error("read failure: " + path);
    return lines;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open file for writing: " + path);
    return out;
}

}  // namespace detail

inline FeatureMatrix load_features(const std::string& path) {
    const auto lines = detail::read_lines(path);
    std::vector<double> values;
    std::size_t cols = 0;
    std::size_t rows = 0;
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        std::string_view line = lines[ln];
        if (line.empty() && ln + 1 == lines.size()) break;  // trailing newline
        std::vector<double> row;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            const auto token = trim(line.substr(start, comma - start));
            row.push_back(parse_double(token, path + ":" + std::to_string(ln + 1)));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (rows == 0) {
            cols = row.size();
        } else if (row.size() != cols) {
            throw format_error(path + ":" + std::to_string(ln + 1) + ": ragged row, expected " +
                               std::to_string(cols) + " columns, got " +
                               std::to_string(row.size()));
        }
        values.insert(values.end(), row.begin(), row.end());
        ++rows;
    }
    if (rows == 0) throw format_error(path + ": empty features file");
    return FeatureMatrix(rows, cols, std::move(values));
}

// C is inferred as 1 + max label unless num_classes > 0 is supplied.
inline LabelVector load_labels(const std::string& path, int num_classes = 0) {
    const auto lines = detail::read_lines(path);
    std::vector<int> labels;
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        std::string_view line = trim(lines[ln]);
        if (line.empty() && ln + 1 == lines.size()) break;
        const long long value = parse_int(line, path + ":" + std::to_string(ln + 1));
        if (value < 0)
            throw format_error(path + ":" + std::to_string(ln + 1) + ": negative label");
        labels.push_back(static_cast<int>(value));
    }
    if (labels.empty()) throw format_error(path + ": empty labels file");
    int inferred = 1 + *std::max_element(labels.begin(), labels.end());
    if (num_classes == 0) {
        if (inferred < 2) throw format_error(path + ": single class in labels file");
        num_classes = inferred;
    } else if (inferred > num_classes) {
        throw format_error(path + ": label exceeds declared class count");
    }
    return LabelVector(std::move(labels), num_classes);
}

inline std::vector<std::size_t> load_indices(const std::string& path) {
    const auto lines = detail::read_lines(path);
    std::vector<std::size_t> indices;
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        std::string_view line = trim(lines[ln]);
        if (line.empty() && ln + 1 == lines.size()) break;
        const long long value = parse_int(line, path + ":" + std::to_string(ln + 1));
        if (value < 0)
            throw format_error(path + ":" + std::to_string(ln + 1) + ": negative index");
        indices.push_back(static_cast<std::size_t>(value));
    }
    return indices;
}

inline std::vector<double> load_scores(const std::string& path) {
    const auto lines = detail::read_lines(path);
    std::vector<double> scores;
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        std::string_view line = trim(lines[ln]);
        if (line.empty() && ln + 1 == lines.size()) break;
        scores.push_back(parse_double(line, path + ":" + std::to_string(ln + 1)));
    }
    if (scores.empty()) throw format_error(path + ": empty score file");
    return scores;
}

inline void write_features(const std::string& path, const FeatureMatrix& features) {
    auto out = detail::open_out(path);
    for (std::size_t i = 0; i < features.rows(); ++i) {
        for (std::size_t k = 0; k < features.cols(); ++k) {
            if (k > 0) out << ',';
            out << format_double(features.at(i, k));
        }
        out << '\n';
    }
    if (!out) throw io_error("write failure: " + path);
}

inline void write_labels(const std::string& path, const LabelVector& labels) {
    auto out = detail::open_out(path);
    for (int y : labels.labels) out << y << '\n';
    if (!out) throw io_error("write failure: " + path);
}

inline void write_indices(const std::string& path, const std::vector<std::size_t>& indices) {
    auto out = detail::open_out(path);
    for (std::size_t idx : indices) out << idx << '\n';
    if (!out) throw io_error("write failure: " + path);
}

inline void write_scores(const std::string& path, const std::vector<double>& scores) {
    auto out = detail::open_out(path);
    for (double s : scores) out << format_double(s) << '\n';
    if (!out) throw io_error("write failure: " + path);
}

}  // namespace alcore
