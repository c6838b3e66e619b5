#pragma once

// Flat `key = value` configuration files with `#` comments.  Every key is
// type-checked while parsing; unknown and duplicate keys are rejected.  See
// the README for the full key list.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "alcore/errors.hpp"
#include "alcore/format.hpp"
#include "alcore/pool.hpp"
#include "alcore/simulator.hpp"
#include "alcore/strategies.hpp"

namespace alcore {

namespace detail {

inline std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> items;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const auto piece = trim(text.substr(start, comma - start));
        if (!piece.empty()) items.emplace_back(piece);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return items;
}

inline bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw argument_error("config: key '" + key + "' expects true or false, got '" + value + "'");
}

}  // namespace detail

// Raw key = value view of a config file.
class CliConfig {
  public:
    static CliConfig parse_file(const std::string& path) {
        return CliConfig(detail::read_lines(path), path);
    }

    static CliConfig parse_lines(const std::vector<std::string>& lines,
                                 const std::string& origin = "<config>") {
        return CliConfig(lines, origin);
    }

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? fallback : it->second;
    }

    double get_double(const std::string& key, double fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        return checked_double(it->second, key);
    }

    long long get_int(const std::string& key, long long fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        return checked_int(it->second, key);
    }

    bool get_bool(const std::string& key, bool fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        return detail::parse_bool(it->second, key);
    }

    std::vector<std::string> get_list(const std::string& key) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return {};
        return detail::split_list(it->second);
    }

    // Call after reading everything; leftovers are a config error.
    void reject_unknown() const {
        for (const auto& [key, value] : entries_) {
            if (!consumed_.count(key))
                throw argument_error(origin_ + ": unknown config key '" + key + "'");
        }
    }

    const std::map<std::string, std::string>& entries() const { return entries_; }

  private:
    CliConfig(const std::vector<std::string>& lines, std::string origin)
        : origin_(std::move(origin)) {
        for (std::size_t ln = 0; ln < lines.size(); ++ln) {
            std::string_view line = lines[ln];
            const std::size_t hash = line.find('#');
            if (hash != std::string_view::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            const std::size_t eq = line.find('=');
            if (eq == std::string_view::npos)
                throw argument_error(origin_ + ":" + std::to_string(ln + 1) +
                                     ": expected 'key = value'");
            const std::string key{trim(line.substr(0, eq))};
            const std::string value{trim(line.substr(eq + 1))};
            if (key.empty())
                throw argument_error(origin_ + ":" + std::to_string(ln + 1) + ": empty key");
            if (!entries_.emplace(key, value).second)
                throw argument_error(origin_ + ": duplicate config key '" + key + "'");
        }
    }

    double checked_double(const std::string& value, const std::string& key) const {
        try {
            return parse_double(value, "config key '" + key + "'");
        } catch (const format_error& e) {
            throw argument_error(e.what());
        }
    }

    long long checked_int(const std::string& value, const std::string& key) const {
        try {
            return parse_int(value, "config key '" + key + "'");
        } catch (const format_error& e) {
            throw argument_error(e.what());
        }
    }

    friend SimulationConfig to_simulation_config(const CliConfig& raw);

    std::string origin_;
    std::map<std::string, std::string> entries_;
    mutable std::set<std::string> consumed_;
};

// Strategy list entries are `id` or `id@alpha`, e.g. `confident-coreset@0.5`.
inline StrategySpec parse_strategy_spec(const std::string& text) {
    StrategySpec spec;
    const std::size_t at = text.find('@');
    if (at == std::string::npos) {
        spec.id = parse_strategy_id(text);
    } else {
        spec.id = parse_strategy_id(text.substr(0, at));
        try {
            spec.alpha = parse_double(text.substr(at + 1), "strategy alpha");
        } catch (const format_error& e) {
            throw argument_error(e.what());
        }
        if (!(spec.alpha >= 0.0 && spec.alpha <= 1.0))
            throw argument_error("strategy '" + text + "': alpha must be in [0, 1]");
    }
    return spec;
}

inline SimulationConfig to_simulation_config(const CliConfig& raw) {
    auto use = [&raw](const std::string& key) {
        raw.consumed_.insert(key);
        return key;
    };

    SimulationConfig config;

    const std::string dataset = raw.get_string(use("dataset"), "gaussian-mixture");
    if (dataset == "files") {
        config.source = DatasetSource::files;
        config.features_path = raw.get_string(use("features"), "");
        config.labels_path = raw.get_string(use("labels"), "");
        config.file_classes = static_cast<int>(raw.get_int(use("classes"), 0));
    } else {
        config.source = DatasetSource::synthetic;
        if (dataset == "gaussian-mixture") {
            config.synthetic.kind = SyntheticKind::gaussian_mixture;
        } else if (dataset == "two-moons") {
            config.synthetic.kind = SyntheticKind::two_moons;
        } else {
            throw argument_error("config: unknown dataset '" + dataset + "'");
        }
        if (!raw.has("n")) throw argument_error("config: synthetic dataset needs key 'n'");
        config.synthetic.n = static_cast<std::size_t>(raw.get_int(use("n"), 0));
        config.synthetic.d = static_cast<std::size_t>(raw.get_int(use("d"), 2));
        config.synthetic.num_classes = static_cast<int>(raw.get_int(use("classes"), 2));
        config.synthetic.spread = raw.get_double(use("spread"), 0.1);
        const auto prior_items = raw.get_list(use("priors"));
        if (prior_items.empty()) {
            config.synthetic.priors.assign(
                static_cast<std::size_t>(config.synthetic.num_classes),
                1.0 / static_cast<double>(config.synthetic.num_classes));
        } else {
            for (const auto& item : prior_items)
                config.synthetic.priors.push_back(
                    raw.checked_double(item, "priors"));
            config.synthetic.num_classes = static_cast<int>(config.synthetic.priors.size());
        }
    }
    config.synthetic.seed = static_cast<std::uint64_t>(raw.get_int(use("data_seed"), 0));

    config.test_fraction = raw.get_double(use("test_fraction"), 0.2);
    config.vary_split = raw.get_bool(use("vary_split"), false);
    config.initial_fraction = raw.get_double(use("initial_fraction"), 0.10);
    config.budget_fraction = raw.get_double(use("budget_fraction"), 0.05);
    config.rounds = static_cast<std::size_t>(raw.get_int(use("rounds"), 5));
    config.shared_initial = raw.get_bool(use("shared_initial"), true);

    if (raw.has("seeds")) {
        config.seeds.clear();
        for (const auto& item : raw.get_list("seeds"))
            config.seeds.push_back(
                static_cast<std::uint64_t>(raw.checked_int(item, "seeds")));
    }
    use("seeds");

    const auto strategy_items = raw.get_list(use("strategies"));
    if (strategy_items.empty())
        throw argument_error("config: key 'strategies' is required");
    for (const auto& item : strategy_items)
        config.strategies.push_back(parse_strategy_spec(item));

    const std::string renorm = raw.get_string(use("renorm_uncertainty"), "per_iteration");
    if (renorm == "per_iteration") {
        config.renorm = RenormMode::per_iteration;
    } else if (renorm == "per_round") {
        config.renorm = RenormMode::per_round;
    } else {
        throw argument_error("config: renorm_uncertainty must be per_iteration or per_round");
    }

    config.train.learning_rate = raw.get_double(use("learning_rate"), 0.1);
    config.train.epochs = static_cast<std::size_t>(raw.get_int(use("epochs"), 100));
    config.train.batch_size = static_cast<std::size_t>(raw.get_int(use("batch_size"), 32));
    config.train.lambda = raw.get_double(use("lambda"), 1.0);
    config.train.margin = raw.get_double(use("margin"), 0.5);
    config.train.detach_head_gradient = raw.get_bool(use("detach_head_gradient"), false);
    config.train.head_width = static_cast<std::size_t>(raw.get_int(use("head_width"), 16));
    if (raw.has("hidden")) {
        config.train.hidden_sizes.clear();
        for (const auto& item : raw.get_list("hidden")) {
            const long long width = raw.checked_int(item, "hidden");
            if (width < 1) throw argument_error("config: hidden layer sizes must be positive");
            config.train.hidden_sizes.push_back(static_cast<std::size_t>(width));
        }
    }
    use("hidden");

    raw.reject_unknown();
    config.validate();
    return config;
}

inline SimulationConfig load_simulation_config(const std::string& path) {
    return to_simulation_config(CliConfig::parse_file(path));
}

}  // namespace alcore
