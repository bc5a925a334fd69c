#include "starrad/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "starrad/cli/csv.hpp"
#include "starrad/errors.hpp"

namespace starrad::cli {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string s) {
    auto blank = [](unsigned char ch) { return std::isspace(ch) != 0; };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), blank));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), blank).base(), s.end());
    return s;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::istringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("empty entry in list '" + text + "'");
        items.push_back(item);
    }
    if (items.empty()) throw ConfigError("empty list");
    return items;
}

// Reads the keys of one section, remembering which were consumed.
class Section {
public:
    Section(const pt::ptree& tree, std::string name) : tree_(tree), name_(std::move(name)) {}

    bool has(const std::string& key) const { return tree_.find(key) != tree_.not_found(); }

    std::string text(const std::string& key) {
        used_.insert(key);
        return trim(tree_.get<std::string>(key));
    }

    double real(const std::string& key) {
        try {
            return parse_real(text(key));
        } catch (const ConfigError& e) {
            throw ConfigError(where(key) + ": " + e.what());
        }
    }

    long long integer(const std::string& key) {
        try {
            return parse_integer(text(key));
        } catch (const ConfigError& e) {
            throw ConfigError(where(key) + ": " + e.what());
        }
    }

    int positive(const std::string& key) {
        const auto v = integer(key);
        if (v < 1 || v > std::numeric_limits<int>::max())
            throw ConfigError(where(key) + " must be a positive integer");
        return static_cast<int>(v);
    }

    bool flag(const std::string& key) {
        const auto v = text(key);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError(where(key) + ": expected true or false, got '" + v + "'");
    }

    std::vector<int> int_list(const std::string& key) {
        std::vector<int> out;
        for (const auto& item : split_list(text(key))) {
            const auto v = parse_integer(item);
            if (v < 1) throw ConfigError(where(key) + ": entries must be positive");
            out.push_back(static_cast<int>(v));
        }
        return out;
    }

    void reject_unknown() const {
        for (const auto& [key, child] : tree_) {
            if (!used_.contains(key)) throw ConfigError("unknown key " + where(key));
        }
    }

    std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

private:
    const pt::ptree& tree_;
    std::string name_;
    std::set<std::string> used_;
};

QuadratureSettings read_quadrature(Section s) {
    QuadratureSettings q;
    if (s.has("function")) q.function = s.text("function");
    if (s.has("N")) q.n = s.positive("N");
    if (s.has("k")) q.k = s.positive("k");
    if (s.has("S")) q.samples = s.positive("S");
    if (s.has("sweep_k")) q.sweep_k = s.int_list("sweep_k");
    if (s.has("sweep_N_min")) q.sweep_n_min = s.positive("sweep_N_min");
    if (s.has("sweep_N_max")) q.sweep_n_max = s.positive("sweep_N_max");
    s.reject_unknown();
    if (q.k > q.n) throw ConfigError("[quadrature] k must not exceed N");
    return q;
}

PinnSettings read_pinn(Section s) {
    if (!s.has("problem")) throw ConfigError("[pinn] problem is required");
    PinnSettings p;
    p.base = train::preset(s.text("problem"));
    auto& cfg = p.base;
    p.criteria.assign(sampling::all_criteria().begin(), sampling::all_criteria().end());
    p.seeds = {0};

    if (s.has("criteria")) p.criteria = parse_criterion_list(s.text("criteria"));
    if (s.has("seeds")) p.seeds = parse_seed_list(s.text("seeds"));
    if (s.has("hidden_layers")) cfg.spec.hidden_layers = s.int_list("hidden_layers");
    if (s.has("activation")) cfg.spec.activation = nn::parse_activation(s.text("activation"));
    if (s.has("epochs")) cfg.epochs = s.positive("epochs");
    if (s.has("learning_rate")) cfg.learning_rate = s.real("learning_rate");
    if (s.has("n_collocation")) cfg.n_collocation = s.positive("n_collocation");
    if (s.has("pool_size")) cfg.pool_size = s.positive("pool_size");
    if (s.has("resample_period")) cfg.resample_period = s.positive("resample_period");
    if (s.has("record_every")) cfg.record_every = s.positive("record_every");
    if (s.has("tau")) cfg.tau = s.real("tau");
    if (s.has("c")) cfg.c = s.real("c");
    if (s.has("lambda1")) cfg.weights.lambda1 = s.real("lambda1");
    if (s.has("lambda2")) cfg.weights.lambda2 = s.real("lambda2");
    if (s.has("lambda3")) cfg.weights.lambda3 = s.real("lambda3");
    if (s.has("checkpoints")) p.checkpoints = s.int_list("checkpoints");
    if (s.has("threads")) p.threads = static_cast<unsigned>(s.positive("threads"));
    s.reject_unknown();
    return p;
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    for (const auto& item : split_list(text)) {
        const auto v = parse_integer(item);
        if (v < 0) throw ConfigError("seeds must be non-negative: " + item);
        seeds.push_back(static_cast<std::uint64_t>(v));
    }
    return seeds;
}

std::vector<sampling::CriterionKind> parse_criterion_list(const std::string& text) {
    std::vector<sampling::CriterionKind> kinds;
    for (const auto& item : split_list(text)) {
        const auto kind = sampling::parse_criterion(item);
        if (std::find(kinds.begin(), kinds.end(), kind) != kinds.end())
            throw ConfigError("criterion listed twice: " + item);
        kinds.push_back(kind);
    }
    return kinds;
}

ExperimentConfig parse_config(std::istream& in) {
    const std::string text(std::istreambuf_iterator<char>(in), {});
    pt::ptree tree;
    try {
        std::istringstream stream(text);
        pt::read_ini(stream, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.what());
    }
    // read_ini drops sections without keys; a bare [quadrature] still selects the mode.
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
        line = trim(line);
        if (line.size() > 2 && line.front() == '[' && line.back() == ']') {
            const auto name = trim(line.substr(1, line.size() - 2));
            if (tree.find(name) == tree.not_found()) tree.push_back({name, pt::ptree()});
        }
    }

    for (const auto& [name, child] : tree) {
        if (child.empty() && !child.data().empty())
            throw ConfigError("key '" + name + "' outside of any section");
        if (name != "quadrature" && name != "pinn" && name != "constants" && name != "output")
            throw ConfigError("unknown section [" + name + "]; valid: quadrature, pinn, constants, output");
    }

    const bool quad = tree.find("quadrature") != tree.not_found();
    const bool pinn = tree.find("pinn") != tree.not_found();
    if (quad == pinn) throw ConfigError("config needs exactly one of [quadrature] or [pinn]");

    ExperimentConfig config;
    if (quad) {
        if (tree.find("constants") != tree.not_found())
            throw ConfigError("[constants] only applies to pinn configs");
        config.mode = read_quadrature(Section(tree.get_child("quadrature"), "quadrature"));
    } else {
        auto settings = read_pinn(Section(tree.get_child("pinn"), "pinn"));
        if (auto it = tree.find("constants"); it != tree.not_found()) {
            Section constants(it->second, "constants");
            for (const auto& [key, child] : it->second)
                settings.base.constants[key] = constants.real(key);
        }
        // Surfaces unknown constant names and bad sizes before any training.
        pde::make_problem(settings.base.problem, settings.base.constants);
        settings.base.validate();
        config.mode = std::move(settings);
    }

    if (auto it = tree.find("output"); it != tree.not_found()) {
        Section out(it->second, "output");
        if (out.has("directory")) config.output.directory = out.text("directory");
        if (out.has("emit_plots")) config.output.emit_plots = out.flag("emit_plots");
        out.reject_unknown();
    }
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    return parse_config(in);
}

}  // namespace starrad::cli
