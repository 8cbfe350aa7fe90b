#include "gridflow/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gridflow {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

std::vector<double> parse_doubles(const std::string& key, const std::string& val) {
    std::vector<double> out;
    for (const std::string& tok : split(val, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw std::invalid_argument("malformed value for '" + key + "': " + tok);
        }
    }
    return out;
}

long parse_int(const std::string& key, const std::string& val) {
    try {
        std::size_t pos = 0;
        long v = std::stol(val, &pos);
        if (pos != val.size()) throw std::invalid_argument(val);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed value for '" + key + "': " + val);
    }
}

// Applies one key=value setting; shared between config file and flags.
void apply(ExperimentConfig& cfg, const std::string& key, const std::string& val) {
    if (key == "model") {
        cfg.model_id = val;
    } else if (key == "filter") {
        cfg.filters = split(val, ',');
    } else if (key == "grid") {
        cfg.grid_counts.clear();
        for (const std::string& tok : split(val, ','))
            cfg.grid_counts.push_back(static_cast<int>(parse_int(key, tok)));
    } else if (key == "particles") {
        cfg.particles = static_cast<int>(parse_int(key, val));
    } else if (key == "kappa") {
        cfg.kappa = parse_doubles(key, val).at(0);
    } else if (key == "mc_runs") {
        cfg.mc_runs = static_cast<int>(parse_int(key, val));
    } else if (key == "steps") {
        cfg.steps = static_cast<int>(parse_int(key, val));
    } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(parse_int(key, val));
    } else if (key == "out") {
        cfg.out_dir = val;
    } else if (key == "debug_dump") {
        cfg.debug_dump = (val == "1" || val == "true");
    } else if (key.rfind("model.", 0) == 0) {
        cfg.model_params[key.substr(6)] = parse_doubles(key, val);
    } else {
        throw std::invalid_argument("unknown config key '" + key + "'");
    }
}

void apply_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\r')) line.pop_back();
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("malformed config line: " + line);
        apply(cfg, line.substr(0, eq), line.substr(eq + 1));
    }
}

}  // namespace

ExperimentConfig parse_config(const std::vector<std::string>& args) {
    // flag name -> config key
    static const std::map<std::string, std::string> flag_keys = {
        {"--model", "model"},     {"--filter", "filter"},   {"--grid", "grid"},
        {"--particles", "particles"}, {"--kappa", "kappa"}, {"--mc-runs", "mc_runs"},
        {"--steps", "steps"},     {"--seed", "seed"},       {"--out", "out"},
    };

    std::vector<std::pair<std::string, std::string>> settings;
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--debug-dump") {
            settings.emplace_back("debug_dump", "1");
            continue;
        }
        auto need_value = [&](const std::string& flag) -> const std::string& {
            if (i + 1 >= args.size())
                throw std::invalid_argument("flag " + flag + " needs a value");
            return args[++i];
        };
        if (a == "--config") {
            config_path = need_value(a);
        } else if (a == "--set") {
            const std::string kv = need_value(a);
            const std::size_t eq = kv.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("--set expects key=value, got: " + kv);
            settings.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
        } else if (auto it = flag_keys.find(a); it != flag_keys.end()) {
            settings.emplace_back(it->second, need_value(a));
        } else {
            throw std::invalid_argument("unknown flag '" + a + "'");
        }
    }

    ExperimentConfig cfg;
    if (const char* env_out = std::getenv("GRIDFLOW_OUT")) cfg.out_dir = env_out;
    if (!config_path.empty()) apply_file(cfg, config_path);
    for (const auto& [key, val] : settings) apply(cfg, key, val);  // flags win
    if (cfg.out_dir.empty()) cfg.out_dir = ".";
    validate_config(cfg);
    return cfg;
}

void validate_config(ExperimentConfig& cfg) {
    static const std::set<std::string> known_models = {"henon", "ct5d", "linear1d"};
    static const std::set<std::string> known_filters = {"lgbf", "egbf", "pf"};
    if (!known_models.count(cfg.model_id))
        throw std::invalid_argument("unknown model id '" + cfg.model_id + "'");
    if (cfg.filters.empty()) throw std::invalid_argument("no filter selected");
    for (const std::string& f : cfg.filters)
        if (!known_filters.count(f))
            throw std::invalid_argument("unknown filter id '" + f + "'");

    if (cfg.grid_counts.empty()) {
        if (cfg.model_id == "henon") cfg.grid_counts = {31, 31};
        else if (cfg.model_id == "ct5d") cfg.grid_counts = {11, 11, 11, 11, 11};
        else cfg.grid_counts = {101};
    }
    const int dim = cfg.model_id == "ct5d" ? 5 : (cfg.model_id == "linear1d" ? 1 : 2);
    if (static_cast<int>(cfg.grid_counts.size()) != dim)
        throw std::invalid_argument("grid must have " + std::to_string(dim) +
                                    " entries for model " + cfg.model_id);
    for (std::size_t d = 0; d < cfg.grid_counts.size(); ++d)
        if (cfg.grid_counts[d] < 3 || cfg.grid_counts[d] % 2 == 0)
            throw std::invalid_argument("grid count in dimension " + std::to_string(d + 1) +
                                        " must be odd and >= 3, got " +
                                        std::to_string(cfg.grid_counts[d]));
    if (cfg.kappa < 1.0 || cfg.kappa > 10.0)
        throw std::invalid_argument("kappa must be in [1, 10]");
    if (cfg.mc_runs < 1) throw std::invalid_argument("mc_runs must be >= 1");
    if (cfg.steps < 0) throw std::invalid_argument("steps must be >= 0");
    if (cfg.particles < 0) throw std::invalid_argument("particles must be >= 0");
}

std::string config_echo(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    auto join = [&](const auto& items) {
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i) out << ',';
            out << items[i];
        }
    };
    out << "model=" << cfg.model_id << '\n';
    out << "filter=";
    join(cfg.filters);
    out << '\n';
    out << "grid=";
    join(cfg.grid_counts);
    out << '\n';
    out << "particles=" << cfg.particles << '\n';
    out << "kappa=" << cfg.kappa << '\n';
    out << "mc_runs=" << cfg.mc_runs << '\n';
    out << "steps=" << cfg.steps << '\n';
    out << "seed=" << cfg.seed << '\n';
    out << "out=" << cfg.out_dir << '\n';
    out << "debug_dump=" << (cfg.debug_dump ? 1 : 0) << '\n';
    for (const auto& [key, vals] : cfg.model_params) {
        out << "model." << key << '=';
        join(vals);
        out << '\n';
    }
    return out.str();
}

}  // namespace gridflow
