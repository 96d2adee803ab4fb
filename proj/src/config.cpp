#include "pfedeg/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "pfedeg/errors.hpp"

namespace pfedeg {

namespace {

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw ConfigError(key + ": expected a boolean, got '" + value + "'");
}

int parse_int(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected an integer, got '" + value + "'");
    }
}

double parse_double(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + value + "'");
    }
}

std::uint64_t parse_u64(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected an unsigned integer, got '" + value + "'");
    }
}

std::string format_double(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

}  // namespace

void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value) {
    TrainingConfig& t = config.training;
    if (key == "dataset") config.dataset = value;
    else if (key == "out") config.out = value;
    else if (key == "mode") t.mode = mode_from_name(value);
    else if (key == "ablation") t.ablation = ablation_from_name(value);
    else if (key == "scorer") t.scorer = scorer_from_name(value);
    else if (key == "strategy") t.strategy = strategy_from_name(value);
    else if (key == "seed") t.seed = parse_u64(value, key);
    else if (key == "rounds") t.max_rounds = parse_int(value, key);
    else if (key == "eval_every") t.eval_every = parse_int(value, key);
    else if (key == "epochs") t.epochs = parse_int(value, key);
    else if (key == "batch_size") t.batch_size = parse_int(value, key);
    else if (key == "learning_rate") t.learning_rate = parse_double(value, key);
    else if (key == "beta") t.beta = parse_double(value, key);
    else if (key == "p") t.p = parse_double(value, key);
    else if (key == "gamma") t.gamma = parse_double(value, key);
    else if (key == "alpha") t.alpha = parse_double(value, key);
    else if (key == "negatives") t.negatives = parse_int(value, key);
    else if (key == "dim") t.dim = parse_int(value, key);
    else if (key == "patience") t.patience = parse_int(value, key);
    else if (key == "fraction") t.fraction = parse_double(value, key);
    else if (key == "negative_slot") t.slot = negative_slot_from_name(value);
    else if (key == "raw") t.filtered_eval = !parse_bool(value, key);
    else if (key == "predict_heads") t.predict_heads = parse_bool(value, key);
    else if (key == "threads") t.threads = parse_int(value, key);
    else if (key == "dump_weights") config.dump_weights = parse_bool(value, key);
    else if (key == "log_wall_clock") config.log_wall_clock = parse_bool(value, key);
    else throw ConfigError("unknown config key: " + key);
}

void apply_config_file(ExperimentConfig& config, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first_char = line.find_first_not_of(" \t");
        if (first_char == std::string::npos || line[first_char] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                              ": expected key=value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        apply_config_entry(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

std::map<std::string, std::string> config_entries(const ExperimentConfig& config) {
    const TrainingConfig t = config.training.resolved();
    std::map<std::string, std::string> kv;
    kv["dataset"] = config.dataset;
    kv["out"] = config.out;
    kv["mode"] = mode_name(t.mode);
    kv["ablation"] = ablation_name(t.ablation);
    kv["scorer"] = scorer_name(t.scorer);
    kv["strategy"] = strategy_name(*t.strategy);
    kv["seed"] = std::to_string(t.seed);
    kv["rounds"] = std::to_string(t.max_rounds);
    kv["eval_every"] = std::to_string(*t.eval_every);
    kv["epochs"] = std::to_string(t.epochs);
    kv["batch_size"] = std::to_string(t.batch_size);
    kv["learning_rate"] = format_double(t.learning_rate);
    kv["beta"] = format_double(t.beta);
    kv["p"] = format_double(t.p);
    kv["gamma"] = format_double(t.gamma);
    kv["alpha"] = format_double(t.alpha);
    kv["negatives"] = std::to_string(t.negatives);
    kv["dim"] = std::to_string(t.dim);
    kv["patience"] = std::to_string(t.patience);
    kv["fraction"] = format_double(t.fraction);
    kv["negative_slot"] = negative_slot_name(t.slot);
    kv["raw"] = t.filtered_eval ? "false" : "true";
    kv["predict_heads"] = t.predict_heads ? "true" : "false";
    kv["dump_weights"] = config.dump_weights ? "true" : "false";
    kv["log_wall_clock"] = config.log_wall_clock ? "true" : "false";
    return kv;
}

std::string manifest_text(const ExperimentConfig& config) {
    std::ostringstream out;
    for (const auto& [key, value] : config_entries(config)) out << key << "=" << value << "\n";
    return out.str();
}

std::uint64_t config_hash(const ExperimentConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : manifest_text(config)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace pfedeg
