#include "ablab/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace ablab {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty())
        throw ConfigError("config: '" + std::string(key) + "' expects a number, got '" + std::string(text) + "'");
    return value;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text) {
    std::uint64_t value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty())
        throw ConfigError("config: '" + std::string(key) + "' expects a non-negative integer, got '" +
                          std::string(text) + "'");
    return value;
}

std::vector<double> parse_list(std::string_view key, std::string_view text) {
    std::vector<double> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        out.push_back(parse_double(key, trim(text.substr(0, comma))));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    if (out.empty()) throw ConfigError("config: '" + std::string(key) + "' expects a comma-separated list");
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
    return out;
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "epsilon", "alpha", "variant", "x0",    "y0",       "horizon",  "step",     "step_over_epsilon",
        "scheme",  "replicas", "seed", "epsilons", "alphas", "level", "time", "function",
        "n_points", "out", "format"};
    return keys;
}

void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
    try {
        if (key == "epsilon") cfg.model.epsilon = parse_double(key, value);
        else if (key == "alpha") cfg.model.alpha = parse_double(key, value);
        else if (key == "variant") cfg.model.variant = parse_variant(value);
        else if (key == "x0") cfg.model.x0 = parse_double(key, value);
        else if (key == "y0") cfg.model.y0 = parse_double(key, value);
        else if (key == "horizon") cfg.model.horizon = parse_double(key, value);
        else if (key == "step") cfg.mc.step = parse_double(key, value);
        else if (key == "step_over_epsilon") cfg.mc.step_over_epsilon = parse_double(key, value);
        else if (key == "scheme") cfg.mc.scheme = parse_scheme(value);
        else if (key == "replicas") cfg.mc.replicas = parse_unsigned(key, value);
        else if (key == "seed") cfg.mc.seed = parse_unsigned(key, value);
        else if (key == "epsilons") cfg.epsilons = parse_list(key, value);
        else if (key == "alphas") cfg.alphas = parse_list(key, value);
        else if (key == "level") cfg.level = parse_double(key, value);
        else if (key == "time") cfg.time = parse_double(key, value);
        else if (key == "function") {
            (void)function_by_name(value);
            cfg.function = std::string(value);
        }
        else if (key == "n_points") cfg.n_points = parse_unsigned(key, value);
        else if (key == "out") cfg.out_dir = std::string(value);
        else if (key == "format") {
            if (value != "csv" && value != "json") throw ConfigError("config: format must be csv or json");
            cfg.format = std::string(value);
        } else
            throw ConfigError("config: unknown key '" + std::string(key) + "'");
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

void apply_config_text(std::string_view text, ExperimentConfig& cfg) {
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (!seen.insert(std::string(key)).second)
            throw ConfigError("config line " + std::to_string(line_no) + ": repeated key '" + std::string(key) + "'");
        set_config_value(cfg, key, value);
    }
}

void apply_config_file(const std::filesystem::path& file, ExperimentConfig& cfg) {
    std::ifstream is(file);
    if (!is) throw ConfigError("config: cannot read " + file.string());
    std::ostringstream buf;
    buf << is.rdbuf();
    apply_config_text(buf.str(), cfg);
}

ConfigPairs echo_pairs(const ExperimentConfig& cfg) {
    ConfigPairs out{{"command", cfg.command},
                    {"epsilon", format_double(cfg.model.epsilon)},
                    {"alpha", format_double(cfg.model.alpha)},
                    {"variant", std::string(to_string(cfg.model.variant))},
                    {"x0", format_double(cfg.model.x0)},
                    {"y0", format_double(cfg.model.y0)},
                    {"horizon", format_double(cfg.model.horizon)},
                    {"step", format_double(cfg.mc.step)},
                    {"step_over_epsilon", format_double(cfg.mc.step_over_epsilon)},
                    {"scheme", std::string(to_string(cfg.mc.scheme))},
                    {"replicas", std::to_string(cfg.mc.replicas)},
                    {"seed", std::to_string(cfg.mc.seed)},
                    {"epsilons", join(cfg.epsilons)},
                    {"alphas", join(cfg.alphas)},
                    {"level", format_double(cfg.level)},
                    {"time", format_double(cfg.time)},
                    {"function", cfg.function},
                    {"n_points", std::to_string(cfg.n_points)},
                    {"out", cfg.out_dir},
                    {"format", cfg.format}};
    return out;
}

TestFunction function_by_name(std::string_view name) {
    if (name == "gaussian" || name == "f1") return catalog::gaussian();
    if (name == "lorentzian" || name == "f2") return catalog::lorentzian();
    if (name == "square" || name == "f3") return catalog::square();
    if (name == "cos_square" || name == "f4") return catalog::cos_square();
    throw ConfigError("unknown test function '" + std::string(name) + "'");
}

}  // namespace ablab
