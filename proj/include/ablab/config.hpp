#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ablab/analysis.hpp"
#include "ablab/io.hpp"
#include "ablab/model.hpp"

namespace ablab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat experiment configuration shared by every subcommand.
struct ExperimentConfig {
    std::string command;
    ModelParams model;
    MonteCarloOptions mc;
    std::vector<double> epsilons;  ///< ladder; empty means the command's default
    std::vector<double> alphas;
    double level = 0.5;   ///< excursion level a
    double time = 0.0;    ///< evaluation time; 0 means the command's default
    std::string function = "gaussian";
    std::size_t n_points = 601;
    std::string out_dir = ".";
    std::string format = "json";
};

/// Parses "key = value" lines ('#' starts a comment). Unknown or repeated keys,
/// and values that do not parse, raise ConfigError.
void apply_config_text(std::string_view text, ExperimentConfig& cfg);
void apply_config_file(const std::filesystem::path& file, ExperimentConfig& cfg);

/// Sets a single key; shared by the file parser and flag overrides.
void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);

[[nodiscard]] const std::vector<std::string>& config_keys();
[[nodiscard]] ConfigPairs echo_pairs(const ExperimentConfig& cfg);

/// Catalog lookup by short name (gaussian, lorentzian, square, cos_square) or f1..f4.
[[nodiscard]] TestFunction function_by_name(std::string_view name);

}  // namespace ablab
