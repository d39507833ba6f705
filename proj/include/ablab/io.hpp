#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ablab/analysis.hpp"
#include "ablab/pde.hpp"
#include "ablab/sde.hpp"
#include "ablab/stats.hpp"

namespace ablab {

using json = nlohmann::ordered_json;

/// Key/value pairs echoed at the top of every artifact.
using ConfigPairs = std::vector<std::pair<std::string, std::string>>;

[[nodiscard]] std::string version_string();

/// %.17g, with "nan"/"inf" spelled out.
[[nodiscard]] std::string format_double(double x);

/// Writes "# key=value" lines: version, then the config pairs in order.
void write_comment_header(std::ostream& os, const ConfigPairs& config);

/// Columns t, x, y (2-D) or t, y (1-D); polar paths are written as t, r, theta.
void write_path_csv(const std::filesystem::path& file, const PathSample& path, const ConfigPairs& config,
                    bool polar = false);

/// Generic numeric table with a mandatory header row.
void write_table_csv(const std::filesystem::path& file, const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows, const ConfigPairs& config);

/// Long format t, y, u over every stored snapshot.
void write_pde_csv(const std::filesystem::path& file, const PDESolution& sol, const ConfigPairs& config);

/// Columns epsilon, estimate plus the fitted slope in the header.
void write_scaling_csv(const std::filesystem::path& file, const ScalingFit& fit, const ConfigPairs& config);

/// Pretty-printed with a trailing newline; the config echo and version are added under "config".
void write_json(const std::filesystem::path& file, json body, const ConfigPairs& config);

[[nodiscard]] json to_json(const ConfigEcho& c);
[[nodiscard]] json to_json(const StatReport& r);
[[nodiscard]] json to_json(const ScalingFit& f);
[[nodiscard]] json to_json(const StoppingRecord& r);
[[nodiscard]] json to_json(const CrossingReport& r);
[[nodiscard]] json to_json(const ExcursionRecord& r);

/// {operation, params, estimate, std_error, n, pass, threshold, seed}
[[nodiscard]] json check_entry(const std::string& operation, const StatReport& r, bool pass, double threshold);

}  // namespace ablab
