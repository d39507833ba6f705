#include "ablab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ablab {

std::string version_string() { return std::string("ablab ") + ABLAB_VERSION; }

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& file) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + file.string() + " for writing");
    return os;
}

void write_row(std::ostream& os, const std::vector<double>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << '\n';
}

// Non-finite values are not representable in JSON; they become null.
json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

void write_comment_header(std::ostream& os, const ConfigPairs& config) {
    os << "# version=" << version_string() << '\n';
    for (const auto& [key, value] : config) os << "# " << key << '=' << value << '\n';
}

void write_path_csv(const std::filesystem::path& file, const PathSample& path, const ConfigPairs& config,
                    bool polar) {
    auto os = open_for_write(file);
    write_comment_header(os, config);
    os << "# scheme=" << path.scheme << '\n';
    for (std::size_t i = 0; i < path.streams.size(); ++i)
        os << "# stream" << i << '=' << path.streams[i].master_seed << ':' << path.streams[i].stream_id << '\n';
    if (path.diverged) os << "# diverged=true\n";
    if (path.dim() == 2)
        os << (polar ? "t,r,theta\n" : "t,x,y\n");
    else
        os << "t,y\n";
    for (std::size_t k = 0; k < path.size(); ++k) {
        std::vector<double> row{path.t(k)};
        for (Eigen::Index d = 0; d < static_cast<Eigen::Index>(path.dim()); ++d)
            row.push_back(path.states(static_cast<Eigen::Index>(k), d));
        write_row(os, row);
    }
}

void write_table_csv(const std::filesystem::path& file, const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows, const ConfigPairs& config) {
    auto os = open_for_write(file);
    write_comment_header(os, config);
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    for (const auto& row : rows) {
        if (row.size() != columns.size()) throw std::invalid_argument("write_table_csv: row width mismatch");
        write_row(os, row);
    }
}

void write_pde_csv(const std::filesystem::path& file, const PDESolution& sol, const ConfigPairs& config) {
    auto os = open_for_write(file);
    write_comment_header(os, config);
    os << "# initial=" << sol.initial << "\n# dy=" << format_double(sol.grid.dy)
       << "\n# dt=" << format_double(sol.grid.dt) << '\n';
    os << "t,y,u\n";
    for (std::size_t k = 0; k < sol.times.size(); ++k)
        for (std::size_t j = 0; j < sol.grid.n_points; ++j)
            write_row(os, {sol.times[k], sol.grid.y(j),
                           sol.u(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j))});
}

void write_scaling_csv(const std::filesystem::path& file, const ScalingFit& fit, const ConfigPairs& config) {
    auto os = open_for_write(file);
    write_comment_header(os, config);
    os << "# slope=" << format_double(fit.slope) << "\n# slope_ci=" << format_double(fit.slope_ci_low) << ':'
       << format_double(fit.slope_ci_high) << '\n';
    os << "epsilon,estimate\n";
    for (std::size_t i = 0; i < fit.epsilons.size(); ++i) write_row(os, {fit.epsilons[i], fit.estimates[i]});
}

void write_json(const std::filesystem::path& file, json body, const ConfigPairs& config) {
    json cfg = json::object();
    cfg["version"] = version_string();
    for (const auto& [key, value] : config) cfg[key] = value;
    json out = json::object();
    out["config"] = std::move(cfg);
    for (auto& [key, value] : body.items()) out[key] = value;
    auto os = open_for_write(file);
    os << out.dump(2) << '\n';
}

json to_json(const ConfigEcho& c) {
    return {{"epsilon", number(c.epsilon)},
            {"alpha", number(c.alpha)},
            {"horizon", number(c.horizon)},
            {"step", number(c.step)},
            {"seed", c.seed}};
}

json to_json(const StatReport& r) {
    return {{"estimate", number(r.estimate)},
            {"std_error", number(r.std_error)},
            {"n", r.n_replicas},
            {"params", to_json(r.config)}};
}

json to_json(const ScalingFit& f) {
    json eps = json::array(), est = json::array();
    for (double e : f.epsilons) eps.push_back(number(e));
    for (double e : f.estimates) est.push_back(number(e));
    return {{"epsilons", eps},
            {"estimates", est},
            {"slope", number(f.slope)},
            {"intercept", number(f.intercept)},
            {"slope_ci", {number(f.slope_ci_low), number(f.slope_ci_high)}}};
}

json to_json(const StoppingRecord& r) {
    return {{"delta", number(r.delta)}, {"n_upcrossings", r.n_upcrossings}, {"taus", r.taus}, {"sigmas", r.sigmas}};
}

json to_json(const CrossingReport& r) {
    return {{"delta", number(r.delta)},
            {"upcrossings", to_json(r.upcrossings)},
            {"band_exit", to_json(r.band_exit)},
            {"band_return", to_json(r.band_return)},
            {"fraction_no_crossing", number(r.fraction_no_crossing)},
            {"bound_upcrossings", number(r.bound_upcrossings)},
            {"bound_band_exit", number(r.bound_band_exit)},
            {"bound_band_return", number(r.bound_band_return)},
            {"upper_bounds_hold", r.upper_bounds_hold()}};
}

json to_json(const ExcursionRecord& r) {
    return {{"departure_time", number(r.departure_time)},
            {"entry_time", number(r.entry_time)},
            {"return_time", number(r.return_time)},
            {"max_abs_x", number(r.max_abs_x)},
            {"returned", r.returned()}};
}

json check_entry(const std::string& operation, const StatReport& r, bool pass, double threshold) {
    return {{"operation", operation},
            {"params", to_json(r.config)},
            {"estimate", number(r.estimate)},
            {"std_error", number(r.std_error)},
            {"n", r.n_replicas},
            {"pass", pass},
            {"threshold", number(threshold)},
            {"seed", r.config.seed}};
}

}  // namespace ablab
