#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ablab/config.hpp"
#include "ablab/io.hpp"

using namespace ablab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& file) {
    std::ifstream is(file);
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "ablab_io_tests";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("config text: keys, comments and overrides") {
    ExperimentConfig cfg;
    apply_config_text("# ladder run\nepsilon = 0.05\nalpha=0.2   # band\nepsilons = 0.1, 0.01 ,0.001\n"
                      "variant = no-dissipation\nscheme = frozen-ou\nreplicas = 500\nseed = 7\nfunction = f2\n\n",
                      cfg);
    CHECK(cfg.model.epsilon == 0.05);
    CHECK(cfg.model.alpha == 0.2);
    CHECK(cfg.epsilons == std::vector<double>{0.1, 0.01, 0.001});
    CHECK(cfg.model.variant == Variant::no_dissipation);
    CHECK(cfg.mc.scheme == Scheme::frozen_ou);
    CHECK(cfg.mc.replicas == 500);
    CHECK(cfg.mc.seed == 7);
    CHECK(cfg.function == "f2");
    set_config_value(cfg, "epsilon", "0.5");
    CHECK(cfg.model.epsilon == 0.5);
}

TEST_CASE("config text: errors") {
    ExperimentConfig cfg;
    CHECK_THROWS_AS(apply_config_text("epsilonn = 0.1\n", cfg), ConfigError);
    CHECK_THROWS_AS(apply_config_text("epsilon = 0.1\nepsilon = 0.2\n", cfg), ConfigError);
    CHECK_THROWS_AS(apply_config_text("epsilon 0.1\n", cfg), ConfigError);
    CHECK_THROWS_AS(apply_config_text("epsilon = abc\n", cfg), ConfigError);
    CHECK_THROWS_AS(apply_config_text("replicas = -3\n", cfg), ConfigError);
    CHECK_THROWS_AS(apply_config_text("variant = frictionless\n", cfg), ConfigError);
    CHECK_THROWS_AS(apply_config_text("function = sinc\n", cfg), ConfigError);
    CHECK_THROWS_AS(apply_config_text("format = xml\n", cfg), ConfigError);
    CHECK_THROWS_AS(apply_config_file("/nonexistent/ablab.cfg", cfg), ConfigError);
}

TEST_CASE("every config key is echoed") {
    ExperimentConfig cfg;
    cfg.command = "lemma1";
    const ConfigPairs pairs = echo_pairs(cfg);
    for (const std::string& key : config_keys()) {
        CAPTURE(key);
        CHECK(std::any_of(pairs.begin(), pairs.end(), [&](const auto& kv) { return kv.first == key; }));
    }
    CHECK(pairs.front() == std::pair<std::string, std::string>{"command", "lemma1"});
}

TEST_CASE("test functions by name") {
    CHECK(function_by_name("gaussian").name == function_by_name("f1").name);
    CHECK(function_by_name("cos_square")(0.0) == 1.0);
    CHECK_THROWS_AS((void)function_by_name("f9"), ConfigError);
}

TEST_CASE("number formatting") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(-INFINITY) == "-inf");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(version_string().rfind("ablab ", 0) == 0);
}

TEST_CASE("path CSV carries the header, provenance and 17-digit values") {
    PathSample p{TimeGrid(0.2, 0.1), Eigen::MatrixXd(3, 2), {RngStream{5, 0}, RngStream{5, 1}}, "exact-splitting"};
    p.states << 0.0, 2.0, 0.1, 1.0 / 3.0, -0.5, 1.5;
    const fs::path file = scratch("path.csv");
    write_path_csv(file, p, {{"epsilon", "0.01"}});
    const std::string text = slurp(file);
    CHECK(text.find("# version=ablab ") == 0);
    CHECK(text.find("# epsilon=0.01\n") != std::string::npos);
    CHECK(text.find("# scheme=exact-splitting\n") != std::string::npos);
    CHECK(text.find("# stream1=5:1\n") != std::string::npos);
    CHECK(text.find("t,x,y\n") != std::string::npos);
    CHECK(text.find("0.10000000000000001,0.10000000000000001,0.33333333333333331\n") != std::string::npos);

    write_path_csv(file, to_polar(p), {}, true);
    CHECK(slurp(file).find("t,r,theta\n") != std::string::npos);
}

TEST_CASE("table and scaling CSV") {
    const fs::path file = scratch("table.csv");
    write_table_csv(file, {"a", "b"}, {{1.0, 2.0}, {3.0, 4.0}}, {});
    CHECK(slurp(file).find("a,b\n1,2\n3,4\n") != std::string::npos);
    CHECK_THROWS_AS(write_table_csv(file, {"a"}, {{1.0, 2.0}}, {}), std::invalid_argument);

    const ScalingFit fit = fit_scaling({1e-1, 1e-2, 1e-3}, {1e-1, 1e-2, 1e-3});
    write_scaling_csv(file, fit, {});
    CHECK(slurp(file).find("epsilon,estimate\n") != std::string::npos);
}

TEST_CASE("JSON reports") {
    StatReport r;
    r.estimate = 0.25;
    r.std_error = std::nan("");
    r.n_replicas = 10;
    r.config.seed = 9;
    const json entry = check_entry("martingale_residual", r, true, 0.1);
    CHECK(entry["operation"] == "martingale_residual");
    CHECK(entry["estimate"] == 0.25);
    CHECK(entry["std_error"].is_null());
    CHECK(entry["pass"] == true);
    CHECK(entry["seed"] == 9);
    for (const char* key : {"operation", "params", "estimate", "std_error", "n", "pass", "threshold", "seed"})
        CHECK(entry.contains(key));

    const fs::path file = scratch("report.json");
    write_json(file, {{"operation", "x"}, {"value", 1.5}}, {{"seed", "9"}});
    const json back = json::parse(slurp(file));
    CHECK(back["config"]["seed"] == "9");
    CHECK(back["config"]["version"] == version_string());
    CHECK(back["value"] == 1.5);
    CHECK(back.begin().key() == "config");
}
