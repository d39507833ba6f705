// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// Exit status is nonzero if any criterion fails.

#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "ablab/acceptance.hpp"

int main(int argc, char** argv) {
    ablab::AcceptanceOptions options;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--quick") == 0) options.quick = true;
        else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) options.seed = std::strtoull(argv[++i], nullptr, 10);
    }
    const auto report = ablab::run_acceptance(options, [](const ablab::CriterionResult& r) {
        std::printf("%s\n", ablab::format_result_line(r).c_str());
        std::fflush(stdout);
    });
    std::printf("acceptance %s\n", report.pass() ? "PASS" : "FAIL");
    return report.pass() ? 0 : 1;
}
