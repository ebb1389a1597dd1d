// Acceptance suite runner: one line per criterion, exit 0 only if all pass.
#include <cstdlib>
#include <iostream>

#include "galgeo/checks.hpp"
#include "galgeo/parallel.hpp"

int main() {
    int jobs = galgeo::default_workers();
    if (const char* env = std::getenv("GALGEO_JOBS")) jobs = std::max(1, std::atoi(env));

    std::cout << "acceptance suite (jobs=" << jobs << ")\n";
    std::vector<galgeo::checks::CheckResult> results = galgeo::checks::run_all(jobs);

    bool all = true;
    for (const auto& r : results) {
        all = all && r.pass;
        std::printf("%-4s %-36s %8.2fs (limit %.0fs)\n", r.pass ? "PASS" : "FAIL", r.id.c_str(),
                    r.seconds, r.limit_seconds);
        if (!r.pass) std::cout << "     details: " << r.details.dump() << "\n";
    }
    std::cout << (all ? "ALL CRITERIA PASSED" : "CRITERIA FAILED") << "\n";
    return all ? 0 : 1;
}
