// Runs the full verification suite and prints one PASS/FAIL line per
// criterion. Exit status is nonzero when any criterion fails.
#include <cstdio>

#include "rootiter/selftest.hpp"

int main() {
    bool all = true;
    for (const auto& c : rootiter::selftest::run_selftest()) {
        std::printf("%s %s: %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                    c.detail.c_str());
        all = all && c.passed;
    }
    return all ? 0 : 1;
}
