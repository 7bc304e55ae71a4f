#pragma once

#include <string>
#include <vector>

namespace rootiter::selftest {

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Runs the full built-in verification suite (contraction constants,
/// iteration-count separation, equioscillation law, closed forms, Pade limit,
/// Hermitian PD error bounds, Frechet stability, condition-number sanity,
/// forward-stability proxy). One Check per criterion.
std::vector<Check> run_selftest();

}  // namespace rootiter::selftest
