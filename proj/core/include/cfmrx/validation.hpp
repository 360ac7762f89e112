// Fast self-checks of the algebraic identities and statistical invariants the
// receiver relies on; backs the `validate` CLI subcommand.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cfmrx {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

std::vector<CheckResult> run_validation(uint64_t seed = 1);

}  // namespace cfmrx
