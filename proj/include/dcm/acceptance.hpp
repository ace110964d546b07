#pragma once

#include <string>
#include <vector>

#include "dcm/io.hpp"

namespace dcm {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string details;
    JVal artifact;
};

struct AcceptanceOptions {
    int threads = 1;
    std::string out_dir;  // artifacts written when nonempty
};

// Runs the full acceptance suite (one result per criterion).  Deterministic:
// identical options give byte-identical artifacts for any thread count.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

// One pass/fail line per criterion.
std::string format_acceptance_table(const std::vector<CriterionResult>& results);

} // namespace dcm
