#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace renormlab::cli {

struct CheckResult {
    std::string id;
    std::string module;
    bool pass = false;
    std::string detail;
};

struct SuiteOptions {
    std::string only;            // empty runs every module
    std::uint64_t seed = 1;
    bool flip_schwarzian = false;  // fault injection
};

std::vector<CheckResult> run_suite(const SuiteOptions& opt);
nlohmann::json suite_to_json(const std::vector<CheckResult>& results);

}  // namespace renormlab::cli
