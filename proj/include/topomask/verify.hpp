#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace topomask {

struct PropertyResult {
    std::string name;
    std::size_t instances = 0;
    double max_error = 0.0;
    bool pass = false;
};

struct VerifyReport {
    std::vector<PropertyResult> results;

    bool all_pass() const;
    // One line per property: `name instances max_error PASS|FAIL`.
    std::string text() const;
};

// Suites runnable individually; "all" concatenates them in this order.
std::vector<std::string> verify_suites();

VerifyReport run_verify(const std::string& suite, std::uint64_t seed);

}  // namespace topomask
