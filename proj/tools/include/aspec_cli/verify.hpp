#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

namespace aspec::cli {

struct VerifyOptions {
    std::int64_t p = 3;
    std::int64_t q = 7;
    double r = 0.5;
    std::size_t n = 3;
    std::uint64_t trials = 100;
    std::uint64_t pairs = 10000;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    std::size_t max_elements = 100000;
};

struct VerifyResult {
    std::string name;
    bool pass = false;
    nlohmann::json evidence;
    /// Set when `pass` is false.
    nlohmann::json counterexample;
};

/// Throws std::invalid_argument for an unknown name, InvalidParams for bad sizes.
VerifyResult run_verify(const std::string& name, const VerifyOptions& options);

const char* const kVerifyNames[] = {"lemma-spectrum", "tadpole-closure", "tadpole-bound",
                                    "mm-gap",         "sr-bound",        "conversions"};

} // namespace aspec::cli
