#pragma once

#include <string>
#include <vector>

#include "defq/manifold_spec.hpp"

namespace defq {

struct IdentityResult {
    std::string name;
    bool pass = false;
    std::string detail; // offending term on failure
};

std::vector<std::string> suite_names();

/// Runs one named identity suite (or "all") against the spec's data with
/// fixed seeds.  Unknown suite names are a validation error.
std::vector<IdentityResult> run_identity_suite(const ManifoldSpec& spec,
                                               const std::string& suite);

bool all_passed(const std::vector<IdentityResult>& rs);

} // namespace defq
