#pragma once

#include <iosfwd>

#include "defq/star.hpp"
#include "defq/suites.hpp"

namespace defq {

/// Deterministic, machine-parseable report sections (stable key order, all
/// numbers exact rationals).  The same inputs always produce byte-identical
/// output.
void report_spec_echo(std::ostream& os, const ManifoldSpec& spec);
void report_connection(std::ostream& os, const FedosovState& st);
void report_identities(std::ostream& os, const std::vector<IdentityResult>& rs);
void report_star(std::ostream& os, const StarProduct& star);
void report_weights(std::ostream& os);
void report_equivariance(std::ostream& os, const std::vector<CheckResult>& rs);

} // namespace defq
