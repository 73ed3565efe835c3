#include "defq/report.hpp"

#include <ostream>

#include "defq/kontsevich.hpp"

namespace defq {

void report_spec_echo(std::ostream& os, const ManifoldSpec& spec) {
    os << "spec_begin\n" << spec.str() << "spec_end\n";
}

void report_connection(std::ostream& os, const FedosovState& st) {
    os << "connection_begin\n";
    os << "flatness_certified_through_degree " << st.flat_valid_to << "\n";
    os << "curvature = " << st.R.str() << "\n";
    os << "correction_A = " << st.A.str() << "\n";
    os << "connection_end\n";
}

void report_identities(std::ostream& os, const std::vector<IdentityResult>& rs) {
    os << "identities_begin\n";
    for (const auto& r : rs) {
        os << (r.pass ? "pass " : "FAIL ") << r.name;
        if (!r.pass && !r.detail.empty()) os << " : " << r.detail;
        if (r.pass && !r.detail.empty()) os << " (" << r.detail << ")";
        os << "\n";
    }
    os << "identities_end\n";
}

void report_star(std::ostream& os, const StarProduct& star) {
    os << "star_begin\n";
    os << "hbar_order " << star.hbar_order << "\n";
    for (std::size_t n = 0; n < star.c.size(); ++n)
        os << "C" << n << " = " << star.c[n].str() << "\n";
    os << "star_end\n";
}

void report_weights(std::ostream& os) {
    os << "weights_begin\n" << WeightTable::solved().serialize() << "weights_end\n";
}

void report_equivariance(std::ostream& os, const std::vector<CheckResult>& rs) {
    os << "equivariance_begin\n";
    for (const auto& r : rs) {
        os << (r.pass ? "pass " : "FAIL ") << r.name;
        if (!r.detail.empty()) os << " : " << r.detail;
        os << "\n";
    }
    os << "equivariance_end\n";
}

} // namespace defq
