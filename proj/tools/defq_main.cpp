// Command-line front end: identity suites, resolution data, star products,
// and equivariance checks over spec files.  Exit codes: 0 success, 1 bad
// input, 2 capacity limit, 3 failed internal identity.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "defq/errors.hpp"
#include "defq/report.hpp"

namespace {

struct CommonOpts {
    std::string spec_path;
    std::string out_path;
    int order_override = -1;
    int hbar_override = -1;
};

defq::ManifoldSpec load(const CommonOpts& o) {
    defq::ManifoldSpec spec = defq::load_spec_file(o.spec_path);
    if (o.order_override >= 2) spec.trunc = o.order_override;
    if (o.hbar_override >= 0) spec.hbar_order = o.hbar_override;
    return spec;
}

int emit(const CommonOpts& o, const std::string& text) {
    if (o.out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(o.out_path, std::ios::binary);
        if (!f) {
            std::cerr << "error: cannot write '" << o.out_path << "'\n";
            return 1;
        }
        f << text;
    }
    return 0;
}

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--spec", o.spec_path, "spec file")->required();
    cmd->add_option("--out", o.out_path, "write the report to a file");
    cmd->add_option("--order", o.order_override, "override trunc_order");
    cmd->add_option("--hbar", o.hbar_override, "override hbar_order");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact deformation-quantization pipeline"};
    app.require_subcommand(1);

    CommonOpts check_opts, conn_opts, star_opts, equi_opts;
    std::string suite = "all";

    CLI::App* check = app.add_subcommand("check", "run identity suites");
    add_common(check, check_opts);
    check->add_option("--suite", suite, "suite name (default: all)");

    CLI::App* connection = app.add_subcommand("connection", "solve and print the resolution data");
    add_common(connection, conn_opts);

    CLI::App* star = app.add_subcommand("star", "synthesize the star product");
    add_common(star, star_opts);

    CLI::App* equivariance = app.add_subcommand("equivariance", "run the symmetry checks");
    add_common(equivariance, equi_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) {
            defq::ManifoldSpec spec = load(check_opts);
            auto results = defq::run_identity_suite(spec, suite);
            std::ostringstream os;
            defq::report_spec_echo(os, spec);
            os << "suite " << suite << "\n";
            defq::report_identities(os, results);
            int rc = emit(check_opts, os.str());
            if (rc != 0) return rc;
            return defq::all_passed(results) ? 0 : 3;
        }
        if (connection->parsed()) {
            defq::ManifoldSpec spec = load(conn_opts);
            defq::FedosovState st = defq::solve_connection(spec.conn, spec.trunc);
            std::ostringstream os;
            defq::report_spec_echo(os, spec);
            defq::report_connection(os, st);
            return emit(conn_opts, os.str());
        }
        if (star->parsed()) {
            defq::ManifoldSpec spec = load(star_opts);
            defq::StarProduct sp = defq::build_star_product(spec);
            std::ostringstream os;
            defq::report_spec_echo(os, spec);
            defq::report_star(os, sp);
            defq::report_weights(os);
            return emit(star_opts, os.str());
        }
        if (equivariance->parsed()) {
            defq::ManifoldSpec spec = load(equi_opts);
            auto results = defq::check_equivariance(spec);
            std::ostringstream os;
            defq::report_spec_echo(os, spec);
            defq::report_equivariance(os, results);
            int rc = emit(equi_opts, os.str());
            if (rc != 0) return rc;
            for (const auto& r : results)
                if (!r.pass) return 3;
            return 0;
        }
    } catch (const defq::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const defq::CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 2;
    } catch (const defq::InternalError& e) {
        std::cerr << "internal consistency error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
