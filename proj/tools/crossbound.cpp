// command-line front end: subcommands mirror the pipeline stages
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "crossbound/pipeline.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_invalid_cert = 1;
constexpr int exit_usage = 2;
constexpr int exit_numerical = 3;

struct reduced_instance {
    crossbound::q_matrix q;
    crossbound::orbit_basis basis;
    crossbound::block_basis blocks;
};

reduced_instance build_reduced(int m) {
    crossbound::pi_index pi(m);
    reduced_instance inst{crossbound::build_q_matrix(pi), {}, {}};
    crossbound::group_generators gens = crossbound::build_generators(pi);
    crossbound::two_orbit_partition orbits = crossbound::compute_two_orbits(gens, inst.q);
    inst.basis = crossbound::symmetrize_basis(orbits, inst.q);
    inst.blocks = crossbound::conjugate_basis(crossbound::build_pairing(gens), inst.basis);
    return inst;
}

void write_to(const std::string& path, const std::function<void(std::ostream&)>& writer) {
    if (path.empty() || path == "-") {
        writer(std::cout);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    writer(f);
    if (!f) throw std::runtime_error("write failed: " + path);
}

nlohmann::json solution_json(const crossbound::relaxation_result& res) {
    using crossbound::detail::wrap;
    nlohmann::json j;
    j["level"] = wrap(res.level, "solve");
    j["status"] = wrap(crossbound::to_string(res.solution.status), "solve");
    j["objective"] = wrap(res.solution.objective_value, "solve");
    j["dual_bound"] = wrap(res.solution.dual_bound, "solve");
    j["duality_gap"] = wrap(res.solution.duality_gap, "solve");
    j["iterations"] = wrap(res.solution.iterations, "solve");
    j["problem_fingerprint"] = wrap(res.problem_fingerprint, "solve");
    return j;
}

nlohmann::json bounds_json(const crossbound::crossing_bound_report& rep) {
    using crossbound::detail::wrap;
    nlohmann::json j;
    j["m"] = wrap(rep.m, "bounds");
    j["p_validated"] = wrap(crossbound::rational_str(rep.p_validated), "bounds");
    j["quadratic_coeff"] = wrap(crossbound::rational_str(rep.quadratic_coeff), "bounds");
    j["quadratic_coeff_float"] = wrap(rep.quadratic_coeff.get_d(), "bounds");
    j["linear_coeff"] = wrap(crossbound::rational_str(rep.linear_coeff), "bounds");
    if (rep.has_asymptotics) {
        j["a_base"] = wrap(rep.a_base.get_d(), "bounds");
        j["a_m_factor"] = wrap(rep.a_m_factor.get_d(), "bounds");
        j["b_lower"] = wrap(rep.b_lower.get_d(), "bounds");
        j["c_lower"] = wrap(rep.c_lower.get_d(), "bounds");
    }
    j["provenance"] = wrap(rep.provenance, "bounds");
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "crossbound: certified lower bounds for crossing numbers of complete "
        "bipartite graphs (set CROSSBOUND_THREADS to limit worker threads)"};
    app.require_subcommand(1);

    // common option storage
    int m = 5, level = 0;
    double tol = 1e-9;
    std::string out_path, in_path, cert_path, sdpa_path, out_dir = "crossbound-out", margins;
    bool emit_json = false;

    auto* c_qmatrix = app.add_subcommand("qmatrix", "emit the Q distance matrix for given m");
    c_qmatrix->add_option("--m", m, "number of spine vertices (3..8)")->required();
    c_qmatrix->add_option("--out", out_path, "output file (default stdout)");

    auto* c_orbits = app.add_subcommand("orbits", "emit the symmetrized 2-orbit basis");
    c_orbits->add_option("--m", m)->required();
    c_orbits->add_option("--out", out_path);

    auto* c_reduce = app.add_subcommand("reduce", "emit the block-diagonalized basis");
    c_reduce->add_option("--m", m)->required();
    c_reduce->add_option("--out", out_path);

    auto* c_solve = app.add_subcommand("solve", "build and solve the level-0/1 relaxation");
    c_solve->add_option("--m", m)->required();
    c_solve->add_option("--level", level, "relaxation level (0 or 1)")->check(CLI::Range(0, 1));
    c_solve->add_option("--tol", tol, "solver tolerance");
    c_solve->add_option("--export-sdpa", sdpa_path, "also write the problem in SDPA format");
    c_solve->add_flag("--json", emit_json, "print the solution as JSON");
    c_solve->add_option("--out", out_path, "solution file (default stdout)");

    auto* c_solve_file = app.add_subcommand("solve-file", "solve a problem from an SDPA file");
    c_solve_file->add_option("path", in_path, "SDPA sparse input file")->required();
    c_solve_file->add_option("--tol", tol, "solver tolerance");
    c_solve_file->add_flag("--json", emit_json, "print the solution as JSON");

    auto* c_certify = app.add_subcommand("certify", "round a solution to an exact certificate");
    c_certify->add_option("--m", m)->required();
    c_certify->add_option("--in", in_path, "solution file from `solve`")->required();
    c_certify->add_option("--out", cert_path, "certificate file")->required();
    c_certify->add_option("--margins", margins, "comma-separated rational margin ladder");

    auto* c_verify = app.add_subcommand("verify", "verify a certificate exactly");
    c_verify->add_option("--cert", cert_path, "certificate file")->required();

    auto* c_bounds = app.add_subcommand("bounds", "crossing-number bounds from a certificate");
    c_bounds->add_option("--m", m, "base m (default: from certificate)");
    c_bounds->add_option("--cert", cert_path)->required();
    c_bounds->add_flag("--json", emit_json);

    auto* c_report = app.add_subcommand("report", "human-readable theorem-style summary");
    c_report->add_option("--m", m, "base m (default: from certificate)");
    c_report->add_option("--cert", cert_path)->required();

    auto* c_pipeline = app.add_subcommand("pipeline", "run all stages and write artifacts");
    c_pipeline->add_option("--m", m)->required();
    c_pipeline->add_option("--level", level)->check(CLI::Range(0, 1));
    c_pipeline->add_option("--tol", tol);
    c_pipeline->add_option("--out-dir", out_dir, "artifact directory");
    c_pipeline->add_flag("--json", emit_json, "also write report.json");
    c_pipeline->add_option("--export-sdpa", sdpa_path, "SDPA export path");
    c_pipeline->add_option("--margins", margins, "comma-separated rational margin ladder");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*c_qmatrix) {
            crossbound::pi_index pi(m);
            crossbound::q_matrix q = crossbound::build_q_matrix(pi);
            write_to(out_path, [&](std::ostream& f) { crossbound::write_q_artifact(q, f); });
            return exit_ok;
        }
        if (*c_orbits) {
            reduced_instance inst = build_reduced(m);
            write_to(out_path,
                     [&](std::ostream& f) { crossbound::write_orbit_artifact(inst.basis, f); });
            return exit_ok;
        }
        if (*c_reduce) {
            reduced_instance inst = build_reduced(m);
            write_to(out_path,
                     [&](std::ostream& f) { crossbound::write_block_artifact(inst.blocks, f); });
            return exit_ok;
        }
        if (*c_solve) {
            crossbound::block_sdp_problem prob;
            if (level == 0) {
                reduced_instance inst = build_reduced(m);
                prob = crossbound::build_k0_problem(inst.basis, inst.blocks);
            } else {
                if (m > 5) throw std::invalid_argument("level 1 is only supported for m <= 5");
                crossbound::pi_index pi(m);
                prob = crossbound::build_k1_problem(
                    crossbound::to_standard_qp(crossbound::build_q_matrix(pi)));
            }
            if (!sdpa_path.empty()) crossbound::export_sdpa(prob, sdpa_path);
            crossbound::relaxation_result res = crossbound::solve_relaxation(prob, level, tol);
            if (emit_json)
                std::cout << solution_json(res).dump(2) << "\n";
            else
                write_to(out_path,
                         [&](std::ostream& f) { crossbound::write_solution_artifact(res, f); });
            if (res.solution.status == crossbound::sdp_status::numerical_failure ||
                res.solution.status == crossbound::sdp_status::infeasible)
                return exit_numerical;
            return exit_ok;
        }
        if (*c_solve_file) {
            crossbound::block_sdp_problem prob = crossbound::load_sdpa(in_path);
            crossbound::relaxation_result res = crossbound::solve_relaxation(prob, 0, tol);
            if (emit_json) {
                std::cout << solution_json(res).dump(2) << "\n";
            } else {
                std::cout << "status " << crossbound::to_string(res.solution.status) << "\n";
                std::cout << "objective "
                          << crossbound::detail::render_double(res.solution.objective_value)
                          << "\n";
                std::cout << "duality_gap "
                          << crossbound::detail::render_double(res.solution.duality_gap) << "\n";
                std::cout << "iterations " << res.solution.iterations << "\n";
            }
            if (res.solution.status == crossbound::sdp_status::numerical_failure ||
                res.solution.status == crossbound::sdp_status::infeasible)
                return exit_numerical;
            return exit_ok;
        }
        if (*c_certify) {
            reduced_instance inst = build_reduced(m);
            std::ifstream f(in_path, std::ios::binary);
            if (!f) throw std::runtime_error("cannot open " + in_path);
            crossbound::relaxation_result res = crossbound::read_solution_artifact(f);
            crossbound::block_sdp_problem prob =
                crossbound::build_k0_problem(inst.basis, inst.blocks);
            if (res.problem_fingerprint != crossbound::problem_fingerprint(prob))
                throw std::invalid_argument("solution was produced for a different problem");
            std::vector<crossbound::rational> ladder;
            if (!margins.empty()) {
                std::istringstream ss(margins);
                std::string tok;
                while (std::getline(ss, tok, ','))
                    if (!tok.empty()) ladder.push_back(crossbound::parse_rational(tok));
            }
            try {
                crossbound::certificate cert = crossbound::certify_with_ladder(
                    res.solution, inst.basis, inst.blocks, ladder);
                crossbound::write_certificate(cert, cert_path);
            } catch (const crossbound::rounding_error& e) {
                std::cerr << e.what() << "\n";
                return exit_invalid_cert;
            }
            return exit_ok;
        }
        if (*c_verify) {
            crossbound::certificate cert = crossbound::read_certificate(cert_path);
            reduced_instance inst = build_reduced(cert.m);
            crossbound::verification_report rep =
                crossbound::verify_certificate(cert, inst.basis, inst.blocks);
            crossbound::write_verification_artifact(rep, std::cout);
            return rep.valid ? exit_ok : exit_invalid_cert;
        }
        if (*c_bounds || *c_report) {
            crossbound::certificate cert = crossbound::read_certificate(cert_path);
            if (!c_bounds->count("--m") && !c_report->count("--m")) m = cert.m;
            if (m != cert.m) throw std::invalid_argument("--m does not match the certificate");
            reduced_instance inst = build_reduced(cert.m);
            crossbound::verification_report rep =
                crossbound::verify_certificate(cert, inst.basis, inst.blocks);
            if (!rep.valid) {
                std::cerr << "certificate invalid: " << rep.reason << "\n";
                return exit_invalid_cert;
            }
            std::string prov = "certificate for basis " + cert.basis_fingerprint;
            crossbound::crossing_bound_report rep_b =
                cert.m == 7 ? crossbound::asymptotic_report(rep.validated_bound, 7, prov)
                            : crossbound::basic_bound_report(rep.validated_bound, cert.m, prov);
            if (*c_bounds && emit_json)
                std::cout << bounds_json(rep_b).dump(2) << "\n";
            else
                std::cout << crossbound::render_bound_report(rep_b);
            return exit_ok;
        }
        if (*c_pipeline) {
            crossbound::pipeline_config cfg;
            cfg.m = m;
            cfg.level = level;
            cfg.tol = tol;
            cfg.out_dir = out_dir;
            cfg.emit_json = emit_json;
            cfg.export_sdpa_path = sdpa_path;
            if (!margins.empty()) {
                std::istringstream ss(margins);
                std::string tok;
                while (std::getline(ss, tok, ','))
                    if (!tok.empty()) cfg.margin_ladder.push_back(crossbound::parse_rational(tok));
            }
            try {
                crossbound::pipeline_outcome out = crossbound::run_pipeline(cfg);
                std::cout << out.report_text;
                return out.verified ? exit_ok : exit_invalid_cert;
            } catch (const crossbound::pipeline_error& e) {
                std::cerr << e.what() << "\n";
                if (e.numerical) return exit_numerical;
                if (e.stage == "certify" || e.stage == "verify") return exit_invalid_cert;
                throw;
            }
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}
