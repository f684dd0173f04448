#ifndef CROSSBOUND_PIPELINE_HPP
#define CROSSBOUND_PIPELINE_HPP

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "crossbound/blockdiag.hpp"
#include "crossbound/bounds.hpp"
#include "crossbound/certify.hpp"
#include "crossbound/cyclic.hpp"
#include "crossbound/rational.hpp"
#include "crossbound/relaxations.hpp"
#include "crossbound/sdp.hpp"
#include "crossbound/sdpa_io.hpp"
#include "crossbound/symmetry.hpp"

namespace crossbound {

struct pipeline_config {
    int m = 5;
    int level = 0;
    double tol = 1e-9;
    std::vector<rational> margin_ladder;  // empty = default ladder
    std::string out_dir = ".";
    bool emit_json = false;
    std::string export_sdpa_path;  // empty = no export

    void validate() const {
        if (m < 3 || m > 7) throw std::invalid_argument("pipeline: m must be in 3..7");
        if (level != 0 && level != 1) throw std::invalid_argument("pipeline: level must be 0 or 1");
        if (level == 1 && m > 5)
            throw std::invalid_argument("pipeline: level 1 is only supported for m <= 5");
        if (!(tol > 0)) throw std::invalid_argument("pipeline: tol must be positive");
    }
};

struct pipeline_error : std::runtime_error {
    std::string stage;
    bool numerical;
    pipeline_error(std::string st, const std::string& msg, bool num = false)
        : std::runtime_error("stage " + st + ": " + msg), stage(std::move(st)), numerical(num) {}
};

struct pipeline_outcome {
    relaxation_result relaxation;
    certificate cert;                 // level 0 only
    verification_report verification;  // level 0 only
    bool verified = false;
    crossing_bound_report report;
    std::string report_text;
    nlohmann::json json_report;
};

// ---- plain-text artifact writers (diffable, deterministic) ----

inline void write_q_artifact(const q_matrix& q, std::ostream& out) {
    out << "crossbound qmatrix 1\n";
    out << "m " << q.m << "\n";
    out << "d " << q.d << "\n";
    for (int i = 0; i < q.d; ++i) {
        for (int j = 0; j < q.d; ++j) out << (j ? " " : "") << q.at(i, j);
        out << "\n";
    }
}

inline void write_orbit_artifact(const orbit_basis& basis, std::ostream& out) {
    out << "crossbound orbits 1\n";
    out << "m " << basis.m << "\n";
    out << "d " << basis.d << "\n";
    out << "r " << basis.orbits.r << "\n";
    out << "M " << basis.M << "\n";
    out << "fingerprint " << basis.fingerprint() << "\n";
    for (int e = 0; e < basis.M; ++e) {
        auto cells = basis.upper_cells(e);
        out << "element " << e << " b " << basis.b[static_cast<std::size_t>(e)] << " symmetric "
            << (basis.symmetric[static_cast<std::size_t>(e)] ? 1 : 0) << " cells " << cells.size()
            << "\n";
        for (const auto& [i, j] : cells) out << i << " " << j << "\n";
    }
}

inline void write_block_artifact(const block_basis& blocks, std::ostream& out) {
    out << "crossbound blocks 1\n";
    out << "M " << blocks.M << "\n";
    out << "h " << blocks.h << "\n";
    out << "provenance " << blocks.provenance << "\n";
    for (int e = 0; e < blocks.M; ++e) {
        for (int b = 0; b < 2; ++b) {
            const int_matrix& blk =
                (b == 0 ? blocks.blocks1 : blocks.blocks2)[static_cast<std::size_t>(e)];
            std::vector<std::string> lines;
            for (int k = 0; k < blocks.h; ++k)
                for (int l = k; l < blocks.h; ++l)
                    if (blk.at(k, l) != 0)
                        lines.push_back(std::to_string(k) + " " + std::to_string(l) + " " +
                                        std::to_string(blk.at(k, l)));
            out << "element " << e << " block " << b + 1 << " nnz " << lines.size() << "\n";
            for (const auto& ln : lines) out << ln << "\n";
        }
    }
}

inline void write_solution_artifact(const relaxation_result& res, std::ostream& out) {
    const sdp_solution& sol = res.solution;
    out << "crossbound solution 1\n";
    out << "level " << res.level << "\n";
    out << "problem " << res.problem_fingerprint << "\n";
    out << "status " << to_string(sol.status) << "\n";
    out << "objective " << detail::render_double(sol.objective_value) << "\n";
    out << "dual " << detail::render_double(sol.dual_bound) << "\n";
    out << "gap " << detail::render_double(sol.duality_gap) << "\n";
    out << "residual " << detail::render_double(sol.feasibility_residual) << "\n";
    out << "iterations " << sol.iterations << "\n";
    out << "y " << sol.y.size() << "\n";
    for (double v : sol.y) out << detail::render_double(v) << "\n";
}

inline relaxation_result read_solution_artifact(std::istream& in) {
    relaxation_result res;
    std::string line;
    if (!std::getline(in, line) || line != "crossbound solution 1")
        throw std::runtime_error("not a solution file");
    std::size_t ny = 0;
    bool have_y = false;
    while (!have_y && std::getline(in, line)) {
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "level")
            ss >> res.level;
        else if (key == "problem")
            ss >> res.problem_fingerprint;
        else if (key == "status") {
            std::string st;
            ss >> st;
            if (st == "optimal")
                res.solution.status = sdp_status::optimal;
            else if (st == "max_iterations")
                res.solution.status = sdp_status::max_iterations;
            else if (st == "infeasible")
                res.solution.status = sdp_status::infeasible;
            else
                res.solution.status = sdp_status::numerical_failure;
        } else if (key == "objective")
            ss >> res.solution.objective_value;
        else if (key == "dual")
            ss >> res.solution.dual_bound;
        else if (key == "gap")
            ss >> res.solution.duality_gap;
        else if (key == "residual")
            ss >> res.solution.feasibility_residual;
        else if (key == "iterations")
            ss >> res.solution.iterations;
        else if (key == "y") {
            ss >> ny;
            have_y = true;
        } else if (!key.empty())
            throw std::runtime_error("unknown solution field: " + key);
    }
    if (!have_y) throw std::runtime_error("solution missing y section");
    res.solution.y.resize(ny);
    for (std::size_t i = 0; i < ny; ++i) {
        if (!std::getline(in, line)) throw std::runtime_error("solution y list truncated");
        res.solution.y[i] = std::stod(line);
    }
    res.p_lower = res.solution.objective_value;
    return res;
}

inline void write_verification_artifact(const verification_report& rep, std::ostream& out) {
    out << "crossbound verification 1\n";
    out << "verdict " << (rep.valid ? "valid" : "invalid") << "\n";
    if (!rep.valid) out << "reason " << rep.reason << "\n";
    if (rep.valid) {
        out << "bound " << rational_str(rep.validated_bound) << "\n";
        out << "scalar_margin " << rational_str(rep.scalar_margin) << "\n";
    }
    for (const auto& w : rep.psd_witness) out << "witness " << w << "\n";
}

namespace detail {

template <typename F>
auto run_stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const pipeline_error&) {
        throw;
    } catch (const std::exception& e) {
        throw pipeline_error(name, e.what());
    }
}

template <typename T>
void write_artifact_file(const std::string& dir, const char* name, const T& writer) {
    std::filesystem::path p = std::filesystem::path(dir) / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + p.string());
    writer(f);
    if (!f) throw std::runtime_error("write failed: " + p.string());
}

inline nlohmann::json wrap(const nlohmann::json& value, const char* stage) {
    return nlohmann::json{{"value", value}, {"stage", stage}};
}

}  // namespace detail

inline pipeline_outcome run_pipeline(const pipeline_config& cfg) {
    cfg.validate();
    std::filesystem::create_directories(cfg.out_dir);
    pipeline_outcome out;
    nlohmann::json& j = out.json_report;
    j["m"] = detail::wrap(cfg.m, "config");
    j["level"] = detail::wrap(cfg.level, "config");
    j["tol"] = detail::wrap(cfg.tol, "config");

    pi_index pi = detail::run_stage("qmatrix", [&] { return pi_index(cfg.m); });
    q_matrix q = detail::run_stage("qmatrix", [&] { return build_q_matrix(pi); });
    detail::write_artifact_file(cfg.out_dir, "q.txt",
                                [&](std::ostream& f) { write_q_artifact(q, f); });
    j["q_dim"] = detail::wrap(q.d, "qmatrix");
    j["q_diagonal"] = detail::wrap(q.at(0, 0), "qmatrix");

    if (cfg.level == 0) {
        orbit_basis basis = detail::run_stage("orbits", [&] {
            group_generators gens = build_generators(pi);
            two_orbit_partition orbits = compute_two_orbits(gens, q);
            return symmetrize_basis(orbits, q);
        });
        detail::write_artifact_file(cfg.out_dir, "orbits.txt",
                                    [&](std::ostream& f) { write_orbit_artifact(basis, f); });
        j["orbit_count"] = detail::wrap(basis.orbits.r, "orbits");
        j["group_orbit_count"] = detail::wrap(basis.orbits.group_orbit_count, "orbits");
        j["basis_size"] = detail::wrap(basis.M, "orbits");
        j["basis_fingerprint"] = detail::wrap(basis.fingerprint(), "orbits");

        block_basis blocks = detail::run_stage("reduce", [&] {
            group_generators gens = build_generators(pi);
            pairing_transform vp = build_pairing(gens);
            return conjugate_basis(vp, basis);
        });
        detail::write_artifact_file(cfg.out_dir, "blocks.txt",
                                    [&](std::ostream& f) { write_block_artifact(blocks, f); });
        j["block_size"] = detail::wrap(blocks.h, "reduce");

        block_sdp_problem prob =
            detail::run_stage("solve", [&] { return build_k0_problem(basis, blocks); });
        if (!cfg.export_sdpa_path.empty()) export_sdpa(prob, cfg.export_sdpa_path);
        out.relaxation = detail::run_stage("solve", [&] {
            relaxation_result r = solve_relaxation(prob, 0, cfg.tol);
            if (r.solution.status == sdp_status::numerical_failure ||
                r.solution.status == sdp_status::infeasible)
                throw pipeline_error("solve",
                                     std::string("solver failed: ") + to_string(r.solution.status),
                                     true);
            return r;
        });
        detail::write_artifact_file(cfg.out_dir, "solution.txt", [&](std::ostream& f) {
            write_solution_artifact(out.relaxation, f);
        });
        j["objective"] = detail::wrap(out.relaxation.solution.objective_value, "solve");
        j["dual_bound"] = detail::wrap(out.relaxation.solution.dual_bound, "solve");
        j["duality_gap"] = detail::wrap(out.relaxation.solution.duality_gap, "solve");
        j["iterations"] = detail::wrap(out.relaxation.solution.iterations, "solve");
        j["solver_status"] = detail::wrap(to_string(out.relaxation.solution.status), "solve");
        j["problem_fingerprint"] = detail::wrap(out.relaxation.problem_fingerprint, "solve");

        out.cert = detail::run_stage("certify", [&] {
            return certify_with_ladder(out.relaxation.solution, basis, blocks, cfg.margin_ladder);
        });
        detail::write_artifact_file(cfg.out_dir, "certificate.txt",
                                    [&](std::ostream& f) { write_certificate(out.cert, f); });

        out.verification =
            detail::run_stage("verify", [&] { return verify_certificate(out.cert, basis, blocks); });
        detail::write_artifact_file(cfg.out_dir, "verification.txt", [&](std::ostream& f) {
            write_verification_artifact(out.verification, f);
        });
        out.verified = out.verification.valid;
        j["verdict"] = detail::wrap(out.verified ? "valid" : "invalid", "verify");
        if (out.verified) {
            j["validated_bound"] = detail::wrap(rational_str(out.verification.validated_bound),
                                                "verify");
            j["scalar_margin"] = detail::wrap(rational_str(out.verification.scalar_margin),
                                              "verify");
        }

        out.report = detail::run_stage("bounds", [&] {
            std::string prov = "certificate for basis " + out.cert.basis_fingerprint;
            if (cfg.m == 7) return asymptotic_report(out.verification.validated_bound, 7, prov);
            return basic_bound_report(out.verification.validated_bound, cfg.m, prov);
        });
    } else {
        standard_qp qp = detail::run_stage("solve", [&] { return to_standard_qp(q); });
        block_sdp_problem prob = detail::run_stage("solve", [&] { return build_k1_problem(qp); });
        if (!cfg.export_sdpa_path.empty()) export_sdpa(prob, cfg.export_sdpa_path);
        out.relaxation = detail::run_stage("solve", [&] {
            relaxation_result r = solve_relaxation(prob, 1, cfg.tol);
            if (r.solution.status == sdp_status::numerical_failure ||
                r.solution.status == sdp_status::infeasible)
                throw pipeline_error("solve",
                                     std::string("solver failed: ") + to_string(r.solution.status),
                                     true);
            return r;
        });
        detail::write_artifact_file(cfg.out_dir, "solution.txt", [&](std::ostream& f) {
            write_solution_artifact(out.relaxation, f);
        });
        j["objective"] = detail::wrap(out.relaxation.solution.objective_value, "solve");
        j["dual_bound"] = detail::wrap(out.relaxation.solution.dual_bound, "solve");
        j["duality_gap"] = detail::wrap(out.relaxation.solution.duality_gap, "solve");
        j["iterations"] = detail::wrap(out.relaxation.solution.iterations, "solve");
        j["solver_status"] = detail::wrap(to_string(out.relaxation.solution.status), "solve");
        j["problem_fingerprint"] = detail::wrap(out.relaxation.problem_fingerprint, "solve");
        out.verified = true;  // nothing to certify at level 1

        out.report = detail::run_stage("bounds", [&] {
            return basic_bound_report(rational(out.relaxation.solution.objective_value), cfg.m,
                                      "solver objective (floating point, not certified)");
        });
    }

    out.report_text = render_bound_report(out.report);
    detail::write_artifact_file(cfg.out_dir, "bounds.txt",
                                [&](std::ostream& f) { f << out.report_text; });
    j["quadratic_coeff"] = detail::wrap(rational_str(out.report.quadratic_coeff), "bounds");
    j["quadratic_coeff_float"] = detail::wrap(out.report.quadratic_coeff.get_d(), "bounds");
    j["linear_coeff"] = detail::wrap(rational_str(out.report.linear_coeff), "bounds");
    if (out.report.has_asymptotics) {
        j["a_base"] = detail::wrap(out.report.a_base.get_d(), "bounds");
        j["a_m_factor"] = detail::wrap(out.report.a_m_factor.get_d(), "bounds");
        j["b_lower"] = detail::wrap(out.report.b_lower.get_d(), "bounds");
        j["c_lower"] = detail::wrap(out.report.c_lower.get_d(), "bounds");
    }

    if (cfg.emit_json) {
        detail::write_artifact_file(cfg.out_dir, "report.json",
                                    [&](std::ostream& f) { f << j.dump(2) << "\n"; });
    }
    return out;
}

}  // namespace crossbound

#endif
