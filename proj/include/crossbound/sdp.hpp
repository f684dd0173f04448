#ifndef CROSSBOUND_SDP_HPP
#define CROSSBOUND_SDP_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "crossbound/util.hpp"

namespace crossbound {

// Max-objective problem over PSD blocks plus scalar inequalities:
//   maximize g.y   s.t.  sum_v y_v F_v^b - F0^b  PSD for each block b,
//                        a.y <= rhs for each inequality row.
struct sdp_entry {
    int block;
    int i, j;  // i <= j
    double val;
};

struct linear_ineq {
    std::vector<std::pair<int, double>> coeffs;
    double rhs;
};

struct block_sdp_problem {
    int nvars = 0;
    std::vector<double> objective;
    std::vector<int> block_sizes;                 // dense PSD blocks
    std::vector<std::vector<sdp_entry>> fvar;     // per variable
    std::vector<sdp_entry> f0;
    std::vector<linear_ineq> ineqs;

    void require_consistent() const {
        if (static_cast<int>(objective.size()) != nvars ||
            static_cast<int>(fvar.size()) != nvars)
            throw std::invalid_argument("inconsistent variable count");
        auto check = [&](const sdp_entry& e) {
            if (e.block < 0 || e.block >= static_cast<int>(block_sizes.size()) ||
                e.i < 0 || e.j < e.i || e.j >= block_sizes[static_cast<std::size_t>(e.block)])
                throw std::invalid_argument("entry out of range");
        };
        for (const auto& es : fvar)
            for (const auto& e : es) check(e);
        for (const auto& e : f0) check(e);
        for (const auto& row : ineqs)
            for (const auto& [v, c] : row.coeffs)
                if (v < 0 || v >= nvars) throw std::invalid_argument("ineq var out of range");
    }
};

enum class sdp_status { optimal, max_iterations, infeasible, numerical_failure };

inline const char* to_string(sdp_status s) {
    switch (s) {
        case sdp_status::optimal: return "optimal";
        case sdp_status::max_iterations: return "max_iterations";
        case sdp_status::infeasible: return "infeasible";
        default: return "numerical_failure";
    }
}

struct sdp_solution {
    sdp_status status = sdp_status::numerical_failure;
    std::vector<double> y;
    double objective_value = std::numeric_limits<double>::quiet_NaN();
    double dual_bound = std::numeric_limits<double>::quiet_NaN();
    double duality_gap = std::numeric_limits<double>::quiet_NaN();
    double feasibility_residual = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
};

struct sdp_params {
    double tol = 1e-9;
    int max_iters = 200;
    double step_frac_far = 0.9;    // fraction of max step while mu is large
    double step_frac_near = 0.98;  // ... and once mu is small
    double schur_reg = 1e-12;
    bool verbose = false;
};

struct feasibility_report {
    std::vector<double> block_min_eig;
    std::vector<double> ineq_slack;
    double objective = 0.0;
    double min_block_eig() const {
        double m = std::numeric_limits<double>::infinity();
        for (double v : block_min_eig) m = std::min(m, v);
        return m;
    }
    double min_ineq_slack() const {
        double m = std::numeric_limits<double>::infinity();
        for (double v : ineq_slack) m = std::min(m, v);
        return m;
    }
};

namespace detail {

// Internal block layout: the problem's dense blocks followed by one diagonal
// block holding the inequality slacks.  Internally we minimize c = -g.
struct sdp_work {
    using Mat = Eigen::MatrixXd;
    using Vec = Eigen::VectorXd;

    const block_sdp_problem& p;
    int n;                   // variables
    int nb;                  // dense blocks
    int diag_n = 0;          // inequality rows
    std::vector<int> sizes;
    Vec c;
    double datanorm = 1.0;
    int total_dim = 0;

    // per dense block: per-variable triplets, variable list
    std::vector<std::vector<std::vector<sdp_entry>>> bvar_entries;  // [block][local var]
    std::vector<std::vector<int>> bvars;                            // [block] -> var ids
    std::vector<Mat> f0d;                                           // dense F0 per block
    // diag block: per-row coefficients (var, coeff) for F rows, f0 value
    std::vector<std::vector<std::pair<int, double>>> drows;
    Vec dF0;
    std::vector<std::vector<std::pair<int, double>>> dvar_entries;  // var -> (row, coeff)

    explicit sdp_work(const block_sdp_problem& prob) : p(prob) {
        p.require_consistent();
        n = p.nvars;
        nb = static_cast<int>(p.block_sizes.size());
        diag_n = static_cast<int>(p.ineqs.size());
        sizes = p.block_sizes;
        for (int s : sizes) total_dim += s;
        total_dim += diag_n;
        if (total_dim == 0) throw std::invalid_argument("empty problem");

        c.resize(n);
        for (int v = 0; v < n; ++v) c[v] = -p.objective[static_cast<std::size_t>(v)];

        bvar_entries.resize(static_cast<std::size_t>(nb));
        bvars.resize(static_cast<std::size_t>(nb));
        std::vector<std::vector<int>> var_slot(static_cast<std::size_t>(nb),
                                               std::vector<int>(static_cast<std::size_t>(n), -1));
        for (int v = 0; v < n; ++v) {
            for (const auto& e : p.fvar[static_cast<std::size_t>(v)]) {
                auto& slot = var_slot[static_cast<std::size_t>(e.block)][static_cast<std::size_t>(v)];
                if (slot < 0) {
                    slot = static_cast<int>(bvars[static_cast<std::size_t>(e.block)].size());
                    bvars[static_cast<std::size_t>(e.block)].push_back(v);
                    bvar_entries[static_cast<std::size_t>(e.block)].emplace_back();
                }
                bvar_entries[static_cast<std::size_t>(e.block)][static_cast<std::size_t>(slot)].push_back(e);
            }
        }
        f0d.resize(static_cast<std::size_t>(nb));
        for (int b = 0; b < nb; ++b)
            f0d[static_cast<std::size_t>(b)] = Mat::Zero(sizes[static_cast<std::size_t>(b)],
                                                         sizes[static_cast<std::size_t>(b)]);
        for (const auto& e : p.f0) {
            f0d[static_cast<std::size_t>(e.block)](e.i, e.j) += e.val;
            if (e.i != e.j) f0d[static_cast<std::size_t>(e.block)](e.j, e.i) += e.val;
        }
        // inequalities a.y <= rhs as slack rows: rhs - a.y >= 0, i.e.
        // F row coefficient -a_v, F0 value -rhs.
        drows.resize(static_cast<std::size_t>(diag_n));
        dF0.resize(diag_n);
        dvar_entries.assign(static_cast<std::size_t>(n), {});
        for (int r = 0; r < diag_n; ++r) {
            const auto& row = p.ineqs[static_cast<std::size_t>(r)];
            dF0[r] = -row.rhs;
            for (const auto& [v, coef] : row.coeffs) {
                drows[static_cast<std::size_t>(r)].emplace_back(v, -coef);
                dvar_entries[static_cast<std::size_t>(v)].emplace_back(r, -coef);
            }
        }

        double mx = 1.0;
        for (double g : p.objective) mx = std::max(mx, std::abs(g));
        for (const auto& e : p.f0) mx = std::max(mx, std::abs(e.val));
        for (int r = 0; r < diag_n; ++r) mx = std::max(mx, std::abs(dF0[r]));
        datanorm = mx;
    }

};

}  // namespace detail

inline sdp_solution solve(const block_sdp_problem& prob, const sdp_params& params = {}) {
    using Mat = Eigen::MatrixXd;
    using Vec = Eigen::VectorXd;
    detail::sdp_work w(prob);
    const int n = w.n;
    const int nb = w.nb;

    const double xi = 10.0 * w.datanorm;
    Vec y = Vec::Zero(n);
    std::vector<Mat> X, Z;
    for (int b = 0; b < nb; ++b) {
        X.push_back(Mat::Identity(w.sizes[static_cast<std::size_t>(b)],
                                  w.sizes[static_cast<std::size_t>(b)]) * xi);
        Z.push_back(X.back());
    }
    Vec xd = Vec::Constant(w.diag_n, xi), zd = xd;

    sdp_solution best;
    best.status = sdp_status::max_iterations;
    best.y.assign(static_cast<std::size_t>(n), 0.0);

    auto mu_of = [&](const std::vector<Mat>& Xs, const Vec& xds, const std::vector<Mat>& Zs,
                     const Vec& zds) {
        double s = 0.0;
        for (int b = 0; b < nb; ++b)
            s += (Xs[static_cast<std::size_t>(b)].cwiseProduct(Zs[static_cast<std::size_t>(b)])).sum();
        s += xds.dot(zds);
        return s / w.total_dim;
    };

    Mat M(n, n);
    Vec rlin(n), rhs(n), dy(n), dy_a(n);
    std::vector<Mat> Rd(static_cast<std::size_t>(nb)), W(static_cast<std::size_t>(nb)),
        Zinv(static_cast<std::size_t>(nb)), WRdW(static_cast<std::size_t>(nb)),
        dZ(static_cast<std::size_t>(nb)), dX(static_cast<std::size_t>(nb)),
        dZ_a(static_cast<std::size_t>(nb)), dX_a(static_cast<std::size_t>(nb));
    Vec rdd(w.diag_n), wd(w.diag_n), zdinv(w.diag_n), dzd(w.diag_n), dxd(w.diag_n),
        dzd_a(w.diag_n), dxd_a(w.diag_n);

    for (int it = 0; it <= params.max_iters; ++it) {
        // residuals: Rd = sum y F - F0 - Z, rlin_v = c_v - <F_v, X>
        for (int b = 0; b < nb; ++b) {
            Mat& R = Rd[static_cast<std::size_t>(b)];
            R = -w.f0d[static_cast<std::size_t>(b)] - Z[static_cast<std::size_t>(b)];
            const auto& vars = w.bvars[static_cast<std::size_t>(b)];
            for (std::size_t q = 0; q < vars.size(); ++q) {
                double yv = y[vars[q]];
                if (yv == 0.0) continue;
                for (const auto& e : w.bvar_entries[static_cast<std::size_t>(b)][q]) {
                    R(e.i, e.j) += e.val * yv;
                    if (e.i != e.j) R(e.j, e.i) += e.val * yv;
                }
            }
        }
        for (int r = 0; r < w.diag_n; ++r) {
            double s = -w.dF0[r] - zd[r];
            for (const auto& [v, coef] : w.drows[static_cast<std::size_t>(r)]) s += coef * y[v];
            rdd[r] = s;
        }
        for (int v = 0; v < n; ++v) {
            double s = w.c[v];
            for (const auto& e : prob.fvar[static_cast<std::size_t>(v)])
                s -= e.val * X[static_cast<std::size_t>(e.block)](e.i, e.j) * (e.i == e.j ? 1.0 : 2.0);
            for (const auto& [r, coef] : w.dvar_entries[static_cast<std::size_t>(v)]) s -= coef * xd[r];
            rlin[v] = s;
        }

        double pobj = -w.c.dot(y);  // value of the max problem
        double dobj = 0.0;
        for (int b = 0; b < nb; ++b)
            dobj += (w.f0d[static_cast<std::size_t>(b)].cwiseProduct(X[static_cast<std::size_t>(b)])).sum();
        dobj += w.dF0.dot(xd);
        dobj = -dobj;  // upper bound of the max problem
        double mu = mu_of(X, xd, Z, zd);
        double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
        double nrd = 0.0;
        for (int b = 0; b < nb; ++b)
            nrd = std::max(nrd, Rd[static_cast<std::size_t>(b)].cwiseAbs().maxCoeff());
        if (w.diag_n) nrd = std::max(nrd, rdd.cwiseAbs().maxCoeff());
        nrd /= w.datanorm;
        double nrl = n ? rlin.cwiseAbs().maxCoeff() / w.datanorm : 0.0;

        if (params.verbose)
            std::fprintf(stderr, "it %3d p %+.10e d %+.10e mu %.2e gap %.2e rd %.2e rl %.2e\n",
                         it, pobj, dobj, mu, gap, nrd, nrl);

        best.y.assign(y.data(), y.data() + n);
        best.objective_value = pobj;
        best.dual_bound = dobj;
        best.duality_gap = gap;
        best.feasibility_residual = std::max(nrd, nrl);
        best.iterations = it;
        if (!std::isfinite(pobj) || !std::isfinite(mu)) {
            best.status = sdp_status::numerical_failure;
            return best;
        }
        if (gap < params.tol && nrd < params.tol && nrl < params.tol) {
            best.status = sdp_status::optimal;
            return best;
        }
        // a diverging dual iterate is the usual witness that no y is feasible
        if (!std::isfinite(dobj) || std::abs(dobj) > 1e12 * (1.0 + w.datanorm) ||
            std::abs(pobj) > 1e12 * (1.0 + w.datanorm)) {
            best.status = sdp_status::infeasible;
            return best;
        }
        if (it == params.max_iters) break;

        // NT scaling per block
        bool fail = false;
        for (int b = 0; b < nb && !fail; ++b) {
            const Mat& Zb = Z[static_cast<std::size_t>(b)];
            Eigen::LLT<Mat> llt(Zb);
            if (llt.info() != Eigen::Success) { fail = true; break; }
            Mat L = llt.matrixL();
            Mat Li = L.triangularView<Eigen::Lower>().solve(
                Mat::Identity(Zb.rows(), Zb.cols()));
            Mat LtXL = L.transpose() * X[static_cast<std::size_t>(b)] * L;
            LtXL = 0.5 * (LtXL + LtXL.transpose()).eval();
            Eigen::SelfAdjointEigenSolver<Mat> es(LtXL);
            if (es.info() != Eigen::Success) { fail = true; break; }
            Vec dsq = es.eigenvalues().cwiseMax(1e-300).cwiseSqrt();
            Mat UtLi = es.eigenvectors().transpose() * Li;
            W[static_cast<std::size_t>(b)] = UtLi.transpose() * dsq.asDiagonal() * UtLi;
            Zinv[static_cast<std::size_t>(b)] = Li.transpose() * Li;
        }
        if (fail) {
            best.status = sdp_status::numerical_failure;
            return best;
        }
        for (int r = 0; r < w.diag_n; ++r) {
            wd[r] = std::sqrt(xd[r] / zd[r]);
            zdinv[r] = 1.0 / zd[r];
        }

        // Schur complement M_uv = <F_u, W F_v W>
        M.setZero();
        for (int b = 0; b < nb; ++b) {
            const auto& vars = w.bvars[static_cast<std::size_t>(b)];
            const auto& ents = w.bvar_entries[static_cast<std::size_t>(b)];
            const Mat& Wb = W[static_cast<std::size_t>(b)];
            const int h = w.sizes[static_cast<std::size_t>(b)];
            const std::size_t nv = vars.size();
            Mat Fu = Mat::Zero(h, h), Gu;
            for (std::size_t uq = 0; uq < nv; ++uq) {
                for (const auto& e : ents[uq]) {
                    Fu(e.i, e.j) = e.val;
                    if (e.i != e.j) Fu(e.j, e.i) = e.val;
                }
                Gu.noalias() = Wb * Fu * Wb;
                for (const auto& e : ents[uq]) {  // reset for reuse
                    Fu(e.i, e.j) = 0.0;
                    if (e.i != e.j) Fu(e.j, e.i) = 0.0;
                }
                for (std::size_t vq = 0; vq <= uq; ++vq) {
                    double s = 0.0;
                    for (const auto& e : ents[vq])
                        s += e.val * Gu(e.i, e.j) * (e.i == e.j ? 1.0 : 2.0);
                    M(vars[uq], vars[vq]) += s;
                    if (uq != vq) M(vars[vq], vars[uq]) += s;
                }
            }
        }
        for (int r = 0; r < w.diag_n; ++r) {
            double w2 = wd[r] * wd[r];
            const auto& row = w.drows[static_cast<std::size_t>(r)];
            for (const auto& [u, cu] : row)
                for (const auto& [v, cv] : row) M(u, v) += cu * cv * w2;
        }
        for (int v = 0; v < n; ++v) M(v, v) += params.schur_reg * (1.0 + std::abs(M(v, v)));

        Eigen::LLT<Eigen::Ref<Mat>> lltM(M);  // in-place
        if (lltM.info() != Eigen::Success) {
            best.status = sdp_status::numerical_failure;
            return best;
        }

        // W Rd W per dense block, used by both solves
        for (int b = 0; b < nb; ++b)
            WRdW[static_cast<std::size_t>(b)] =
                W[static_cast<std::size_t>(b)] * Rd[static_cast<std::size_t>(b)] * W[static_cast<std::size_t>(b)];

        auto newton = [&](double sigma_mu, Vec& dy_out, std::vector<Mat>& dZ_out, Vec& dzd_out,
                          std::vector<Mat>& dX_out, Vec& dxd_out) {
            for (int u = 0; u < n; ++u) {
                double s = -w.c[u];
                for (const auto& e : prob.fvar[static_cast<std::size_t>(u)]) {
                    double weight = (e.i == e.j ? 1.0 : 2.0) * e.val;
                    s += weight * (sigma_mu * Zinv[static_cast<std::size_t>(e.block)](e.i, e.j) -
                                   WRdW[static_cast<std::size_t>(e.block)](e.i, e.j));
                }
                rhs[u] = s;
            }
            for (int r = 0; r < w.diag_n; ++r) {
                double add = sigma_mu * zdinv[r] - wd[r] * wd[r] * rdd[r];
                for (const auto& [v, coef] : w.drows[static_cast<std::size_t>(r)])
                    rhs[v] += coef * add;
            }
            dy_out = rhs;
            lltM.solveInPlace(dy_out);
            for (int b = 0; b < nb; ++b) {
                Mat& D = dZ_out[static_cast<std::size_t>(b)];
                D = Rd[static_cast<std::size_t>(b)];
                const auto& vars = w.bvars[static_cast<std::size_t>(b)];
                const auto& ents = w.bvar_entries[static_cast<std::size_t>(b)];
                for (std::size_t q = 0; q < vars.size(); ++q) {
                    double dv = dy_out[vars[q]];
                    if (dv == 0.0) continue;
                    for (const auto& e : ents[q]) {
                        D(e.i, e.j) += e.val * dv;
                        if (e.i != e.j) D(e.j, e.i) += e.val * dv;
                    }
                }
                dX_out[static_cast<std::size_t>(b)] =
                    sigma_mu * Zinv[static_cast<std::size_t>(b)] - X[static_cast<std::size_t>(b)] -
                    W[static_cast<std::size_t>(b)] * D * W[static_cast<std::size_t>(b)];
                dX_out[static_cast<std::size_t>(b)] =
                    0.5 * (dX_out[static_cast<std::size_t>(b)] +
                           dX_out[static_cast<std::size_t>(b)].transpose()).eval();
            }
            for (int r = 0; r < w.diag_n; ++r) {
                double s = rdd[r];
                for (const auto& [v, coef] : w.drows[static_cast<std::size_t>(r)])
                    s += coef * dy_out[v];
                dzd_out[r] = s;
                dxd_out[r] = sigma_mu * zdinv[r] - xd[r] - wd[r] * wd[r] * s;
            }
        };

        auto steplen = [&](const std::vector<Mat>& base, const Vec& based,
                           const std::vector<Mat>& dir, const Vec& dird) {
            double a = std::numeric_limits<double>::infinity();
            for (int b = 0; b < nb; ++b) {
                const Mat& Bb = base[static_cast<std::size_t>(b)];
                Eigen::LLT<Mat> llt(Bb);
                if (llt.info() != Eigen::Success) return 0.0;
                Mat L = llt.matrixL();
                Mat K = L.triangularView<Eigen::Lower>().solve(dir[static_cast<std::size_t>(b)]);
                K = L.triangularView<Eigen::Lower>().solve(K.transpose()).eval();
                K = 0.5 * (K + K.transpose()).eval();
                Eigen::SelfAdjointEigenSolver<Mat> es(K, Eigen::EigenvaluesOnly);
                double lmin = es.eigenvalues().minCoeff();
                if (lmin < 0) a = std::min(a, -1.0 / lmin);
            }
            for (int r = 0; r < w.diag_n; ++r) {
                if (dird[r] < 0) a = std::min(a, -based[r] / dird[r]);
            }
            return a;
        };

        // predictor (sigma = 0)
        newton(0.0, dy_a, dZ_a, dzd_a, dX_a, dxd_a);
        double ap = std::min(1.0, 0.99 * steplen(Z, zd, dZ_a, dzd_a));
        double ad = std::min(1.0, 0.99 * steplen(X, xd, dX_a, dxd_a));
        double mu_aff;
        {
            double s = 0.0;
            for (int b = 0; b < nb; ++b)
                s += ((X[static_cast<std::size_t>(b)] + ad * dX_a[static_cast<std::size_t>(b)])
                          .cwiseProduct(Z[static_cast<std::size_t>(b)] + ap * dZ_a[static_cast<std::size_t>(b)]))
                         .sum();
            for (int r = 0; r < w.diag_n; ++r)
                s += (xd[r] + ad * dxd_a[r]) * (zd[r] + ap * dzd_a[r]);
            mu_aff = s / w.total_dim;
        }
        double sigma = std::min(1.0, std::max(1e-8, std::pow(mu_aff / mu, 3)));

        // corrector
        newton(sigma * mu, dy, dZ, dzd, dX, dxd);
        double tau = mu > 1e-4 ? params.step_frac_far : params.step_frac_near;
        ap = std::min(1.0, tau * steplen(Z, zd, dZ, dzd));
        ad = std::min(1.0, tau * steplen(X, xd, dX, dxd));
        y += ap * dy;
        for (int b = 0; b < nb; ++b) {
            Z[static_cast<std::size_t>(b)] += ap * dZ[static_cast<std::size_t>(b)];
            X[static_cast<std::size_t>(b)] += ad * dX[static_cast<std::size_t>(b)];
        }
        zd += ap * dzd;
        xd += ad * dxd;
    }
    return best;
}

inline sdp_solution solve(const block_sdp_problem& prob, double tol) {
    sdp_params params;
    params.tol = tol;
    return solve(prob, params);
}

// Feasibility of a given y: per-block minimum eigenvalue of sum y F - F0,
// per-inequality slack rhs - a.y, and the objective value.
inline feasibility_report residuals(const block_sdp_problem& prob, const std::vector<double>& y) {
    if (static_cast<int>(y.size()) != prob.nvars) throw std::invalid_argument("bad y size");
    feasibility_report rep;
    std::vector<Eigen::MatrixXd> S;
    for (int sz : prob.block_sizes) S.emplace_back(Eigen::MatrixXd::Zero(sz, sz));
    for (const auto& e : prob.f0) {
        S[static_cast<std::size_t>(e.block)](e.i, e.j) -= e.val;
        if (e.i != e.j) S[static_cast<std::size_t>(e.block)](e.j, e.i) -= e.val;
    }
    for (int v = 0; v < prob.nvars; ++v) {
        for (const auto& e : prob.fvar[static_cast<std::size_t>(v)]) {
            S[static_cast<std::size_t>(e.block)](e.i, e.j) += e.val * y[static_cast<std::size_t>(v)];
            if (e.i != e.j)
                S[static_cast<std::size_t>(e.block)](e.j, e.i) += e.val * y[static_cast<std::size_t>(v)];
        }
    }
    for (const auto& Sb : S) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Sb, Eigen::EigenvaluesOnly);
        rep.block_min_eig.push_back(Sb.rows() ? es.eigenvalues().minCoeff() : 0.0);
    }
    for (const auto& row : prob.ineqs) {
        double s = row.rhs;
        for (const auto& [v, coef] : row.coeffs) s -= coef * y[static_cast<std::size_t>(v)];
        rep.ineq_slack.push_back(s);
    }
    for (int v = 0; v < prob.nvars; ++v)
        rep.objective += prob.objective[static_cast<std::size_t>(v)] * y[static_cast<std::size_t>(v)];
    return rep;
}

}  // namespace crossbound

#endif
