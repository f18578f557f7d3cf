#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ssc/errors.hpp"
#include "ssc/linalg.hpp"
#include "ssc/parallel.hpp"

namespace ssc {

struct SolverSettings {
    // Meaning of lambda depends on the estimator: squared-residual bound for
    // the constrained form, penalty weight for the lasso forms.
    double lambda = 0.01;
    int max_iter = 50000;
    double tol_primal = 1e-10;
    double tol_dual = 1e-10;
    double support_eps = 1e-5;  // relative to max |c|
    // Greedy-estimator knobs (ignored by the convex solvers).
    int omp_max_atoms = 0;  // 0 = min(ambient_dim, n_columns)
    double omp_residual_tol = 1e-6;

    void validate() const {
        if (lambda < 0) throw PreconditionError("SolverSettings: lambda must be >= 0");
        if (max_iter <= 0) throw PreconditionError("SolverSettings: max_iter must be > 0");
        if (tol_primal <= 0 || tol_dual <= 0 || support_eps <= 0)
            throw PreconditionError("SolverSettings: tolerances must be > 0");
    }
};

/// One coded point: coefficients over the dictionary columns plus solver
/// diagnostics. When produced by code_pointcloud the vector has full length N
/// and entry self_index is exactly zero.
struct SparseSolution {
    VectorXd coefficients;
    std::vector<int> support;
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    double objective = 0.0;
    std::optional<int> self_index;

    double l1_norm() const { return coefficients.lpNorm<1>(); }
};

struct ColumnWarning {
    int column;
    std::string message;
};

/// N x N self-expressive coding matrix; column j codes point j and has a
/// zero diagonal entry by construction.
struct CoefficientMatrix {
    MatrixXd C;
    std::vector<ColumnWarning> warnings;
};

enum class Estimator { bp, bpdn, lasso, omp };
enum class PenaltyForm { unsquared, squared };

namespace detail {

inline std::vector<int> support_of(const VectorXd& c, double support_eps) {
    std::vector<int> s;
    const double cutoff = support_eps * c.cwiseAbs().maxCoeff();
    if (cutoff == 0.0) return s;
    for (Eigen::Index i = 0; i < c.size(); ++i)
        if (std::abs(c(i)) > cutoff) s.push_back(static_cast<int>(i));
    return s;
}

inline VectorXd soft_threshold(const VectorXd& x, double k) {
    return x.unaryExpr([k](double v) {
        const double m = std::abs(v) - k;
        return m > 0 ? (v > 0 ? m : -m) : 0.0;
    });
}

inline MatrixXd submatrix(const MatrixXd& a, const std::vector<int>& cols) {
    MatrixXd s(a.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) s.col(static_cast<Eigen::Index>(i)) = a.col(cols[i]);
    return s;
}

// Spectral view of a dictionary A through M = A A^T. All per-iteration
// subproblems below (affine projection, residual-ball projection, prox of
// the unsquared data term) reduce to one scalar monotone equation in the
// eigenbasis of M, so each costs O(m n) regardless of iteration count.
class GramSpectrum {
public:
    GramSpectrum(const MatrixXd& a, const VectorXd& y) : a_(a), y_(y) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(a * a.transpose());
        u_ = eig.eigenvectors();
        lam_ = eig.eigenvalues().cwiseMax(0.0);
        const double lam_max = lam_.size() ? lam_.maxCoeff() : 0.0;
        eig_tol_ = lam_max * 1e-13;
        const VectorXd yt = u_.transpose() * y;
        double reachable = 0.0;
        for (Eigen::Index i = 0; i < lam_.size(); ++i)
            if (lam_(i) > eig_tol_) reachable += yt(i) * yt(i);
        min_residual_sq_ = std::max(0.0, y.squaredNorm() - reachable);
    }

    double min_residual_sq() const { return min_residual_sq_; }

    /// Minimum-norm correction of w onto {c : Ac = P_range y}.
    VectorXd project_affine(const VectorXd& w) const {
        const VectorXd w0 = a_ * w - y_;
        const VectorXd wt = u_.transpose() * w0;
        VectorXd q = VectorXd::Zero(lam_.size());
        for (Eigen::Index i = 0; i < lam_.size(); ++i)
            if (lam_(i) > eig_tol_) q(i) = wt(i) / lam_(i);
        return w - a_.transpose() * (u_ * q);
    }

    /// Euclidean projection of w onto {c : ||Ac - y||^2 <= bound_sq}.
    /// The feasible set must be nonempty (caller checks min_residual_sq).
    VectorXd project_residual_ball(const VectorXd& w, double bound_sq) const {
        const VectorXd w0 = a_ * w - y_;
        if (w0.squaredNorm() <= bound_sq) return w;
        if (bound_sq <= min_residual_sq_ + 1e-30) return project_affine(w);
        const VectorXd wt = u_.transpose() * w0;
        double tail = w0.squaredNorm();
        for (Eigen::Index i = 0; i < lam_.size(); ++i)
            if (lam_(i) > eig_tol_) tail -= wt(i) * wt(i);
        tail = std::max(tail, 0.0);
        const auto resid_sq = [&](double mu) {
            double s = tail;
            for (Eigen::Index i = 0; i < lam_.size(); ++i)
                if (lam_(i) > eig_tol_) {
                    const double f = wt(i) / (1.0 + mu * lam_(i));
                    s += f * f;
                }
            return s;
        };
        double lo = 0.0, hi = 1.0;
        while (resid_sq(hi) > bound_sq) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e18) break;
        }
        for (int it = 0; it < 90; ++it) {
            const double mid = 0.5 * (lo + hi);
            (resid_sq(mid) > bound_sq ? lo : hi) = mid;
        }
        const double mu = 0.5 * (lo + hi);
        VectorXd shrink = wt;
        for (Eigen::Index i = 0; i < lam_.size(); ++i)
            shrink(i) = lam_(i) > eig_tol_ ? wt(i) * (mu * lam_(i)) / (1.0 + mu * lam_(i)) : 0.0;
        const VectorXd r = w0 - u_ * shrink;
        return w - mu * (a_.transpose() * r);
    }

    /// argmin_c weight * ||Ac - y||_2 + 0.5 * ||c - v||^2.
    VectorXd prox_unsquared(const VectorXd& v, double weight) const {
        const VectorXd w0 = a_ * v - y_;
        const double w0_norm = w0.norm();
        if (w0_norm < 1e-15) return v;
        const VectorXd wt = u_.transpose() * w0;
        double tail = w0.squaredNorm();
        for (Eigen::Index i = 0; i < lam_.size(); ++i)
            if (lam_(i) > eig_tol_) tail -= wt(i) * wt(i);
        tail = std::max(tail, 0.0);
        // As t grows, t*||r(t)|| approaches sup_g below when the fit can be
        // made exact; beyond that weight the prox lands on the exact fit.
        if (tail < 1e-28) {
            double sup_sq = 0.0;
            for (Eigen::Index i = 0; i < lam_.size(); ++i)
                if (lam_(i) > eig_tol_) {
                    const double f = wt(i) / lam_(i);
                    sup_sq += f * f;
                }
            if (weight * weight >= sup_sq) return project_affine(v);
        }
        const auto t_times_resid = [&](double t) {
            double s = tail;
            for (Eigen::Index i = 0; i < lam_.size(); ++i)
                if (lam_(i) > eig_tol_) {
                    const double f = wt(i) / (1.0 + t * lam_(i));
                    s += f * f;
                }
            return t * std::sqrt(s);
        };
        double lo = 0.0, hi = 1.0;
        while (t_times_resid(hi) < weight) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e18) break;
        }
        for (int it = 0; it < 90; ++it) {
            const double mid = 0.5 * (lo + hi);
            (t_times_resid(mid) < weight ? lo : hi) = mid;
        }
        const double t = 0.5 * (lo + hi);
        VectorXd shrink = wt;
        for (Eigen::Index i = 0; i < lam_.size(); ++i)
            shrink(i) = lam_(i) > eig_tol_ ? wt(i) * (t * lam_(i)) / (1.0 + t * lam_(i)) : 0.0;
        const VectorXd r = w0 - u_ * shrink;
        return v - t * (a_.transpose() * r);
    }

    double lambda_max() const { return lam_.size() ? lam_.maxCoeff() : 0.0; }

private:
    const MatrixXd& a_;
    const VectorXd& y_;
    MatrixXd u_;
    VectorXd lam_;
    double eig_tol_ = 0.0;
    double min_residual_sq_ = 0.0;
};

// Scaled ADMM on min ||c||_1 + g(z) s.t. c = z, where evaluating the prox of
// g is the supplied projection/prox step. Residual balancing keeps the two
// convergence rates comparable.
inline SparseSolution admm_l1(const MatrixXd& a, const VectorXd& y,
                              const std::function<VectorXd(const VectorXd&, double rho)>& prox_g,
                              const SolverSettings& settings) {
    const Eigen::Index n = a.cols();
    VectorXd c = VectorXd::Zero(n), z = VectorXd::Zero(n), u = VectorXd::Zero(n);
    double rho = 1.0;
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    SparseSolution sol;
    int iter = 0;
    for (iter = 1; iter <= settings.max_iter; ++iter) {
        c = soft_threshold(z - u, 1.0 / rho);
        const VectorXd z_prev = z;
        z = prox_g(c + u, rho);
        u += c - z;
        const double r_primal = (c - z).norm();
        const double r_dual = rho * (z - z_prev).norm();
        const double eps_primal =
            sqrt_n * 1e-14 + settings.tol_primal * std::max(c.norm(), z.norm());
        const double eps_dual = sqrt_n * 1e-14 + settings.tol_dual * rho * u.norm();
        if (r_primal <= eps_primal && r_dual <= eps_dual) {
            sol.converged = true;
            break;
        }
        if (iter % 10 == 0) {
            if (r_primal > 10.0 * r_dual && rho < 1e8) {
                rho *= 2.0;
                u *= 0.5;
            } else if (r_dual > 10.0 * r_primal && rho > 1e-8) {
                rho *= 0.5;
                u *= 2.0;
            }
        }
    }
    sol.iterations = std::min(iter, settings.max_iter);
    sol.coefficients = z;  // feasible side of the split
    sol.support = support_of(z, settings.support_eps);
    sol.residual_norm = (a * z - y).norm();
    return sol;
}

}  // namespace detail

/// Minimum-l1 exact representation: min ||c||_1 s.t. A c = y (within
/// tol_primal). The converged iterate is polished by an exact least-squares
/// refit on its support, which preserves feasibility and never increases the
/// l1 norm beyond solver tolerance.
inline SparseSolution solve_bp_noiseless(const MatrixXd& a, const VectorXd& y,
                                         const SolverSettings& settings = {}) {
    settings.validate();
    if (a.rows() != y.size()) throw DimensionError("solve_bp_noiseless: row mismatch");
    detail::GramSpectrum spec(a, y);
    const double feas_tol = std::max(1e-8, settings.tol_primal);
    const double best = std::sqrt(spec.min_residual_sq());
    if (best > feas_tol)
        throw InfeasibleError("solve_bp_noiseless: y is not in the span of the dictionary "
                              "(best achievable residual " + std::to_string(best) + ")",
                              best);
    SparseSolution sol = detail::admm_l1(
        a, y, [&](const VectorXd& w, double) { return spec.project_affine(w); }, settings);
    // Support polish: exact solve on the detected support.
    if (!sol.support.empty()) {
        const MatrixXd as = detail::submatrix(a, sol.support);
        const VectorXd cs = as.completeOrthogonalDecomposition().solve(y);
        const double resid = (as * cs - y).norm();
        double l1 = 0.0;
        for (Eigen::Index i = 0; i < cs.size(); ++i) l1 += std::abs(cs(i));
        if (resid <= feas_tol && l1 <= sol.coefficients.lpNorm<1>() + 1e-9) {
            sol.coefficients.setZero();
            for (std::size_t i = 0; i < sol.support.size(); ++i)
                sol.coefficients(sol.support[i]) = cs(static_cast<Eigen::Index>(i));
            sol.residual_norm = resid;
        }
    }
    sol.objective = sol.coefficients.lpNorm<1>();
    return sol;
}

/// Noise-tolerant l1 minimization: min ||c||_1 s.t. ||A c - y||^2 <= lambda.
/// lambda is the literal squared-residual bound.
inline SparseSolution solve_bpdn(const MatrixXd& a, const VectorXd& y,
                                 const SolverSettings& settings) {
    settings.validate();
    if (settings.lambda <= 0) throw PreconditionError("solve_bpdn: lambda must be > 0");
    if (a.rows() != y.size()) throw DimensionError("solve_bpdn: row mismatch");
    detail::GramSpectrum spec(a, y);
    if (spec.min_residual_sq() > settings.lambda) {
        const double best = std::sqrt(spec.min_residual_sq());
        throw InfeasibleError("solve_bpdn: residual bound unreachable (best residual^2 " +
                              std::to_string(spec.min_residual_sq()) + ")", best);
    }
    SparseSolution sol = detail::admm_l1(
        a, y,
        [&](const VectorXd& w, double) { return spec.project_residual_ball(w, settings.lambda); },
        settings);
    sol.objective = sol.coefficients.lpNorm<1>();
    return sol;
}

/// Lasso in the unsquared form min ||c||_1 + lambda ||Ac - y||_2 (default)
/// or the squared form min ||c||_1 + lambda ||Ac - y||_2^2. The unsquared
/// form runs ADMM with an exact data-term prox; the squared form runs FISTA
/// with backtracking and certifies optimality through the subgradient bound
/// ||A^T (y - Ac)||_inf <= 1/(2 lambda).
inline SparseSolution solve_lasso(const MatrixXd& a, const VectorXd& y,
                                  const SolverSettings& settings,
                                  PenaltyForm form = PenaltyForm::unsquared) {
    settings.validate();
    if (settings.lambda <= 0) throw PreconditionError("solve_lasso: lambda must be > 0");
    if (a.rows() != y.size()) throw DimensionError("solve_lasso: row mismatch");
    detail::GramSpectrum spec(a, y);

    if (form == PenaltyForm::unsquared) {
        SparseSolution sol = detail::admm_l1(
            a, y,
            [&](const VectorXd& w, double rho) {
                return spec.prox_unsquared(w, settings.lambda / rho);
            },
            settings);
        // The l1 side of the split carries the exact sparsity pattern.
        sol.objective = sol.coefficients.lpNorm<1>() + settings.lambda * sol.residual_norm;
        return sol;
    }

    // FISTA on f(c) = lambda ||Ac - y||^2 with g = ||.||_1.
    const Eigen::Index n = a.cols();
    VectorXd c = VectorXd::Zero(n), prev = c, momentum = c;
    double step_l = std::max(2.0 * settings.lambda * spec.lambda_max() * 0.1, 1e-12);
    double t_k = 1.0;
    SparseSolution sol;
    int iter = 0;
    for (iter = 1; iter <= settings.max_iter; ++iter) {
        const VectorXd r = a * momentum - y;
        const double f_m = settings.lambda * r.squaredNorm();
        const VectorXd grad = 2.0 * settings.lambda * (a.transpose() * r);
        VectorXd c_new;
        for (;;) {
            c_new = detail::soft_threshold(momentum - grad / step_l, 1.0 / step_l);
            const VectorXd d = c_new - momentum;
            const double f_new = settings.lambda * (a * c_new - y).squaredNorm();
            if (f_new <= f_m + grad.dot(d) + 0.5 * step_l * d.squaredNorm() + 1e-16) break;
            step_l *= 2.0;
        }
        prev = c;
        c = c_new;
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_k * t_k));
        momentum = c + ((t_k - 1.0) / t_next) * (c - prev);
        t_k = t_next;
        // Subgradient certificate.
        const VectorXd corr = a.transpose() * (y - a * c);
        double viol = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double two_lam_corr = 2.0 * settings.lambda * corr(i);
            if (c(i) != 0.0)
                viol = std::max(viol, std::abs(two_lam_corr - (c(i) > 0 ? 1.0 : -1.0)));
            else
                viol = std::max(viol, std::max(0.0, std::abs(two_lam_corr) - 1.0));
        }
        if (viol <= std::max(settings.tol_dual, 1e-12) &&
            (c - prev).norm() <= settings.tol_primal * std::max(1.0, c.norm())) {
            sol.converged = true;
            break;
        }
    }
    sol.iterations = std::min(iter, settings.max_iter);
    sol.coefficients = c;
    sol.support = detail::support_of(c, settings.support_eps);
    sol.residual_norm = (a * c - y).norm();
    sol.objective = c.lpNorm<1>() + settings.lambda * sol.residual_norm * sol.residual_norm;
    return sol;
}

/// Orthogonal matching pursuit: greedy support growth by residual
/// correlation with a full least-squares refit each step. Ties pick the
/// lowest column index.
inline SparseSolution solve_omp(const MatrixXd& a, const VectorXd& y, int k_max,
                                double residual_tol) {
    if (a.rows() != y.size()) throw DimensionError("solve_omp: row mismatch");
    if (k_max > a.cols()) throw PreconditionError("solve_omp: k_max exceeds column count");
    const Eigen::Index n = a.cols();
    SparseSolution sol;
    sol.coefficients = VectorXd::Zero(n);
    VectorXd r = y;
    std::vector<int> chosen;
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    VectorXd cs;
    while (static_cast<int>(chosen.size()) < k_max && r.norm() > residual_tol) {
        const VectorXd corr = a.transpose() * r;
        int best = -1;
        double best_abs = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (used[static_cast<std::size_t>(i)]) continue;
            const double v = std::abs(corr(i));
            if (v > best_abs) {
                best_abs = v;
                best = static_cast<int>(i);
            }
        }
        if (best < 0 || best_abs < 1e-14) break;
        used[static_cast<std::size_t>(best)] = 1;
        chosen.push_back(best);
        const MatrixXd as = detail::submatrix(a, chosen);
        cs = as.completeOrthogonalDecomposition().solve(y);
        r = y - as * cs;
    }
    for (std::size_t i = 0; i < chosen.size(); ++i)
        sol.coefficients(chosen[i]) = cs(static_cast<Eigen::Index>(i));
    sol.support = chosen;
    std::sort(sol.support.begin(), sol.support.end());
    sol.residual_norm = r.norm();
    sol.iterations = static_cast<int>(chosen.size());
    sol.converged = sol.residual_norm <= residual_tol;
    sol.objective = sol.coefficients.lpNorm<1>();
    return sol;
}

namespace detail {

/// Dictionary for point j: all columns of X except j. Solver-space index k
/// maps back to k for k < j and k + 1 otherwise.
inline MatrixXd drop_column(const MatrixXd& x, Eigen::Index j) {
    MatrixXd a(x.rows(), x.cols() - 1);
    if (j > 0) a.leftCols(j) = x.leftCols(j);
    if (j + 1 < x.cols()) a.rightCols(x.cols() - 1 - j) = x.rightCols(x.cols() - 1 - j);
    return a;
}

inline SparseSolution reindex_with_self(const SparseSolution& raw, Eigen::Index n,
                                        Eigen::Index self) {
    SparseSolution out = raw;
    out.coefficients = VectorXd::Zero(n);
    for (Eigen::Index k = 0; k < raw.coefficients.size(); ++k)
        out.coefficients(k < self ? k : k + 1) = raw.coefficients(k);
    out.support.clear();
    for (int k : raw.support) out.support.push_back(k < self ? k : k + 1);
    out.self_index = static_cast<int>(self);
    return out;
}

}  // namespace detail

/// Code every point of X against all the others with the chosen estimator.
/// Per-column failures produce a zero column and a warning record; the batch
/// never aborts. Columns are solved in parallel and written to disjoint
/// output columns, so the result is scheduling-independent.
inline CoefficientMatrix code_pointcloud(const PointCloud& x, Estimator estimator,
                                         const SolverSettings& settings,
                                         int workers = default_workers()) {
    const Eigen::Index n = x.count();
    if (n < 2) throw PreconditionError("code_pointcloud: need at least two points");
    CoefficientMatrix cm;
    cm.C = MatrixXd::Zero(n, n);
    std::vector<std::optional<ColumnWarning>> warn(static_cast<std::size_t>(n));
    parallel_for(
        static_cast<std::size_t>(n),
        [&](std::size_t sj) {
            const auto j = static_cast<Eigen::Index>(sj);
            const MatrixXd a = detail::drop_column(x.data, j);
            const VectorXd y = x.data.col(j);
            try {
                SparseSolution raw;
                switch (estimator) {
                    case Estimator::bp: raw = solve_bp_noiseless(a, y, settings); break;
                    case Estimator::bpdn: raw = solve_bpdn(a, y, settings); break;
                    case Estimator::lasso: raw = solve_lasso(a, y, settings); break;
                    case Estimator::omp: {
                        const int k_max = settings.omp_max_atoms > 0
                                              ? std::min<int>(settings.omp_max_atoms,
                                                              static_cast<int>(n) - 1)
                                              : static_cast<int>(std::min(a.rows(), a.cols()));
                        raw = solve_omp(a, y, k_max, settings.omp_residual_tol);
                        break;
                    }
                }
                const SparseSolution full = detail::reindex_with_self(raw, n, j);
                cm.C.col(j) = full.coefficients;
            } catch (const std::exception& e) {
                warn[sj] = ColumnWarning{static_cast<int>(j), e.what()};
            }
        },
        workers);
    for (auto& w : warn)
        if (w) cm.warnings.push_back(*w);
    return cm;
}

}  // namespace ssc
