#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ssc/errors.hpp"
#include "ssc/linalg.hpp"
#include "ssc/rng.hpp"
#include "ssc/solvers.hpp"

namespace ssc {

/// Result of an exhaustive minimum-l1 search, optionally compared against a
/// solver value.
struct OracleReport {
    std::string instance;
    double oracle_value = std::numeric_limits<double>::infinity();
    std::vector<int> oracle_support;
    double solver_value = std::numeric_limits<double>::quiet_NaN();
    double gap = std::numeric_limits<double>::quiet_NaN();
    bool feasible_found = false;
    double min_feasible_conditioning = std::numeric_limits<double>::infinity();
};

namespace detail {

inline std::size_t enumeration_budget(std::size_t n, int max_support) {
    std::size_t total = 0;
    double binom = 1.0;
    for (int k = 1; k <= max_support; ++k) {
        binom = binom * static_cast<double>(n - static_cast<std::size_t>(k) + 1) /
                static_cast<double>(k);
        if (binom > 1e15) return static_cast<std::size_t>(1e15);
        total += static_cast<std::size_t>(binom);
    }
    return total;
}

template <typename Visit>
void for_each_combination(int n, int k, Visit&& visit) {
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (;;) {
        visit(idx);
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) return;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

}  // namespace detail

/// Enumerate every support of size 1..max_support, solve each exactly by
/// least squares, accept supports whose residual is at most exact_tol, and
/// return the feasible support of minimal l1 coefficient norm. Supports are
/// visited in size-then-lexicographic order; ties keep the first hit.
inline OracleReport brute_force_min_l1(const MatrixXd& a, const VectorXd& y, int max_support,
                                       double exact_tol = 1e-8) {
    const int n = static_cast<int>(a.cols());
    if (max_support < 1 || max_support > n)
        throw PreconditionError("brute_force_min_l1: max_support out of range");
    if (detail::enumeration_budget(static_cast<std::size_t>(n), max_support) > 1000000)
        throw BudgetExceededError("brute_force_min_l1: more than 1e6 candidate supports");
    OracleReport rep;
    rep.instance = "n=" + std::to_string(n) + " max_support=" + std::to_string(max_support);
    for (int k = 1; k <= max_support; ++k) {
        detail::for_each_combination(n, k, [&](const std::vector<int>& idx) {
            const MatrixXd as = detail::submatrix(a, idx);
            Eigen::JacobiSVD<MatrixXd> svd(as, Eigen::ComputeThinU | Eigen::ComputeThinV);
            const VectorXd cs = svd.solve(y);
            if ((as * cs - y).norm() > exact_tol) return;
            const double sv_max = svd.singularValues()(0);
            const double sv_min = svd.singularValues()(svd.singularValues().size() - 1);
            if (sv_max > 0)
                rep.min_feasible_conditioning =
                    std::min(rep.min_feasible_conditioning, sv_min / sv_max);
            const double l1 = cs.lpNorm<1>();
            if (l1 < rep.oracle_value) {
                rep.oracle_value = l1;
                rep.oracle_support = idx;
                rep.feasible_found = true;
            }
        });
    }
    return rep;
}

inline OracleReport compare_with_solver(OracleReport rep, double solver_l1) {
    rep.solver_value = solver_l1;
    rep.gap = solver_l1 - rep.oracle_value;
    return rep;
}

/// Fixed-geometry family for the angle-monotonicity checks. The dictionary
/// holds one moving point x(theta) on the geodesic from y toward the part of
/// y that the d-1 fixed orthonormal support points q_i cannot reach, plus
/// the q_i themselves. Within [theta_min, theta_max] the moving point is the
/// farthest support member and the exact-solve l1 norm is nondecreasing in
/// theta.
class AngleFamily {
public:
    AngleFamily(int ambient_dim, int subspace_dim, double eta, std::uint64_t seed)
        : eta_(eta) {
        if (subspace_dim < 2 || subspace_dim > ambient_dim)
            throw PreconditionError("AngleFamily: need 2 <= subspace_dim <= ambient_dim");
        if (eta <= 0.05 || eta >= 0.95)
            throw PreconditionError("AngleFamily: eta must lie in (0.05, 0.95)");
        const int d = subspace_dim;
        Rng rng(seed);
        // Coordinates inside the subspace: q_i = e_i (i < d-1), and
        // y = sqrt(1-eta^2) w + eta e_{d-1} with w a positive unit vector in
        // span(q_i). Then (I - P_Q) y = eta e_{d-1}.
        VectorXd w(d - 1);
        for (;;) {
            for (int i = 0; i < d - 1; ++i) w(i) = 0.25 + rng.uniform();
            w.normalize();
            if (w.minCoeff() >= 0.25) break;
        }
        VectorXd y_c = VectorXd::Zero(d);
        y_c.head(d - 1) = std::sqrt(1.0 - eta * eta) * w;
        y_c(d - 1) = eta;
        // u: unit, orthogonal to y, inside span(y, e_{d-1}).
        VectorXd u_c = VectorXd::Zero(d);
        u_c(d - 1) = std::sqrt(1.0 - eta * eta);
        u_c.head(d - 1) = -eta * w;
        const SubspaceBasis embed = random_orthonormal_basis(ambient_dim, d, rng.engine()());
        y_ = embed.basis * y_c;
        u_ = embed.basis * u_c;
        q_ = embed.basis.leftCols(d - 1);
        double max_q_angle = 0.0;
        for (int i = 0; i < d - 1; ++i)
            max_q_angle = std::max(max_q_angle, angle(y_, q_.col(i)));
        const double phi = std::asin(eta);
        theta_min_ = max_q_angle + 2.0 * M_PI / 180.0;
        theta_max_ = std::min(160.0 * M_PI / 180.0, M_PI - phi - 5.0 * M_PI / 180.0);
        if (theta_min_ >= theta_max_)
            throw DegenerateInputError("AngleFamily: empty monotone angle range");
    }

    VectorXd moving_point(double theta) const {
        return std::cos(theta) * y_ + std::sin(theta) * u_;
    }

    /// Columns: [x(theta), q_1, ..., q_{d-1}].
    MatrixXd dictionary(double theta) const {
        MatrixXd dict(y_.size(), q_.cols() + 1);
        dict.col(0) = moving_point(theta);
        dict.rightCols(q_.cols()) = q_;
        return dict;
    }

    const VectorXd& y() const { return y_; }
    double theta_min() const { return theta_min_; }
    double theta_max() const { return theta_max_; }
    double eta() const { return eta_; }

    /// l1 norm of the unique exact representation on the full support.
    double exact_l1(double theta) const {
        const MatrixXd dict = dictionary(theta);
        const VectorXd c = dict.completeOrthogonalDecomposition().solve(y_);
        return c.lpNorm<1>();
    }

private:
    VectorXd y_, u_;
    MatrixXd q_;
    double eta_, theta_min_ = 0.0, theta_max_ = 0.0;
};

struct MonotonicityReport {
    std::vector<double> angles_rad;
    std::vector<double> l1_exact;
    std::vector<double> l1_robust;
    std::vector<double> l1_lasso;
    int violations_exact = 0;
    int violations_robust = 0;
    int violations_lasso = 0;

    int total_violations() const { return violations_exact + violations_robust + violations_lasso; }
};

/// Tabulate exact / residual-bounded / lasso l1 norms over an angle grid of
/// the family and count decreases beyond step_tol.
inline MonotonicityReport verify_prop_monotonicity(const AngleFamily& family, int grid_steps,
                                                   double robust_lambda = 1e-6,
                                                   double lasso_lambda = 50.0,
                                                   double step_tol = 1e-7) {
    if (grid_steps < 1) throw PreconditionError("verify_prop_monotonicity: need >= 1 step");
    MonotonicityReport rep;
    SolverSettings robust;
    robust.lambda = robust_lambda;
    robust.max_iter = 100000;
    SolverSettings lasso;
    lasso.lambda = lasso_lambda;
    lasso.max_iter = 100000;
    for (int i = 0; i <= grid_steps; ++i) {
        const double theta = family.theta_min() +
                             (family.theta_max() - family.theta_min()) * i / grid_steps;
        const MatrixXd dict = family.dictionary(theta);
        rep.angles_rad.push_back(theta);
        rep.l1_exact.push_back(family.exact_l1(theta));
        rep.l1_robust.push_back(solve_bpdn(dict, family.y(), robust).l1_norm());
        rep.l1_lasso.push_back(solve_lasso(dict, family.y(), lasso).l1_norm());
    }
    for (std::size_t i = 1; i < rep.angles_rad.size(); ++i) {
        if (rep.l1_exact[i] < rep.l1_exact[i - 1] - step_tol) ++rep.violations_exact;
        if (rep.l1_robust[i] < rep.l1_robust[i - 1] - step_tol) ++rep.violations_robust;
        if (rep.l1_lasso[i] < rep.l1_lasso[i - 1] - step_tol) ++rep.violations_lasso;
    }
    return rep;
}

struct SwapReport {
    int instances = 0;
    int violations = 0;
    double min_decrease = std::numeric_limits<double>::infinity();
};

/// Replace the farthest support point by a strictly closer point on the same
/// side and require a strict l1 decrease of the exact solve.
inline SwapReport run_swap_suite(int n_instances, std::uint64_t seed) {
    SwapReport rep;
    Rng rng(seed);
    while (rep.instances < n_instances) {
        const int d = 2 + static_cast<int>(rng.below(2));           // 2 or 3
        const int m = d + 1 + static_cast<int>(rng.below(3));       // up to d+3
        const double eta = 0.2 + 0.4 * rng.uniform();
        AngleFamily family(m, d, eta, rng.engine()());
        const double span = family.theta_max() - family.theta_min();
        if (span < 12.0 * M_PI / 180.0) continue;
        const double near = family.theta_min() + span * (0.05 + 0.35 * rng.uniform());
        const double far = near + span * (0.15 + 0.35 * rng.uniform());
        if (far > family.theta_max()) continue;
        const double l1_far = family.exact_l1(far);
        const double l1_near = family.exact_l1(near);
        ++rep.instances;
        const double decrease = l1_far - l1_near;
        rep.min_decrease = std::min(rep.min_decrease, decrease);
        if (!(decrease > 0.0)) ++rep.violations;
    }
    return rep;
}

struct CorollarySuiteReport {
    int instances = 0;
    int support_mismatches = 0;  // bp support not the angle-nearest straddling pair
    int oracle_mismatches = 0;   // oracle support differs from that pair
};

/// Planar-subspace instances with y strictly between its neighbors: points
/// of a 2-dimensional subspace at signed in-plane angles, one clearly
/// nearest neighbor on each side. The minimum-l1 exact representation is the
/// nearest straddling pair; the bp solver and the exhaustive oracle must
/// both find it.
inline CorollarySuiteReport run_corollary_suite(int n_instances, std::uint64_t seed) {
    CorollarySuiteReport rep;
    Rng rng(seed);
    const double deg = M_PI / 180.0;
    for (int inst = 0; inst < n_instances; ++inst) {
        const int m = 3 + static_cast<int>(rng.below(4));
        const int n_side = 3 + static_cast<int>(rng.below(3));
        const SubspaceBasis plane = random_orthonormal_basis(m, 2, rng.engine()());
        std::vector<double> angles;
        // Nearest on each side in (2, 15) degrees, the rest in (22, 80).
        angles.push_back((2.0 + 13.0 * rng.uniform()) * deg);
        angles.push_back(-(2.0 + 13.0 * rng.uniform()) * deg);
        for (int i = 1; i < n_side; ++i) {
            angles.push_back((22.0 + 58.0 * rng.uniform()) * deg);
            angles.push_back(-(22.0 + 58.0 * rng.uniform()) * deg);
        }
        MatrixXd dict(m, static_cast<Eigen::Index>(angles.size()));
        for (std::size_t i = 0; i < angles.size(); ++i)
            dict.col(static_cast<Eigen::Index>(i)) =
                plane.basis.col(0) * std::cos(angles[i]) +
                plane.basis.col(1) * std::sin(angles[i]);
        const VectorXd y = plane.basis.col(0);
        std::vector<int> nearest{0, 1};  // by construction
        ++rep.instances;
        OracleReport oracle = brute_force_min_l1(dict, y, 2);
        std::vector<int> osup = oracle.oracle_support;
        std::sort(osup.begin(), osup.end());
        if (osup != nearest) ++rep.oracle_mismatches;
        SolverSettings settings;
        const SparseSolution bp = solve_bp_noiseless(dict, y, settings);
        std::vector<int> bsup = bp.support;
        std::sort(bsup.begin(), bsup.end());
        if (bsup != nearest) ++rep.support_mismatches;
    }
    return rep;
}

}  // namespace ssc
