#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <vector>

#include "ssc/errors.hpp"
#include "ssc/linalg.hpp"
#include "ssc/solvers.hpp"

namespace ssc {

/// A point's original support plus the indices admitted by a selective
/// extension pass. The extended set is original_support + added; the coded
/// point itself is never a member.
struct ExtendedSupport {
    int point_index = -1;
    std::vector<int> original_support;
    std::vector<int> added;  // in acceptance order
    double delta = 0.0;
    int rounds = 0;

    std::vector<int> extended() const {
        std::vector<int> s = original_support;
        s.insert(s.end(), added.begin(), added.end());
        std::sort(s.begin(), s.end());
        return s;
    }
};

/// Transposed support columns plus the singular-mass scale used by the
/// correlation test.
struct DantzigState {
    MatrixXd xstar;  // |S^e| x m
    double rho = 0.0;
};

/// rho = trace((X*)^T X*): the squared Frobenius norm, i.e. the sum of the
/// squared singular values of X*.
inline double dantzig_scale(const MatrixXd& xstar) {
    if (xstar.size() == 0) throw DegenerateInputError("dantzig_scale: empty matrix");
    return xstar.squaredNorm();
}

namespace detail {

inline void check_extension_inputs(const PointCloud& x, int y_index,
                                   const std::vector<int>& s_y, double delta) {
    if (s_y.empty()) throw DegenerateInputError("selective extension: empty support");
    if (delta <= 0) throw PreconditionError("selective extension: delta must be > 0");
    if (y_index < 0 || y_index >= static_cast<int>(x.count()))
        throw DimensionError("selective extension: point index out of range");
    for (int k : s_y)
        if (k < 0 || k >= static_cast<int>(x.count()) || k == y_index)
            throw PreconditionError("selective extension: support contains invalid index");
}

inline MatrixXd rows_from_columns(const PointCloud& x, const std::vector<int>& idx) {
    MatrixXd xstar(static_cast<Eigen::Index>(idx.size()), x.ambient_dim());
    for (std::size_t i = 0; i < idx.size(); ++i)
        xstar.row(static_cast<Eigen::Index>(i)) = x.data.col(idx[i]).transpose();
    return xstar;
}

/// Greedy one-at-a-time extension driven by a scoring callback. Ties in the
/// argmax go to the lowest index; a round is accepted only when the best
/// score exceeds delta.
template <typename ScoreAll>
ExtendedSupport greedy_extend(const PointCloud& x, int y_index, const std::vector<int>& s_y,
                              double delta, int max_rounds, ScoreAll&& score_candidates) {
    ExtendedSupport ext;
    ext.point_index = y_index;
    ext.original_support = s_y;
    ext.delta = delta;
    std::set<int> member(s_y.begin(), s_y.end());
    member.insert(y_index);
    std::vector<int> current(s_y);
    std::sort(current.begin(), current.end());
    while (ext.rounds < max_rounds) {
        std::vector<int> eligible;
        for (int j = 0; j < static_cast<int>(x.count()); ++j)
            if (!member.count(j)) eligible.push_back(j);
        if (eligible.empty()) break;
        const std::vector<double> scores = score_candidates(current, eligible);
        int best = -1;
        double best_score = -1.0;
        for (std::size_t i = 0; i < eligible.size(); ++i) {
            if (scores[i] > best_score) {
                best_score = scores[i];
                best = eligible[i];
            }
        }
        if (best < 0 || best_score <= delta) break;
        ext.added.push_back(best);
        member.insert(best);
        current.insert(std::lower_bound(current.begin(), current.end(), best), best);
        ++ext.rounds;
    }
    return ext;
}

}  // namespace detail

/// Correlation-test extension: with X* the transposed extended-support
/// columns and rho its squared Frobenius norm, admit the candidate with the
/// largest ||X* x_j||^2 / rho whenever that score exceeds delta, then
/// rebuild X* and repeat.
inline ExtendedSupport selective_dantzig_extend(const PointCloud& x, int y_index,
                                                const std::vector<int>& s_y, double delta,
                                                int max_rounds) {
    detail::check_extension_inputs(x, y_index, s_y, delta);
    return detail::greedy_extend(
        x, y_index, s_y, delta, max_rounds,
        [&](const std::vector<int>& current, const std::vector<int>& eligible) {
            DantzigState state;
            state.xstar = detail::rows_from_columns(x, current);
            state.rho = dantzig_scale(state.xstar);
            std::vector<double> scores(eligible.size());
            for (std::size_t i = 0; i < eligible.size(); ++i)
                scores[i] = (state.xstar * x.data.col(eligible[i])).squaredNorm() / state.rho;
            return scores;
        });
}

/// Projection-test extension: fit an orthonormal basis of dimension
/// ~|S_y| to the extended-support columns and admit the candidate with the
/// largest squared projection onto its span. Scores lie in [0, 1] for
/// unit-norm points.
inline ExtendedSupport subspace_selector_extend(const PointCloud& x, int y_index,
                                                const std::vector<int>& s_y, double delta,
                                                int max_rounds) {
    detail::check_extension_inputs(x, y_index, s_y, delta);
    const auto d = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(s_y.size()), 1,
                                            x.ambient_dim());
    return detail::greedy_extend(
        x, y_index, s_y, delta, max_rounds,
        [&](const std::vector<int>& current, const std::vector<int>& eligible) {
            MatrixXd cols(x.ambient_dim(), static_cast<Eigen::Index>(current.size()));
            for (std::size_t i = 0; i < current.size(); ++i)
                cols.col(static_cast<Eigen::Index>(i)) = x.data.col(current[i]);
            const auto dim = std::min<Eigen::Index>(d, cols.cols());
            const SubspaceBasis b = fit_principal_basis(cols, dim);
            std::vector<double> scores(eligible.size());
            for (std::size_t i = 0; i < eligible.size(); ++i)
                scores[i] = (b.basis.transpose() * x.data.col(eligible[i])).squaredNorm();
            return scores;
        });
}

/// Edge weights for an extended support: absolute values of the
/// least-squares coefficients of y on the extended columns (minimum-norm
/// solve when rank-deficient), scattered into a length-N vector.
inline VectorXd reweight_extended(const PointCloud& x, int y_index,
                                  const ExtendedSupport& ext) {
    const std::vector<int> idx = ext.extended();
    if (idx.empty()) throw DegenerateInputError("reweight_extended: empty extended support");
    MatrixXd cols(x.ambient_dim(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i)
        cols.col(static_cast<Eigen::Index>(i)) = x.data.col(idx[i]);
    const VectorXd coef = cols.completeOrthogonalDecomposition().solve(x.data.col(y_index));
    VectorXd w = VectorXd::Zero(x.count());
    for (std::size_t i = 0; i < idx.size(); ++i)
        w(idx[i]) = std::abs(coef(static_cast<Eigen::Index>(i)));
    w(y_index) = 0.0;
    return w;
}

enum class SelectiveMethod { dantzig, subspace };

/// Base-support options for the selective coders. The base estimator is the
/// unsquared lasso, matching the reference estimator of the sweep.
struct SelectiveSettings {
    SolverSettings base;
    double delta = 0.35;
    int max_rounds = 40;
    // When extension adds nothing, keep the base estimator's column instead
    // of refitting, so the no-op path reproduces the base affinities exactly.
    bool refit_unextended = false;
};

/// Full selective coding of a point cloud: lasso base support per point,
/// extension by the chosen method, least-squares reweighting on the extended
/// support. Per-column failures yield a zero column plus a warning.
inline CoefficientMatrix code_pointcloud_selective(const PointCloud& x, SelectiveMethod method,
                                                   const SelectiveSettings& settings,
                                                   int workers = default_workers()) {
    const Eigen::Index n = x.count();
    if (n < 2) throw PreconditionError("code_pointcloud_selective: need at least two points");
    CoefficientMatrix cm;
    cm.C = MatrixXd::Zero(n, n);
    std::vector<std::optional<ColumnWarning>> warn(static_cast<std::size_t>(n));
    parallel_for(
        static_cast<std::size_t>(n),
        [&](std::size_t sj) {
            const auto j = static_cast<Eigen::Index>(sj);
            try {
                const MatrixXd a = detail::drop_column(x.data, j);
                const VectorXd y = x.data.col(j);
                const SparseSolution base =
                    detail::reindex_with_self(solve_lasso(a, y, settings.base), n, j);
                if (base.support.empty())
                    throw DegenerateInputError("base lasso produced an empty support");
                const ExtendedSupport ext =
                    method == SelectiveMethod::dantzig
                        ? selective_dantzig_extend(x, static_cast<int>(j), base.support,
                                                   settings.delta, settings.max_rounds)
                        : subspace_selector_extend(x, static_cast<int>(j), base.support,
                                                   settings.delta, settings.max_rounds);
                if (ext.added.empty() && !settings.refit_unextended)
                    cm.C.col(j) = base.coefficients.cwiseAbs();
                else
                    cm.C.col(j) = reweight_extended(x, static_cast<int>(j), ext);
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
