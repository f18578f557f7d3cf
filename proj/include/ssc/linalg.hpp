#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ssc/errors.hpp"
#include "ssc/rng.hpp"

namespace ssc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Column matrix of unit-norm data points, optionally with ground-truth
/// cluster ids (one per column, values in [0, n_clusters)).
struct PointCloud {
    MatrixXd data;             // ambient_dim x count, columns are points
    std::vector<int> labels;   // empty or one label per column

    Eigen::Index ambient_dim() const { return data.rows(); }
    Eigen::Index count() const { return data.cols(); }
    bool has_labels() const { return !labels.empty(); }

    int n_clusters() const {
        int k = 0;
        for (int l : labels) k = std::max(k, l + 1);
        return k;
    }
};

/// Matrix with orthonormal columns spanning a linear subspace.
struct SubspaceBasis {
    MatrixXd basis;       // ambient_dim x dim, basis^T basis = I
    bool padded = false;  // true when the requested dim exceeded the data rank

    Eigen::Index ambient_dim() const { return basis.rows(); }
    Eigen::Index dim() const { return basis.cols(); }
};

/// Angle in [0, pi] between two unit vectors. The dot product is clamped to
/// [-1, 1] because rounding can push it past 1 by ~1e-16.
inline double angle(const VectorXd& x, const VectorXd& y) {
    if (x.size() != y.size())
        throw DimensionError("angle: vectors have sizes " + std::to_string(x.size()) +
                             " and " + std::to_string(y.size()));
    constexpr double unit_tol = 1e-6;
    if (std::abs(x.norm() - 1.0) > unit_tol || std::abs(y.norm() - 1.0) > unit_tol)
        throw PreconditionError("angle: inputs must be unit vectors");
    return std::acos(std::clamp(x.dot(y), -1.0, 1.0));
}

/// Scale every column of M to unit Euclidean norm.
inline PointCloud normalize_columns(const MatrixXd& m, std::vector<int> labels = {}) {
    PointCloud pc;
    pc.data = m;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double norm = pc.data.col(j).norm();
        if (norm == 0.0)
            throw DegenerateInputError("normalize_columns: column " + std::to_string(j) +
                                       " is zero");
        pc.data.col(j) /= norm;
    }
    pc.labels = std::move(labels);
    if (!pc.labels.empty() && static_cast<Eigen::Index>(pc.labels.size()) != m.cols())
        throw DimensionError("normalize_columns: label count does not match column count");
    return pc;
}

/// Orthogonal projection B B^T y of y onto span(B).
inline VectorXd orthogonal_project(const SubspaceBasis& b, const VectorXd& y) {
    if (b.basis.rows() != y.size())
        throw DimensionError("orthogonal_project: basis is " + std::to_string(b.basis.rows()) +
                             "-dimensional, vector is " + std::to_string(y.size()));
    return b.basis * (b.basis.transpose() * y);
}

/// Top-d left singular subspace of M: the orthonormal basis maximizing the
/// captured energy sum_j ||B^T m_j||^2. Ordering follows the decomposition's
/// descending singular values; exact ties keep that deterministic order.
/// When d exceeds rank(M) the extra directions come from the remaining
/// singular vectors and the result is marked padded.
inline SubspaceBasis fit_principal_basis(const MatrixXd& m, Eigen::Index d) {
    if (d < 1 || d > std::min(m.rows(), m.cols()))
        throw PreconditionError("fit_principal_basis: need 1 <= d <= min(rows, cols)");
    Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeThinU);
    SubspaceBasis out;
    out.basis = svd.matrixU().leftCols(d);
    const auto& sv = svd.singularValues();
    const double tol = sv(0) > 0 ? sv(0) * 1e-12 : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol) ++rank;
    out.padded = rank < d;
    return out;
}

/// Energy of M captured by a basis: sum of squared column projections.
inline double captured_energy(const SubspaceBasis& b, const MatrixXd& m) {
    return (b.basis.transpose() * m).squaredNorm();
}

/// Deterministic orthonormal m x d matrix: QR of a seeded Gaussian matrix,
/// with column signs fixed so the R diagonal is nonnegative.
inline SubspaceBasis random_orthonormal_basis(Eigen::Index m, Eigen::Index d,
                                              std::uint64_t seed) {
    if (d > m)
        throw PreconditionError("random_orthonormal_basis: d must not exceed m");
    Rng rng(seed);
    MatrixXd g(m, d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < m; ++i) g(i, j) = rng.gaussian();
    Eigen::HouseholderQR<MatrixXd> qr(g);
    MatrixXd q = qr.householderQ() * MatrixXd::Identity(m, d);
    const MatrixXd r = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < d; ++j)
        if (r(j, j) < 0) q.col(j) = -q.col(j);
    SubspaceBasis out;
    out.basis = std::move(q);
    return out;
}

/// Random m x m orthogonal matrix (uniform sign-fixed QR of a Gaussian).
inline MatrixXd random_orthogonal(Eigen::Index m, std::uint64_t seed) {
    return random_orthonormal_basis(m, m, seed).basis;
}

}  // namespace ssc
