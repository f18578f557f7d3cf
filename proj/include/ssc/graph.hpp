#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ssc/errors.hpp"
#include "ssc/rng.hpp"
#include "ssc/solvers.hpp"

namespace ssc {

/// Symmetric nonnegative graph weights with a zero diagonal.
struct AffinityMatrix {
    MatrixXd A;
};

struct ClusterLabels {
    std::vector<int> labels;
    int k = 0;
    std::vector<int> isolated;  // zero-degree vertices, assigned by nearest centroid
};

/// A = |C| + |C|^T.
inline AffinityMatrix build_affinity(const CoefficientMatrix& cm) {
    AffinityMatrix am;
    am.A = cm.C.cwiseAbs() + cm.C.cwiseAbs().transpose();
    am.A.diagonal().setZero();
    return am;
}

inline AffinityMatrix build_affinity(const MatrixXd& c) {
    CoefficientMatrix cm;
    cm.C = c;
    return build_affinity(cm);
}

/// Which rows enter the connectivity average. The printed formula admits
/// both readings; they coincide for symmetric two-cluster layouts.
enum class XiRows { all, first_cluster };

struct XiReport {
    double xi = 0.0;
    int zero_degree_rows = 0;
};

/// Relative connectivity between the first n1 and the last n2 points: the
/// average over rows of (cross-cluster row mass) / (total row mass).
/// Zero-degree rows contribute 0 and are counted in the report.
inline XiReport connectivity_xi_report(const AffinityMatrix& am, int n1, int n2,
                                       XiRows rows = XiRows::all) {
    const Eigen::Index n = am.A.rows();
    if (n1 < 0 || n2 < 0 || n1 + n2 != static_cast<int>(n))
        throw DimensionError("connectivity_xi: block sizes must sum to the matrix size");
    XiReport rep;
    const Eigen::Index row_limit = rows == XiRows::all ? n : n1;
    double acc = 0.0;
    int counted = 0;
    for (Eigen::Index i = 0; i < row_limit; ++i) {
        const double total = am.A.row(i).sum();
        ++counted;
        if (total <= 0.0) {
            ++rep.zero_degree_rows;
            continue;
        }
        double cross = 0.0;
        if (i < n1)
            cross = am.A.row(i).tail(n2).sum();
        else
            cross = am.A.row(i).head(n1).sum();
        acc += cross / total;
    }
    rep.xi = counted > 0 ? acc / counted : 0.0;
    return rep;
}

inline double connectivity_xi(const AffinityMatrix& am, int n1, int n2,
                              XiRows rows = XiRows::all) {
    return connectivity_xi_report(am, n1, n2, rows).xi;
}

namespace detail {

// Min-cost assignment (Hungarian with potentials), O(n^3). cost is square.
inline std::vector<int> hungarian(const MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = std::numeric_limits<double>::infinity();
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

struct KMeansResult {
    std::vector<int> labels;
    double inertia = std::numeric_limits<double>::infinity();
};

inline KMeansResult kmeans_once(const MatrixXd& pts, int k, Rng& rng, int max_iter,
                                double tol) {
    const Eigen::Index n = pts.rows();
    MatrixXd centroids(k, pts.cols());
    // k-means++ seeding.
    std::vector<double> dist2(static_cast<std::size_t>(n),
                              std::numeric_limits<double>::infinity());
    std::vector<char> taken(static_cast<std::size_t>(n), 0);
    Eigen::Index first = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    centroids.row(0) = pts.row(first);
    taken[static_cast<std::size_t>(first)] = 1;
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d = (pts.row(i) - centroids.row(c - 1)).squaredNorm();
            dist2[static_cast<std::size_t>(i)] = std::min(dist2[static_cast<std::size_t>(i)], d);
            total += dist2[static_cast<std::size_t>(i)];
        }
        Eigen::Index pick = -1;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += dist2[static_cast<std::size_t>(i)];
                if (acc >= target && !taken[static_cast<std::size_t>(i)]) {
                    pick = i;
                    break;
                }
            }
        }
        if (pick < 0) {
            for (Eigen::Index i = 0; i < n; ++i)
                if (!taken[static_cast<std::size_t>(i)]) {
                    pick = i;
                    break;
                }
        }
        if (pick < 0) pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
        centroids.row(c) = pts.row(pick);
        taken[static_cast<std::size_t>(pick)] = 1;
    }
    KMeansResult res;
    res.labels.assign(static_cast<std::size_t>(n), 0);
    for (int it = 0; it < max_iter; ++it) {
        // Assign.
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = (pts.row(i) - centroids.row(0)).squaredNorm();
            for (int c = 1; c < k; ++c) {
                const double d = (pts.row(i) - centroids.row(c)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            res.labels[static_cast<std::size_t>(i)] = best;
        }
        // Update.
        MatrixXd next = MatrixXd::Zero(k, pts.cols());
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            next.row(res.labels[static_cast<std::size_t>(i)]) += pts.row(i);
            ++counts[static_cast<std::size_t>(res.labels[static_cast<std::size_t>(i)])];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                next.row(c) /= counts[static_cast<std::size_t>(c)];
            } else {
                // Re-seed an empty cluster with the point farthest from its centroid.
                Eigen::Index far = 0;
                double far_d = -1.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double d =
                        (pts.row(i) - centroids.row(res.labels[static_cast<std::size_t>(i)]))
                            .squaredNorm();
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                next.row(c) = pts.row(far);
            }
        }
        const double shift = (next - centroids).squaredNorm();
        centroids = next;
        if (shift <= tol) break;
    }
    res.inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        res.inertia += (pts.row(i) - centroids.row(res.labels[static_cast<std::size_t>(i)]))
                           .squaredNorm();
    return res;
}

}  // namespace detail

/// Spectral clustering with the symmetric normalized Laplacian: embed into
/// the k dominant eigenvectors of D^{-1/2} A D^{-1/2}, row-normalize, then
/// seeded k-means (20 restarts). Deterministic given the seed.
inline ClusterLabels spectral_cluster(const AffinityMatrix& am, int k, std::uint64_t seed,
                                      int n_init = 20) {
    const Eigen::Index n = am.A.rows();
    if (k < 1 || k > static_cast<int>(n))
        throw PreconditionError("spectral_cluster: need 1 <= k <= N");
    ClusterLabels out;
    out.k = k;
    const VectorXd deg = am.A.rowwise().sum();
    VectorXd dinv_sqrt(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (deg(i) > 0) {
            dinv_sqrt(i) = 1.0 / std::sqrt(deg(i));
        } else {
            dinv_sqrt(i) = 0.0;
            out.isolated.push_back(static_cast<int>(i));
        }
    }
    const MatrixXd norm_aff = dinv_sqrt.asDiagonal() * am.A * dinv_sqrt.asDiagonal();
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(norm_aff);
    // Largest k eigenvectors of the normalized affinity = smallest k of I - it.
    MatrixXd embed(n, k);
    for (int c = 0; c < k; ++c) embed.col(c) = eig.eigenvectors().col(n - 1 - c);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double norm = embed.row(i).norm();
        if (norm > 0) embed.row(i) /= norm;
    }
    detail::KMeansResult best;
    for (int restart = 0; restart < n_init; ++restart) {
        Rng rng(mix_seed(seed, 0x6b6d65616e73ULL, restart));
        auto res = detail::kmeans_once(embed, k, rng, 300, 1e-8);
        if (res.inertia < best.inertia) best = std::move(res);
    }
    out.labels = std::move(best.labels);
    return out;
}

/// Fraction of points whose predicted label disagrees with the ground truth
/// under the best label permutation (Hungarian assignment).
inline double clustering_error(const ClusterLabels& pred, const ClusterLabels& truth) {
    if (pred.labels.size() != truth.labels.size())
        throw DimensionError("clustering_error: label vectors differ in length");
    const int n = static_cast<int>(pred.labels.size());
    if (n == 0) return 0.0;
    int kp = 0, kt = 0;
    for (int l : pred.labels) kp = std::max(kp, l + 1);
    for (int l : truth.labels) kt = std::max(kt, l + 1);
    const int k = std::max(kp, kt);
    MatrixXd agree = MatrixXd::Zero(k, k);
    for (int i = 0; i < n; ++i) agree(pred.labels[i], truth.labels[i]) += 1.0;
    const MatrixXd cost = -agree;
    const std::vector<int> match = detail::hungarian(cost);
    double matched = 0.0;
    for (int r = 0; r < k; ++r)
        if (match[r] >= 0) matched += agree(r, match[r]);
    return 1.0 - matched / n;
}

}  // namespace ssc
