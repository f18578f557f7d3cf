#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "ssc/errors.hpp"
#include "ssc/linalg.hpp"
#include "ssc/rng.hpp"

namespace ssc {

/// Parameters of the two-cluster connectivity sweep. Defaults follow the
/// benchmark layout: 20 points per cluster on a 3-dimensional subspace of
/// R^20, cluster angles 0..180 in 5-degree steps, noise levels
/// {0, 0.02, 0.03}, 10 trials per cell.
struct SweepConfig {
    int points_per_cluster = 20;
    std::vector<double> angle_grid_deg;   // default filled by defaults()
    std::vector<double> noise_sigmas{0.0, 0.02, 0.03};
    int trials = 10;
    int ambient_dim = 20;
    int subspace_dim = 3;
    double lambda = 20.0;        // unsquared-lasso penalty weight
    double bpdn_lambda = 0.01;   // squared-residual bound when bpdn is swept
    double delta = 0.35;         // selective-extension acceptance threshold
    int max_rounds = 40;
    double cloud_spread = 0.3;   // Gaussian spread of each cloud before normalization
    std::uint64_t seed = 20250810;
    std::vector<std::string> methods{"lasso", "omp", "dantzig", "subspace"};
    int omp_max_atoms = 6;
    double omp_residual_tol = 1e-6;

    static SweepConfig defaults() {
        SweepConfig cfg;
        for (int a = 0; a <= 180; a += 5) cfg.angle_grid_deg.push_back(a);
        return cfg;
    }

    void validate() const {
        if (points_per_cluster <= 0 || trials <= 0 || ambient_dim <= 0 || subspace_dim <= 0)
            throw PreconditionError("SweepConfig: counts must be positive");
        if (subspace_dim > ambient_dim)
            throw PreconditionError("SweepConfig: subspace_dim exceeds ambient_dim");
        for (double a : angle_grid_deg)
            if (a < 0 || a > 180)
                throw PreconditionError("SweepConfig: angles must lie in [0, 180]");
        for (double s : noise_sigmas)
            if (s < 0) throw PreconditionError("SweepConfig: sigmas must be >= 0");
    }

    std::uint64_t trial_seed(double angle_deg, double sigma, int trial) const {
        return mix_seed(seed, static_cast<std::uint64_t>(angle_deg * 64.0),
                        static_cast<std::uint64_t>(sigma * 1e6), trial);
    }

    std::uint64_t basis_seed() const { return mix_seed(seed, 0xba515ULL); }
};

/// Two Gaussian clouds on the unit sphere of a subspace_dim-dimensional
/// space with identical mean direction and spread, the second rotated by
/// angle_deg in a plane containing the mean (a rotation about an axis
/// orthogonal to it, so the nominal centroid separation equals angle_deg),
/// both pushed through one seeded orthonormal ambient x subspace_dim basis,
/// normalized, perturbed by isotropic noise of the given sigma and
/// renormalized. Labels: 0 for the first cloud, 1 for the second.
inline PointCloud generate_two_cluster_sphere(const SweepConfig& cfg, double angle_deg,
                                              double sigma, std::uint64_t trial_seed) {
    cfg.validate();
    if (angle_deg < 0 || angle_deg > 180)
        throw PreconditionError("generate_two_cluster_sphere: angle must lie in [0, 180]");
    if (cfg.subspace_dim < 2)
        throw PreconditionError("generate_two_cluster_sphere: need subspace_dim >= 2");
    const int n = cfg.points_per_cluster;
    const int d = cfg.subspace_dim;
    Rng rng(trial_seed);
    const double rad = angle_deg * M_PI / 180.0;
    const double ca = std::cos(rad), sa = std::sin(rad);

    MatrixXd sphere(d, 2 * n);
    for (int cloud = 0; cloud < 2; ++cloud) {
        for (int i = 0; i < n; ++i) {
            VectorXd p(d);
            for (int c = 0; c < d; ++c) p(c) = cfg.cloud_spread * rng.gaussian();
            p(0) += 1.0;  // mean direction e1
            p.normalize();
            if (cloud == 1) {
                // Rotate in the (e1, e2) plane; the axis is orthogonal to e1.
                const double p0 = p(0), p1 = p(1);
                p(0) = ca * p0 - sa * p1;
                p(1) = sa * p0 + ca * p1;
            }
            sphere.col(cloud * n + i) = p;
        }
    }

    const SubspaceBasis embed = random_orthonormal_basis(cfg.ambient_dim, d, cfg.basis_seed());
    MatrixXd ambient = embed.basis * sphere;
    for (Eigen::Index j = 0; j < ambient.cols(); ++j) ambient.col(j).normalize();
    if (sigma > 0) {
        for (Eigen::Index j = 0; j < ambient.cols(); ++j) {
            for (Eigen::Index i = 0; i < ambient.rows(); ++i)
                ambient(i, j) += sigma * rng.gaussian();
            ambient.col(j).normalize();
        }
    }
    std::vector<int> labels(static_cast<std::size_t>(2 * n), 0);
    for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(n + i)] = 1;
    PointCloud pc;
    pc.data = std::move(ambient);
    pc.labels = std::move(labels);
    return pc;
}

/// Two sets of unit vectors in R^2 spread evenly over arcs of width
/// arc_span_deg whose nearest edges are gap_deg apart, numbered by angle so
/// the affinity row/column order matches the point layout.
inline PointCloud generate_planar_arcs(int n_per_set, double gap_deg, double arc_span_deg,
                                       std::uint64_t /*seed*/ = 0) {
    if (n_per_set <= 0) throw PreconditionError("generate_planar_arcs: need n_per_set > 0");
    if (gap_deg < 0) throw PreconditionError("generate_planar_arcs: gap must be >= 0");
    if (arc_span_deg < 0)
        throw PreconditionError("generate_planar_arcs: arc span must be >= 0");
    const double to_rad = M_PI / 180.0;
    MatrixXd pts(2, 2 * n_per_set);
    std::vector<int> labels(static_cast<std::size_t>(2 * n_per_set), 0);
    const double step = n_per_set > 1 ? arc_span_deg / (n_per_set - 1) : 0.0;
    for (int s = 0; s < 2; ++s) {
        const double start = s == 0 ? 0.0 : arc_span_deg + gap_deg;
        for (int i = 0; i < n_per_set; ++i) {
            const double theta = (start + i * step) * to_rad;
            pts(0, s * n_per_set + i) = std::cos(theta);
            pts(1, s * n_per_set + i) = std::sin(theta);
            labels[static_cast<std::size_t>(s * n_per_set + i)] = s;
        }
    }
    PointCloud pc;
    pc.data = std::move(pts);
    pc.labels = std::move(labels);
    return pc;
}

/// Dataset export: one point per row, coordinates then the label column.
inline void write_pointcloud_csv(const PointCloud& pc, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_pointcloud_csv: cannot open " + path);
    for (Eigen::Index i = 0; i < pc.ambient_dim(); ++i)
        out << "x" << i << ",";
    out << "label\n";
    char buf[32];
    for (Eigen::Index j = 0; j < pc.count(); ++j) {
        for (Eigen::Index i = 0; i < pc.ambient_dim(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.9g", pc.data(i, j));
            out << buf << ",";
        }
        out << (pc.has_labels() ? pc.labels[static_cast<std::size_t>(j)] : 0) << "\n";
    }
}

}  // namespace ssc
