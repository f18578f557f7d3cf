#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ssc/config.hpp"
#include "ssc/graph.hpp"
#include "ssc/parallel.hpp"
#include "ssc/selective_pursuit.hpp"
#include "ssc/solvers.hpp"
#include "ssc/svg.hpp"
#include "ssc/synth.hpp"

namespace ssc {

/// One sweep cell result: connectivity and clustering quality of one method
/// on one generated dataset.
struct ConnectivityRecord {
    double angle_deg = 0.0;
    double sigma = 0.0;
    int trial = 0;
    std::string method;
    double xi = 0.0;
    double clustering_error = 0.0;
    double wall_time_ms = 0.0;
};

struct SweepResult {
    std::vector<ConnectivityRecord> records;
    int failed_cells = 0;
    std::vector<std::string> failures;
};

namespace detail {

inline SolverSettings sweep_solver_settings(const SweepConfig& cfg, const std::string& method) {
    SolverSettings s;
    s.max_iter = 4000;
    s.tol_primal = 1e-8;
    s.tol_dual = 1e-8;
    if (method == "bpdn") {
        s.lambda = cfg.bpdn_lambda;
    } else {
        s.lambda = cfg.lambda;
    }
    s.omp_max_atoms = cfg.omp_max_atoms;
    s.omp_residual_tol = cfg.omp_residual_tol;
    return s;
}

inline double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

}  // namespace detail

/// Code one generated dataset with one sweep method. The optional base
/// matrix lets the selective methods reuse an already computed lasso coding.
inline CoefficientMatrix code_with_method(const PointCloud& pc, const std::string& method,
                                          const SweepConfig& cfg, const MatrixXd* lasso_base,
                                          int workers) {
    const SolverSettings settings = detail::sweep_solver_settings(cfg, method);
    if (method == "lasso") return code_pointcloud(pc, Estimator::lasso, settings, workers);
    if (method == "bpdn") return code_pointcloud(pc, Estimator::bpdn, settings, workers);
    if (method == "bp") return code_pointcloud(pc, Estimator::bp, settings, workers);
    if (method == "omp") return code_pointcloud(pc, Estimator::omp, settings, workers);
    if (method == "dantzig" || method == "subspace") {
        SelectiveSettings sel;
        sel.base = settings;
        sel.delta = cfg.delta;
        sel.max_rounds = cfg.max_rounds;
        const SelectiveMethod m =
            method == "dantzig" ? SelectiveMethod::dantzig : SelectiveMethod::subspace;
        return code_pointcloud_selective(pc, m, sel, workers, lasso_base);
    }
    throw PreconditionError("unknown sweep method '" + method + "'");
}

/// Full connectivity sweep: for every (angle, sigma, trial) generate the
/// two-cluster dataset, code it with every configured method, and record xi
/// and the spectral clustering error. Cells run in a worker pool and land in
/// preallocated slots, so record order is independent of scheduling.
inline SweepResult run_sweep(const SweepConfig& cfg, bool timings = false,
                             int workers = default_workers()) {
    cfg.validate();
    struct Cell {
        double angle;
        double sigma;
        int trial;
    };
    std::vector<Cell> cells;
    for (double sigma : cfg.noise_sigmas)
        for (double angle : cfg.angle_grid_deg)
            for (int t = 0; t < cfg.trials; ++t) cells.push_back({angle, sigma, t});
    const std::size_t n_methods = cfg.methods.size();
    SweepResult result;
    result.records.assign(cells.size() * n_methods, {});
    std::vector<std::string> failures(cells.size());

    parallel_for(
        cells.size(),
        [&](std::size_t ci) {
            const Cell& cell = cells[ci];
            const std::uint64_t tseed = cfg.trial_seed(cell.angle, cell.sigma, cell.trial);
            ConnectivityRecord proto;
            proto.angle_deg = cell.angle;
            proto.sigma = cell.sigma;
            proto.trial = cell.trial;
            try {
                const PointCloud pc = generate_two_cluster_sphere(cfg, cell.angle, cell.sigma, tseed);
                const int n1 = cfg.points_per_cluster, n2 = cfg.points_per_cluster;
                ClusterLabels truth;
                truth.labels = pc.labels;
                truth.k = 2;
                // Lasso base is shared by the selective methods.
                MatrixXd lasso_base;
                bool have_base = false;
                for (std::size_t mi = 0; mi < n_methods; ++mi) {
                    const std::string& method = cfg.methods[mi];
                    ConnectivityRecord rec = proto;
                    rec.method = method;
                    const auto start = std::chrono::steady_clock::now();
                    const bool needs_base = method == "dantzig" || method == "subspace";
                    if (needs_base && !have_base) {
                        lasso_base = code_pointcloud(
                                         pc, Estimator::lasso,
                                         detail::sweep_solver_settings(cfg, "lasso"), 1)
                                         .C;
                        have_base = true;
                    }
                    CoefficientMatrix cm =
                        code_with_method(pc, method, cfg, needs_base ? &lasso_base : nullptr, 1);
                    if (method == "lasso" && !have_base) {
                        lasso_base = cm.C;
                        have_base = true;
                    }
                    const AffinityMatrix am = build_affinity(cm);
                    rec.xi = connectivity_xi(am, n1, n2);
                    const ClusterLabels pred =
                        spectral_cluster(am, 2, mix_seed(tseed, 0xc105ULL + mi));
                    rec.clustering_error = clustering_error(pred, truth);
                    if (timings) rec.wall_time_ms = detail::elapsed_ms(start);
                    result.records[ci * n_methods + mi] = std::move(rec);
                }
            } catch (const std::exception& e) {
                failures[ci] = e.what();
                for (std::size_t mi = 0; mi < n_methods; ++mi) {
                    ConnectivityRecord rec = proto;
                    rec.method = cfg.methods[mi];
                    result.records[ci * n_methods + mi] = std::move(rec);
                }
            }
        },
        workers);
    for (auto& f : failures)
        if (!f.empty()) {
            ++result.failed_cells;
            result.failures.push_back(f);
        }
    return result;
}

struct AggregateRow {
    double angle_deg = 0.0;
    double sigma = 0.0;
    std::string method;
    double mean_xi = 0.0;
    double std_xi = 0.0;
    double mean_error = 0.0;
    int n = 0;
};

inline std::vector<AggregateRow> aggregate_records(const std::vector<ConnectivityRecord>& records) {
    std::map<std::tuple<double, double, std::string>, std::vector<const ConnectivityRecord*>> groups;
    for (const auto& r : records) groups[{r.sigma, r.angle_deg, r.method}].push_back(&r);
    std::vector<AggregateRow> rows;
    for (const auto& [key, recs] : groups) {
        AggregateRow row;
        row.sigma = std::get<0>(key);
        row.angle_deg = std::get<1>(key);
        row.method = std::get<2>(key);
        row.n = static_cast<int>(recs.size());
        for (const auto* r : recs) {
            row.mean_xi += r->xi;
            row.mean_error += r->clustering_error;
        }
        row.mean_xi /= row.n;
        row.mean_error /= row.n;
        double var = 0.0;
        for (const auto* r : recs) var += (r->xi - row.mean_xi) * (r->xi - row.mean_xi);
        row.std_xi = row.n > 1 ? std::sqrt(var / (row.n - 1)) : 0.0;
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace detail {

inline std::string num9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace detail

inline void write_records_csv(const std::vector<ConnectivityRecord>& records,
                              const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "angle_deg,sigma,trial,method,xi,clustering_error,wall_time_ms\n";
    for (const auto& r : records)
        out << detail::num9(r.angle_deg) << ',' << detail::num9(r.sigma) << ',' << r.trial << ','
            << r.method << ',' << detail::num9(r.xi) << ',' << detail::num9(r.clustering_error)
            << ',' << detail::num9(r.wall_time_ms) << '\n';
}

inline void write_records_json(const std::vector<ConnectivityRecord>& records,
                               const std::string& path) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records)
        arr.push_back({{"angle_deg", r.angle_deg},
                       {"sigma", r.sigma},
                       {"trial", r.trial},
                       {"method", r.method},
                       {"xi", r.xi},
                       {"clustering_error", r.clustering_error},
                       {"wall_time_ms", r.wall_time_ms}});
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << arr.dump(2) << '\n';
}

inline void write_summary_csv(const std::vector<AggregateRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "angle_deg,sigma,method,mean_xi,std_xi,mean_clustering_error,trials\n";
    for (const auto& r : rows)
        out << detail::num9(r.angle_deg) << ',' << detail::num9(r.sigma) << ',' << r.method << ','
            << detail::num9(r.mean_xi) << ',' << detail::num9(r.std_xi) << ','
            << detail::num9(r.mean_error) << ',' << r.n << '\n';
}

inline std::string method_color(const std::string& method) {
    if (method == "lasso") return "#1a9641";
    if (method == "omp") return "#d7191c";
    if (method == "dantzig") return "#2b83ba";
    if (method == "subspace") return "#000000";
    if (method == "bpdn") return "#ff7f00";
    return "#7b3294";
}

inline std::string method_dash(const std::string& method) {
    if (method == "lasso") return "2,4";
    if (method == "omp") return "8,3,2,3";
    if (method == "dantzig") return "7,4";
    return "";
}

/// One connectivity chart per sigma: mean xi over the angle grid, one curve
/// per method.
inline void write_sweep_svgs(const std::vector<AggregateRow>& rows,
                             const std::vector<std::string>& methods,
                             const std::string& out_dir) {
    std::map<double, std::vector<const AggregateRow*>> by_sigma;
    for (const auto& r : rows) by_sigma[r.sigma].push_back(&r);
    int index = 0;
    for (const auto& [sigma, group] : by_sigma) {
        std::vector<CurveSeries> series;
        for (const auto& method : methods) {
            CurveSeries s;
            s.name = method;
            s.color = method_color(method);
            s.dash = method_dash(method);
            std::vector<std::pair<double, double>> pts;
            for (const auto* r : group)
                if (r->method == method) pts.emplace_back(r->angle_deg, r->mean_xi);
            std::sort(pts.begin(), pts.end());
            for (const auto& [x, y] : pts) {
                s.x.push_back(x);
                s.y.push_back(y);
            }
            series.push_back(std::move(s));
        }
        char name[64];
        std::snprintf(name, sizeof(name), "connectivity_sigma_%02d.svg", index++);
        const std::string svg = render_curve_chart(
            "relative connectivity, sigma=" + detail::num9(sigma), "angle between clusters [deg]",
            "xi", series);
        std::ofstream out(std::filesystem::path(out_dir) / name, std::ios::binary);
        out << svg;
    }
}

}  // namespace ssc
