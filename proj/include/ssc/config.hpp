#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ssc/errors.hpp"
#include "ssc/synth.hpp"

namespace ssc {

// Flat key=value configuration. Lines starting with '#' and blank lines are
// ignored; list values are comma-separated.

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw PreconditionError("config: bad numeric value for " + key + ": '" + v + "'");
    }
}

inline long long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw PreconditionError("config: bad integer value for " + key + ": '" + v + "'");
    }
}

}  // namespace detail

inline std::map<std::string, std::string> parse_key_values(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw PreconditionError("config: line " + std::to_string(lineno) +
                                    " is not key=value: '" + t + "'");
        const std::string key = detail::trim(t.substr(0, eq));
        const std::string value = detail::trim(t.substr(eq + 1));
        if (key.empty())
            throw PreconditionError("config: empty key on line " + std::to_string(lineno));
        kv[key] = value;
    }
    return kv;
}

/// Build a SweepConfig from key=value text. Unknown keys are errors.
inline SweepConfig sweep_config_from_stream(std::istream& in) {
    SweepConfig cfg = SweepConfig::defaults();
    const auto kv = parse_key_values(in);
    for (const auto& [key, value] : kv) {
        if (key == "points_per_cluster")
            cfg.points_per_cluster = static_cast<int>(detail::parse_int(key, value));
        else if (key == "angle_grid_deg") {
            cfg.angle_grid_deg.clear();
            for (const auto& item : detail::split_list(value))
                cfg.angle_grid_deg.push_back(detail::parse_double(key, item));
        } else if (key == "noise_sigmas") {
            cfg.noise_sigmas.clear();
            for (const auto& item : detail::split_list(value))
                cfg.noise_sigmas.push_back(detail::parse_double(key, item));
        } else if (key == "trials")
            cfg.trials = static_cast<int>(detail::parse_int(key, value));
        else if (key == "ambient_dim")
            cfg.ambient_dim = static_cast<int>(detail::parse_int(key, value));
        else if (key == "subspace_dim")
            cfg.subspace_dim = static_cast<int>(detail::parse_int(key, value));
        else if (key == "lambda")
            cfg.lambda = detail::parse_double(key, value);
        else if (key == "bpdn_lambda")
            cfg.bpdn_lambda = detail::parse_double(key, value);
        else if (key == "delta")
            cfg.delta = detail::parse_double(key, value);
        else if (key == "max_rounds")
            cfg.max_rounds = static_cast<int>(detail::parse_int(key, value));
        else if (key == "cloud_spread")
            cfg.cloud_spread = detail::parse_double(key, value);
        else if (key == "seed")
            cfg.seed = static_cast<std::uint64_t>(detail::parse_int(key, value));
        else if (key == "methods")
            cfg.methods = detail::split_list(value);
        else if (key == "omp_max_atoms")
            cfg.omp_max_atoms = static_cast<int>(detail::parse_int(key, value));
        else if (key == "omp_residual_tol")
            cfg.omp_residual_tol = detail::parse_double(key, value);
        else
            throw PreconditionError("config: unknown key '" + key + "'");
    }
    cfg.validate();
    if (cfg.methods.empty()) throw PreconditionError("config: methods list is empty");
    return cfg;
}

inline SweepConfig sweep_config_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PreconditionError("config: cannot open " + path);
    return sweep_config_from_stream(in);
}

}  // namespace ssc
