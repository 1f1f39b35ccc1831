#pragma once

#include "crt/enumeration.hpp"
#include "crt/plane_tree.hpp"
#include "crt/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace crt {

// A statistic compared against a declared threshold.
struct Check {
    std::string name;
    double value = 0.0;
    std::string relation;  // "<=", ">=", "=="
    double threshold = 0.0;
    bool pass = false;
};

struct CellRow {
    std::string shape;
    std::vector<double> lo;
    std::vector<double> hi;
    double empirical = 0.0;
    double theoretical = 0.0;  // limit-density prediction
    double rel_err = 0.0;      // empirical / theoretical - 1
    double exact = 0.0;        // finite-n probability, when available
    double z_score = 0.0;      // (empirical - exact) / binomial standard error
};

struct ExperimentReport {
    std::string name;
    std::vector<std::pair<std::string, std::string>> parameters;
    std::vector<Check> checks;
    std::vector<std::pair<std::string, std::string>> values;  // informational
    std::vector<CellRow> cells;
    bool pass = true;
    double runtime_seconds = 0.0;  // never serialized

    void parameter(const std::string& key, const std::string& value);
    void parameter(const std::string& key, double value);
    void value(const std::string& key, const std::string& text);
    void value(const std::string& key, double v);
    // Records a check and folds it into pass.
    bool check(const std::string& check_name, double v, const std::string& relation, double threshold);
    bool check_flag(const std::string& check_name, bool ok);

    std::string to_json() const;
    std::string to_text() const;
    // Header: shape,cell_lo...,cell_hi...,empirical,theoretical,rel_err
    std::string to_csv() const;
};

// Formats a double with the shortest round-trip representation.
std::string format_double(double v);

struct RunOptions {
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::size_t batch_size = 10000;
};

// Sample counts per batch; batch b draws from Rng(seed, b).
std::vector<std::size_t> batch_sizes(std::size_t samples, std::size_t batch_size);

// Runs work(batch_index, count, rng) for every batch on the given number of
// threads and returns the results in batch order.
template <class Result, class Work>
std::vector<Result> run_batches(std::size_t samples, const RunOptions& options, Work work);

// Right tail of twice the maximum of the normalized Brownian excursion:
// 2 sum_{k>=1} (k^2 x^2 - 1) exp(-k^2 x^2 / 2), truncated once terms drop below 1e-12.
double theta_tail(double x);

// Kolmogorov-Smirnov distance between the sample and the law with the given
// right tail.
double ks_distance_to_tail(std::vector<double> sample, double (*tail)(double));

struct CellGrid {
    double x_lo = 0.5, x_hi = 2.5;
    std::size_t x_cells = 5;
    double y_lo = 0.32, y_hi = 0.57;
    std::size_t y_cells = 5;
};

struct LocalLimitConfig {
    Family family = Family::Plane;
    std::size_t n = 2000;
    double epsilon = 0.3;
    std::size_t samples = 1000000;
    CellGrid grid;
    double z_tolerance = 4.0;
    // Tolerance on |empirical / limit - 1|; negative picks the family default.
    double limit_tolerance = -1.0;
};

// Single-vertex-shape cells of (x / sqrt(n), y / n). Exhaustive exact mode
// for n <= 10 compares every skeleton frequency with the exact law.
ExperimentReport exp_local_limit(const LocalLimitConfig& config, const RunOptions& options);

struct HeightLawConfig {
    Family family = Family::Plane;
    std::size_t n = 5000;
    std::size_t samples = 100000;
    double ks_tolerance = -1.0;  // negative picks the family default
};

ExperimentReport exp_height_law(const HeightLawConfig& config, const RunOptions& options);

ExperimentReport exp_mean_height_exact();

struct TightnessConfig {
    std::size_t n = 2000;
    std::vector<double> epsilons{0.4, 0.2, 0.1, 0.05};
    std::size_t samples = 2000;
    std::vector<std::size_t> moment_sizes{500, 1000, 2000, 4000};
    std::size_t moment_samples = 2000;
    double moment_band = 2.0;
};

// Largest height of a subtree removed by trimming: the maximum of the heights
// of the subtrees rooted at the leaves of t[a].
std::size_t max_removed_height(const PlaneTree& t, std::int64_t a);

ExperimentReport exp_trim_tightness(const TightnessConfig& config, const RunOptions& options);

struct ConvergenceConfig {
    std::size_t n = 2000;
    double epsilon = 0.3;
    std::size_t samples = 100000;
    std::size_t excursion_samples = 20000;
    double shape_tolerance = 0.03;
    double mass_tolerance = 0.03;
    double ratio_tolerance = 0.05;
    double psi_mean_tolerance = 0.10;
};

ExperimentReport exp_skeleton_convergence(const ConvergenceConfig& config, const RunOptions& options);

}  // namespace crt

#include "crt/detail/run_batches.hpp"
