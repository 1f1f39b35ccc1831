#include "crt/errors.hpp"
#include "crt/experiments.hpp"
#include "crt/plane_tree.hpp"
#include "crt/skeleton.hpp"

#include <doctest.h>
#include <json.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace crt;

namespace {

// JSON of a report with the thread count removed, for cross-thread comparisons.
std::string without_threads(ExperimentReport report) {
    std::erase_if(report.parameters, [](const auto& kv) { return kv.first == "threads"; });
    return report.to_json();
}

const Check* find_check(const ExperimentReport& report, const std::string& name) {
    for (const auto& c : report.checks)
        if (c.name == name) return &c;
    return nullptr;
}

double exp_tail(double x) { return std::exp(-x); }

}  // namespace

TEST_CASE("theta tail limits and mean") {
    CHECK(theta_tail(0.05) >= 0.999);
    CHECK(theta_tail(0.0) == 1.0);
    CHECK(theta_tail(10.0) < 1e-12);
    double previous = 1.0;
    for (double x = 0.1; x < 6.0; x += 0.1) {
        const double v = theta_tail(x);
        REQUIRE(v <= previous + 1e-11);  // series truncated at 1e-12 per term
        REQUIRE(v >= 0.0);
        previous = v;
    }
    // twice the excursion maximum has mean sqrt(2 pi)
    const double mean =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(theta_tail, 0.05, 12.0, 15, 1e-12) + 0.05;
    CHECK(std::abs(mean - std::sqrt(2.0 * std::acos(-1.0))) <= 1e-6);
}

TEST_CASE("Kolmogorov-Smirnov distance to a tail") {
    CHECK(ks_distance_to_tail({1.0}, exp_tail) == doctest::Approx(1.0 - std::exp(-1.0)));
    std::vector<double> grid;
    for (int i = 1; i <= 1000; ++i) grid.push_back(-std::log(1.0 - (i - 0.5) / 1000.0));
    CHECK(ks_distance_to_tail(grid, exp_tail) == doctest::Approx(0.0005).epsilon(1e-6));
}

TEST_CASE("batch sizes") {
    CHECK(batch_sizes(25, 10) == std::vector<std::size_t>{10, 10, 5});
    CHECK(batch_sizes(20, 10) == std::vector<std::size_t>{10, 10});
    CHECK(batch_sizes(0, 10).empty());
    CHECK_THROWS_AS(batch_sizes(5, 0), InvalidInput);
}

TEST_CASE("batches draw from their own substreams and merge in batch order") {
    const auto draws = [](std::size_t, std::size_t count, Rng& rng) {
        std::vector<std::uint64_t> out(count);
        for (auto& v : out) v = rng.next();
        return out;
    };
    RunOptions one{7, 1, 4};
    RunOptions four{7, 4, 4};
    const auto serial = run_batches<std::vector<std::uint64_t>>(18, one, draws);
    const auto parallel = run_batches<std::vector<std::uint64_t>>(18, four, draws);
    CHECK(serial == parallel);
    REQUIRE(serial.size() == 5);
    for (std::size_t b = 0; b < serial.size(); ++b) {
        Rng rng(7, b);
        for (auto v : serial[b]) REQUIRE(v == rng.next());
    }
    CHECK(serial.back().size() == 2);

    const auto failing = [](std::size_t b, std::size_t, Rng&) -> int {
        if (b == 2) throw InvalidInput("boom");
        return 0;
    };
    CHECK_THROWS_AS(run_batches<int>(40, four, failing), InvalidInput);
}

TEST_CASE("exact mean heights report") {
    const auto report = exp_mean_height_exact();
    CHECK(report.pass);
    CHECK(report.checks.size() == 3);
    const auto json = nlohmann::json::parse(report.to_json());
    CHECK(json["values"]["plane_n4"] == "14/5");
    CHECK(json["values"]["unordered_n4"] == "5/2");
}

TEST_CASE("height experiment is reproducible and thread independent") {
    HeightLawConfig config;
    config.n = 300;
    config.samples = 3000;
    RunOptions options{11, 1, 700};
    const auto first = exp_height_law(config, options);
    const auto second = exp_height_law(config, options);
    CHECK(first.to_json() == second.to_json());
    options.threads = 3;
    CHECK(without_threads(exp_height_law(config, options)) == without_threads(first));
    options.seed = 12;
    CHECK(without_threads(exp_height_law(config, options)) != without_threads(first));

    // Finite-n referee passes; the limit check carries the declared tolerance.
    const Check* exact = find_check(first, "ks_to_exact_law");
    REQUIRE(exact != nullptr);
    CHECK(exact->pass);
    const Check* limit = find_check(first, "ks_distance");
    REQUIRE(limit != nullptr);
    CHECK(limit->threshold == 0.03);
    config.family = Family::Unordered;
    const auto unordered = exp_height_law(config, options);
    CHECK(find_check(unordered, "ks_distance")->threshold == 0.04);
    CHECK(find_check(unordered, "ks_to_exact_law")->pass);
}

TEST_CASE("local limit in exhaustive mode matches the exact law") {
    for (Family family : {Family::Plane, Family::Unordered}) {
        LocalLimitConfig config;
        config.family = family;
        config.n = 9;
        const auto report = exp_local_limit(config, RunOptions{});
        CHECK(report.pass);
        CHECK(find_check(report, "max_abs_diff")->value <= 1e-12);
    }
}

TEST_CASE("local limit Monte Carlo agrees with the exact finite-n law") {
    LocalLimitConfig config;
    config.n = 2000;
    config.samples = 20000;
    RunOptions options{5, 2, 5000};
    const auto report = exp_local_limit(config, options);
    REQUIRE(report.cells.size() == 25);
    const Check* z = find_check(report, "max_abs_z_vs_exact");
    REQUIRE(z != nullptr);
    CHECK(z->pass);
    for (const auto& cell : report.cells) {
        CHECK(cell.shape == "o");
        CHECK(cell.exact > 0.0);
        CHECK(cell.theoretical > 0.0);
        CHECK(cell.lo.size() == 2);
    }

    std::istringstream csv(report.to_csv());
    std::string header;
    std::getline(csv, header);
    CHECK(header == "shape,cell_lo_0,cell_lo_1,cell_hi_0,cell_hi_1,empirical,theoretical,rel_err");
    std::size_t rows = 0;
    for (std::string line; std::getline(csv, line);) ++rows;
    CHECK(rows == 25);
}

TEST_CASE("max removed height against the trimming definition") {
    Rng rng(3, 0);
    for (int trial = 0; trial < 30; ++trial) {
        const PlaneTree t = sample_plane_uniform(60, rng);
        for (std::int64_t a : {0, 1, 5, 20, 30, 59}) {
            const TrimResult trimmed = trim_with_origin(t, a);
            std::size_t expected = 0;
            for (PlaneTree::Vertex v = 0; v < trimmed.tree.vertex_count(); ++v) {
                if (trimmed.tree.is_leaf(v))
                    expected = std::max<std::size_t>(expected, t.subtree(trimmed.origin[v]).height());
            }
            REQUIRE(max_removed_height(t, a) == expected);
            if (a <= 1) REQUIRE(expected == 0);
        }
        // removed subtrees have at most n / 2 leaves at a = n / 2
        const TrimResult half = trim_with_origin(t, 30);
        for (PlaneTree::Vertex v = 0; v < half.tree.vertex_count(); ++v) {
            if (!half.tree.is_leaf(v)) continue;
            const PlaneTree::Vertex u = half.origin[v];
            if (!t.is_leaf(u)) {
                REQUIRE(t.subtree(t.left(u)).leaf_count() <= 30);
                REQUIRE(t.subtree(t.right(u)).leaf_count() <= 30);
            }
        }
    }
}

TEST_CASE("trim tightness report") {
    TightnessConfig config;
    config.n = 600;
    config.samples = 300;
    config.moment_sizes = {150, 300, 600};
    config.moment_samples = 300;
    const auto report = exp_trim_tightness(config, RunOptions{2, 2, 100});
    CHECK(report.pass);
    CHECK_FALSE(report.checks.empty());
    CHECK(without_threads(exp_trim_tightness(config, RunOptions{2, 1, 100})) == without_threads(report));
}

TEST_CASE("skeleton convergence report") {
    ConvergenceConfig config;
    config.n = 500;
    config.samples = 3000;
    config.excursion_samples = 300;
    const auto report = exp_skeleton_convergence(config, RunOptions{4, 1, 1000});
    CHECK(report.checks.size() == 8);
    const auto json = nlohmann::json::parse(report.to_json());
    CHECK(json["values"].contains("psi_single_shape_mass"));
    // quadrature of the single-shape density mass
    CHECK(std::abs(std::stod(json["values"]["psi_single_shape_mass"].get<std::string>()) - 0.689) <= 1e-3);
    CHECK(find_check(report, "single_shape_rel_gap_plane_psi") != nullptr);
}

TEST_CASE("report serialization") {
    ExperimentReport report;
    report.name = "demo";
    report.parameter("n", "5");
    report.parameter("eps", 0.25);
    report.value("note", "x");
    report.runtime_seconds = 3.0;
    CHECK(report.check("stat", 0.5, "<=", 1.0));
    CHECK(report.pass);
    CHECK_FALSE(report.check("other", 2.0, "<=", 1.0));
    CHECK_FALSE(report.pass);
    CHECK(report.check("equal", 1.0, "==", 1.0));
    CHECK(report.check("floor", 3.0, ">=", 1.0));
    CHECK_FALSE(report.pass);

    const auto json = nlohmann::json::parse(report.to_json());
    CHECK(json["name"] == "demo");
    CHECK(json["parameters"]["eps"] == "0.25");
    CHECK(json["checks"].size() == 4);
    CHECK(json["checks"][1]["pass"] == false);
    CHECK(json["checks"][1]["threshold"] == 1.0);
    CHECK(json["pass"] == false);
    CHECK_FALSE(json.contains("runtime"));
    CHECK_FALSE(json.contains("runtime_seconds"));
    CHECK(report.to_text().find("FAIL") != std::string::npos);

    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1.0");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
