#include "crt/enumeration.hpp"
#include "crt/errors.hpp"
#include "crt/plane_tree.hpp"

#include <doctest.h>

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <string>
#include <vector>

using namespace crt;

namespace {

// Catalan numbers by the convolution recurrence c_n = sum c_i c_{n-i}.
std::vector<BigInt> catalan_by_convolution(std::size_t max_n) {
    std::vector<BigInt> c(max_n + 1, 0);
    c[1] = 1;
    for (std::size_t n = 2; n <= max_n; ++n) {
        for (std::size_t i = 1; i < n; ++i) c[n] += c[i] * c[n - i];
    }
    return c;
}

// Unordered counts from the functional equation T(z) = z + (T(z)^2 + T(z^2)) / 2,
// solved coefficient by coefficient through the full polynomial square.
std::vector<BigInt> unordered_by_polynomial_square(std::size_t max_n) {
    std::vector<BigInt> t(max_n + 1, 0);
    t[1] = 1;
    for (std::size_t n = 2; n <= max_n; ++n) {
        std::vector<BigInt> square(n + 1, 0);
        for (std::size_t i = 1; i < n; ++i) {
            for (std::size_t j = 1; i + j <= n; ++j) square[i + j] += t[i] * t[j];
        }
        BigInt total = square[n];
        if (n % 2 == 0) total += t[n / 2];
        t[n] = total / 2;
    }
    return t;
}

}  // namespace

TEST_CASE("catalan counts at small sizes") {
    CHECK(catalan_count(1) == 1);
    CHECK(catalan_count(4) == 5);
    CHECK(catalan_count(10) == 4862);
    CHECK_THROWS_AS(catalan_count(0), InvalidInput);
}

TEST_CASE("catalan binomial formula agrees with the convolution recurrence up to 500") {
    const auto conv = catalan_by_convolution(500);
    for (std::size_t n = 1; n <= 500; ++n) REQUIRE(catalan_count(n) == conv[n]);
}

TEST_CASE("unordered counts match the published sequence") {
    const std::vector<int> expected{1, 1, 1, 2, 3, 6, 11, 23, 46, 98, 207, 451, 983, 2179, 4850};
    for (std::size_t n = 1; n <= expected.size(); ++n) CHECK(we_count(n) == expected[n - 1]);
    CHECK(we_count(2) == 1);
    CHECK_THROWS_AS(we_count(0), InvalidInput);
}

TEST_CASE("unordered recurrence agrees with the polynomial-square evaluation up to 500") {
    const auto oracle = unordered_by_polynomial_square(500);
    const CountTable table(Family::Unordered, 500);
    for (std::size_t n = 1; n <= 500; ++n) REQUIRE(table.count(n) == oracle[n]);
    // overflows 64 bits well before 500
    CHECK(table.count(500) > BigInt(std::numeric_limits<std::uint64_t>::max()));
}

TEST_CASE("count table invariants") {
    const CountTable plane(Family::Plane, 60);
    const CountTable unordered(Family::Unordered, 60);
    for (std::size_t n = 1; n <= 60; ++n) {
        CHECK(plane.count(n) > 0);
        CHECK(unordered.count(n) > 0);
        if (n >= 3) {
            CHECK(plane.count(n) >= plane.count(n - 1));
            CHECK(unordered.count(n) >= unordered.count(n - 1));
        }
    }
    CHECK_THROWS_AS(plane.count(0), InvalidInput);
    CHECK_THROWS_AS(plane.count(61), InvalidInput);
}

TEST_CASE("plane counts equal the number of enumerated trees up to 12") {
    for (std::size_t n = 1; n <= 12; ++n) {
        const auto trees = enumerate_plane(n);
        const std::set<PlaneTree> distinct(trees.begin(), trees.end());
        CHECK(distinct.size() == trees.size());
        CHECK(BigInt(trees.size()) == catalan_count(n));
        for (const auto& t : trees) REQUIRE(t.leaf_count() == n);
    }
}

TEST_CASE("count cache file round trip and format") {
    const auto dir = std::filesystem::temp_directory_path() / "crt_test_enumeration";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "unordered.tsv").string();
    std::filesystem::remove(path);

    const CountTable built = CountTable::cached(Family::Unordered, 30, path);
    REQUIRE(std::filesystem::exists(path));
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "#family=unordered");
    std::getline(in, line);
    CHECK(line == "1\t1");

    const CountTable loaded = CountTable::load(path);
    CHECK(loaded.family() == Family::Unordered);
    REQUIRE(loaded.max_n() == 30);
    for (std::size_t n = 1; n <= 30; ++n) CHECK(loaded.count(n) == built.count(n));

    const CountTable extended = CountTable::cached(Family::Unordered, 40, path);
    CHECK(extended.count(40) == we_count(40));

    std::ofstream bad(path);
    bad << "#family=plane\n1\t1\n3\t2\n";
    bad.close();
    CHECK_THROWS_AS(CountTable::load(path), InvalidInput);
    std::filesystem::remove_all(dir);
}

TEST_CASE("solve_rho brackets the radius of convergence") {
    const Constants k = solve_rho(1e-10);
    CHECK(k.rho > 0.25);
    CHECK(k.rho < 0.5);
    CHECK(k.precision <= 1e-10);
    const HighFloat value = unordered_gf(k.rho_high, k.truncation);
    CHECK(value <= 1);
    CHECK(value >= 1 - HighFloat(1e-10));

    const Constants coarse = solve_rho(1e-2);
    CHECK(std::abs(coarse.rho - k.rho) < 1e-2);
    CHECK(std::round(coarse.rho * 100) == std::round(k.rho * 100));
    CHECK_THROWS_AS(solve_rho(0.0), InvalidInput);
}

TEST_CASE("scale constant") {
    const Constants k = solve_rho(1e-10);
    const ScaleConstant sc = compute_scale(k);
    CHECK(std::abs(sc.c - 1.1300337) <= 1e-6);
    CHECK(sc.c > 1.0);
    CHECK(sc.identity_gap <= 1e-12);
    CHECK(compute_c(k) == sc.c);
    CHECK(std::abs(default_c() - sc.c) <= 1e-9);
}

TEST_CASE("plane weights") {
    const WeightTable mu = weight_table(WeightKind::Mu, 100000);
    CHECK(mu[1] == 0.5);
    CHECK(mu[2] == 0.125);
    CHECK(mu[3] == doctest::Approx(2.0 / 32.0));
    double sum = 0.0;
    double previous = 0.0;
    bool monotone = true;
    for (std::size_t n = 1; n <= mu.max_n(); ++n) {
        REQUIRE(mu[n] > 0.0);
        REQUIRE(mu[n] < 1.0);
        sum += mu[n];
        monotone = monotone && sum >= previous;
        previous = sum;
    }
    CHECK(monotone);
    CHECK(sum < 1.0);
    // sum_{n>N} mu_n ~ 1 / sqrt(pi N)
    const double tail = 1.0 / std::sqrt(boost::math::constants::pi<double>() * 100000.0);
    CHECK(std::abs(1.0 - sum - tail) <= 0.01 * tail);
    CHECK(sum + mu.tail_mass >= 1.0 - 2.0 * mu.tail_mass);
    CHECK(sum + mu.tail_mass <= 1.0 + 1e-3 * mu.tail_mass);
}

TEST_CASE("unordered weights") {
    const WeightTable nu = weight_table(WeightKind::Nu, 5000);
    double sum = 0.0;
    for (std::size_t n = 1; n <= nu.max_n(); ++n) {
        REQUIRE(nu[n] > 0.0);
        REQUIRE(nu[n] < 1.0);
        sum += nu[n];
    }
    CHECK(sum >= 0.99);
    CHECK(sum <= 1.0);
    CHECK(sum + nu.tail_mass >= 1.0 - 2.0 * nu.tail_mass);
    CHECK(sum + nu.tail_mass <= 1.0 + 1e-3 * nu.tail_mass);
    CHECK(nu[1] == doctest::Approx(nu.rho));
}

TEST_CASE("unordered counts follow the asymptotic ratio at 500") {
    const Constants k = solve_rho(1e-12);
    const double c = compute_c(k);
    const HighFloat count(we_count(500));
    const HighFloat scaled = count * pow(k.rho_high, 500);
    const double ratio = static_cast<double>(scaled) * 2.0 * std::sqrt(boost::math::constants::pi<double>()) *
                         std::pow(500.0, 1.5) / c;
    CHECK(ratio >= 0.95);
    CHECK(ratio <= 1.05);
}

TEST_CASE("family names") {
    CHECK(parse_family("plane") == Family::Plane);
    CHECK(parse_family("unordered") == Family::Unordered);
    CHECK(to_string(Family::Unordered) == "unordered");
    CHECK_THROWS_AS(parse_family("ternary"), InvalidInput);
}
