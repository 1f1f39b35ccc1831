#include "crt/enumeration.hpp"
#include "crt/errors.hpp"
#include "crt/exact_law.hpp"
#include "crt/plane_tree.hpp"
#include "crt/skeleton.hpp"
#include "crt/unordered_tree.hpp"

#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <utility>
#include <vector>

using namespace crt;

namespace {

// Every skeleton (shape, x, y) with y_v in (a, 2a] and |x| + |y| <= n.
std::vector<Skeleton> all_skeletons(std::size_t n, std::int64_t a) {
    std::vector<Skeleton> out;
    const auto budget = static_cast<std::int64_t>(n);
    for (std::size_t leaves = 1; static_cast<std::int64_t>(leaves) * (a + 1) <= budget; ++leaves) {
        for (const PlaneTree& shape : enumerate_plane(leaves)) {
            Skeleton sk;
            sk.shape = shape;
            sk.a = a;
            sk.x.assign(shape.vertex_count(), 0);
            sk.y.assign(leaves, 0);
            std::function<void(std::size_t, std::int64_t)> fill_x = [&](std::size_t i, std::int64_t left) {
                if (i == sk.x.size()) {
                    out.push_back(sk);
                    return;
                }
                for (std::int64_t v = 0; v <= left; ++v) {
                    sk.x[i] = v;
                    fill_x(i + 1, left - v);
                }
            };
            std::function<void(std::size_t, std::int64_t)> fill_y = [&](std::size_t i, std::int64_t left) {
                if (i == sk.y.size()) {
                    fill_x(0, left);
                    return;
                }
                for (std::int64_t v = a + 1; v <= 2 * a && v <= left; ++v) {
                    sk.y[i] = v;
                    fill_y(i + 1, left - v);
                }
            };
            fill_y(0, budget);
        }
    }
    return out;
}

std::map<Skeleton, double> plane_frequencies(std::size_t n, std::int64_t a) {
    const auto trees = enumerate_plane(n);
    std::map<Skeleton, double> freq;
    for (const auto& t : trees) freq[skeleton_plane(t, a)] += 1.0;
    for (auto& [sk, f] : freq) f /= static_cast<double>(trees.size());
    return freq;
}

struct UnorderedFrequencies {
    std::map<Skeleton, double> freq;
    double good_fraction = 0.0;
};

UnorderedFrequencies unordered_frequencies(std::size_t n, std::int64_t a) {
    const auto classes = enumerate_unordered(n);
    UnorderedFrequencies out;
    for (const auto& t : classes) {
        if (!is_a_good(t, a)) continue;
        out.freq[skeleton_unordered(t, a)] += 1.0;
        out.good_fraction += 1.0;
    }
    for (auto& [sk, f] : out.freq) f /= static_cast<double>(classes.size());
    out.good_fraction /= static_cast<double>(classes.size());
    return out;
}

}  // namespace

TEST_CASE("constrained sums with zero or one summand") {
    const auto mu = weight_table(WeightKind::Mu, 100);
    CHECK(exact_constrained_sum(0, 0, 5, mu) == 1.0);
    CHECK(exact_constrained_sum(0, 3, 5, mu) == 0.0);
    for (std::size_t m = 1; m <= 20; ++m) {
        CHECK(exact_constrained_sum(1, m, 7, mu) == (m <= 7 ? mu[m] : 0.0));
    }
    CHECK(exact_constrained_sum(3, 2, 7, mu) == 0.0);
    CHECK(exact_constrained_sum(3, 22, 7, mu) == 0.0);
}

TEST_CASE("dynamic programming equals inclusion-exclusion for l <= 6 and m <= 200") {
    const auto mu = weight_table(WeightKind::Mu, 200);
    const auto nu = weight_table(WeightKind::Nu, 200);
    double worst = 0.0;
    for (const WeightTable* w : {&mu, &nu}) {
        for (std::size_t a : {1u, 3u, 17u, 64u, 150u, 200u}) {
            for (std::size_t l = 0; l <= 6; ++l) {
                const auto row = constrained_sum_distribution(l, a, *w, 200);
                for (std::size_t m = 0; m <= 200; ++m) {
                    const double ie = inclusion_exclusion_sum(l, m, a, *w);
                    worst = std::max(worst, std::abs(row[m] - ie));
                    worst = std::max(worst, std::abs(exact_constrained_sum(l, m, a, *w) - ie));
                }
            }
        }
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("row-by-row and binary-power convolutions agree, including the FFT path") {
    const auto mu = weight_table(WeightKind::Mu, 3000);
    const auto rows = constrained_sum_rows(40, 1000, mu, 3000);
    double worst = 0.0;
    for (std::size_t l : {1u, 2u, 7u, 25u, 40u}) {
        const auto power = constrained_sum_distribution(l, 1000, mu, 3000);
        for (std::size_t m = 0; m <= 3000; ++m) worst = std::max(worst, std::abs(power[m] - rows[l][m]));
    }
    CHECK(worst <= 1e-13);
}

TEST_CASE("pair sums against direct enumeration") {
    const auto nu = weight_table(WeightKind::Nu, 100);
    for (std::size_t a : {3u, 10u}) {
        for (std::size_t y = 0; y <= 25; ++y) {
            double all = 0.0, distinct = 0.0;
            for (std::size_t i = 1; i <= a; ++i) {
                for (std::size_t j = 1; j <= a; ++j) {
                    if (i + j != y) continue;
                    all += nu[i] * nu[j];
                    if (i != j) distinct += nu[i] * nu[j];
                }
            }
            CHECK(pair_sum(y, a, nu) == doctest::Approx(all).epsilon(1e-14));
            CHECK(pair_sum(y, a, nu, true) == doctest::Approx(distinct).epsilon(1e-14));
        }
    }
}

TEST_CASE("plane skeleton law equals exhaustive frequencies for n <= 10") {
    double worst = 0.0, worst_total = 0.0;
    for (std::size_t n = 2; n <= 10; ++n) {
        for (std::int64_t a = 1; a < static_cast<std::int64_t>(n); ++a) {
            const SkeletonLaw law(Family::Plane, n, static_cast<std::size_t>(a));
            const auto freq = plane_frequencies(n, a);
            double total = 0.0;
            std::size_t seen = 0;
            for (const auto& sk : all_skeletons(n, a)) {
                const double p = law.probability(sk);
                const auto it = freq.find(sk);
                const double f = it == freq.end() ? 0.0 : it->second;
                if (it != freq.end()) ++seen;
                worst = std::max(worst, std::abs(p - f));
                total += p;
            }
            REQUIRE(seen == freq.size());
            worst_total = std::max(worst_total, std::abs(total - 1.0));
        }
    }
    CHECK(worst <= 1e-12);
    CHECK(worst_total <= 1e-12);
}

TEST_CASE("unordered skeleton law equals exhaustive frequencies of good classes for n <= 10") {
    double worst = 0.0, worst_total = 0.0;
    for (std::size_t n = 2; n <= 10; ++n) {
        for (std::int64_t a = 1; a < static_cast<std::int64_t>(n); ++a) {
            const SkeletonLaw law(Family::Unordered, n, static_cast<std::size_t>(a));
            const auto exhaustive = unordered_frequencies(n, a);
            double total = 0.0;
            std::size_t seen = 0;
            for (const auto& sk : all_skeletons(n, a)) {
                const double p = law.probability(sk);
                const auto it = exhaustive.freq.find(sk);
                const double f = it == exhaustive.freq.end() ? 0.0 : it->second;
                if (it != exhaustive.freq.end()) ++seen;
                worst = std::max(worst, std::abs(p - f));
                total += p;
            }
            REQUIRE(seen == exhaustive.freq.size());
            worst_total = std::max(worst_total, std::abs(total - exhaustive.good_fraction));
        }
    }
    CHECK(worst <= 1e-12);
    CHECK(worst_total <= 1e-12);
}

TEST_CASE("skeleton law input validation") {
    const SkeletonLaw law(Family::Plane, 10, 3);
    Skeleton sk;
    sk.shape = PlaneTree::leaf();
    sk.a = 3;
    sk.x = {2};
    sk.y = {5};
    CHECK(law.probability(sk) > 0.0);
    CHECK(exact_skeleton_law(10, 3, sk, Family::Plane) == law.probability(sk));
    sk.y = {7};
    CHECK(law.probability(sk) == 0.0);
    sk.y = {5, 5};
    CHECK_THROWS_AS(law.probability(sk), SizeMismatch);
    sk.y = {5};
    sk.a = 4;
    CHECK_THROWS_AS(law.probability(sk), InvalidInput);
    sk.a = 3;
    sk.x = {-1};
    CHECK_THROWS_AS(law.probability(sk), InvalidInput);
    CHECK_THROWS_AS(SkeletonLaw(Family::Plane, 10, 10), InvalidInput);
    CHECK_THROWS_AS(SkeletonLaw(Family::Plane, 1, 1), InvalidInput);

    const SkeletonLaw unordered(Family::Unordered, 10, 2);
    Skeleton cherry;
    cherry.shape = PlaneTree::parse("(oo)");
    cherry.a = 2;
    cherry.x = {0, 1, 1};
    cherry.y = {3, 3};
    CHECK(unordered.probability(cherry) == 0.0);
}

TEST_CASE("height distribution equals exhaustive frequencies for n <= 12") {
    for (std::size_t n = 1; n <= 12; ++n) {
        std::vector<double> plane(n, 0.0), unordered(n, 0.0);
        const auto trees = enumerate_plane(n);
        for (const auto& t : trees) plane[t.height()] += 1.0 / static_cast<double>(trees.size());
        const auto classes = enumerate_unordered(n);
        for (const auto& t : classes)
            unordered[t.representative().height()] += 1.0 / static_cast<double>(classes.size());
        for (auto [family, pmf] : {std::pair{Family::Plane, plane}, std::pair{Family::Unordered, unordered}}) {
            const auto cdf = height_cdf(family, n);
            double cumulative = 0.0;
            for (std::size_t h = 0; h < n; ++h) {
                cumulative += pmf[h];
                const double value = h < cdf.size() ? cdf[h] : 1.0;
                REQUIRE(std::abs(value - cumulative) <= 1e-12);
            }
        }
    }
}
