#include "crt/enumeration.hpp"
#include "crt/errors.hpp"
#include "crt/plane_tree.hpp"
#include "crt/rng.hpp"
#include "crt/skeleton.hpp"
#include "crt/unordered_tree.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

using namespace crt;

namespace {

using Vertex = PlaneTree::Vertex;

// All plane trees obtained by swapping children at any set of internal vertices.
std::set<std::string> orbit(const PlaneTree& t, Vertex v) {
    if (t.is_leaf(v)) return {"o"};
    const auto left = orbit(t, t.left(v));
    const auto right = orbit(t, t.right(v));
    std::set<std::string> out;
    for (const auto& l : left) {
        for (const auto& r : right) {
            out.insert("(" + l + r + ")");
            out.insert("(" + r + l + ")");
        }
    }
    return out;
}

bool has_equivalent_siblings(const PlaneTree& t) {
    for (Vertex v = 0; v < t.vertex_count(); ++v) {
        if (!t.is_leaf(v) && equivalent(t.subtree(t.left(v)), t.subtree(t.right(v)))) return true;
    }
    return false;
}

// Marked trees written as nested text, swapped at any set of internal vertices.
std::set<std::string> marked_orbit(const PlaneTree& shape, const std::vector<std::int64_t>& marks, Vertex v) {
    const std::string mark = std::to_string(marks[v]);
    if (shape.is_leaf(v)) return {mark};
    const auto left = marked_orbit(shape, marks, shape.left(v));
    const auto right = marked_orbit(shape, marks, shape.right(v));
    std::set<std::string> out;
    for (const auto& l : left) {
        for (const auto& r : right) {
            out.insert(mark + "(" + l + "," + r + ")");
            out.insert(mark + "(" + r + "," + l + ")");
        }
    }
    return out;
}

// Number of sequences of k unordered trees with at most a leaves each and m leaves in total.
BigInt bounded_sequences(std::size_t k, std::size_t m, std::size_t a) {
    std::vector<BigInt> row(m + 1, 0);
    row[0] = 1;
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<BigInt> next(m + 1, 0);
        for (std::size_t s = 0; s <= m; ++s) {
            if (row[s] == 0) continue;
            for (std::size_t l = 1; l <= a && s + l <= m; ++l) next[s + l] += row[s] * we_count(l);
        }
        row = std::move(next);
    }
    return row[m];
}

BigInt ordered_forests(std::size_t y, std::size_t a) {
    BigInt total = 0;
    for (std::size_t big = 1; big < y; ++big) {
        const std::size_t little = y - big;
        if (big <= a && big > little) total += we_count(big) * we_count(little);
    }
    return total;
}

double chi_square(const std::map<std::string, std::size_t>& freq, const std::vector<UnorderedTree>& support,
                  std::size_t draws) {
    const double expected = static_cast<double>(draws) / static_cast<double>(support.size());
    double stat = 0.0;
    for (const auto& t : support) {
        const auto it = freq.find(t.code());
        const double observed = it == freq.end() ? 0.0 : static_cast<double>(it->second);
        stat += (observed - expected) * (observed - expected) / expected;
    }
    return stat;
}

}  // namespace

TEST_CASE("two plane trees equal as unordered trees share a code") {
    const PlaneTree t = PlaneTree::parse("(((oo)o)(oo))");
    const PlaneTree u = PlaneTree::parse("((oo)(o(oo)))");
    CHECK(canonical_code(t) == canonical_code(u));
    CHECK(equivalent(t, u));
    CHECK_FALSE(equivalent(t, PlaneTree::parse("((((oo)o)o)o)")));
    CHECK(UnorderedTree::parse("(o(oo))") == UnorderedTree::parse("((oo)o)"));
}

TEST_CASE("canonical form is idempotent and ordered") {
    Rng rng(2, 0);
    for (int i = 0; i < 200; ++i) {
        const PlaneTree t = sample_plane_uniform(1 + rng.below(40), rng);
        const UnorderedTree c = canonicalize(t);
        CHECK(canonicalize(c.representative()) == c);
        CHECK(c.representative().to_string() == c.code());
        const PlaneTree& r = c.representative();
        for (Vertex v = 0; v < r.vertex_count(); ++v) {
            if (r.is_leaf(v)) continue;
            const std::string l = r.subtree(r.left(v)).to_string();
            const std::string rr = r.subtree(r.right(v)).to_string();
            REQUIRE_FALSE(code_less(l, rr));
        }
    }
}

TEST_CASE("orbits under child swaps up to eight leaves") {
    for (std::size_t n = 1; n <= 8; ++n) {
        for (const PlaneTree& t : enumerate_plane(n)) {
            const auto members = orbit(t, t.root());
            const std::size_t bound = std::size_t{1} << (n - 1);
            REQUIRE(members.size() <= bound);
            REQUIRE((members.size() == bound) == !has_equivalent_siblings(t));
            const std::string code = canonical_code(t);
            for (const auto& m : members) REQUIRE(canonical_code(PlaneTree::parse(m)) == code);
            std::size_t same_class = 0;
            for (const PlaneTree& other : enumerate_plane(n)) same_class += equivalent(t, other) ? 1 : 0;
            REQUIRE(same_class == members.size());
        }
    }
}

TEST_CASE("marked trees with distinct marks have no symmetries") {
    for (std::size_t n = 1; n <= 7; ++n) {
        for (const PlaneTree& shape : enumerate_plane(n)) {
            std::vector<std::int64_t> marks(shape.vertex_count());
            for (std::size_t i = 0; i < marks.size(); ++i) marks[i] = static_cast<std::int64_t>(3 * i + 1);
            REQUIRE(marked_orbit(shape, marks, shape.root()).size() == (std::size_t{1} << (n - 1)));
        }
    }
}

TEST_CASE("unordered enumeration") {
    CHECK(enumerate_unordered(4).size() == 2);
    const auto two = enumerate_unordered(2);
    REQUIRE(two.size() == 1);
    CHECK(two.front().code() == "(oo)");
    for (std::size_t n = 1; n <= 13; ++n) {
        const auto all = enumerate_unordered(n);
        REQUIRE(BigInt(all.size()) == we_count(n));
        REQUIRE(std::is_sorted(all.begin(), all.end()));
        REQUIRE(std::adjacent_find(all.begin(), all.end()) == all.end());
        for (const auto& t : all) REQUIRE(canonicalize(t.representative()) == t);
    }
    std::set<std::string> from_plane;
    for (const PlaneTree& t : enumerate_plane(10)) from_plane.insert(canonical_code(t));
    CHECK(BigInt(from_plane.size()) == we_count(10));
    CHECK_THROWS_AS(enumerate_unordered(16), CapExceeded);
}

TEST_CASE("uniform unordered sampler") {
    const CountTable counts(Family::Unordered, 20);
    Rng rng(4, 0);
    CHECK(sample_unordered_uniform(1, rng, counts).code() == "o");
    const std::size_t draws = 100000;

    std::map<std::string, std::size_t> four;
    for (std::size_t i = 0; i < draws; ++i) ++four[sample_unordered_uniform(4, rng, counts).code()];
    const double sigma = std::sqrt(0.25 / static_cast<double>(draws));
    for (const auto& t : enumerate_unordered(4)) {
        CHECK(std::abs(static_cast<double>(four[t.code()]) / static_cast<double>(draws) - 0.5) <= 4 * sigma);
    }

    // 99.9% quantile of chi-square with 5 degrees of freedom
    std::map<std::string, std::size_t> six;
    for (std::size_t i = 0; i < draws; ++i) ++six[sample_unordered_uniform(6, rng, counts).code()];
    CHECK(six.size() == 6);
    CHECK(chi_square(six, enumerate_unordered(6), draws) < 20.515);

    const UnorderedSampler sampler = UnorderedSampler::with_max_size(20);
    std::map<std::string, std::size_t> seven;
    for (std::size_t i = 0; i < draws; ++i) ++seven[sampler.sample(7, rng).code()];
    // 99.9% quantile of chi-square with 10 degrees of freedom
    CHECK(chi_square(seven, enumerate_unordered(7), draws) < 29.588);
}

TEST_CASE("root split frequencies of the unordered sampler at twelve leaves") {
    const CountTable counts(Family::Unordered, 12);
    Rng rng(6, 0);
    const std::size_t draws = 100000;
    std::map<std::size_t, std::size_t> freq;
    for (std::size_t i = 0; i < draws; ++i) {
        const PlaneTree t = sample_unordered_uniform(12, rng, counts).representative();
        ++freq[std::min(t.leaves(t.left(0)), t.leaves(t.right(0)))];
    }
    const double total = static_cast<double>(counts[12]);
    for (std::size_t small = 1; small <= 6; ++small) {
        const std::size_t big = 12 - small;
        const double ways = small == big ? static_cast<double>(counts[small] * (counts[small] + 1) / 2)
                                         : static_cast<double>(counts[small] * counts[big]);
        const double p = ways / total;
        const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(draws));
        CHECK(std::abs(static_cast<double>(freq[small]) / static_cast<double>(draws) - p) <= 4 * sigma);
    }
}

TEST_CASE("goodness") {
    // I0 vertex of the trimmed tree with equal child sizes
    CHECK_FALSE(is_a_good(PlaneTree::parse("(((oo)(oo))o)"), 3));
    const GoodnessReport r = goodness(PlaneTree::parse("(((oo)(oo))o)"), 3);
    CHECK(r.marks_distinct);
    CHECK_FALSE(r.forest_sizes_distinct);
    // single-vertex skeletons never collide in their marks
    Rng rng(8, 0);
    for (int i = 0; i < 300; ++i) {
        const PlaneTree t = sample_plane_uniform(30, rng);
        if (skeleton_plane(t, 12).shape.leaf_count() == 1) CHECK(goodness(t, 12).marks_distinct);
    }
    CHECK_THROWS_AS(is_a_good(PlaneTree::parse("(oo)"), 2), InvalidInput);
}

TEST_CASE("most large unordered trees are good") {
    const UnorderedSampler sampler = UnorderedSampler::with_max_size(2000);
    Rng rng(10, 0);
    std::size_t good = 0;
    const std::size_t draws = 2000;
    for (std::size_t i = 0; i < draws; ++i) good += is_a_good(sampler.sample_representative(2000, rng), 600) ? 1 : 0;
    CHECK(static_cast<double>(good) / static_cast<double>(draws) >= 0.9);
}

TEST_CASE("unordered skeleton is a class invariant up to ten leaves") {
    for (std::size_t n = 3; n <= 10; ++n) {
        for (const PlaneTree& t : enumerate_plane(n)) {
            const PlaneTree canon = canonicalize(t).representative();
            for (std::int64_t a = 2; a < static_cast<std::int64_t>(n); ++a) {
                const bool good = is_a_good(t, a);
                REQUIRE(good == is_a_good(canon, a));
                if (!good) {
                    REQUIRE_THROWS_AS(skeleton_unordered(t, a), NotAGood);
                    continue;
                }
                const Skeleton sk = skeleton_unordered(t, a);
                REQUIRE(sk == skeleton_unordered(canon, a));
                REQUIRE(is_good_skeleton(sk));
                std::set<std::int64_t> marks(sk.x.begin(), sk.x.end());
                REQUIRE(marks.size() == sk.x.size());
                for (Vertex u = 0; u < sk.shape.vertex_count(); ++u) {
                    if (!sk.shape.is_leaf(u)) REQUIRE(sk.x[sk.shape.left(u)] > sk.x[sk.shape.right(u)]);
                }
                for (auto y : sk.y) REQUIRE((y > a && y <= 2 * a));
            }
        }
    }
}

TEST_CASE("unordered decomposition round trip and data counts up to ten leaves") {
    for (std::size_t n = 3; n <= 10; ++n) {
        const auto trees = enumerate_unordered(n);
        for (std::size_t a = 2; a < n; ++a) {
            std::set<Skeleton> skeletons;
            std::size_t good = 0;
            for (const UnorderedTree& t : trees) {
                if (!is_a_good(t, static_cast<std::int64_t>(a))) continue;
                ++good;
                const UnorderedDecomposition d = decompose_unordered(t.representative(), static_cast<std::int64_t>(a));
                REQUIRE(reconstruct_unordered(d.skeleton, d.subtrees, d.forests) == t);
                skeletons.insert(d.skeleton);
            }
            BigInt total = 0;
            for (const Skeleton& sk : skeletons) {
                BigInt count = bounded_sequences(static_cast<std::size_t>(sk.total_x()),
                                                 n - static_cast<std::size_t>(sk.total_y()), a);
                for (auto y : sk.y) count *= ordered_forests(static_cast<std::size_t>(y), a);
                total += count;
            }
            REQUIRE(total == good);
        }
    }
}

TEST_CASE("unordered reconstruction rejects inconsistent data") {
    const PlaneTree t = PlaneTree::parse("((((oo)o)o)(oo))");
    REQUIRE(is_a_good(t, 3));
    const UnorderedDecomposition d = decompose_unordered(t, 3);
    REQUIRE(reconstruct_unordered(d.skeleton, d.subtrees, d.forests) == canonicalize(t));

    auto swapped = d.forests;
    std::swap(swapped.front().larger, swapped.front().smaller);
    CHECK_THROWS_AS(reconstruct_unordered(d.skeleton, d.subtrees, swapped), OrderViolation);

    auto equal = d.forests;
    equal.front().smaller = equal.front().larger;
    CHECK_THROWS_AS(reconstruct_unordered(d.skeleton, d.subtrees, equal), OrderViolation);

    auto fewer = d.subtrees;
    fewer.push_back(UnorderedTree::parse("o"));
    CHECK_THROWS_AS(reconstruct_unordered(d.skeleton, fewer, d.forests), SizeMismatch);
}

TEST_CASE("exact mean heights") {
    CHECK(exact_mean_height(4, Family::Plane) == Rational(14, 5));
    CHECK(exact_mean_height(4, Family::Unordered) == Rational(5, 2));
    CHECK(exact_mean_height(1, Family::Plane) == 0);
    CHECK(exact_mean_height(1, Family::Unordered) == 0);
    CHECK(exact_mean_height(2, Family::Plane) == 1);
    for (std::size_t n = 2; n <= 9; ++n) {
        Rational sum = 0;
        const auto plane = enumerate_plane(n);
        for (const auto& t : plane) sum += t.height();
        CHECK(exact_mean_height(n, Family::Plane) == sum / static_cast<long>(plane.size()));
        Rational usum = 0;
        const auto unordered = enumerate_unordered(n);
        for (const auto& t : unordered) usum += t.representative().height();
        CHECK(exact_mean_height(n, Family::Unordered) == usum / static_cast<long>(unordered.size()));
    }
    CHECK_THROWS_AS(exact_mean_height(13, Family::Plane), CapExceeded);
}
