#pragma once

#include "crt/enumeration.hpp"
#include "crt/plane_tree.hpp"
#include "crt/rng.hpp"
#include "crt/skeleton.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace crt {

// Total order on canonical codes: shorter first, then lexicographic.
bool code_less(std::string_view lhs, std::string_view rhs);

// Class of plane trees under child swaps, stored as its canonical
// representative: at every internal vertex the left child's code is not
// smaller than the right child's.
class UnorderedTree {
public:
    UnorderedTree() = default;

    static UnorderedTree canonicalize(const PlaneTree& t);
    static UnorderedTree parse(std::string_view text);

    const PlaneTree& representative() const { return rep_; }
    const std::string& code() const { return code_; }
    std::size_t leaf_count() const { return rep_.leaf_count(); }

    bool operator==(const UnorderedTree& other) const { return code_ == other.code_; }
    bool operator!=(const UnorderedTree& other) const { return code_ != other.code_; }
    bool operator<(const UnorderedTree& other) const { return code_less(code_, other.code_); }

private:
    PlaneTree rep_;
    std::string code_ = "o";
};

UnorderedTree canonicalize(const PlaneTree& t);
std::string canonical_code(const PlaneTree& t);
bool equivalent(const PlaneTree& lhs, const PlaneTree& rhs);

// All classes with n leaves (n <= 15), sorted by code.
std::vector<UnorderedTree> enumerate_unordered(std::size_t n);

// Uniform sampler on classes with n leaves. Split probabilities come from
// normalized counts w_k = t_k r^k for any r > 0; the factor r^n cancels.
class UnorderedSampler {
public:
    // Weights from the exact count table.
    explicit UnorderedSampler(const CountTable& counts);
    // Weights from the size law of the unordered family, up to max_n.
    static UnorderedSampler with_max_size(std::size_t max_n);

    std::size_t max_n() const { return weights_.size() - 1; }

    // Preorder flags of some representative of a uniform class.
    void sample_preorder(std::size_t n, Rng& rng, std::vector<std::uint8_t>& out) const;
    PlaneTree sample_representative(std::size_t n, Rng& rng) const;
    UnorderedTree sample(std::size_t n, Rng& rng) const;

    // Probability of the split {n - small, small}, small <= n / 2.
    double split_probability(std::size_t n, std::size_t small) const;

private:
    UnorderedSampler(std::vector<double> weights, double ratio);
    std::size_t draw_split(std::size_t n, Rng& rng) const;
    void sample_into(std::size_t n, Rng& rng, std::vector<std::uint8_t>& out) const;

    std::vector<double> weights_;  // w_k, index 0 unused
    std::vector<double> ratio_powers_;  // r^k
};

UnorderedTree sample_unordered_uniform(std::size_t n, Rng& rng, const CountTable& counts);

struct GoodnessReport {
    bool marks_distinct = false;
    bool forest_sizes_distinct = false;
    bool good() const { return marks_distinct && forest_sizes_distinct; }
};

// Evaluated on any representative; the result only depends on the class.
GoodnessReport goodness(const PlaneTree& t, std::int64_t a);
bool is_a_good(const PlaneTree& t, std::int64_t a);
bool is_a_good(const UnorderedTree& t, std::int64_t a);

// Skeleton of an a-good class, with x strictly decreasing from the first to
// the second child at every branch.
Skeleton skeleton_unordered(const PlaneTree& t, std::int64_t a);
Skeleton skeleton_unordered(const UnorderedTree& t, std::int64_t a);

// True when the skeleton has pairwise distinct marks, decreasing at branches.
bool is_good_skeleton(const Skeleton& sk);

struct UnorderedForest {
    UnorderedTree larger;
    UnorderedTree smaller;
};

struct UnorderedDecomposition {
    Skeleton skeleton;
    std::vector<UnorderedTree> subtrees;  // at the slots of the fixed fiber element, preorder
    std::vector<UnorderedForest> forests;  // per skeleton leaf, leaf order
};

UnorderedDecomposition decompose_unordered(const PlaneTree& t, std::int64_t a);
UnorderedTree reconstruct_unordered(const Skeleton& sk, const std::vector<UnorderedTree>& subtrees,
                                    const std::vector<UnorderedForest>& forests);

using Rational = boost::multiprecision::cpp_rational;

// Mean height under the uniform law, by enumeration (n <= 12).
Rational exact_mean_height(std::size_t n, Family family);

}  // namespace crt
