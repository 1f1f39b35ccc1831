#pragma once

#include "crt/enumeration.hpp"
#include "crt/skeleton.hpp"

#include <cstddef>
#include <map>
#include <vector>

namespace crt {

// P(X_1 + ... + X_l = m, max X_i <= a) for i.i.d. X_i with law w.
double exact_constrained_sum(std::size_t l, std::size_t m, std::size_t a, const WeightTable& w);

// The same probability for every m in [0, m_max].
std::vector<double> constrained_sum_distribution(std::size_t l, std::size_t a, const WeightTable& w,
                                                 std::size_t m_max);

// Rows l = 0..l_max of constrained_sum_distribution, built by successive convolution.
std::vector<std::vector<double>> constrained_sum_rows(std::size_t l_max, std::size_t a, const WeightTable& w,
                                                      std::size_t m_max);

// Independent evaluator by inclusion-exclusion over which X_i exceed a.
double inclusion_exclusion_sum(std::size_t l, std::size_t m, std::size_t a, const WeightTable& w);

// P(X_1 + X_2 = y, X_1 v X_2 <= a), optionally also requiring X_1 != X_2.
double pair_sum(std::size_t y, std::size_t a, const WeightTable& w, bool distinct = false);

// Exact law of Sk_a under the uniform law on trees with n leaves. For the
// unordered family this is the probability of the good skeleton, and zero
// for skeletons that are not good.
class SkeletonLaw {
public:
    SkeletonLaw(Family family, std::size_t n, std::size_t a);

    Family family() const { return family_; }
    std::size_t n() const { return n_; }
    std::size_t a() const { return a_; }
    const WeightTable& weights() const { return weights_; }

    double probability(const Skeleton& sk) const;
    // Pair factor at one leaf and the constrained sum over the x-marks.
    double leaf_factor(std::size_t y) const;
    double mark_factor(std::size_t x_total, std::size_t y_total) const;

private:
    Family family_;
    std::size_t n_;
    std::size_t a_;
    WeightTable weights_;
    mutable std::vector<std::vector<double>> rows_;            // by number of summands, small n
    mutable std::map<std::size_t, std::vector<double>> sums_;  // by number of summands, large n
};

// cdf[h] = P(height <= h) under the uniform law on trees with n leaves,
// by convolution of the height-truncated size laws. Stops once the
// distribution function reaches 1 - 1e-12.
std::vector<double> height_cdf(Family family, std::size_t n);

double exact_skeleton_law(std::size_t n, std::size_t a, const Skeleton& sk, Family family);

}  // namespace crt
