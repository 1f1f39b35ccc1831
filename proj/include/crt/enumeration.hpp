#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <string>
#include <vector>

namespace crt {

using BigInt = boost::multiprecision::cpp_int;
using HighFloat = boost::multiprecision::cpp_bin_float_50;

enum class Family { Plane, Unordered };

std::string to_string(Family family);
Family parse_family(const std::string& text);

// Number of plane trees with n leaves: C(2n-2, n-1) / n.
BigInt catalan_count(std::size_t n);

// Number of unordered binary trees with n leaves (Wedderburn-Etherington).
BigInt we_count(std::size_t n);

// Counts t_1..t_N for one family, extendable and cacheable on disk.
class CountTable {
public:
    CountTable(Family family, std::size_t max_n);

    Family family() const { return family_; }
    std::size_t max_n() const { return counts_.size() - 1; }
    const BigInt& count(std::size_t n) const;
    const BigInt& operator[](std::size_t n) const { return count(n); }

    void extend_to(std::size_t max_n);

    // Cache format: header "#family=plane|unordered", then "n<TAB>count" lines.
    void save(const std::string& path) const;
    static CountTable load(const std::string& path);
    // Loads the cache if present and large enough, otherwise builds and rewrites it.
    static CountTable cached(Family family, std::size_t max_n, const std::string& path);

private:
    Family family_;
    std::vector<BigInt> counts_;  // index 0 unused
};

struct Constants {
    HighFloat rho_high;        // rho carried at 50 digits
    double rho = 0.0;
    double precision = 0.0;    // certified bound on |T(rho) - 1|
    std::size_t truncation = 0;
};

// Value of the unordered generating function T(z) for 0 < z <= rho, computed
// from the series at z^2 (geometric tail) and the quadratic functional equation.
HighFloat unordered_gf(const HighFloat& z, std::size_t truncation);

Constants solve_rho(double target_precision);

struct ScaleConstant {
    double c = 0.0;
    double precision = 0.0;     // bound on the error of c
    double identity_gap = 0.0;  // |c^2 - (2 rho + 2 rho^2 T'(rho^2))| in double arithmetic
};

ScaleConstant compute_scale(const Constants& constants);
double compute_c(const Constants& constants);

// Constants at 1e-12, computed once per process.
const Constants& default_constants();
double default_c();

enum class WeightKind { Mu, Nu };

struct WeightTable {
    WeightKind kind = WeightKind::Mu;
    std::vector<double> weights;  // index 0 is 0; weights[n] for 1 <= n <= N
    double tail_mass = 0.0;
    double rho = 0.0;             // Nu only

    std::size_t max_n() const { return weights.size() - 1; }
    double operator[](std::size_t n) const { return weights[n]; }
};

WeightTable weight_table(WeightKind kind, std::size_t max_n, const Constants& constants);
WeightTable weight_table(WeightKind kind, std::size_t max_n);

}  // namespace crt
