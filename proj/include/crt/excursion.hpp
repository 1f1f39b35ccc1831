#pragma once

#include "crt/plane_tree.hpp"
#include "crt/rng.hpp"
#include "crt/skeleton.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace crt {

// Tolerance for equality of levels and lengths.
inline constexpr double kLevelTolerance = 1e-9;

// Piecewise-linear nonnegative function through (t[i], f[i]) with
// f[0] = f[m] = 0 and strictly increasing abscissas.
class Excursion {
public:
    Excursion() = default;
    static Excursion from_points(std::vector<double> t, std::vector<double> f);
    // Integer abscissas 0..len, heights of the contour.
    static Excursion from_contour(const ContourPath& path);

    const std::vector<double>& abscissas() const { return t_; }
    const std::vector<double>& values() const { return f_; }
    std::size_t breakpoints() const { return t_.size(); }
    double length() const { return t_.back(); }
    double max_value() const;
    double value(double s) const;

    // JSON object {"t": [...], "f": [...]}.
    std::string to_json() const;
    static Excursion from_json(const std::string& text);

private:
    std::vector<double> t_{0.0, 1.0};
    std::vector<double> f_{0.0, 0.0};
};

double pseudo_distance(const Excursion& f, double s, double u);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
};

// Components of {f > level}, left to right.
std::vector<Interval> components_above(const Excursion& f, double level);

enum class ExcursionClass { InEaStar, InEa, Neither };
std::string to_string(ExcursionClass c);

// No two equal local minima without a strictly lower point between them.
bool has_binary_branching(const Excursion& f);
// Lengths at which the fragmentation changes non-continuously: the total
// length, and at every split the parent length and the two child lengths.
std::vector<double> critical_lengths(const Excursion& f);
ExcursionClass in_class(const Excursion& f, double a);

struct FirstBranch {
    bool branch = false;
    // branch == true
    double s_a = 0.0;
    Excursion left, right;
    // branch == false
    double t_a = 0.0;
    double mass = 0.0;  // Y_a
};

// Requires length > a and binary branching (NotInClass otherwise).
FirstBranch first_branch(const Excursion& f, double a);

// a-real skeleton: internal marks s_a, leaf marks t_a, leaf masses Y_a.
RealSkeleton zeta(const Excursion& f, double a);

// Exact Hausdorff distance between the tree coded by f and its
// a-trimming {x : mass(x) >= a}, and the modulus of continuity at a.
struct TrimBound {
    double hausdorff = 0.0;
    double omega = 0.0;
};
TrimBound trim_bound_check(const Excursion& f, double a);
double trimmed_hausdorff(const Excursion& f, double a);
double modulus_of_continuity(const Excursion& f, double a);

double tree_height(const Excursion& f);
double tree_diameter(const Excursion& f);

// Contour of a uniform plane tree with m leaves, abscissas scaled to
// [0, 1] and heights divided by sqrt(2m).
Excursion brownian_excursion_approx(std::size_t m, Rng& rng);
Excursion scaled_contour(const PlaneTree& t);

}  // namespace crt
