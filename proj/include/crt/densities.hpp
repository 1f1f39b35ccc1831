#pragma once

#include "crt/plane_tree.hpp"
#include "crt/skeleton.hpp"

#include <cstddef>
#include <vector>

namespace crt {

// Density of the hitting time of 1/sqrt(2) by standard Brownian motion.
double g_density(double x);

// Density on (eps, 2 eps] of the pair-mass limit, closed form.
double b_density(double y, double epsilon);

// (2 sqrt(pi) x^{3/2})^{-1} on [eps, inf), zero below.
double a1_density(double x, double epsilon);

// Tables of the k-fold convolutions a_k of a_1 on [0, 1 + h], built by
// product integration against the exact x^{-3/2} kernel.
class DensityContext {
public:
    // h must divide epsilon; k_max at most floor(1/epsilon) + 1.
    DensityContext(double epsilon, std::size_t k_max, double h, double scale_c);
    static DensityContext build(double epsilon, double h = 1e-4);

    double epsilon() const { return epsilon_; }
    double step() const { return h_; }
    std::size_t k_max() const { return tables_.size(); }
    double c() const { return c_; }

    // a_k(x) for 1 <= k <= k_max; a_1 is exact, higher orders interpolate the table.
    double a(std::size_t k, double x) const;
    const std::vector<double>& table(std::size_t k) const { return tables_.at(k - 1); }
    double grid_point(std::size_t i) const { return static_cast<double>(i) * h_; }

private:
    double epsilon_;
    double h_;
    double c_;
    std::size_t cells_per_epsilon_;
    std::vector<std::vector<double>> tables_;  // tables_[k-1][i] = a_k(i h)
};

// Limit of n P(X_1 + ... + X_l = m, max X_i <= eps n) at l = x sqrt(n), m = z n:
//   sum_k (-s x)^{k-2} / k! int a_k(u) g((z - u) / (s x)^2) du,
// where the k = 0 term is (s x)^{-2} g(z / (s x)^2) and s is the length scale
// (1 for plane trees, c for unordered trees).
double constrained_sum_limit(double x, double z, const DensityContext& ctx, double scale = 1.0);

using PsiInput = RealSkeleton;

// Limit density of the rescaled skeleton under the uniform plane law.
double psi(const PsiInput& input, const DensityContext& ctx);
// Limit density under the uniform unordered law restricted to good skeletons.
double psi_circ(const PsiInput& input, const DensityContext& ctx);

// True when x_{u1} > x_{u2} at every internal vertex of the shape.
bool in_ordered_cone(const PsiInput& input);

// Integral of psi over all (x, y) for one shape with the given number of
// leaves, with the x-integral done in closed form through |x|.
double psi_shape_mass(std::size_t shape_leaves, const DensityContext& ctx);
// Integral of |x|^power psi over all (x, y) for one shape.
double psi_shape_moment(std::size_t shape_leaves, double power, const DensityContext& ctx);
// Sum over all plane shapes of psi_shape_mass.
double psi_total_mass(const DensityContext& ctx);
// Same total for the ordered-cone density, by quadrature of psi_circ itself.
double psi_circ_total_mass(const DensityContext& ctx);

// Closed form of a_2: (x - 2 eps) / (pi x^2 sqrt(eps (x - eps))) above 2 eps.
double a2_closed_form(double x, double epsilon);

}  // namespace crt
