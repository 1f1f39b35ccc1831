#include "crt/densities.hpp"

#include "crt/enumeration.hpp"
#include "crt/errors.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>
#include <limits>

namespace crt {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();
const double kSqrtPi = std::sqrt(kPi);

// Adaptive Gauss-Kronrod on a finite or semi-infinite interval.
double integrate(const std::function<double(double)>& f, double lo, double hi, double tolerance = 1e-10,
                 unsigned depth = 15) {
    if (!(hi > lo)) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, depth, tolerance);
}

// g extended by zero to w <= 0.
double g_or_zero(double w) { return w > 0.0 ? g_density(w) : 0.0; }

std::size_t max_shape_leaves(double epsilon) {
    return static_cast<std::size_t>(std::floor(1.0 / epsilon + 1e-9));
}

std::size_t max_terms(double z, double epsilon) {
    return static_cast<std::size_t>(std::floor(z / epsilon + 1e-12));
}

double factorial(std::size_t k) { return std::tgamma(static_cast<double>(k) + 1.0); }

}  // namespace

double g_density(double x) {
    if (!(x > 0.0)) throw OutOfDomain("g_density: x must be positive");
    return std::exp(-1.0 / (4.0 * x)) / (2.0 * kSqrtPi * x * std::sqrt(x));
}

double b_density(double y, double epsilon) {
    if (!(y > epsilon && y <= 2.0 * epsilon)) throw OutOfDomain("b_density: y must lie in (eps, 2 eps]");
    return (2.0 * epsilon - y) / (kPi * y * y * std::sqrt(epsilon * (y - epsilon)));
}

double a1_density(double x, double epsilon) {
    if (x < epsilon) return 0.0;
    return 1.0 / (2.0 * kSqrtPi * x * std::sqrt(x));
}

double a2_closed_form(double x, double epsilon) {
    if (x <= 2.0 * epsilon) return 0.0;
    return (x - 2.0 * epsilon) / (kPi * x * x * std::sqrt(epsilon * (x - epsilon)));
}

DensityContext::DensityContext(double epsilon, std::size_t k_max, double h, double scale_c)
    : epsilon_(epsilon), h_(h), c_(scale_c) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidInput("density context: epsilon must lie in (0, 1)");
    if (!(h > 0.0 && h < epsilon)) throw InvalidInput("density context: grid step must lie in (0, epsilon)");
    const double ratio = epsilon / h;
    cells_per_epsilon_ = static_cast<std::size_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(cells_per_epsilon_)) > 1e-6)
        throw InvalidInput("density context: grid step must divide epsilon");
    if (k_max < 1 || k_max > max_shape_leaves(epsilon) + 1)
        throw InvalidInput("density context: k_max must lie in [1, floor(1/eps) + 1]");

    const std::size_t points = static_cast<std::size_t>(std::llround((1.0 + h) / h)) + 1;
    const std::size_t first = cells_per_epsilon_;

    // Product-integration weights of u^{-3/2} against the two hat functions of cell j.
    std::vector<double> w_lo(points, 0.0), w_hi(points, 0.0);
    for (std::size_t j = first; j + 1 < points; ++j) {
        const double u0 = grid_point(j), u1 = grid_point(j + 1);
        const double p = 2.0 * (1.0 / std::sqrt(u0) - 1.0 / std::sqrt(u1));
        const double q = 2.0 * (std::sqrt(u1) - std::sqrt(u0));
        w_hi[j] = (q - u0 * p) / h;
        w_lo[j] = p - w_hi[j];
    }

    tables_.assign(k_max, std::vector<double>(points, 0.0));
    for (std::size_t i = first; i < points; ++i) tables_[0][i] = a1_density(grid_point(i), 0.0);
    const double norm = 1.0 / (2.0 * kSqrtPi);
    for (std::size_t k = 2; k <= k_max; ++k) {
        const auto& prev = tables_[k - 2];
        auto& cur = tables_[k - 1];
        const std::size_t prev_start = (k - 1) * first;
        for (std::size_t n = k * first; n < points; ++n) {
            double acc = 0.0;
            for (std::size_t j = first; j + prev_start < n; ++j)
                acc += w_lo[j] * prev[n - j] + w_hi[j] * prev[n - j - 1];
            cur[n] = norm * acc;
        }
    }
}

DensityContext DensityContext::build(double epsilon, double h) {
    return DensityContext(epsilon, max_shape_leaves(epsilon), h, default_c());
}

double DensityContext::a(std::size_t k, double x) const {
    if (k < 1 || k > tables_.size()) throw InvalidInput("density context: order k out of range");
    if (k == 1) return a1_density(x, epsilon_);
    if (x <= static_cast<double>(k) * epsilon_) return 0.0;
    const auto& table = tables_[k - 1];
    const double pos = x / h_;
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= table.size()) throw OutOfDomain("density context: argument beyond the tabulated range");
    const double frac = pos - static_cast<double>(i);
    return (1.0 - frac) * table[i] + frac * table[i + 1];
}

double constrained_sum_limit(double x, double z, const DensityContext& ctx, double scale) {
    const double len = scale * x;
    if (!(len > 0.0)) throw OutOfDomain("constrained_sum_limit: x must be positive");
    if (!(z > 0.0)) return 0.0;
    const double len2 = len * len;
    const std::size_t terms = max_terms(z, ctx.epsilon());
    if (terms > ctx.k_max()) throw InvalidInput("constrained_sum_limit: density context has too few orders");
    double total = g_density(z / len2) / len2;
    for (std::size_t k = 1; k <= terms; ++k) {
        const double lo = static_cast<double>(k) * ctx.epsilon();
        const double integral =
            integrate([&](double u) { return g_or_zero((z - u) / len2) * ctx.a(k, u); }, lo, z, 1e-9, 10);
        total += std::pow(-len, static_cast<double>(k) - 2.0) / factorial(k) * integral;
    }
    return total;
}

namespace {

void check_sizes(const PsiInput& input) {
    if (input.x.size() != input.shape.vertex_count() || input.y.size() != input.shape.leaf_count())
        throw SizeMismatch("psi: one x per shape vertex and one y per leaf required");
}

double psi_with_scale(const PsiInput& input, const DensityContext& ctx, double scale) {
    check_sizes(input);
    const std::size_t leaves = input.shape.leaf_count();
    if (leaves > max_shape_leaves(ctx.epsilon())) return 0.0;
    double x_total = 0.0;
    for (double v : input.x) {
        if (!(v > 0.0)) return 0.0;
        x_total += v;
    }
    double y_total = 0.0, leaf_product = 1.0;
    for (double v : input.y) {
        if (!(v > ctx.epsilon() && v <= 2.0 * ctx.epsilon())) return 0.0;
        y_total += v;
        leaf_product *= b_density(v, ctx.epsilon());
    }
    const double z = 1.0 - y_total;
    if (!(z > 0.0)) return 0.0;
    const double prefactor = kSqrtPi / std::ldexp(1.0, static_cast<int>(2 * leaves) - 2);
    return prefactor * constrained_sum_limit(x_total, z, ctx, scale) * leaf_product;
}

}  // namespace

double psi(const PsiInput& input, const DensityContext& ctx) { return psi_with_scale(input, ctx, 1.0); }

bool in_ordered_cone(const PsiInput& input) {
    check_sizes(input);
    for (PlaneTree::Vertex v = 0; v < input.shape.vertex_count(); ++v) {
        if (input.shape.is_leaf(v)) continue;
        if (!(input.x[input.shape.left(v)] > input.x[input.shape.right(v)])) return false;
    }
    return true;
}

double psi_circ(const PsiInput& input, const DensityContext& ctx) {
    if (!in_ordered_cone(input)) return 0.0;
    const auto leaves = static_cast<int>(input.shape.leaf_count());
    const double c = ctx.c();
    // psi(c x, y) equals the psi formula at x with length scale c.
    return std::ldexp(1.0, leaves - 1) * std::pow(c, 2 * leaves - 1) * psi_with_scale(input, ctx, c);
}

namespace {

// Integral over y in (eps, 2 eps]^leaves with |y| < 1 of prod b(y_v) F(1 - |y|).
// Substituting y = eps + s^2 removes the inverse square-root edge of b.
double leaf_integral(std::size_t leaves, double remaining, double epsilon, const std::function<double(double)>& tail,
                     double tolerance) {
    if (leaves == 0) return remaining > 0.0 ? tail(remaining) : 0.0;
    const double hi = std::min(2.0 * epsilon, remaining - static_cast<double>(leaves - 1) * epsilon);
    if (!(hi > epsilon)) return 0.0;
    const auto integrand = [&](double s) {
        const double y = epsilon + s * s;
        const double b_jacobian = 2.0 * (2.0 * epsilon - y) / (kPi * y * y * std::sqrt(epsilon));
        return b_jacobian * leaf_integral(leaves - 1, remaining - y, epsilon, tail, tolerance);
    };
    return integrate(integrand, 0.0, std::sqrt(hi - epsilon), tolerance, 10);
}

}  // namespace

double psi_shape_mass(std::size_t shape_leaves, const DensityContext& ctx) {
    return psi_shape_moment(shape_leaves, 0.0, ctx);
}

double psi_shape_moment(std::size_t shape_leaves, double power, const DensityContext& ctx) {
    if (shape_leaves < 1) throw InvalidInput("psi_shape_moment: shapes have at least one leaf");
    const double eps = ctx.epsilon();
    if (shape_leaves > max_shape_leaves(eps)) return 0.0;
    const auto vertices = static_cast<double>(2 * shape_leaves - 1);

    // int_0^inf r^{V+k-3+power} g(w / r^2) dr in closed form.
    const auto radial = [&](std::size_t k, double w) {
        const double p = (vertices + static_cast<double>(k) + power + 1.0) / 2.0;
        return std::pow(4.0 * w, p) * std::tgamma(p) / (4.0 * kSqrtPi * w * std::sqrt(w));
    };
    const auto tail = [&](double z) {
        double total = radial(0, z);
        const std::size_t terms = max_terms(z, eps);
        for (std::size_t k = 1; k <= terms; ++k) {
            const double lo = static_cast<double>(k) * eps;
            const double integral =
                integrate([&](double u) { return u < z ? radial(k, z - u) * ctx.a(k, u) : 0.0; }, lo, z, 1e-9, 10);
            total += (k % 2 == 0 ? 1.0 : -1.0) / factorial(k) * integral;
        }
        return total;
    };
    const double prefactor =
        kSqrtPi / std::ldexp(1.0, static_cast<int>(2 * shape_leaves) - 2) / std::tgamma(vertices);
    return prefactor * leaf_integral(shape_leaves, 1.0, eps, tail, 1e-8);
}

double psi_total_mass(const DensityContext& ctx) {
    double total = 0.0;
    for (std::size_t leaves = 1; leaves <= max_shape_leaves(ctx.epsilon()); ++leaves)
        total += catalan_count(leaves).convert_to<double>() * psi_shape_mass(leaves, ctx);
    return total;
}

double psi_circ_total_mass(const DensityContext& ctx) {
    const double eps = ctx.epsilon();
    double total = 0.0;
    for (std::size_t leaves = 1; leaves <= max_shape_leaves(eps); ++leaves) {
        for (const PlaneTree& shape : enumerate_plane(leaves)) {
            // psi_circ depends on x only through |x| inside the cone, which
            // fills 2^{-(internal vertices)} of each simplex slice.
            PsiInput input{shape, std::vector<double>(shape.vertex_count(), 1.0), std::vector<double>(leaves)};
            for (PlaneTree::Vertex v = 0; v < shape.vertex_count(); ++v)
                if (!shape.is_leaf(v)) input.x[shape.left(v)] = 2.0;
            double norm = 0.0;
            for (double v : input.x) norm += v;
            std::vector<double> direction = input.x;
            for (double& v : direction) v /= norm;
            const std::size_t dim = shape.vertex_count();
            const double cone_fraction = std::ldexp(1.0, -static_cast<int>(leaves - 1));
            const double simplex_factor = cone_fraction / std::tgamma(static_cast<double>(dim));

            // Integrate over y first by recursion, then over the radius.
            std::function<double(std::size_t, double)> over_y = [&](std::size_t index, double remaining) -> double {
                if (index == leaves) {
                    const auto radial = [&](double r) {
                        if (!(r > 0.0)) return 0.0;
                        for (std::size_t u = 0; u < dim; ++u) input.x[u] = r * direction[u];
                        return std::pow(r, static_cast<double>(dim) - 1.0) * psi_circ(input, ctx);
                    };
                    return integrate(radial, 0.0, std::numeric_limits<double>::infinity(), 1e-6, 8);
                }
                const double hi = std::min(2.0 * eps, remaining - static_cast<double>(leaves - index - 1) * eps);
                if (!(hi > eps)) return 0.0;
                const auto integrand = [&](double s) {
                    const double y = eps + s * s;
                    input.y[index] = y;
                    return 2.0 * s * over_y(index + 1, remaining - y);
                };
                return integrate(integrand, 0.0, std::sqrt(hi - eps), 1e-6, 8);
            };
            total += simplex_factor * over_y(0, 1.0);
        }
    }
    return total;
}

}  // namespace crt
