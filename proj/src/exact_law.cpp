#include "crt/exact_law.hpp"

#include "crt/errors.hpp"
#include "crt/unordered_tree.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

namespace crt {

namespace {

// Above this many multiply-adds per convolution the FFT path is used.
constexpr double kDirectLimit = 4e6;
// Up to this n the skeleton law keeps every convolution row.
constexpr std::size_t kRowLimit = 20000;

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::size_t next_power_of_two(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::vector<double> fft_convolve(const std::vector<double>& p, const std::vector<double>& q, std::size_t max_degree) {
    const std::size_t full = p.size() + q.size() - 1;
    const std::size_t size = next_power_of_two(full);
    const std::size_t spectrum = size / 2 + 1;
    double* real = fftw_alloc_real(size);
    fftw_complex* fp = fftw_alloc_complex(spectrum);
    fftw_complex* fq = fftw_alloc_complex(spectrum);
    fftw_plan forward_p, forward_q, backward;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        forward_p = fftw_plan_dft_r2c_1d(static_cast<int>(size), real, fp, FFTW_ESTIMATE);
        forward_q = fftw_plan_dft_r2c_1d(static_cast<int>(size), real, fq, FFTW_ESTIMATE);
        backward = fftw_plan_dft_c2r_1d(static_cast<int>(size), fp, real, FFTW_ESTIMATE);
    }
    std::fill(real, real + size, 0.0);
    std::copy(p.begin(), p.end(), real);
    fftw_execute(forward_p);
    std::fill(real, real + size, 0.0);
    std::copy(q.begin(), q.end(), real);
    fftw_execute(forward_q);
    for (std::size_t i = 0; i < spectrum; ++i) {
        const std::complex<double> a(fp[i][0], fp[i][1]), b(fq[i][0], fq[i][1]);
        const std::complex<double> prod = a * b;
        fp[i][0] = prod.real();
        fp[i][1] = prod.imag();
    }
    fftw_execute(backward);
    std::vector<double> out(std::min(full, max_degree + 1));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(0.0, real[i] / static_cast<double>(size));
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(forward_p);
        fftw_destroy_plan(forward_q);
        fftw_destroy_plan(backward);
    }
    fftw_free(real);
    fftw_free(fp);
    fftw_free(fq);
    return out;
}

std::vector<double> direct_convolve(const std::vector<double>& p, const std::vector<double>& q,
                                    std::size_t max_degree) {
    std::vector<double> out(std::min(p.size() + q.size() - 1, max_degree + 1), 0.0);
    for (std::size_t i = 0; i < p.size() && i < out.size(); ++i) {
        if (p[i] == 0.0) continue;
        const std::size_t top = std::min(q.size(), out.size() - i);
        for (std::size_t j = 0; j < top; ++j) out[i + j] += p[i] * q[j];
    }
    return out;
}

std::vector<double> convolve(const std::vector<double>& p, const std::vector<double>& q, std::size_t max_degree) {
    const double work = static_cast<double>(std::min(p.size(), max_degree + 1)) *
                        static_cast<double>(std::min(q.size(), max_degree + 1));
    return work > kDirectLimit ? fft_convolve(p, q, max_degree) : direct_convolve(p, q, max_degree);
}

std::vector<double> truncated_weights(std::size_t a, const WeightTable& w, std::size_t m_max) {
    const std::size_t top = std::min(a, m_max);
    if (top > w.max_n()) throw InvalidInput("constrained sum: weight table too short");
    std::vector<double> out(top + 1, 0.0);
    for (std::size_t i = 1; i <= top; ++i) out[i] = w[i];
    return out;
}

void pad(std::vector<double>& v, std::size_t m_max) { v.resize(m_max + 1, 0.0); }

}  // namespace

std::vector<double> constrained_sum_distribution(std::size_t l, std::size_t a, const WeightTable& w,
                                                 std::size_t m_max) {
    std::vector<double> result{1.0};
    if (l > 0 && a > 0) {
        std::vector<double> base = truncated_weights(a, w, m_max);
        // Binary powering of the truncated generating polynomial.
        for (std::size_t e = l; e > 0; e >>= 1) {
            if (e & 1U) result = convolve(result, base, m_max);
            if (e > 1) base = convolve(base, base, m_max);
        }
    } else if (l > 0) {
        result = {0.0};
    }
    pad(result, m_max);
    return result;
}

std::vector<std::vector<double>> constrained_sum_rows(std::size_t l_max, std::size_t a, const WeightTable& w,
                                                      std::size_t m_max) {
    std::vector<std::vector<double>> rows;
    rows.reserve(l_max + 1);
    std::vector<double> row{1.0};
    pad(row, m_max);
    rows.push_back(row);
    const std::vector<double> base = truncated_weights(a, w, m_max);
    for (std::size_t l = 1; l <= l_max; ++l) {
        row = convolve(rows.back(), base, m_max);
        pad(row, m_max);
        rows.push_back(row);
    }
    return rows;
}

double exact_constrained_sum(std::size_t l, std::size_t m, std::size_t a, const WeightTable& w) {
    if (l == 0) return m == 0 ? 1.0 : 0.0;
    if (m < l || m > l * a) return 0.0;
    if (l == 1) return m <= a ? w[m] : 0.0;
    return constrained_sum_distribution(l, a, w, m)[m];
}

double inclusion_exclusion_sum(std::size_t l, std::size_t m, std::size_t a, const WeightTable& w) {
    if (m > w.max_n()) throw InvalidInput("inclusion_exclusion_sum: weight table too short");
    std::vector<double> full(m + 1, 0.0), heavy(m + 1, 0.0);
    for (std::size_t i = 1; i <= m; ++i) {
        full[i] = w[i];
        if (i > a) heavy[i] = w[i];
    }
    // free_sums[j] = law of j unconstrained summands, up to m.
    std::vector<std::vector<double>> free_sums{std::vector<double>(m + 1, 0.0)};
    free_sums[0][0] = 1.0;
    for (std::size_t j = 1; j <= l; ++j) {
        free_sums.push_back(direct_convolve(free_sums.back(), full, m));
        pad(free_sums.back(), m);
    }
    double total = 0.0;
    double binomial = 1.0;
    std::vector<double> heavy_sum(m + 1, 0.0);
    heavy_sum[0] = 1.0;
    for (std::size_t k = 0; k <= l; ++k) {
        double term = 0.0;
        for (std::size_t r = 0; r <= m; ++r) term += heavy_sum[r] * free_sums[l - k][m - r];
        total += (k % 2 == 0 ? 1.0 : -1.0) * binomial * term;
        binomial = binomial * static_cast<double>(l - k) / static_cast<double>(k + 1);
        heavy_sum = direct_convolve(heavy_sum, heavy, m);
        pad(heavy_sum, m);
    }
    return total;
}

double pair_sum(std::size_t y, std::size_t a, const WeightTable& w, bool distinct) {
    if (y < 2) return 0.0;
    const std::size_t lo = y > a ? y - a : 1;
    const std::size_t hi = std::min(a, y - 1);
    if (hi > w.max_n()) throw InvalidInput("pair_sum: weight table too short");
    double total = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) {
        if (distinct && 2 * j == y) continue;
        total += w[j] * w[y - j];
    }
    return total;
}

SkeletonLaw::SkeletonLaw(Family family, std::size_t n, std::size_t a)
    : family_(family),
      n_(n),
      a_(a),
      weights_(weight_table(family == Family::Plane ? WeightKind::Mu : WeightKind::Nu, std::max<std::size_t>(n, 1))) {
    if (n < 2 || a < 1 || a >= n) throw InvalidInput("skeleton law: need n >= 2 and 1 <= a < n");
}

double SkeletonLaw::leaf_factor(std::size_t y) const {
    if (y <= a_ || y > 2 * a_) return 0.0;
    return pair_sum(y, a_, weights_, family_ == Family::Unordered);
}

double SkeletonLaw::mark_factor(std::size_t x_total, std::size_t y_total) const {
    if (y_total > n_) return 0.0;
    const std::size_t m = n_ - y_total;
    if (x_total == 0) return m == 0 ? 1.0 : 0.0;
    if (m < x_total || m > x_total * a_) return 0.0;
    if (n_ <= kRowLimit) {
        // Successive convolution rows, extended on demand.
        if (rows_.empty()) {
            rows_.emplace_back(n_ + 1, 0.0);
            rows_[0][0] = 1.0;
        }
        if (rows_.size() <= x_total) {
            const std::vector<double> base = truncated_weights(a_, weights_, n_);
            while (rows_.size() <= x_total) {
                rows_.push_back(convolve(rows_.back(), base, n_));
                pad(rows_.back(), n_);
            }
        }
        return rows_[x_total][m];
    }
    auto it = sums_.find(x_total);
    if (it == sums_.end()) it = sums_.emplace(x_total, constrained_sum_distribution(x_total, a_, weights_, n_)).first;
    return it->second[m];
}

double SkeletonLaw::probability(const Skeleton& sk) const {
    if (sk.x.size() != sk.shape.vertex_count() || sk.y.size() != sk.shape.leaf_count())
        throw SizeMismatch("skeleton law: one x per shape vertex and one y per leaf required");
    if (sk.a != static_cast<std::int64_t>(a_)) throw InvalidInput("skeleton law: skeleton threshold differs from a");
    for (std::int64_t v : sk.x)
        if (v < 0) throw InvalidInput("skeleton law: x-marks must be nonnegative");
    if (family_ == Family::Unordered && !is_good_skeleton(sk)) return 0.0;
    const auto leaves = static_cast<int>(sk.shape.leaf_count());
    double product = 1.0;
    std::size_t y_total = 0;
    for (std::int64_t v : sk.y) {
        if (v <= 0) return 0.0;
        y_total += static_cast<std::size_t>(v);
        product *= leaf_factor(static_cast<std::size_t>(v));
        if (product == 0.0) return 0.0;
    }
    product *= mark_factor(static_cast<std::size_t>(sk.total_x()), y_total);
    const double normalizer = family_ == Family::Plane ? std::ldexp(weights_[n_], 2 * leaves - 1)
                                                       : std::ldexp(weights_[n_], leaves);
    return product / normalizer;
}

std::vector<double> height_cdf(Family family, std::size_t n) {
    if (n < 1) throw InvalidInput("height_cdf: need n >= 1");
    const WeightTable w = weight_table(family == Family::Plane ? WeightKind::Mu : WeightKind::Nu, std::max<std::size_t>(n, 2));
    // level[m] = weight of trees with m leaves and height <= h
    std::vector<double> level(n + 1, 0.0);
    level[1] = w[1];
    std::vector<double> cdf{n == 1 ? 1.0 : 0.0};
    while (cdf.back() < 1.0 - 1e-12 && cdf.size() < n) {
        std::vector<double> next = convolve(level, level, n);
        pad(next, n);
        for (std::size_t m = 2; m <= n; ++m) {
            if (family == Family::Unordered && m % 2 == 0)
                next[m] += level[m / 2] * std::pow(w.rho, static_cast<double>(m / 2));
            next[m] *= 0.5;
        }
        next[0] = 0.0;
        next[1] = w[1];
        level = std::move(next);
        cdf.push_back(std::min(1.0, level[n] / w[n]));
    }
    return cdf;
}

double exact_skeleton_law(std::size_t n, std::size_t a, const Skeleton& sk, Family family) {
    return SkeletonLaw(family, n, a).probability(sk);
}

}  // namespace crt
