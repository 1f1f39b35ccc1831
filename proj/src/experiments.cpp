#include "crt/experiments.hpp"

#include "crt/densities.hpp"
#include "crt/errors.hpp"
#include "crt/exact_law.hpp"
#include "crt/excursion.hpp"
#include "crt/skeleton.hpp"
#include "crt/unordered_tree.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>

namespace crt {

std::vector<std::size_t> batch_sizes(std::size_t samples, std::size_t batch_size) {
    if (batch_size == 0) throw InvalidInput("batch size must be positive");
    std::vector<std::size_t> sizes;
    for (std::size_t done = 0; done < samples; done += batch_size) sizes.push_back(std::min(batch_size, samples - done));
    return sizes;
}

double theta_tail(double x) {
    if (!(x > 0.0)) return 1.0;
    double total = 0.0;
    for (double k = 1.0;; k += 1.0) {
        const double kx = k * x;
        const double term = (kx * kx - 1.0) * std::exp(-kx * kx / 2.0);
        total += term;
        if (kx > 1.0 && std::abs(term) < 1e-12) break;
    }
    return std::clamp(2.0 * total, 0.0, 1.0);
}

double ks_distance_to_tail(std::vector<double> sample, double (*tail)(double)) {
    if (sample.empty()) throw InvalidInput("ks distance: empty sample");
    std::sort(sample.begin(), sample.end());
    const auto total = static_cast<double>(sample.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < sample.size();) {
        std::size_t j = i;
        while (j < sample.size() && sample[j] == sample[i]) ++j;
        const double cdf = 1.0 - tail(sample[i]);
        worst = std::max({worst, std::abs(static_cast<double>(i) / total - cdf),
                          std::abs(static_cast<double>(j) / total - cdf)});
        i = j;
    }
    return worst;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void common_parameters(ExperimentReport& report, const RunOptions& options) {
    report.parameter("seed", std::to_string(options.seed));
    report.parameter("batch_size", std::to_string(options.batch_size));
}

// Index of the cell containing v, or -1.
int cell_of(double v, double lo, double hi, std::size_t cells) {
    if (!(v >= lo && v < hi)) return -1;
    const auto i = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(cells));
    return static_cast<int>(std::min(i, cells - 1));
}

std::size_t threshold_for(std::size_t n, double epsilon) {
    return static_cast<std::size_t>(std::floor(epsilon * static_cast<double>(n) + 1e-9));
}

// Skeleton of a sampled tree of the given family, or nothing for unordered
// trees that are not good.
struct SampledSkeleton {
    bool present = false;
    Skeleton skeleton;
};

class SkeletonSource {
public:
    SkeletonSource(Family family, std::size_t n, std::size_t a)
        : family_(family), n_(n), a_(static_cast<std::int64_t>(a)) {
        if (family == Family::Unordered) sampler_.emplace_back(UnorderedSampler::with_max_size(n));
    }

    SampledSkeleton draw(Rng& rng) const {
        SampledSkeleton out;
        if (family_ == Family::Plane) {
            out.skeleton = skeleton_plane(sample_plane_uniform(n_, rng), a_);
            out.present = true;
            return out;
        }
        const PlaneTree t = sampler_.front().sample_representative(n_, rng);
        if (!is_a_good(t, a_)) return out;
        out.skeleton = skeleton_unordered(t, a_);
        out.present = true;
        return out;
    }

private:
    Family family_;
    std::size_t n_;
    std::int64_t a_;
    std::vector<UnorderedSampler> sampler_;
};

ExperimentReport local_limit_exact(const LocalLimitConfig& config) {
    ExperimentReport report;
    report.name = "local-limit";
    report.parameter("family", to_string(config.family));
    report.parameter("n", std::to_string(config.n));
    report.parameter("epsilon", config.epsilon);
    report.parameter("mode", "exhaustive");
    const std::size_t a = std::max<std::size_t>(1, threshold_for(config.n, config.epsilon));
    report.parameter("a", std::to_string(a));
    if (a >= config.n) throw InvalidInput("local-limit: need floor(eps n) < n");
    const SkeletonLaw law(config.family, config.n, a);
    std::map<Skeleton, double> frequency;
    double good_mass = 0.0;
    if (config.family == Family::Plane) {
        const std::vector<PlaneTree> trees = enumerate_plane(config.n);
        const double unit = 1.0 / static_cast<double>(trees.size());
        for (const PlaneTree& t : trees) frequency[skeleton_plane(t, static_cast<std::int64_t>(a))] += unit;
        good_mass = 1.0;
    } else {
        const std::vector<UnorderedTree> trees = enumerate_unordered(config.n);
        const double unit = 1.0 / static_cast<double>(trees.size());
        for (const UnorderedTree& t : trees) {
            if (!is_a_good(t, static_cast<std::int64_t>(a))) continue;
            frequency[skeleton_unordered(t, static_cast<std::int64_t>(a))] += unit;
            good_mass += unit;
        }
    }
    double worst = 0.0, law_total = 0.0;
    for (const auto& [sk, freq] : frequency) {
        const double p = law.probability(sk);
        law_total += p;
        worst = std::max(worst, std::abs(p - freq));
    }
    report.value("skeletons", static_cast<double>(frequency.size()));
    report.value("good_mass", good_mass);
    report.check("max_abs_diff", worst, "<=", 1e-12);
    report.check("law_total_minus_good_mass", std::abs(law_total - good_mass), "<=", 1e-12);
    return report;
}

struct CellCounts {
    std::vector<std::uint64_t> cells;
    std::uint64_t single = 0;
    std::uint64_t good = 0;
};

}  // namespace

ExperimentReport exp_local_limit(const LocalLimitConfig& config, const RunOptions& options) {
    const auto start = Clock::now();
    if (config.n <= 10) {
        ExperimentReport report = local_limit_exact(config);
        report.runtime_seconds = seconds_since(start);
        return report;
    }
    const std::size_t a = threshold_for(config.n, config.epsilon);
    if (static_cast<double>(a) < 10.0) throw InvalidInput("local-limit: need eps n >= 10");
    if (a >= config.n) throw InvalidInput("local-limit: need eps < 1");
    const CellGrid& grid = config.grid;
    if (grid.x_cells == 0 || grid.y_cells == 0 || !(grid.x_hi > grid.x_lo) || !(grid.y_hi > grid.y_lo))
        throw InvalidInput("local-limit: empty grid");
    const double tolerance =
        config.limit_tolerance >= 0.0 ? config.limit_tolerance : (config.family == Family::Plane ? 0.10 : 0.12);

    ExperimentReport report;
    report.name = "local-limit";
    report.parameter("family", to_string(config.family));
    report.parameter("n", std::to_string(config.n));
    report.parameter("epsilon", config.epsilon);
    report.parameter("a", std::to_string(a));
    report.parameter("samples", std::to_string(config.samples));
    report.parameter("shape", "o");
    report.parameter("x_range", format_double(grid.x_lo) + ":" + format_double(grid.x_hi) + "/" + std::to_string(grid.x_cells));
    report.parameter("y_range", format_double(grid.y_lo) + ":" + format_double(grid.y_hi) + "/" + std::to_string(grid.y_cells));
    common_parameters(report, options);

    const double root_n = std::sqrt(static_cast<double>(config.n));
    const auto n_real = static_cast<double>(config.n);
    const std::size_t cell_total = grid.x_cells * grid.y_cells;
    const auto locate = [&](double x, double y) -> int {
        const int i = cell_of(x / root_n, grid.x_lo, grid.x_hi, grid.x_cells);
        const int j = cell_of(y / n_real, grid.y_lo, grid.y_hi, grid.y_cells);
        if (i < 0 || j < 0) return -1;
        return i * static_cast<int>(grid.y_cells) + j;
    };

    const SkeletonSource source(config.family, config.n, a);
    const auto batches = run_batches<CellCounts>(config.samples, options, [&](std::size_t, std::size_t count, Rng& rng) {
        CellCounts counts;
        counts.cells.assign(cell_total, 0);
        for (std::size_t s = 0; s < count; ++s) {
            const SampledSkeleton drawn = source.draw(rng);
            if (!drawn.present) continue;
            ++counts.good;
            const Skeleton& sk = drawn.skeleton;
            if (sk.shape.leaf_count() != 1) continue;
            ++counts.single;
            const int cell = locate(static_cast<double>(sk.x[0]), static_cast<double>(sk.y[0]));
            if (cell >= 0) ++counts.cells[static_cast<std::size_t>(cell)];
        }
        return counts;
    });
    CellCounts merged;
    merged.cells.assign(cell_total, 0);
    for (const CellCounts& b : batches) {
        for (std::size_t c = 0; c < cell_total; ++c) merged.cells[c] += b.cells[c];
        merged.single += b.single;
        merged.good += b.good;
    }

    // Finite-n law and lattice sum of the limit density over each cell.
    const SkeletonLaw law(config.family, config.n, a);
    const DensityContext ctx = DensityContext::build(config.epsilon);
    std::vector<double> exact(cell_total, 0.0), limit(cell_total, 0.0);
    Skeleton sk{PlaneTree::leaf(), {0}, {0}, static_cast<std::int64_t>(a)};
    PsiInput point{PlaneTree::leaf(), {0.0}, {0.0}};
    const double lattice_scale = std::pow(n_real, 1.5);
    const auto x_top = static_cast<std::size_t>(std::ceil(grid.x_hi * root_n)) + 1;
    for (std::size_t x = 0; x <= x_top; ++x) {
        if (cell_of(static_cast<double>(x) / root_n, grid.x_lo, grid.x_hi, grid.x_cells) < 0) continue;
        for (std::size_t y = a + 1; y <= 2 * a; ++y) {
            const int cell = locate(static_cast<double>(x), static_cast<double>(y));
            if (cell < 0) continue;
            sk.x[0] = static_cast<std::int64_t>(x);
            sk.y[0] = static_cast<std::int64_t>(y);
            exact[static_cast<std::size_t>(cell)] += law.probability(sk);
            point.x[0] = static_cast<double>(x) / root_n;
            point.y[0] = static_cast<double>(y) / n_real;
            const double density = config.family == Family::Plane ? psi(point, ctx) : psi_circ(point, ctx);
            limit[static_cast<std::size_t>(cell)] += density / lattice_scale;
        }
    }

    const auto samples = static_cast<double>(config.samples);
    double worst_z = 0.0, worst_rel = 0.0, worst_exact_rel = 0.0;
    const double x_width = (grid.x_hi - grid.x_lo) / static_cast<double>(grid.x_cells);
    const double y_width = (grid.y_hi - grid.y_lo) / static_cast<double>(grid.y_cells);
    for (std::size_t i = 0; i < grid.x_cells; ++i) {
        for (std::size_t j = 0; j < grid.y_cells; ++j) {
            const std::size_t c = i * grid.y_cells + j;
            CellRow row;
            row.shape = "o";
            row.lo = {grid.x_lo + x_width * static_cast<double>(i), grid.y_lo + y_width * static_cast<double>(j)};
            row.hi = {row.lo[0] + x_width, row.lo[1] + y_width};
            row.empirical = static_cast<double>(merged.cells[c]) / samples;
            row.exact = exact[c];
            row.theoretical = limit[c];
            row.rel_err = row.empirical / row.theoretical - 1.0;
            const double se = std::sqrt(row.exact * (1.0 - row.exact) / samples);
            row.z_score = se > 0.0 ? (row.empirical - row.exact) / se : 0.0;
            worst_z = std::max(worst_z, std::abs(row.z_score));
            worst_rel = std::max(worst_rel, std::abs(row.rel_err));
            worst_exact_rel = std::max(worst_exact_rel, std::abs(row.exact / row.theoretical - 1.0));
            report.cells.push_back(row);
        }
    }
    report.value("single_shape_fraction", static_cast<double>(merged.single) / samples);
    report.value("max_rel_err_exact_vs_limit", worst_exact_rel);
    report.check("max_abs_z_vs_exact", worst_z, "<=", config.z_tolerance);
    report.check("max_rel_err_vs_limit", worst_rel, "<=", tolerance);
    if (config.family == Family::Unordered)
        report.check("good_fraction", static_cast<double>(merged.good) / samples, ">=", 0.9);
    report.runtime_seconds = seconds_since(start);
    return report;
}

ExperimentReport exp_height_law(const HeightLawConfig& config, const RunOptions& options) {
    const auto start = Clock::now();
    if (config.n < 2) throw InvalidInput("height: need n >= 2");
    const double tolerance =
        config.ks_tolerance >= 0.0 ? config.ks_tolerance : (config.family == Family::Plane ? 0.03 : 0.04);
    const double scale = config.family == Family::Plane ? 1.0 : default_c();
    ExperimentReport report;
    report.name = "height";
    report.parameter("family", to_string(config.family));
    report.parameter("n", std::to_string(config.n));
    report.parameter("samples", std::to_string(config.samples));
    report.parameter("scale", scale);
    common_parameters(report, options);

    std::vector<UnorderedSampler> sampler;
    if (config.family == Family::Unordered) sampler.push_back(UnorderedSampler::with_max_size(config.n));
    const double norm = scale / std::sqrt(2.0 * static_cast<double>(config.n));
    const auto batches =
        run_batches<std::vector<double>>(config.samples, options, [&](std::size_t, std::size_t count, Rng& rng) {
            std::vector<double> heights;
            heights.reserve(count);
            for (std::size_t s = 0; s < count; ++s) {
                const PlaneTree t = config.family == Family::Plane ? sample_plane_uniform(config.n, rng)
                                                                   : sampler.front().sample_representative(config.n, rng);
                heights.push_back(norm * static_cast<double>(t.height()));
            }
            return heights;
        });
    std::vector<double> all;
    all.reserve(config.samples);
    for (const auto& b : batches) all.insert(all.end(), b.begin(), b.end());
    const double mean = std::accumulate(all.begin(), all.end(), 0.0) / static_cast<double>(all.size());
    report.value("mean_scaled_height", mean);
    report.value("limit_mean", std::sqrt(2.0 * std::acos(-1.0)));
    for (double x : {0.5, 1.0, 1.5, 2.0, 2.5}) {
        const double emp = static_cast<double>(std::count_if(all.begin(), all.end(), [&](double h) { return h >= x; })) /
                           static_cast<double>(all.size());
        report.value("tail_at_" + format_double(x), format_double(emp) + " vs " + format_double(theta_tail(x)));
    }
    // Referee at this n: the exact finite-n height law.
    const std::vector<double> exact = height_cdf(config.family, config.n);
    const auto exact_cdf = [&](std::size_t h) { return h < exact.size() ? exact[h] : 1.0; };
    std::vector<std::size_t> histogram;
    for (double v : all) {
        const auto h = static_cast<std::size_t>(std::llround(v / norm));
        if (h >= histogram.size()) histogram.resize(h + 1, 0);
        ++histogram[h];
    }
    double ks_exact = 0.0, exact_to_limit = 0.0, cumulative = 0.0;
    const std::size_t top = std::max(histogram.size(), exact.size());
    for (std::size_t h = 0; h < top; ++h) {
        if (h < histogram.size()) cumulative += static_cast<double>(histogram[h]);
        ks_exact = std::max(ks_exact, std::abs(cumulative / static_cast<double>(all.size()) - exact_cdf(h)));
        if (h > 0) {
            const double limit = theta_tail(norm * static_cast<double>(h));
            exact_to_limit = std::max({exact_to_limit, std::abs(1.0 - exact_cdf(h - 1) - limit),
                                       std::abs(1.0 - exact_cdf(h) - limit)});
        }
    }
    report.value("exact_law_ks_to_limit", exact_to_limit);
    report.check("ks_distance", ks_distance_to_tail(std::move(all), theta_tail), "<=", tolerance);
    // 1% critical value of the Kolmogorov statistic
    report.check("ks_to_exact_law", ks_exact, "<=", 1.63 / std::sqrt(static_cast<double>(config.samples)));
    report.runtime_seconds = seconds_since(start);
    return report;
}

ExperimentReport exp_mean_height_exact() {
    const auto start = Clock::now();
    ExperimentReport report;
    report.name = "mean-height";
    report.parameter("mode", "exhaustive");
    const Rational plane4 = exact_mean_height(4, Family::Plane);
    const Rational unordered4 = exact_mean_height(4, Family::Unordered);
    const Rational plane2 = exact_mean_height(2, Family::Plane);
    report.value("plane_n4", plane4.str());
    report.value("unordered_n4", unordered4.str());
    report.value("plane_n2", plane2.str());
    report.check_flag("plane_n4_is_14/5", plane4 == Rational(14, 5));
    report.check_flag("unordered_n4_is_5/2", unordered4 == Rational(5, 2));
    report.check_flag("plane_n2_is_1", plane2 == Rational(1));
    report.runtime_seconds = seconds_since(start);
    return report;
}

std::size_t max_removed_height(const PlaneTree& t, std::int64_t a) {
    const TrimResult trimmed = trim_with_origin(t, a);
    std::size_t best = 0;
    for (PlaneTree::Vertex v = 0; v < trimmed.tree.vertex_count(); ++v) {
        if (!trimmed.tree.is_leaf(v)) continue;
        const PlaneTree::Vertex u = trimmed.origin[v];
        std::uint32_t deepest = t.depth(u);
        for (PlaneTree::Vertex w = u; w < t.subtree_end(u); ++w) deepest = std::max(deepest, t.depth(w));
        best = std::max<std::size_t>(best, deepest - t.depth(u));
    }
    return best;
}

namespace {

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const auto index = static_cast<std::size_t>(std::floor(q * static_cast<double>(v.size() - 1) + 0.5));
    return v[std::min(index, v.size() - 1)];
}

}  // namespace

ExperimentReport exp_trim_tightness(const TightnessConfig& config, const RunOptions& options) {
    const auto start = Clock::now();
    if (config.epsilons.empty() || config.samples == 0) throw InvalidInput("tightness: need epsilons and samples");
    ExperimentReport report;
    report.name = "tightness";
    report.parameter("family", "unordered");
    report.parameter("n", std::to_string(config.n));
    std::string eps_text, size_text;
    for (double e : config.epsilons) eps_text += (eps_text.empty() ? "" : ",") + format_double(e);
    for (std::size_t m : config.moment_sizes) size_text += (size_text.empty() ? "" : ",") + std::to_string(m);
    report.parameter("epsilons", eps_text);
    report.parameter("samples", std::to_string(config.samples));
    report.parameter("moment_sizes", size_text);
    report.parameter("moment_samples", std::to_string(config.moment_samples));
    common_parameters(report, options);

    const UnorderedSampler sampler = UnorderedSampler::with_max_size(
        std::max(config.n, config.moment_sizes.empty() ? config.n
                                                       : *std::max_element(config.moment_sizes.begin(), config.moment_sizes.end())));
    const double root_n = std::sqrt(static_cast<double>(config.n));
    const std::size_t k = config.epsilons.size();
    const auto batches =
        run_batches<std::vector<double>>(config.samples, options, [&](std::size_t, std::size_t count, Rng& rng) {
            std::vector<double> rows;
            rows.reserve(count * k);
            for (std::size_t s = 0; s < count; ++s) {
                const PlaneTree t = sampler.sample_representative(config.n, rng);
                for (double e : config.epsilons) {
                    const auto a = static_cast<std::int64_t>(threshold_for(config.n, e));
                    rows.push_back(static_cast<double>(max_removed_height(t, a)) / root_n);
                }
            }
            return rows;
        });
    std::vector<std::vector<double>> per_eps(k);
    for (const auto& b : batches)
        for (std::size_t i = 0; i < b.size(); ++i) per_eps[i % k].push_back(b[i]);
    std::vector<double> medians;
    for (std::size_t i = 0; i < k; ++i) {
        const std::string tag = "eps_" + format_double(config.epsilons[i]);
        medians.push_back(quantile(per_eps[i], 0.5));
        report.value(tag + "_q10", quantile(per_eps[i], 0.1));
        report.value(tag + "_median", medians.back());
        report.value(tag + "_q90", quantile(per_eps[i], 0.9));
    }
    bool ordered = true;
    for (std::size_t i = 1; i < k; ++i)
        if ((config.epsilons[i] < config.epsilons[i - 1]) != (medians[i] < medians[i - 1])) ordered = false;
    report.check_flag("medians_follow_epsilon", ordered);

    if (!config.moment_sizes.empty()) {
        std::vector<double> ratios;
        for (std::size_t idx = 0; idx < config.moment_sizes.size(); ++idx) {
            const std::size_t m = config.moment_sizes[idx];
            RunOptions sub = options;
            sub.seed = options.seed + 1000003ULL * (idx + 1);
            const auto parts =
                run_batches<double>(config.moment_samples, sub, [&](std::size_t, std::size_t count, Rng& rng) {
                    double acc = 0.0;
                    for (std::size_t s = 0; s < count; ++s) {
                        const auto h = static_cast<double>(sampler.sample_representative(m, rng).height());
                        acc += h * h * h * h;
                    }
                    return acc;
                });
            const double mean4 = std::accumulate(parts.begin(), parts.end(), 0.0) / static_cast<double>(config.moment_samples);
            const double ratio = mean4 / (static_cast<double>(m) * static_cast<double>(m));
            ratios.push_back(ratio);
            report.value("h4_over_n2_at_" + std::to_string(m), ratio);
        }
        const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
        report.check("h4_ratio_spread", *hi / *lo, "<=", config.moment_band);
    }
    report.runtime_seconds = seconds_since(start);
    return report;
}

namespace {

struct MarkSummary {
    std::map<std::string, std::uint64_t> shapes;  // canonical shape code -> count
    std::uint64_t total = 0;
    std::uint64_t single = 0;
    double x_sum = 0.0, x_sq = 0.0, y_sum = 0.0, y_sq = 0.0;  // single-vertex shape

    void add(const PlaneTree& shape, double x_single, double y_single) {
        ++total;
        ++shapes[canonical_code(shape)];
        if (shape.leaf_count() != 1) return;
        ++single;
        x_sum += x_single;
        x_sq += x_single * x_single;
        y_sum += y_single;
        y_sq += y_single * y_single;
    }
    void merge(const MarkSummary& other) {
        for (const auto& [k, v] : other.shapes) shapes[k] += v;
        total += other.total;
        single += other.single;
        x_sum += other.x_sum;
        x_sq += other.x_sq;
        y_sum += other.y_sum;
        y_sq += other.y_sq;
    }
    double frequency(const std::string& code) const {
        const auto it = shapes.find(code);
        return it == shapes.end() || total == 0 ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
    }
    double x_mean() const { return x_sum / static_cast<double>(single); }
    double y_mean() const { return y_sum / static_cast<double>(single); }
    double x_var() const { return x_sq / static_cast<double>(single) - x_mean() * x_mean(); }
    double y_var() const { return y_sq / static_cast<double>(single) - y_mean() * y_mean(); }
};

template <class Draw>
MarkSummary summarize(std::size_t samples, const RunOptions& options, Draw draw) {
    const auto parts = run_batches<MarkSummary>(samples, options, [&](std::size_t, std::size_t count, Rng& rng) {
        MarkSummary s;
        for (std::size_t i = 0; i < count; ++i) draw(rng, s);
        return s;
    });
    MarkSummary merged;
    for (const MarkSummary& p : parts) merged.merge(p);
    return merged;
}

void describe(ExperimentReport& report, const std::string& tag, const MarkSummary& s) {
    report.value(tag + "_samples", static_cast<double>(s.total));
    for (const auto& [code, count] : s.shapes)
        report.value(tag + "_shape_" + code, static_cast<double>(count) / static_cast<double>(s.total));
    report.value(tag + "_x_mean", s.x_mean());
    report.value(tag + "_x_var", s.x_var());
    report.value(tag + "_y_mean", s.y_mean());
    report.value(tag + "_y_var", s.y_var());
}

}  // namespace

ExperimentReport exp_skeleton_convergence(const ConvergenceConfig& config, const RunOptions& options) {
    const auto start = Clock::now();
    const std::size_t a = threshold_for(config.n, config.epsilon);
    if (a < 2 || a >= config.n) throw InvalidInput("skeleton-convergence: need 2 <= floor(eps n) < n");
    ExperimentReport report;
    report.name = "skeleton-convergence";
    report.parameter("n", std::to_string(config.n));
    report.parameter("epsilon", config.epsilon);
    report.parameter("samples", std::to_string(config.samples));
    report.parameter("excursion_samples", std::to_string(config.excursion_samples));
    common_parameters(report, options);

    const double c = default_c();
    const double root_n = std::sqrt(static_cast<double>(config.n));
    const auto n_real = static_cast<double>(config.n);
    const auto a_int = static_cast<std::int64_t>(a);

    const MarkSummary plane = summarize(config.samples, options, [&](Rng& rng, MarkSummary& s) {
        const Skeleton sk = skeleton_plane(sample_plane_uniform(config.n, rng), a_int);
        s.add(sk.shape, static_cast<double>(sk.x[0]) / root_n, static_cast<double>(sk.y[0]) / n_real);
    });

    RunOptions unordered_options = options;
    unordered_options.seed = options.seed + 1;
    const UnorderedSampler sampler = UnorderedSampler::with_max_size(config.n);
    const MarkSummary unordered = summarize(config.samples, unordered_options, [&](Rng& rng, MarkSummary& s) {
        const PlaneTree t = sampler.sample_representative(config.n, rng);
        if (!is_a_good(t, a_int)) return;
        const Skeleton sk = skeleton_unordered(t, a_int);
        s.add(sk.shape, c * static_cast<double>(sk.x[0]) / root_n, static_cast<double>(sk.y[0]) / n_real);
    });

    RunOptions excursion_options = options;
    excursion_options.seed = options.seed + 2;
    const MarkSummary excursion = summarize(config.excursion_samples, excursion_options, [&](Rng& rng, MarkSummary& s) {
        // The rescaled contour approximates twice the excursion; lengths of the
        // discrete skeleton over sqrt(n) match sqrt(2) times its marks.
        const Excursion f = brownian_excursion_approx(config.n, rng);
        const RealSkeleton sk = zeta(f, config.epsilon);
        s.add(sk.shape, std::sqrt(2.0) * sk.x[0], sk.y[0]);
    });

    describe(report, "plane", plane);
    describe(report, "unordered", unordered);
    describe(report, "excursion", excursion);

    std::vector<std::string> codes;
    for (const MarkSummary* s : {&plane, &unordered, &excursion})
        for (const auto& [code, count] : s->shapes)
            if (std::find(codes.begin(), codes.end(), code) == codes.end()) codes.push_back(code);
    std::sort(codes.begin(), codes.end(), code_less);
    double worst_pu = 0.0, worst_pe = 0.0;
    for (const std::string& code : codes) {
        worst_pu = std::max(worst_pu, std::abs(plane.frequency(code) - unordered.frequency(code)));
        worst_pe = std::max(worst_pe, std::abs(plane.frequency(code) - excursion.frequency(code)));
    }
    report.check("shape_gap_plane_unordered", worst_pu, "<=", config.shape_tolerance);
    report.check("shape_gap_plane_excursion", worst_pe, "<=", config.shape_tolerance);

    const DensityContext ctx = DensityContext::build(config.epsilon);
    const double single_mass = psi_shape_mass(1, ctx);
    const double psi_x_mean = psi_shape_moment(1, 1.0, ctx) / single_mass;
    report.value("psi_single_shape_mass", single_mass);
    report.value("psi_single_shape_x_mean", psi_x_mean);
    report.check("single_shape_rel_gap_plane_psi", std::abs(plane.frequency("o") / single_mass - 1.0), "<=",
                 config.mass_tolerance);
    report.check("x_mean_rel_gap_plane_psi", std::abs(plane.x_mean() / psi_x_mean - 1.0), "<=",
                 config.psi_mean_tolerance);
    // unordered x already carries the factor c.
    report.check("x_mean_rel_gap_plane_c_unordered", std::abs(plane.x_mean() / unordered.x_mean() - 1.0), "<=",
                 config.ratio_tolerance);
    report.check("x_mean_rel_gap_plane_excursion", std::abs(plane.x_mean() / excursion.x_mean() - 1.0), "<=",
                 config.ratio_tolerance);
    report.check("y_mean_rel_gap_plane_unordered", std::abs(plane.y_mean() / unordered.y_mean() - 1.0), "<=",
                 config.mass_tolerance);
    report.check("y_mean_rel_gap_plane_excursion", std::abs(plane.y_mean() / excursion.y_mean() - 1.0), "<=",
                 config.mass_tolerance);
    report.runtime_seconds = seconds_since(start);
    return report;
}

}  // namespace crt
