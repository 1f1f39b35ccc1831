#include "crt/excursion.hpp"

#include "crt/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace crt {

Excursion Excursion::from_points(std::vector<double> t, std::vector<double> f) {
    if (t.size() != f.size()) throw InvalidInput("excursion: abscissas and values differ in length");
    if (t.size() < 2) throw InvalidInput("excursion: at least two breakpoints required");
    if (t.front() != 0.0) throw InvalidInput("excursion: first abscissa must be 0");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(t[i]) || !std::isfinite(f[i])) throw InvalidInput("excursion: non-finite breakpoint");
        if (f[i] < 0.0) throw InvalidInput("excursion: values must be nonnegative");
        if (i > 0 && !(t[i] > t[i - 1])) throw InvalidInput("excursion: abscissas must increase strictly");
    }
    if (f.front() != 0.0 || f.back() != 0.0) throw InvalidInput("excursion: values must vanish at both ends");
    Excursion out;
    out.t_ = std::move(t);
    out.f_ = std::move(f);
    return out;
}

Excursion Excursion::from_contour(const ContourPath& path) {
    if (path.steps.empty()) return Excursion();
    const std::vector<int> heights = path.heights();
    std::vector<double> t(heights.size()), f(heights.size());
    for (std::size_t i = 0; i < heights.size(); ++i) {
        t[i] = static_cast<double>(i);
        f[i] = heights[i];
    }
    return from_points(std::move(t), std::move(f));
}

double Excursion::max_value() const { return *std::max_element(f_.begin(), f_.end()); }

double Excursion::value(double s) const {
    if (s < 0.0 || s > length()) throw OutOfDomain("excursion: argument outside [0, sigma]");
    const auto it = std::upper_bound(t_.begin(), t_.end(), s);
    if (it == t_.end()) return f_.back();
    const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
    const double w = (s - t_[i]) / (t_[i + 1] - t_[i]);
    return f_[i] + w * (f_[i + 1] - f_[i]);
}

std::string Excursion::to_json() const {
    nlohmann::json j;
    j["t"] = t_;
    j["f"] = f_;
    return j.dump();
}

Excursion Excursion::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
        return from_points(j.at("t").get<std::vector<double>>(), j.at("f").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("excursion JSON: ") + e.what());
    }
}

double pseudo_distance(const Excursion& f, double s, double u) {
    const double lo = std::min(s, u), hi = std::max(s, u);
    const double fs = f.value(s), fu = f.value(u);
    double low = std::min(fs, fu);
    const auto& t = f.abscissas();
    const auto& v = f.values();
    for (auto i = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), lo) - t.begin());
         i < t.size() && t[i] < hi; ++i)
        low = std::min(low, v[i]);
    return fs + fu - 2.0 * low;
}

std::vector<Interval> components_above(const Excursion& f, double level) {
    if (level < 0.0) throw OutOfDomain("components_above: level must be nonnegative");
    const auto& t = f.abscissas();
    const auto& v = f.values();
    std::vector<Interval> out;
    bool inside = false;
    double lo = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        if (!inside && v[i + 1] > level) {
            lo = t[i] + (level - v[i]) / (v[i + 1] - v[i]) * (t[i + 1] - t[i]);
            if (v[i] > level) lo = t[i];
            inside = true;
        } else if (inside && v[i + 1] <= level) {
            out.push_back({lo, t[i] + (v[i] - level) / (v[i] - v[i + 1]) * (t[i + 1] - t[i])});
            inside = false;
        }
    }
    return out;
}

std::string to_string(ExcursionClass c) {
    switch (c) {
        case ExcursionClass::InEaStar: return "in_Ea_star";
        case ExcursionClass::InEa: return "in_Ea";
        case ExcursionClass::Neither: return "neither";
    }
    return "neither";
}

namespace {

// Range argmin / argmax over breakpoint values (leftmost on ties).
class RangeExtremum {
public:
    RangeExtremum(const std::vector<double>& values, bool maximum) : values_(values), maximum_(maximum) {
        const std::size_t n = values.size();
        table_.push_back(std::vector<std::uint32_t>(n));
        for (std::size_t i = 0; i < n; ++i) table_[0][i] = static_cast<std::uint32_t>(i);
        for (std::size_t width = 2, level = 1; width <= n; width *= 2, ++level) {
            const auto& prev = table_[level - 1];
            std::vector<std::uint32_t> row(n - width + 1);
            for (std::size_t i = 0; i + width <= n; ++i) row[i] = pick(prev[i], prev[i + width / 2]);
            table_.push_back(std::move(row));
        }
    }

    // Index of the extremum on [lo, hi], inclusive, lo <= hi.
    std::size_t query(std::size_t lo, std::size_t hi) const {
        const std::size_t span = hi - lo + 1;
        std::size_t level = 0;
        while ((std::size_t{2} << level) <= span) ++level;
        return pick(table_[level][lo], table_[level][hi + 1 - (std::size_t{1} << level)]);
    }

private:
    std::uint32_t pick(std::uint32_t a, std::uint32_t b) const {
        if (maximum_) return values_[b] > values_[a] ? b : a;
        return values_[b] < values_[a] ? b : a;
    }

    const std::vector<double>& values_;
    bool maximum_;
    std::vector<std::vector<std::uint32_t>> table_;
};

// A component of {f > level}: its walls lie on segments (i, i+1) and
// (j-1, j); every vertex strictly between i and j is at or above level.
struct Component {
    std::size_t i;
    std::size_t j;
    double level;
    double base;  // level at which the component appeared
};

struct Event {
    std::size_t k;      // lowest interior vertex
    double level;       // its value
    double left_wall;   // walls at that level
    double right_wall;
};

class Fragmentation {
public:
    explicit Fragmentation(const Excursion& f)
        : t_(f.abscissas()), v_(f.values()), argmin_(v_, false), argmax_(v_, true) {}

    double left_wall(std::size_t i, double h) const {
        const double rise = v_[i + 1] - v_[i];
        if (rise <= 0.0) return t_[i + 1];
        const double w = std::clamp((h - v_[i]) / rise, 0.0, 1.0);
        return t_[i] + w * (t_[i + 1] - t_[i]);
    }

    double right_wall(std::size_t j, double h) const {
        const double drop = v_[j - 1] - v_[j];
        if (drop <= 0.0) return t_[j - 1];
        const double w = std::clamp((h - v_[j]) / drop, 0.0, 1.0);
        return t_[j] - w * (t_[j] - t_[j - 1]);
    }

    double length(const Component& c, double h) const { return right_wall(c.j, h) - left_wall(c.i, h); }

    bool has_interior(const Component& c) const { return c.j > c.i + 1; }

    Event next_event(const Component& c) const {
        Event e;
        e.k = argmin_.query(c.i + 1, c.j - 1);
        e.level = v_[e.k];
        e.left_wall = left_wall(c.i, e.level);
        e.right_wall = right_wall(c.j, e.level);
        return e;
    }

    // Level in [c.level, e.level] where the length equals target; the
    // length is affine in the level between consecutive events.
    double crossing_level(const Component& c, const Event& e, double target) const {
        const double start = length(c, c.level);
        const double end = e.right_wall - e.left_wall;
        if (start - end <= 0.0) return e.level;
        const double w = std::clamp((start - target) / (start - end), 0.0, 1.0);
        return c.level + w * (e.level - c.level);
    }

    double interior_max(std::size_t i, std::size_t j) const {
        if (j <= i + 1) return -std::numeric_limits<double>::infinity();
        return v_[argmax_.query(i + 1, j - 1)];
    }

    Excursion piece(double lo, std::size_t first, std::size_t last, double hi, double level) const {
        std::vector<double> t{0.0}, f{0.0};
        for (std::size_t q = first; q <= last && first <= last; ++q) {
            t.push_back(t_[q] - lo);
            f.push_back(std::max(0.0, v_[q] - level));
        }
        t.push_back(hi - lo);
        f.push_back(0.0);
        return Excursion::from_points(std::move(t), std::move(f));
    }

    const std::vector<double>& abscissas() const { return t_; }
    const std::vector<double>& values() const { return v_; }
    std::size_t last() const { return t_.size() - 1; }

private:
    const std::vector<double>& t_;
    const std::vector<double>& v_;
    RangeExtremum argmin_;
    RangeExtremum argmax_;
};

// Outcome of following one component with length > a.
struct Step {
    bool branch = false;
    Component component;  // state when the outcome was reached
    Event event{};
    double t_a = 0.0;     // absolute level, terminal only
    double mass = 0.0;
};

Step follow(const Fragmentation& frag, Component c, double a) {
    while (true) {
        if (!frag.has_interior(c)) {
            // Degenerate flat piece: it vanishes at its own level.
            Step s;
            s.component = c;
            s.t_a = c.level;
            s.mass = a;
            return s;
        }
        const Event e = frag.next_event(c);
        const double len = e.right_wall - e.left_wall;
        if (len <= a) {
            Step s;
            s.component = c;
            s.event = e;
            s.t_a = frag.crossing_level(c, e, a);
            s.mass = a;
            return s;
        }
        if (e.k == c.i + 1 && e.k == c.j - 1) {
            // Single interior vertex: the peak is reached with length > a only
            // if the walls jump, which cannot happen for a continuous f.
            c.i = e.k;
            c.level = e.level;
            continue;
        }
        if (e.k == c.i + 1) {
            c.i = e.k;
            c.level = e.level;
            continue;
        }
        if (e.k == c.j - 1) {
            c.j = e.k;
            c.level = e.level;
            continue;
        }
        const double left_len = frag.abscissas()[e.k] - e.left_wall;
        const double right_len = e.right_wall - frag.abscissas()[e.k];
        if (left_len > a && right_len > a) {
            Step s;
            s.branch = true;
            s.component = c;
            s.event = e;
            return s;
        }
        if (left_len > a) {
            c = {c.i, e.k, e.level, c.base};
        } else if (right_len > a) {
            c = {e.k, c.j, e.level, c.base};
        } else {
            Step s;
            s.component = c;
            s.event = e;
            s.t_a = e.level;
            s.mass = len;
            return s;
        }
    }
}

void require_branching_input(const Excursion& f, double a) {
    if (!(a > 0.0)) throw InvalidInput("a must be positive");
    if (!(f.length() > a)) throw InvalidInput("the excursion length must exceed a");
    if (!has_binary_branching(f)) throw NotInClass("excursion has equal local minima without a lower point between");
}

}  // namespace

bool has_binary_branching(const Excursion& f) {
    const auto& v = f.values();
    std::vector<double> stack;  // values of local minima, nondecreasing
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (!(v[i] <= v[i - 1] && v[i] <= v[i + 1])) continue;
        // A flat piece at a local minimum already holds two equal minima.
        if (v[i - 1] - v[i] <= kLevelTolerance || v[i + 1] - v[i] <= kLevelTolerance) return false;
        while (!stack.empty() && stack.back() > v[i] + kLevelTolerance) stack.pop_back();
        if (!stack.empty() && std::abs(stack.back() - v[i]) <= kLevelTolerance) return false;
        stack.push_back(v[i]);
    }
    return true;
}

std::vector<double> critical_lengths(const Excursion& f) {
    const Fragmentation frag(f);
    std::vector<double> out{f.length()};
    std::vector<Component> stack{{0, frag.last(), 0.0, 0.0}};
    while (!stack.empty()) {
        Component c = stack.back();
        stack.pop_back();
        while (frag.has_interior(c)) {
            const Event e = frag.next_event(c);
            if (e.k == c.i + 1) {
                c.i = e.k;
                c.level = e.level;
                continue;
            }
            if (e.k == c.j - 1) {
                c.j = e.k;
                c.level = e.level;
                continue;
            }
            out.push_back(e.right_wall - e.left_wall);
            out.push_back(frag.abscissas()[e.k] - e.left_wall);
            out.push_back(e.right_wall - frag.abscissas()[e.k]);
            stack.push_back({c.i, e.k, e.level, e.level});
            stack.push_back({e.k, c.j, e.level, e.level});
            break;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

ExcursionClass in_class(const Excursion& f, double a) {
    if (!has_binary_branching(f)) return ExcursionClass::Neither;
    const double tolerance = kLevelTolerance * std::max(1.0, f.length());
    for (double length : critical_lengths(f))
        if (std::abs(length - a) <= tolerance) return ExcursionClass::InEa;
    return ExcursionClass::InEaStar;
}

FirstBranch first_branch(const Excursion& f, double a) {
    require_branching_input(f, a);
    const Fragmentation frag(f);
    const Step s = follow(frag, {0, frag.last(), 0.0, 0.0}, a);
    FirstBranch out;
    out.branch = s.branch;
    if (!s.branch) {
        out.t_a = s.t_a;
        out.mass = s.mass;
        return out;
    }
    const Event& e = s.event;
    out.s_a = e.level;
    out.left = frag.piece(e.left_wall, s.component.i + 1, e.k - 1, frag.abscissas()[e.k], e.level);
    out.right = frag.piece(frag.abscissas()[e.k], e.k + 1, s.component.j - 1, e.right_wall, e.level);
    return out;
}

RealSkeleton zeta(const Excursion& f, double a) {
    require_branching_input(f, a);
    const Fragmentation frag(f);
    RealSkeleton out;
    std::vector<std::uint8_t> flags;
    std::vector<Component> pending{{0, frag.last(), 0.0, 0.0}};
    while (!pending.empty()) {
        const Component c = pending.back();
        pending.pop_back();
        const Step s = follow(frag, c, a);
        if (s.branch) {
            flags.push_back(1);
            out.x.push_back(s.event.level - c.base);
            pending.push_back({s.event.k, s.component.j, s.event.level, s.event.level});
            pending.push_back({s.component.i, s.event.k, s.event.level, s.event.level});
        } else {
            flags.push_back(0);
            out.x.push_back(s.t_a - c.base);
            out.y.push_back(s.mass);
        }
    }
    out.shape = PlaneTree::from_preorder(std::move(flags));
    return out;
}

double trimmed_hausdorff(const Excursion& f, double a) {
    if (!(a > 0.0)) throw InvalidInput("a must be positive");
    if (!(f.length() > a)) throw InvalidInput("the excursion length must exceed a");
    const Fragmentation frag(f);
    double worst = 0.0;
    std::vector<Component> stack{{0, frag.last(), 0.0, 0.0}};
    while (!stack.empty()) {
        Component c = stack.back();
        stack.pop_back();
        while (frag.has_interior(c)) {
            const Event e = frag.next_event(c);
            const double len = e.right_wall - e.left_wall;
            if (len < a) {
                const double h = frag.crossing_level(c, e, a);
                worst = std::max(worst, frag.interior_max(c.i, c.j) - h);
                break;
            }
            if (e.k == c.i + 1) {
                c.i = e.k;
                c.level = e.level;
                continue;
            }
            if (e.k == c.j - 1) {
                c.j = e.k;
                c.level = e.level;
                continue;
            }
            const double left_len = frag.abscissas()[e.k] - e.left_wall;
            const double right_len = e.right_wall - frag.abscissas()[e.k];
            if (left_len < a) {
                worst = std::max(worst, frag.interior_max(c.i, e.k) - e.level);
            } else {
                stack.push_back({c.i, e.k, e.level, e.level});
            }
            if (right_len < a) {
                worst = std::max(worst, frag.interior_max(e.k, c.j) - e.level);
            } else {
                stack.push_back({e.k, c.j, e.level, e.level});
            }
            break;
        }
    }
    return worst;
}

double modulus_of_continuity(const Excursion& f, double a) {
    if (a < 0.0) throw InvalidInput("modulus_of_continuity: a must be nonnegative");
    const auto& t = f.abscissas();
    const auto& v = f.values();
    const RangeExtremum argmin(v, false), argmax(v, true);
    double best = 0.0;
    for (std::size_t p = 0; p < t.size(); ++p) {
        const double lo = std::max(0.0, t[p] - a), hi = std::min(f.length(), t[p] + a);
        const auto first = static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), lo) - t.begin());
        const auto last = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), hi) - t.begin()) - 1;
        double top = std::max(f.value(lo), f.value(hi));
        double bottom = std::min(f.value(lo), f.value(hi));
        if (first <= last) {
            top = std::max(top, v[argmax.query(first, last)]);
            bottom = std::min(bottom, v[argmin.query(first, last)]);
        }
        best = std::max({best, top - v[p], v[p] - bottom});
    }
    return best;
}

TrimBound trim_bound_check(const Excursion& f, double a) {
    return {trimmed_hausdorff(f, a), modulus_of_continuity(f, a)};
}

double tree_height(const Excursion& f) { return f.max_value(); }

double tree_diameter(const Excursion& f) {
    const auto& v = f.values();
    // best = max over i <= j of v[i] - 2 min v[i..j]; top = max v[0..j].
    double best = -v[0], top = v[0], diameter = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (j > 0) {
            best = std::max({best, top - 2.0 * v[j], -v[j]});
            top = std::max(top, v[j]);
        }
        diameter = std::max(diameter, best + v[j]);
    }
    return diameter;
}

Excursion scaled_contour(const PlaneTree& t) {
    const std::size_t m = t.leaf_count();
    if (m == 1) return Excursion();
    const ContourPath path = contour(t);
    const std::vector<int> heights = path.heights();
    const double span = static_cast<double>(heights.size() - 1);
    const double scale = 1.0 / std::sqrt(2.0 * static_cast<double>(m));
    std::vector<double> abscissas(heights.size()), values(heights.size());
    for (std::size_t i = 0; i < heights.size(); ++i) {
        abscissas[i] = static_cast<double>(i) / span;
        values[i] = heights[i] * scale;
    }
    abscissas.back() = 1.0;
    return Excursion::from_points(std::move(abscissas), std::move(values));
}

Excursion brownian_excursion_approx(std::size_t m, Rng& rng) {
    if (m == 0) throw InvalidInput("brownian_excursion_approx: m must be at least 1");
    return scaled_contour(sample_plane_uniform(m, rng));
}

}  // namespace crt
