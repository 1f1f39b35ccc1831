#include "crt/enumeration.hpp"

#include "crt/errors.hpp"

#include <boost/math/constants/constants.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace crt {

std::string to_string(Family family) { return family == Family::Plane ? "plane" : "unordered"; }

Family parse_family(const std::string& text) {
    if (text == "plane") return Family::Plane;
    if (text == "unordered") return Family::Unordered;
    throw InvalidInput("unknown family '" + text + "' (expected plane or unordered)");
}

BigInt catalan_count(std::size_t n) {
    if (n == 0) throw InvalidInput("catalan_count: n must be at least 1");
    BigInt binom = 1;  // C(n-1+k, k) after step k
    for (std::size_t k = 1; k < n; ++k) {
        binom *= (n - 1 + k);
        binom /= k;
    }
    return binom / n;
}

BigInt we_count(std::size_t n) {
    if (n == 0) throw InvalidInput("we_count: n must be at least 1");
    return CountTable(Family::Unordered, n).count(n);
}

CountTable::CountTable(Family family, std::size_t max_n) : family_(family), counts_(1, BigInt(0)) {
    extend_to(max_n);
}

const BigInt& CountTable::count(std::size_t n) const {
    if (n == 0 || n > max_n()) throw InvalidInput("CountTable: index " + std::to_string(n) + " outside table");
    return counts_[n];
}

void CountTable::extend_to(std::size_t max_n) {
    counts_.reserve(max_n + 1);
    for (std::size_t n = counts_.size(); n <= max_n; ++n) {
        if (n == 1) {
            counts_.emplace_back(1);
            continue;
        }
        if (family_ == Family::Plane) {
            // C_{n-1} = sum_{i} C_{i-1} C_{n-i-1} in leaf indexing.
            BigInt sum = 0;
            for (std::size_t i = 1; i < n; ++i) sum += counts_[i] * counts_[n - i];
            counts_.push_back(std::move(sum));
        } else {
            BigInt sum = 0;
            for (std::size_t i = 1; i < n; ++i) sum += counts_[i] * counts_[n - i];
            if (n % 2 == 0) sum += counts_[n / 2];
            if (boost::multiprecision::bit_test(sum, 0))
                throw Error("we_count: odd pre-division sum at n=" + std::to_string(n));
            counts_.push_back(sum >> 1);
        }
    }
}

void CountTable::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write count cache " + path);
    out << "#family=" << to_string(family_) << '\n';
    for (std::size_t n = 1; n <= max_n(); ++n) out << n << '\t' << counts_[n] << '\n';
}

CountTable CountTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot read count cache " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("#family=", 0) != 0)
        throw InvalidInput("count cache: missing #family header");
    CountTable table(parse_family(line.substr(8)), 0);
    std::size_t expected = 1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw InvalidInput("count cache: malformed line '" + line + "'");
        const std::size_t n = std::stoul(line.substr(0, tab));
        if (n != expected) throw InvalidInput("count cache: indices must be consecutive from 1");
        const std::string digits = line.substr(tab + 1);
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
            throw InvalidInput("count cache: malformed integer at n=" + std::to_string(n));
        table.counts_.emplace_back(digits);
        ++expected;
    }
    return table;
}

CountTable CountTable::cached(Family family, std::size_t max_n, const std::string& path) {
    if (std::filesystem::exists(path)) {
        CountTable table = load(path);
        if (table.family() == family && table.max_n() >= max_n) return table;
        if (table.family() == family) {
            table.extend_to(max_n);
            table.save(path);
            return table;
        }
    }
    CountTable table(family, max_n);
    table.save(path);
    return table;
}

namespace {

// Certified enclosure of sum_{n>=1} t_n w^n: partial sum plus the bound t_n <= 4^{n-1}.
struct SeriesBound {
    HighFloat lower;
    HighFloat tail;
};

SeriesBound series_at(const std::vector<HighFloat>& coeffs, const HighFloat& w) {
    HighFloat sum = 0, power = 1;
    const std::size_t truncation = coeffs.size() - 1;
    for (std::size_t n = 1; n <= truncation; ++n) {
        power *= w;
        sum += coeffs[n] * power;
    }
    const HighFloat q = 4 * w;
    HighFloat tail = w * pow(q, static_cast<int>(truncation)) / (1 - q);
    return {sum, tail};
}

std::vector<HighFloat> unordered_coefficients(std::size_t truncation) {
    CountTable table(Family::Unordered, truncation);
    std::vector<HighFloat> coeffs(truncation + 1, HighFloat(0));
    for (std::size_t n = 1; n <= truncation; ++n) coeffs[n] = HighFloat(table[n]);
    return coeffs;
}

constexpr double kBracketHigh = 0.45;

std::size_t truncation_for(double tail_target) {
    // Tail ratio at the top of the bracket is 4 * 0.45^2 = 0.81.
    const double q = 4 * kBracketHigh * kBracketHigh;
    const double n = std::log(tail_target * (1 - q)) / std::log(q);
    return static_cast<std::size_t>(std::clamp(std::ceil(n) + 8, 32.0, 2000.0));
}

}  // namespace

HighFloat unordered_gf(const HighFloat& z, std::size_t truncation) {
    const auto coeffs = unordered_coefficients(truncation);
    const SeriesBound at_square = series_at(coeffs, z * z);
    const HighFloat disc = 1 - 2 * z - at_square.lower;
    if (disc < 0) return HighFloat(1);
    return 1 - sqrt(disc);
}

Constants solve_rho(double target_precision) {
    if (!(target_precision > 0)) throw InvalidInput("solve_rho: target precision must be positive");
    if (target_precision < 1e-20)
        throw NonConvergence("solve_rho: target precision below the 50-digit working precision budget");
    const double tail_target = target_precision * target_precision * 1e-4;
    const std::size_t truncation = truncation_for(tail_target);
    const auto coeffs = unordered_coefficients(truncation);

    // phi(z) = 2z - 1 + T(z^2) vanishes exactly at rho; T(z) = 1 - sqrt(-phi(z)) below rho.
    HighFloat lo = 0.25, hi = kBracketHigh;
    for (int iter = 0; iter < 400; ++iter) {
        const SeriesBound at_lo = series_at(coeffs, lo * lo);
        const HighFloat phi_lo = 2 * lo - 1 + at_lo.lower + at_lo.tail;  // upper bound of phi(lo)
        if (phi_lo < 0) {
            const double gap = static_cast<double>(sqrt(-(2 * lo - 1 + at_lo.lower)));
            if (gap <= target_precision) {
                Constants out;
                out.rho_high = lo;
                out.rho = static_cast<double>(lo);
                out.precision = gap;
                out.truncation = truncation;
                return out;
            }
        }
        const HighFloat mid = (lo + hi) / 2;
        const SeriesBound at_mid = series_at(coeffs, mid * mid);
        const HighFloat phi_mid_low = 2 * mid - 1 + at_mid.lower;
        const HighFloat phi_mid_high = phi_mid_low + at_mid.tail;
        if (phi_mid_high < 0) {
            lo = mid;
        } else if (phi_mid_low > 0) {
            hi = mid;
        } else {
            throw NonConvergence("solve_rho: tail bound too coarse to decide the bisection step");
        }
    }
    throw NonConvergence("solve_rho: bisection did not reach the requested precision");
}

ScaleConstant compute_scale(const Constants& constants) {
    const std::size_t truncation = constants.truncation;
    const auto coeffs = unordered_coefficients(truncation);
    const HighFloat w = constants.rho_high * constants.rho_high;
    HighFloat derivative = 0, power = 1;  // power = w^{n-1}
    for (std::size_t n = 1; n <= truncation; ++n) {
        derivative += coeffs[n] * n * power;
        power *= w;
    }
    const HighFloat q = 4 * w;
    const HighFloat big_n = truncation;
    const HighFloat tail = pow(q, static_cast<int>(truncation)) * ((big_n + 1) - big_n * q) / ((1 - q) * (1 - q));
    const HighFloat rho = constants.rho_high;
    const HighFloat c_high = sqrt(2 * rho + 2 * rho * rho * derivative);

    ScaleConstant out;
    out.c = static_cast<double>(c_high);
    // Sensitivity of c to rho is below 10 on the bracket; rho error is at most precision^2.
    const double rho_error = constants.precision * constants.precision;
    out.precision = static_cast<double>(rho * rho * tail / c_high) + 10 * rho_error + 1e-16;
    const double rho_d = constants.rho;
    const double identity_rhs = 2 * rho_d + 2 * rho_d * rho_d * static_cast<double>(derivative);
    out.identity_gap = std::abs(out.c * out.c - identity_rhs);
    return out;
}

double compute_c(const Constants& constants) { return compute_scale(constants).c; }

const Constants& default_constants() {
    static const Constants constants = solve_rho(1e-12);
    return constants;
}

double default_c() {
    static const double c = compute_c(default_constants());
    return c;
}

WeightTable weight_table(WeightKind kind, std::size_t max_n, const Constants& constants) {
    if (max_n == 0) throw InvalidInput("weight_table: N must be at least 1");
    WeightTable table;
    table.kind = kind;
    table.weights.assign(max_n + 1, 0.0);
    const double pi = boost::math::constants::pi<double>();
    if (kind == WeightKind::Mu) {
        long double w = 0.5L;
        for (std::size_t n = 1; n <= max_n; ++n) {
            table.weights[n] = static_cast<double>(w);
            w *= static_cast<long double>(2 * n - 1) / static_cast<long double>(2 * (n + 1));
        }
        // mu_n <= 1 / (2 sqrt(pi) n sqrt(n-1)), summed against the integral.
        table.tail_mass = max_n >= 2 ? 1.0 / std::sqrt(pi * static_cast<double>(max_n - 1)) : 1.0;
        return table;
    }

    table.rho = constants.rho;
    // Exact values for small n, then the recurrence nu_n = (sum nu_i nu_{n-i} + [n even] rho^{n/2} nu_{n/2}) / 2.
    const std::size_t exact_upto = std::min<std::size_t>(max_n, 300);
    {
        CountTable counts(Family::Unordered, exact_upto);
        HighFloat power = 1;
        for (std::size_t n = 1; n <= exact_upto; ++n) {
            power *= constants.rho_high;
            table.weights[n] = static_cast<double>(HighFloat(counts[n]) * power);
        }
    }
    std::vector<double>& nu = table.weights;
    for (std::size_t n = exact_upto + 1; n <= max_n; ++n) {
        double sum = 0.0;
        const std::size_t half = (n - 1) / 2;
        for (std::size_t i = 1; i <= half; ++i) sum += nu[i] * nu[n - i];
        sum *= 2.0;
        if (n % 2 == 0) {
            const std::size_t m = n / 2;
            sum += nu[m] * nu[m];
            sum += std::pow(constants.rho, static_cast<double>(m)) * nu[m];
        }
        nu[n] = 0.5 * sum;
    }
    const double big_n = static_cast<double>(max_n);
    const double scale = std::max(default_c() / (2 * std::sqrt(pi)), nu[max_n] * std::pow(big_n, 1.5));
    table.tail_mass = max_n >= 2 ? 2 * scale / std::sqrt(big_n - 1) : 1.0;
    return table;
}

WeightTable weight_table(WeightKind kind, std::size_t max_n) {
    return weight_table(kind, max_n, default_constants());
}

}  // namespace crt
