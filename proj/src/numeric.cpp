#include "treent/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "treent/error.hpp"

namespace treent {

double xlnx(double t) {
    if (t <= 0.0) return 0.0;
    return -t * std::log(t);
}

double entropy_nats(const std::vector<double>& probs) {
    double h = 0.0;
    for (double p : probs) h += xlnx(p);
    return h;
}

double binary_entropy(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return xlnx(t) + xlnx(1.0 - t);
}

double entropy_modulus(double tv, uint64_t atoms) {
    if (atoms <= 1) return 0.0;
    double cap = std::log(static_cast<double>(atoms));
    if (tv >= 1.0) return cap;
    double t = std::min(tv, 1.0);
    double bound = t * std::log(static_cast<double>(atoms - 1 < 2 ? 2 : atoms - 1)) +
                   binary_entropy(t);
    return std::min(bound, cap);
}

double ln_factorial(unsigned n) {
    static const int kCache = 256;
    static double cache[kCache];
    static bool init = false;
    if (!init) {
        cache[0] = 0.0;
        for (int i = 1; i < kCache; ++i) cache[i] = cache[i - 1] + std::log(static_cast<double>(i));
        init = true;
    }
    if (n < kCache) return cache[n];
    return std::lgamma(static_cast<double>(n) + 1.0);
}

namespace {

// Series expansion for P(a,x), x < a+1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a,x), x >= a+1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double igamma_q(double a, double x) {
    require(a > 0.0 && x >= 0.0, "igamma_q: invalid arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi_square_tail(double stat, int df) {
    require(df > 0, "chi_square_tail: df must be positive");
    if (stat <= 0.0) return 1.0;
    return igamma_q(0.5 * df, 0.5 * stat);
}

double upper_quantile(std::vector<double> values, double alpha) {
    require(!values.empty(), "upper_quantile: empty sample");
    require(alpha > 0.0 && alpha < 1.0, "upper_quantile: alpha must be in (0,1)");
    std::sort(values.begin(), values.end(), std::greater<double>());
    size_t k = static_cast<size_t>(std::ceil(alpha * static_cast<double>(values.size())));
    if (k == 0) k = 1;
    if (k > values.size()) k = values.size();
    return values[k - 1];
}

BootstrapCI bootstrap_ci(const std::vector<double>& values,
                         const std::function<double(const std::vector<double>&)>& stat,
                         int rounds, double level, Rng& rng) {
    require(!values.empty(), "bootstrap_ci: empty sample");
    std::vector<double> stats;
    stats.reserve(rounds);
    std::vector<double> resample(values.size());
    for (int b = 0; b < rounds; ++b) {
        for (size_t i = 0; i < values.size(); ++i)
            resample[i] = values[rng.below(values.size())];
        stats.push_back(stat(resample));
    }
    std::sort(stats.begin(), stats.end());
    double tail = 0.5 * (1.0 - level);
    size_t lo = static_cast<size_t>(tail * (stats.size() - 1));
    size_t hi = static_cast<size_t>((1.0 - tail) * (stats.size() - 1));
    return {stats[lo], stats[hi]};
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double effective_sample_size(const std::vector<double>& series) {
    size_t n = series.size();
    if (n < 8) return static_cast<double>(n);
    double m = mean(series);
    double c0 = 0.0;
    for (double x : series) c0 += (x - m) * (x - m);
    c0 /= static_cast<double>(n);
    if (c0 <= 0.0) return static_cast<double>(n);
    auto gamma = [&](size_t lag) {
        double s = 0.0;
        for (size_t i = 0; i + lag < n; ++i) s += (series[i] - m) * (series[i + lag] - m);
        return s / static_cast<double>(n);
    };
    // Geyer's initial positive sequence over pair sums.
    double tau = c0;
    for (size_t k = 1; 2 * k < n; ++k) {
        double pair = gamma(2 * k - 1) + gamma(2 * k);
        if (pair <= 0.0) break;
        tau += 2.0 * pair;
    }
    double ess = static_cast<double>(n) * c0 / tau;
    return std::max(1.0, std::min(ess, static_cast<double>(n)));
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace treent
