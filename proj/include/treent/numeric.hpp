#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "treent/rng.hpp"

namespace treent {

inline constexpr double kMassTol = 1e-12;      // normalization checks
inline constexpr double kMarginalTol = 1e-9;   // coupling marginal checks

// -t ln t with the 0 ln 0 = 0 convention.
double xlnx(double t);

// Shannon entropy (nats) of a nonnegative vector summing to ~1.
// Entries are not revalidated here; see shannon() in entropy.hpp for the
// checked operation.
double entropy_nats(const std::vector<double>& probs);

// Binary entropy h2(t), clamped to [0,1].
double binary_entropy(double t);

// Entropy modulus of continuity on distributions over n atoms:
// |H(a) - H(b)| <= tv*ln(n-1) + h2(tv), capped at ln n.
double entropy_modulus(double tv, uint64_t atoms);

double ln_factorial(unsigned n);

// Regularized upper incomplete gamma Q(a, x); chi-square tail probability is
// Q(df/2, x/2).
double igamma_q(double a, double x);
double chi_square_tail(double stat, int df);

// Largest h with empirical P(X >= h) >= alpha; values sorted internally.
double upper_quantile(std::vector<double> values, double alpha);

struct BootstrapCI {
    double lo = 0.0;
    double hi = 0.0;
};

// Percentile bootstrap CI for a statistic of the sample mean transform
// applied externally: resamples `values`, applies `stat` to each resample.
BootstrapCI bootstrap_ci(const std::vector<double>& values,
                         const std::function<double(const std::vector<double>&)>& stat,
                         int rounds, double level, Rng& rng);

double mean(const std::vector<double>& v);
double sample_sd(const std::vector<double>& v);

// Effective sample size of a stationary series (Geyer initial positive
// sequence on sample autocovariances).
double effective_sample_size(const std::vector<double>& series);

std::string format_g17(double v);

}  // namespace treent
