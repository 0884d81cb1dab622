#pragma once

#include <string>
#include <utility>
#include <vector>

#include "treent/law.hpp"

namespace treent {

// An annealed-entropy evaluation together with the sub-entropies it was
// assembled from. `value` always equals the tagged formula applied to the
// components.
struct EntropyReport {
    double value = 0.0;
    std::string formula;
    std::vector<std::pair<std::string, double>> components;

    double component(const std::string& name) const;
    std::string serialize() const;  // key=value lines, 17 significant digits
};

// Shannon entropy in nats; rejects negative entries and mass away from 1.
double shannon(const std::vector<double>& dist);
double shannon(const ProbTable& dist);

// H(X|Y) = H(X,Y) - H(Y) for a joint table whose coordinates are split by
// `y_vertices` (table vertex indices forming Y).
double conditional_entropy(const ProbTable& joint, const std::vector<int>& y_vertices);

// Sigma_r over the d-regular tree: H(S_r) - (d/2) H(E_r).
EntropyReport sigma_r(const LocalLaw& ball_law, int degree, bool check = true);

// Sigma_e: (d/2) H(E_1) - (d-1) H(root).
EntropyReport sigma_e(const LocalLaw& edge_law, int degree, bool check = true);

// Annealed entropy of the defining law of either kind.
EntropyReport sigma_of(const LocalLaw& law, int degree, bool check = true);

// Independent route through unlabeled classes: H of the unlabeled ball law,
// the edge-class law pi_mu, and the ln N! correction terms. Agrees with
// sigma_r to 1e-10; exists as a cross-check.
EntropyReport sigma_unlabeled(const LocalLaw& ball_law, int degree, bool check = true);

// Both sides of the exchangeable-vector entropy identity
// H(Z) = H(N_Z) - sum_x E[ln N_Z(x)!] + ln n!.
std::pair<double, double> exchangeable_entropy_identity(const ProbTable& dist);

}  // namespace treent
