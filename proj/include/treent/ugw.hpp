#pragma once

#include <map>
#include <string>
#include <vector>

#include "treent/degree.hpp"
#include "treent/entropy.hpp"
#include "treent/law.hpp"
#include "treent/rng.hpp"

namespace treent {

// A labeled rooted tree of bounded depth: vertices in BFS order, each with
// its recorded offspring count (counts at the truncation depth are zero).
struct UgwShape {
    std::vector<int> counts;
    std::vector<int> parent;
    std::vector<int> depth;
    std::vector<std::vector<int>> children;

    int size() const { return static_cast<int>(counts.size()); }
    std::string code() const;
    static UgwShape from_counts(const std::vector<int>& counts);
};

// Law of a colored unimodular Galton-Watson neighborhood at finite radius:
// atoms are (labeled shape, coloring) pairs. The shape marginal must be
// UGW(pi) truncated at the radius; colors must not depend on the labeling.
struct UgwBallLaw {
    DegreeDistribution pi;
    int radius;
    ColorAlphabet alphabet;
    std::vector<UgwShape> shapes;     // all shapes with positive UGW probability
    std::vector<double> shape_probs;  // matching UGW(pi)_r probabilities
    std::vector<ProbTable> tables;    // per-shape coloring tables

    UgwBallLaw(DegreeDistribution pi_, int radius_, ColorAlphabet alphabet_);
    int shape_index(const std::string& code) const;
};

// All labeled shapes of UGW(pi) truncated at `radius`, with probabilities
// pi(root count) * prod hat_pi(inner counts).
std::vector<std::pair<UgwShape, double>> enumerate_ugw_shapes(const DegreeDistribution& pi,
                                                              int radius);

std::vector<Violation> validate_ugw(const UgwBallLaw& law);

// The edge-rooted law: restriction to E_r of the degree-biased, edge-rooted
// version of the law. Keys encode the two colored side trees.
std::map<std::string, double> vec_mu(const UgwBallLaw& law);

// Sigma_r over UGW(pi): H(X_{S_r}) - (d/2) H(vec X_{E_r}) - H(pi).
// The report carries the conditional-form value as a component.
EntropyReport sigma_r_ugw(const UgwBallLaw& law, bool check = true);

// Radius-1 star form for the vertex-Markov construction from an edge law:
// (d/2) H(vec X_{E_1}) - d H(vec X_o) + H(X_o) - H(pi), with the root color
// law equal to the edge-law marginal.
EntropyReport sigma_e_ugw(const LocalLaw& edge_law, const DegreeDistribution& pi,
                          bool check = true);

// Same formula evaluated on a full radius-1 UGW ball law.
EntropyReport sigma_e_ugw_of_ball(const UgwBallLaw& law, bool check = true);

// Embeds a regular ball law as a UGW law with pi = Dirac(d).
UgwBallLaw to_ugw(const LocalLaw& ball_law);

// Random member of the class: random colors per shape, then averaged over
// labelings so the law does not depend on the labeling.
UgwBallLaw random_ugw_law(const DegreeDistribution& pi, int radius,
                          const ColorAlphabet& alphabet, Rng& rng);

}  // namespace treent
