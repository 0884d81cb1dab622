#pragma once

#include <optional>
#include <string>
#include <vector>

#include "treent/law.hpp"
#include "treent/optimize.hpp"
#include "treent/ugw.hpp"

namespace treent {

enum class Verdict { CertifiedTypical, RefutedNecessary, Inconclusive };
enum class CertifyMode { RigorousNet, Heuristic };

std::string to_string(Verdict v);

struct CertifySettings {
    CertifyMode mode = CertifyMode::RigorousNet;
    int resolution = 32;
    int64_t node_budget = 400'000;
    int restarts = 24;
    int ascent_iters = 400;
    uint64_t seed = 1;
    int threads = 0;
    double tol = 1e-9;
};

// Outcome of the coupling-polytope check. A certified-typical verdict is
// only produced in rigorous-net mode with s + gap_bound <= 2 Sigma(p) + tol;
// a refuted verdict means Sigma(p) < -tol; anything else is inconclusive.
struct Certificate {
    Verdict verdict = Verdict::Inconclusive;
    std::string theorem;          // route: vertex-markov / edge-markov(r) / ...
    std::string mode_desc;
    double sigma_p = 0.0;         // Sigma(p) for the (possibly reduced) law
    double threshold = 0.0;       // 2 Sigma(p)
    double best_value = 0.0;      // s: best coupling value found
    double gap_bound = 0.0;       // B: sup <= s + B when rigorous
    std::optional<double> entropy;  // h = Sigma(p) when certified
    bool radius_condition_propagates = false;  // Markov routes: holds for all larger radii
    std::vector<std::string> notes;
    std::string best_coupling_text;  // law-file serialization of q*
    int64_t nodes = 0;
    bool search_complete = false;

    std::string serialize() const;
};

struct NecessaryCheck {
    bool pass = false;
    double sigma = 0.0;
};

// Star-edge necessary condition: fails iff Sigma(p) < -1e-9.
NecessaryCheck necessary_check(const LocalLaw& p, int degree);
NecessaryCheck necessary_check_ugw(const LocalLaw& edge_law, const DegreeDistribution& pi);
NecessaryCheck necessary_check_ugw(const UgwBallLaw& p);

struct MaximizeResult {
    double s = 0.0;          // best coupling objective found (lower bound)
    double gap_bound = 0.0;  // rigorous: sup <= s + gap_bound
    bool rigorous = false;
    std::string coupling_text;
    int64_t nodes = 0;
};

// Maximizes Sigma over invariant couplings of p with itself.
MaximizeResult maximize_coupling_sigma(const LocalLaw& p, int degree,
                                       const CertifySettings& settings);

// Full certification pipeline: necessary check, Lemma 11/12 equality
// reductions to the smallest defining radius, then the coupling-polytope
// second-moment condition on the reduced law.
Certificate certify(const LocalLaw& p, int degree, const CertifySettings& settings);

// UGW variants: vertex-Markov from an edge law, and radius-1 ball laws.
Certificate certify_ugw_vertex(const LocalLaw& edge_law, const DegreeDistribution& pi,
                               const CertifySettings& settings);
Certificate certify_ugw_ball1(const UgwBallLaw& p, const CertifySettings& settings);

}  // namespace treent
