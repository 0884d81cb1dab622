#pragma once

#include <optional>
#include <vector>

#include "treent/degree.hpp"
#include "treent/law.hpp"
#include "treent/rng.hpp"
#include "treent/ugw.hpp"

namespace treent {

enum class MarkovKind { RMarkov, VertexMarkov };

// An r-Markov or vertex-Markov process on the regular tree (or a
// vertex-Markov process on UGW(pi)), given by its defining marginal and the
// derived extension kernels. Immutable after build.
//
// Exact extension kernels are implemented for defining radius <= 2: deeper
// kernels would condition on colors outside the already-extended ball.
class MarkovProcess {
public:
    MarkovKind kind() const { return kind_; }
    int degree() const { return degree_; }
    int defining_radius() const { return kind_ == MarkovKind::VertexMarkov ? 1 : radius_; }
    const LocalLaw& defining() const { return defining_; }
    const std::optional<DegreeDistribution>& pi() const { return pi_; }

    // True if some conditioning row has zero probability (filled uniformly
    // and never reachable from positive-mass prefixes).
    bool has_unused_rows() const { return unused_rows_ > 0; }
    int unused_rows() const { return unused_rows_; }

private:
    friend MarkovProcess build_markov(const LocalLaw&, MarkovKind, int,
                                      std::optional<DegreeDistribution>);
    friend LocalLaw extend_marginal(const MarkovProcess&, int);
    friend UgwBallLaw extend_marginal_ugw(const MarkovProcess&, int);
    friend std::vector<int> sample_coloring(const MarkovProcess&, int, Rng&);
    friend std::pair<UgwShape, std::vector<int>> sample_coloring_ugw(const MarkovProcess&, int,
                                                                     Rng&);

    MarkovKind kind_ = MarkovKind::VertexMarkov;
    int degree_ = 0;
    int radius_ = 1;
    LocalLaw defining_{BallShape::edge(3, 1), ColorAlphabet::binary()};
    std::optional<DegreeDistribution> pi_;
    int unused_rows_ = 0;

    // vertex kernel: root law and per-color child kernel rows
    std::vector<double> root_law_;
    std::vector<std::vector<double>> vertex_kernel_;  // [parent][child]
    std::vector<bool> vertex_row_used_;

    // r-Markov kernels: conditioning key -> distribution over (d-1)-tuples
    // of new child colors. r=1 keys (x_w, x_parent); r=2 keys (x_w,
    // x_parent, sorted slot colors of the parent's other neighbors).
    std::vector<std::vector<double>> block_kernel_;
    std::vector<bool> block_row_used_;
    int tuple_count_ = 0;
};

// Unique Markov process with the given defining marginal. For the ugw
// setting (vertex kind only) the root color law is the edge-law marginal,
// independent of the root degree.
MarkovProcess build_markov(const LocalLaw& p, MarkovKind kind, int degree,
                           std::optional<DegreeDistribution> pi = std::nullopt);

// Exact marginal on S_t (regular setting); table capped at 2^24 entries.
LocalLaw extend_marginal(const MarkovProcess& mp, int t);

// Exact radius-t law for the ugw setting.
UgwBallLaw extend_marginal_ugw(const MarkovProcess& mp, int t);

// One sampled coloring of S_t in BFS vertex order.
std::vector<int> sample_coloring(const MarkovProcess& mp, int t, Rng& rng);
std::pair<UgwShape, std::vector<int>> sample_coloring_ugw(const MarkovProcess& mp, int t,
                                                          Rng& rng);

// CSV emission of sampled colorings (one row per sample, BFS order).
std::string samples_csv(const MarkovProcess& mp, int t, int count, Rng& rng);

// Lemma-11 defect: Sigma_r(p|S_r) - Sigma_{r+1}(p) for a ball law of radius
// r+1 >= 2. Non-negative; zero iff p extends an r-Markov process.
double markov_defect(const LocalLaw& p, int degree);

// Lemma-12 defect: Sigma_e(p|E_1) - Sigma_1(p) for a radius-1 ball law.
double vertex_defect(const LocalLaw& p, int degree);

// Rebuild-and-compare test of the defect-zero equality case.
bool is_markov_extension(const LocalLaw& p, int degree, double tol);
bool is_vertex_markov_law(const LocalLaw& p, int degree, double tol);

}  // namespace treent
