#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "treent/rng.hpp"

namespace treent {

// Sparse nonnegative linear map stored by column: cols[v] lists
// (image index, coefficient) pairs.
struct LinearMap {
    int out_dim = 0;
    std::vector<std::vector<std::pair<int, double>>> cols;

    void apply(const std::vector<double>& x, std::vector<double>& y) const {
        y.assign(out_dim, 0.0);
        for (size_t v = 0; v < cols.size(); ++v)
            for (const auto& [j, a] : cols[v]) y[j] += a * x[v];
    }
};

class AffineProjector;

// Maximization target over a polytope of symmetrized probability vectors:
//
//   f(t) = ic * sum_o w_o eta(t_o) + sum_k c_k H(L_k t) + <linear, t> + const
//
// with eta(t) = -t ln t, ic >= 0, c_k < 0, subject to A t = b and t >= 0.
// Coordinates are orbit representatives; w_o is the orbit size.
struct CouplingProblem {
    std::vector<double> weight;
    double identity_coeff = 1.0;
    std::vector<std::pair<double, LinearMap>> neg_terms;
    std::vector<double> linear;  // optional, same dim as weight (may be empty)
    double objective_constant = 0.0;

    // affine constraints (sparse rows)
    std::vector<std::vector<std::pair<int, double>>> rows;
    std::vector<double> rhs;

    // feasible seed points in orbit coordinates
    std::vector<std::vector<double>> seeds;
    std::vector<std::string> seed_names;

    // optional random feasible generator (IPF-based, supplied by builders)
    std::function<std::vector<double>(Rng&)> random_feasible;

    int dim() const { return static_cast<int>(weight.size()); }
    double objective(const std::vector<double>& t) const;
    double sigma_value(const std::vector<double>& t) const;    // objective minus <linear, t>
    double linear_value(const std::vector<double>& t) const;
    void gradient(const std::vector<double>& t, std::vector<double>& g) const;

    // Factors the constraint Gram matrix once; must be called (by the
    // builder) before concurrent use of project_feasible.
    void prepare();

    // Euclidean projection onto {A t = b, t >= 0} (Dykstra); returns the
    // worst constraint residual after projection.
    double project_feasible(std::vector<double>& t, int max_rounds = 400) const;

    std::shared_ptr<const AffineProjector> projector;
};

struct AscentResult {
    double value = 0.0;
    std::vector<double> point;
    std::string origin;
};

// Multi-start projected gradient ascent from the seeds plus `restarts`
// random feasible points. Deterministic given (seed, restarts).
AscentResult ascend(const CouplingProblem& prob, int restarts, uint64_t seed, int threads = 0,
                    int max_iters = 400);

struct BnbResult {
    double best_value = 0.0;   // best feasible objective seen
    std::vector<double> best_point;
    double upper_bound = 0.0;  // sound bound on the supremum
    int64_t nodes = 0;
    bool complete = false;     // every cell pruned
};

struct BnbSettings {
    int resolution = 32;  // nominal net granularity (reported; refinement is adaptive)
    int64_t node_budget = 400'000;
    double tol = 1e-9;  // pruning slack
    int threads = 0;
    // prune cells whose bound is <= this (certification threshold); when
    // unset, prunes against best_value + tol (pure maximization).
    std::optional<double> prune_threshold;
    int restarts = 24;  // ascent restarts for the lower bound
    int ascent_iters = 400;
    uint64_t seed = 1;
};

// Certified global maximization: branch and bound with exact concave cell
// relaxations (identity entropy kept, restriction entropies replaced by
// secant underestimates) bounded through Lagrangian duality, plus the
// entropy modulus-of-continuity bound around the incumbent.
BnbResult branch_and_bound(const CouplingProblem& prob, const BnbSettings& settings);

// Sound upper bound for sup { <linear, t> : sigma part of `prob` >= 0 } —
// cells whose sigma upper bound is negative cannot contain feasible points.
BnbResult branch_and_bound_linear_sigma_nonneg(const CouplingProblem& prob,
                                               const BnbSettings& settings);

}  // namespace treent
