#pragma once

#include <vector>

#include "treent/law.hpp"
#include "treent/optimize.hpp"
#include "treent/ugw.hpp"

namespace treent {

// Invariant couplings of p with itself, p an edge law on E_1. Variables are
// flip-orbit representatives of pairs of edge colorings; the objective is
// Sigma_e at the given (possibly fractional, for UGW) degree.
CouplingProblem make_vertex_coupling_problem(const LocalLaw& p, double degree,
                                             double objective_constant = 0.0);

// Invariant couplings of p with itself, p a ball law on S_r. Simultaneous
// automorphism orbits, marginal constraints, flip constraints on the E_r
// restriction; objective Sigma_r.
CouplingProblem make_ball_coupling_problem(const LocalLaw& p, int degree);

// Couplings of a radius-1 UGW ball law with itself (same tree, paired
// colors); objective Sigma_1 over UGW(pi).
CouplingProblem make_ugw_ball1_coupling_problem(const UgwBallLaw& p);

// Optimization over edge laws themselves (factor-energy): objective
// Sigma_e(p) + <psi, p> with psi_atom = psi0(a) + d*psi1(a,b).
CouplingProblem make_edge_law_problem(int alphabet_size, double degree,
                                      const std::vector<double>& psi_atom);

// Optimization over ball laws on S_r: objective Sigma_r(p) + <psi, p>.
CouplingProblem make_ball_law_problem(int alphabet_size, int degree, int radius,
                                      const std::vector<double>& psi_atom);

// Decoding of orbit coordinates back to laws.
CouplingLaw decode_vertex_coupling(const LocalLaw& p, const CouplingProblem& prob,
                                   const std::vector<double>& t);
CouplingLaw decode_ball_coupling(const LocalLaw& p, const CouplingProblem& prob,
                                 const std::vector<double>& t);
LocalLaw decode_edge_law(int alphabet_size, int degree, const CouplingProblem& prob,
                         const std::vector<double>& t);
LocalLaw decode_ball_law(int alphabet_size, int degree, int radius, const CouplingProblem& prob,
                         const std::vector<double>& t);

// Atom orbit bookkeeping shared by the builders (exposed for tests).
struct OrbitIndex {
    std::vector<int> orbit_of;      // atom -> orbit id
    std::vector<int> representative;  // orbit -> first atom
    std::vector<double> weight;     // orbit sizes
};
OrbitIndex orbits_under(size_t atom_count,
                        const std::vector<std::vector<uint32_t>>& generator_maps);

}  // namespace treent
