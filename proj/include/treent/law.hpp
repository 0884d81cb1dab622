#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "treent/alphabet.hpp"
#include "treent/prob_table.hpp"
#include "treent/shape.hpp"

namespace treent {

struct Violation {
    std::string what;
    double magnitude = 0.0;
};

// A finite marginal law on a tree neighborhood. Ball-shaped laws model
// members of I_{d,r}(M); edge-shaped laws members of I_e(M) (and E_r
// restrictions). Immutable by convention after construction.
struct LocalLaw {
    BallShape shape;
    ColorAlphabet alphabet;
    ProbTable table;

    LocalLaw(BallShape s, ColorAlphabet a)
        : shape(std::move(s)),
          alphabet(std::move(a)),
          table(shape.num_vertices(), alphabet.size()) {}

    bool is_edge_law() const { return shape.kind() == BallShape::Kind::Edge; }
};

// Invariance-class membership check. Empty result = valid law.
std::vector<Violation> validate(const LocalLaw& law);
void require_valid(const LocalLaw& law, const std::string& context);

// Marginal onto a sub-shape (S_t or E_t inside S_r, E_t inside E_r, or the
// root alone). Ball laws restricted to an edge shape acquire the edge tag.
LocalLaw restrict_law(const LocalLaw& law, const BallShape& target);

// Root marginal as a plain vector over colors.
std::vector<double> root_marginal(const LocalLaw& law);

// Projection of a raw table onto its invariance class: orbit averages under
// the automorphism group (and edge flip for edge shapes), then normalized.
// Idempotent; fixed points are exactly the valid laws.
LocalLaw symmetrize(const BallShape& shape, const ColorAlphabet& alphabet,
                    const ProbTable& raw);
LocalLaw symmetrize(const LocalLaw& law);

// A coupling of p and q: a law over the product alphabet whose coordinate
// projections reproduce p and q.
struct CouplingLaw {
    LocalLaw joint;
    int m1;
    int m2;
};

// which = 0 for the first coordinate, 1 for the second.
LocalLaw project_coupling(const LocalLaw& joint, int m1, int m2, int which);

CouplingLaw couple(const LocalLaw& p, const LocalLaw& q, const ProbTable& joint_table);
CouplingLaw diagonal_coupling(const LocalLaw& p);
CouplingLaw independent_coupling(const LocalLaw& p);

// Total variation between two laws on the same shape and alphabet.
double law_tv(const LocalLaw& a, const LocalLaw& b);
double table_tv(const ProbTable& a, const ProbTable& b);

// Plain-text law files: d=, r=, alphabet=, kind= headers then one
// "<colors> <probability>" line per atom, 17 significant digits.
struct LawFile {
    LocalLaw law;
    std::map<std::string, std::string> extra_headers;
};

void write_law(std::ostream& os, const LocalLaw& law,
               const std::map<std::string, std::string>& extra_headers = {});
void write_law_file(const std::string& path, const LocalLaw& law,
                    const std::map<std::string, std::string>& extra_headers = {});
LawFile read_law(std::istream& is);
LawFile read_law_file(const std::string& path);

}  // namespace treent
