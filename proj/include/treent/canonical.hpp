#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "treent/law.hpp"

namespace treent {

// A rooted colored graph given by an explicit edge list; vertices 0..n-1,
// colors are alphabet indices.
struct RootedColoredGraph {
    int n = 0;
    int root = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<int> colors;
};

// Canonical encoding of an unlabeled rooted colored graph. Two inputs get
// the same code exactly when they are isomorphic preserving root and colors.
// Codes are printable and parseable (see potential files).
struct CanonicalBallClass {
    std::string code;
    auto operator<=>(const CanonicalBallClass&) const = default;
};

// Classifies colorings of one fixed rooted graph structure. Trees use the
// recursive minimal code (sorted child codes); cyclic balls minimize an
// adjacency-plus-colors code over level-respecting vertex orderings.
class BallClassifier {
public:
    // adjacency given as an edge list over 0..n-1; root must reach every
    // vertex within `radius_cap` (checked).
    BallClassifier(int n, int root, const std::vector<std::pair<int, int>>& edges,
                   int radius_cap);

    bool is_tree() const { return is_tree_; }
    int size() const { return n_; }
    int depth() const { return depth_; }

    // colors[i] = color of vertex i (original indices).
    std::string classify(const std::vector<int>& colors) const;

private:
    std::string classify_tree(const std::vector<int>& colors) const;
    std::string classify_cyclic(const std::vector<int>& colors) const;

    int n_ = 0;
    int root_ = 0;
    int depth_ = 0;
    bool is_tree_ = false;
    std::vector<std::vector<int>> adj_;
    std::vector<std::vector<int>> children_;   // tree path (BFS tree = graph)
    std::vector<int> order_;                   // postorder for tree encoding
    std::string struct_prefix_;                // cyclic path
    std::vector<std::vector<int>> min_orderings_;  // position -> vertex
};

CanonicalBallClass canonicalize(const RootedColoredGraph& g, int radius_cap);

// Empirical or law-induced distribution over canonical classes.
struct BallStatistics {
    int radius = 0;
    int alphabet_size = 0;
    std::map<std::string, double> freq;
};

double tv_distance(const BallStatistics& a, const BallStatistics& b);
double tv_distance(const std::map<std::string, double>& a,
                   const std::map<std::string, double>& b);

// Pushforward of a ball law through canonicalization.
BallStatistics class_distribution(const LocalLaw& law);

// Decodes a class code back to a rooted colored graph (inverse of the
// encoding up to isomorphism); used to evaluate decomposed potentials.
RootedColoredGraph parse_class_code(const std::string& code);

}  // namespace treent
