#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace treent {

// Labeled tree neighborhoods of the d-regular tree, in breadth-first vertex
// order rooted at o.
//
//   Ball  S_r: root o, its d children, then d-1 children per inner vertex.
//   Edge  E_r: the (r-1)-neighborhood of the root edge {o,1}; two (d-1)-ary
//              trees of depth r-1 whose roots o and 1 are adjacent.
//
// Vertex 0 is always o. For Edge shapes vertex 1 is the far endpoint of the
// root edge and `side` tells which endpoint a vertex hangs from.
class BallShape {
public:
    enum class Kind { Ball, Edge };

    static BallShape ball(int degree, int radius);
    static BallShape edge(int degree, int radius);
    static BallShape root_only(int degree);  // S_0

    Kind kind() const { return kind_; }
    int degree() const { return degree_; }
    int radius() const { return radius_; }
    int num_vertices() const { return static_cast<int>(parent_.size()); }

    int parent(int v) const { return parent_[v]; }
    const std::vector<int>& children(int v) const { return children_[v]; }
    int depth(int v) const { return depth_[v]; }
    int side(int v) const { return side_[v]; }

    // Edge list of the underlying tree (parent-child pairs; for Edge shapes
    // this includes {o,1}).
    std::vector<std::pair<int, int>> edges() const;

    bool same_shape(const BallShape& o) const {
        return kind_ == o.kind_ && degree_ == o.degree_ && radius_ == o.radius_;
    }

    // Vertex permutation generators of the automorphism group: adjacent
    // transpositions of isomorphic sibling subtrees at every vertex, plus the
    // root-edge flip for Edge shapes. Invariance under these generators is
    // invariance under the whole group.
    const std::vector<std::vector<int>>& aut_generators() const { return generators_; }

    // The involution swapping the two sides of the root edge (Edge shapes).
    const std::vector<int>& edge_flip() const;

    // Embedding of `target` as a sub-shape: emb[i] = index in *this of
    // target vertex i. Supported: S_t in S_r, E_t in S_r, E_t in E_r (t <=
    // r), and S_0 anywhere.
    std::optional<std::vector<int>> embedding_of(const BallShape& target) const;

private:
    BallShape() = default;
    void finish();  // depths, generators, flip

    Kind kind_ = Kind::Ball;
    int degree_ = 0;
    int radius_ = 0;
    std::vector<int> parent_;
    std::vector<std::vector<int>> children_;
    std::vector<int> depth_;
    std::vector<int> side_;
    std::vector<std::vector<int>> generators_;
    std::vector<int> flip_;
};

// Number of vertices of S_r / E_r for degree d (d >= 2).
int64_t ball_vertex_count(int degree, int radius);
int64_t edge_vertex_count(int degree, int radius);

}  // namespace treent
