#include "treent/shape.hpp"

#include <algorithm>

#include "treent/error.hpp"

namespace treent {

int64_t ball_vertex_count(int degree, int radius) {
    int64_t total = 1, level = 1;
    for (int l = 1; l <= radius; ++l) {
        level *= (l == 1) ? degree : degree - 1;
        total += level;
    }
    return total;
}

int64_t edge_vertex_count(int degree, int radius) {
    int64_t total = 2, level = 2;
    for (int l = 1; l <= radius - 1; ++l) {
        level *= degree - 1;
        total += level;
    }
    return total;
}

BallShape BallShape::ball(int degree, int radius) {
    require(degree >= 2, "shape: degree must be at least 2");
    require(radius >= 0, "shape: radius must be non-negative");
    BallShape s;
    s.kind_ = Kind::Ball;
    s.degree_ = degree;
    s.radius_ = radius;
    s.parent_.push_back(-1);
    s.side_.push_back(0);
    std::vector<int> frontier{0};
    for (int l = 1; l <= radius; ++l) {
        std::vector<int> next;
        int fanout = (l == 1) ? degree : degree - 1;
        for (int v : frontier) {
            for (int c = 0; c < fanout; ++c) {
                int idx = static_cast<int>(s.parent_.size());
                s.parent_.push_back(v);
                s.side_.push_back(0);
                next.push_back(idx);
            }
        }
        frontier = std::move(next);
    }
    s.finish();
    return s;
}

BallShape BallShape::edge(int degree, int radius) {
    require(degree >= 2, "shape: degree must be at least 2");
    require(radius >= 1, "shape: edge shape needs radius >= 1");
    BallShape s;
    s.kind_ = Kind::Edge;
    s.degree_ = degree;
    s.radius_ = radius;
    s.parent_ = {-1, 0};
    s.side_ = {0, 1};
    // Two (degree-1)-ary side trees of depth radius-1, grown level by level
    // with the o-side block before the 1-side block. Matching positions in
    // the two blocks are exchanged by the root-edge flip.
    std::vector<int> frontier_o{0}, frontier_1{1};
    for (int l = 1; l <= radius - 1; ++l) {
        std::vector<int> next_o, next_1;
        for (int v : frontier_o) {
            for (int c = 0; c < degree - 1; ++c) {
                int idx = static_cast<int>(s.parent_.size());
                s.parent_.push_back(v);
                s.side_.push_back(0);
                next_o.push_back(idx);
            }
        }
        for (int v : frontier_1) {
            for (int c = 0; c < degree - 1; ++c) {
                int idx = static_cast<int>(s.parent_.size());
                s.parent_.push_back(v);
                s.side_.push_back(1);
                next_1.push_back(idx);
            }
        }
        frontier_o = std::move(next_o);
        frontier_1 = std::move(next_1);
    }
    s.finish();
    return s;
}

BallShape BallShape::root_only(int degree) { return ball(degree, 0); }

std::vector<std::pair<int, int>> BallShape::edges() const {
    std::vector<std::pair<int, int>> out;
    for (int v = 1; v < num_vertices(); ++v) out.emplace_back(parent_[v], v);
    return out;
}

namespace {

// Position-wise correspondence of two isomorphic sibling subtrees: walks
// children lists in parallel.
void map_subtree(const std::vector<std::vector<int>>& children, int a, int b,
                 std::vector<int>& perm) {
    perm[a] = b;
    perm[b] = a;
    const auto& ca = children[a];
    const auto& cb = children[b];
    for (size_t i = 0; i < ca.size(); ++i) map_subtree(children, ca[i], cb[i], perm);
}

int subtree_size(const std::vector<std::vector<int>>& children, int v) {
    int n = 1;
    for (int c : children[v]) n += subtree_size(children, c);
    return n;
}

}  // namespace

void BallShape::finish() {
    int n = num_vertices();
    children_.assign(n, {});
    for (int v = 1; v < n; ++v) children_[parent_[v]].push_back(v);
    depth_.assign(n, 0);
    for (int v = 1; v < n; ++v) {
        if (kind_ == Kind::Edge && v == 1)
            depth_[v] = 0;  // the far endpoint is a root of its own side
        else
            depth_[v] = depth_[parent_[v]] + 1;
    }

    // Sibling-block transpositions. Children with equal subtree sizes are
    // isomorphic here (all our subtrees are homogeneous per depth).
    generators_.clear();
    std::vector<int> idperm(n);
    for (int v = 0; v < n; ++v) idperm[v] = v;
    for (int v = 0; v < n; ++v) {
        const auto& ch = children_[v];
        for (size_t i = 0; i + 1 < ch.size(); ++i) {
            if (subtree_size(children_, ch[i]) != subtree_size(children_, ch[i + 1])) continue;
            if (kind_ == Kind::Edge && v == 0 && (ch[i] == 1 || ch[i + 1] == 1)) continue;
            std::vector<int> perm = idperm;
            map_subtree(children_, ch[i], ch[i + 1], perm);
            generators_.push_back(std::move(perm));
        }
    }

    flip_.clear();
    if (kind_ == Kind::Edge) {
        // Pair the side blocks level by level; o's child list starts with
        // vertex 1, which is skipped via the side filter.
        flip_ = idperm;
        flip_[0] = 1;
        flip_[1] = 0;
        std::vector<int> fo{0}, f1{1};
        while (!fo.empty()) {
            std::vector<int> no, n1;
            for (int v : fo)
                for (int c : children_[v])
                    if (side_[c] == 0) no.push_back(c);
            for (int v : f1)
                for (int c : children_[v]) n1.push_back(c);
            require(no.size() == n1.size(), "shape: side trees out of sync");
            for (size_t i = 0; i < no.size(); ++i) {
                flip_[no[i]] = n1[i];
                flip_[n1[i]] = no[i];
            }
            fo = std::move(no);
            f1 = std::move(n1);
        }
        generators_.push_back(flip_);
    }
}

const std::vector<int>& BallShape::edge_flip() const {
    require(kind_ == Kind::Edge, "shape: edge_flip only defined for edge shapes");
    return flip_;
}

std::optional<std::vector<int>> BallShape::embedding_of(const BallShape& target) const {
    if (target.degree_ != degree_) return std::nullopt;
    if (target.num_vertices() > num_vertices()) return std::nullopt;
    if (target.radius_ == 0) return std::vector<int>{0};
    if (kind_ == Kind::Ball && target.kind_ == Kind::Ball) {
        if (target.radius_ > radius_) return std::nullopt;
        std::vector<int> emb(target.num_vertices());
        for (int i = 0; i < target.num_vertices(); ++i) emb[i] = i;
        return emb;
    }
    if (target.kind_ != Kind::Edge) return std::nullopt;  // no S_t inside E_r
    if (target.radius_ > radius_) return std::nullopt;
    // Map E_t into this shape by matching children lists in order; both
    // roots' lists start with vertex 1.
    std::vector<int> emb(target.num_vertices(), -1);
    emb[0] = 0;
    for (int v = 0; v < target.num_vertices(); ++v) {
        int u = emb[v];
        require(u >= 0, "shape: embedding walk out of order");
        const auto& tc = target.children_[v];
        const auto& sc = children_[u];
        if (tc.empty()) continue;
        if (tc.size() > sc.size()) return std::nullopt;
        // For the target root inside a Ball source, child 1 maps to child 1
        // and side children follow; orders already agree.
        for (size_t i = 0; i < tc.size(); ++i) emb[tc[i]] = sc[i];
    }
    return emb;
}

}  // namespace treent
