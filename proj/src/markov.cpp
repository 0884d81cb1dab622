#include "treent/markov.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "treent/entropy.hpp"
#include "treent/error.hpp"
#include "treent/numeric.hpp"

namespace treent {

namespace {

int pow_int(int base, int exp) {
    int v = 1;
    for (int i = 0; i < exp; ++i) v *= base;
    return v;
}

// Conditioning-key codec for block kernels. r=1: (x_w, x_u). r=2: (x_w,
// x_u, sorted colors of u's other neighbors).
int block_key(int m, int degree, int r, int xw, int xu, std::vector<int> others) {
    int key = xw + m * xu;
    if (r == 2) {
        std::sort(others.begin(), others.end());
        int base = m * m;
        for (int i = 0; i < degree - 1; ++i) {
            key += others[i] * base;
            base *= m;
        }
    }
    return key;
}

}  // namespace

MarkovProcess build_markov(const LocalLaw& p, MarkovKind kind, int degree,
                           std::optional<DegreeDistribution> pi) {
    MarkovProcess mp;
    mp.kind_ = kind;
    mp.degree_ = degree;
    mp.pi_ = std::move(pi);
    const int m = p.alphabet.size();

    if (kind == MarkovKind::VertexMarkov) {
        require(p.shape.kind() == BallShape::Kind::Edge && p.shape.radius() == 1,
                "build_markov: vertex kind expects an edge law on E_1");
        require_valid(p, "build_markov");  // includes edge-flip invariance
        mp.radius_ = 1;
        mp.defining_ = p;
        mp.root_law_ = root_marginal(p);
        mp.vertex_kernel_.assign(m, std::vector<double>(m, 0.0));
        mp.vertex_row_used_.assign(m, true);
        for (int a = 0; a < m; ++a) {
            if (mp.root_law_[a] <= 0.0) {
                // arbitrary by convention; never reachable
                for (int b = 0; b < m; ++b) mp.vertex_kernel_[a][b] = 1.0 / m;
                mp.vertex_row_used_[a] = false;
                ++mp.unused_rows_;
                continue;
            }
            for (int b = 0; b < m; ++b) {
                std::vector<int> colors{a, b};
                mp.vertex_kernel_[a][b] =
                    p.table.prob(p.table.encode(colors)) / mp.root_law_[a];
            }
        }
        if (!mp.pi_) {
            // regular setting: tabulate (d-1)-tuple rows so the extension
            // code is uniform across kinds
            mp.tuple_count_ = pow_int(m, degree - 1);
            mp.block_kernel_.assign(m, std::vector<double>(mp.tuple_count_, 0.0));
            for (int a = 0; a < m; ++a) {
                for (int t = 0; t < mp.tuple_count_; ++t) {
                    double v = 1.0;
                    int x = t;
                    for (int i = 0; i < degree - 1; ++i) {
                        v *= mp.vertex_kernel_[a][x % m];
                        x /= m;
                    }
                    mp.block_kernel_[a][t] = v;
                }
            }
        }
        return mp;
    }

    require(!mp.pi_, "build_markov: the ugw setting supports the vertex kind only");
    require(p.shape.kind() == BallShape::Kind::Ball, "build_markov: r-Markov expects a ball law");
    int r = p.shape.radius();
    require(r >= 1, "build_markov: radius must be >= 1");
    require(r <= 2, "build_markov: exact kernels implemented for defining radius <= 2");
    require(p.shape.degree() == degree, "build_markov: degree mismatch");
    require_valid(p, "build_markov");
    mp.radius_ = r;
    mp.defining_ = p;
    mp.tuple_count_ = pow_int(m, degree - 1);

    // Block source table: S_1 itself for r=1; the E_2 restriction for r=2.
    LocalLaw src = (r == 1) ? p : restrict_law(p, BallShape::edge(degree, 2));
    int key_count = (r == 1) ? m * m : m * m * pow_int(m, degree - 1);
    std::vector<double> denom(key_count, 0.0);
    mp.block_kernel_.assign(key_count, std::vector<double>(mp.tuple_count_, 0.0));
    std::vector<int> colors;
    src.table.for_each([&](uint64_t key, double prob) {
        src.table.decode_into(key, colors);
        int xw, xu;
        std::vector<int> others;
        int tuple = 0;
        if (r == 1) {
            // S_1 slots: 0 = root (plays the far vertex w), 1 = one child
            // (plays the near vertex u), children 2..d form the far tuple.
            xw = colors[0];
            xu = colors[1];
            int base = 1;
            for (int i = 2; i <= degree; ++i) {
                tuple += colors[i] * base;
                base *= m;
            }
        } else {
            // E_2 slots: 0 = o (plays u), 1 = far root (plays w), 2..d =
            // o-side star, d+1..2d-1 = far children.
            xu = colors[0];
            xw = colors[1];
            for (int i = 2; i <= degree; ++i) others.push_back(colors[i]);
            int base = 1;
            for (int i = degree + 1; i <= 2 * degree - 1; ++i) {
                tuple += colors[i] * base;
                base *= m;
            }
        }
        int bk = block_key(m, degree, r, xw, xu, others);
        denom[bk] += prob;
        mp.block_kernel_[bk][tuple] += prob;
    });
    for (int k = 0; k < key_count; ++k) {
        if (denom[k] > 0.0) {
            for (double& v : mp.block_kernel_[k]) v /= denom[k];
        } else {
            for (double& v : mp.block_kernel_[k]) v = 1.0 / mp.tuple_count_;
            mp.block_row_used_.resize(key_count, true);
            mp.block_row_used_[k] = false;
            ++mp.unused_rows_;
        }
    }
    if (mp.block_row_used_.empty()) mp.block_row_used_.assign(key_count, true);
    return mp;
}

namespace {

// Depth-t vertices of S_t (the extension frontier), in BFS order.
std::vector<int> frontier_of(const BallShape& shape) {
    std::vector<int> out;
    for (int v = 0; v < shape.num_vertices(); ++v)
        if (shape.depth(v) == shape.radius()) out.push_back(v);
    return out;
}

}  // namespace

LocalLaw extend_marginal(const MarkovProcess& mp, int t) {
    require(!mp.pi_, "extend_marginal: use extend_marginal_ugw for the ugw setting");
    const int m = mp.defining_.alphabet.size();
    const int d = mp.degree_;
    require(t >= mp.defining_radius(), "extend_marginal: t below the defining radius");

    // Base marginal at the defining radius.
    LocalLaw cur = mp.defining_;
    if (mp.kind_ == MarkovKind::VertexMarkov) {
        BallShape s1 = BallShape::ball(d, 1);
        require(ProbTable::checked_space(s1.num_vertices(), m) <= ProbTable::kExactCap,
                "extend_marginal: table over cap; use sample_coloring");
        LocalLaw base(s1, mp.defining_.alphabet);
        uint64_t space = base.table.space_size();
        std::vector<int> colors;
        for (uint64_t key = 0; key < space; ++key) {
            base.table.decode_into(key, colors);
            double v = mp.root_law_[colors[0]];
            for (int i = 1; i <= d && v > 0.0; ++i)
                v *= mp.vertex_kernel_[colors[0]][colors[i]];
            if (v > 0.0) base.table.set(key, v);
        }
        cur = std::move(base);
    }

    while (cur.shape.radius() < t) {
        int ct = cur.shape.radius();
        BallShape next = BallShape::ball(d, ct + 1);
        require(ProbTable::checked_space(next.num_vertices(), m) <= ProbTable::kExactCap,
                "extend_marginal: table over cap; use sample_coloring");
        LocalLaw out(next, mp.defining_.alphabet);
        std::vector<int> parents = frontier_of(cur.shape);
        const int base_new = cur.shape.num_vertices();
        const int d1 = d - 1;
        std::vector<uint64_t> pow_m(next.num_vertices() + 1);
        pow_m[0] = 1;
        for (int i = 0; i < next.num_vertices(); ++i) pow_m[i + 1] = pow_m[i] * m;

        std::vector<int> colors;
        std::vector<const std::vector<double>*> rows(parents.size());
        cur.table.for_each([&](uint64_t key, double prob) {
            cur.table.decode_into(key, colors);
            for (size_t j = 0; j < parents.size(); ++j) {
                int w = parents[j];
                int row;
                if (mp.kind_ == MarkovKind::VertexMarkov) {
                    row = colors[w];
                } else {
                    int u = cur.shape.parent(w);
                    std::vector<int> others;
                    if (mp.radius_ == 2) {
                        if (cur.shape.parent(u) >= 0) others.push_back(colors[cur.shape.parent(u)]);
                        for (int c : cur.shape.children(u))
                            if (c != w) others.push_back(colors[c]);
                    }
                    row = block_key(m, d, mp.radius_, colors[w], colors[u], std::move(others));
                }
                rows[j] = &mp.block_kernel_[row];
            }
            // recursive enumeration over per-parent child tuples
            std::function<void(size_t, uint64_t, double)> rec = [&](size_t j, uint64_t acc,
                                                                    double v) {
                if (j == parents.size()) {
                    out.table.add(acc, v);
                    return;
                }
                const auto& row = *rows[j];
                for (int tup = 0; tup < mp.tuple_count_; ++tup) {
                    if (row[tup] == 0.0) continue;
                    uint64_t added = 0;
                    int x = tup;
                    for (int i = 0; i < d1; ++i) {
                        added += pow_m[base_new + static_cast<int>(j) * d1 + i] *
                                 static_cast<uint64_t>(x % m);
                        x /= m;
                    }
                    rec(j + 1, acc + added, v * row[tup]);
                }
            };
            rec(0, key, prob);
        });
        cur = std::move(out);
    }
    return cur;
}

UgwBallLaw extend_marginal_ugw(const MarkovProcess& mp, int t) {
    require(mp.pi_.has_value(), "extend_marginal_ugw: process is not in the ugw setting");
    require(mp.kind_ == MarkovKind::VertexMarkov, "extend_marginal_ugw: vertex kind only");
    require(t >= 1, "extend_marginal_ugw: t must be >= 1");
    const int m = mp.defining_.alphabet.size();
    UgwBallLaw law(*mp.pi_, t, mp.defining_.alphabet);
    uint64_t total = 0;
    for (const auto& tb : law.tables) total += tb.space_size();
    require(total <= ProbTable::kExactCap,
            "extend_marginal_ugw: table over cap; use sample_coloring_ugw");
    std::vector<int> colors;
    for (size_t si = 0; si < law.shapes.size(); ++si) {
        const UgwShape& s = law.shapes[si];
        uint64_t space = law.tables[si].space_size();
        for (uint64_t key = 0; key < space; ++key) {
            law.tables[si].decode_into(key, colors);
            double v = law.shape_probs[si] * mp.root_law_[colors[0]];
            for (int w = 1; w < s.size() && v > 0.0; ++w)
                v *= mp.vertex_kernel_[colors[s.parent[w]]][colors[w]];
            if (v > 0.0) law.tables[si].set(key, v);
        }
    }
    return law;
}

std::vector<int> sample_coloring(const MarkovProcess& mp, int t, Rng& rng) {
    require(!mp.pi_, "sample_coloring: use sample_coloring_ugw for the ugw setting");
    const int m = mp.defining_.alphabet.size();
    const int d = mp.degree_;
    BallShape shape = BallShape::ball(d, t);
    std::vector<int> colors(shape.num_vertices(), 0);

    auto draw = [&](const std::vector<double>& dist) {
        double u = rng.uniform();
        double acc = 0.0;
        for (size_t i = 0; i < dist.size(); ++i) {
            acc += dist[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(dist.size()) - 1;
    };

    if (mp.kind_ == MarkovKind::VertexMarkov) {
        colors[0] = draw(mp.root_law_);
        for (int v = 1; v < shape.num_vertices(); ++v)
            colors[v] = draw(mp.vertex_kernel_[colors[shape.parent(v)]]);
        return colors;
    }

    // base draw from the defining table
    require(t >= mp.radius_, "sample_coloring: t below the defining radius");
    double u = rng.uniform();
    double acc = 0.0;
    uint64_t chosen = 0;
    mp.defining_.table.for_each([&](uint64_t key, double p) {
        if (acc <= u && u < acc + p) chosen = key;
        acc += p;
    });
    std::vector<int> base;
    mp.defining_.table.decode_into(chosen, base);
    std::copy(base.begin(), base.end(), colors.begin());

    for (int level = mp.radius_; level < t; ++level) {
        BallShape cur = BallShape::ball(d, level);
        std::vector<int> parents = frontier_of(cur);
        int next_index = cur.num_vertices();
        for (int w : parents) {
            int uvert = cur.parent(w);
            std::vector<int> others;
            if (mp.radius_ == 2) {
                if (cur.parent(uvert) >= 0) others.push_back(colors[cur.parent(uvert)]);
                for (int c : cur.children(uvert))
                    if (c != w) others.push_back(colors[c]);
            }
            int row = block_key(m, d, mp.radius_, colors[w], colors[uvert], std::move(others));
            int tup = draw(mp.block_kernel_[row]);
            for (int i = 0; i < d - 1; ++i) {
                colors[next_index++] = tup % m;
                tup /= m;
            }
        }
    }
    return colors;
}

std::pair<UgwShape, std::vector<int>> sample_coloring_ugw(const MarkovProcess& mp, int t,
                                                          Rng& rng) {
    require(mp.pi_.has_value(), "sample_coloring_ugw: process is not in the ugw setting");
    const DegreeDistribution& pi = *mp.pi_;

    auto draw_count = [&](bool root) {
        double u = rng.uniform();
        double acc = 0.0;
        int last = 0;
        for (int k = 0; k <= pi.max_degree(); ++k) {
            double p = root ? pi.prob(k) : pi.size_biased(k);
            if (p <= 0.0) continue;
            acc += p;
            last = k;
            if (u < acc) return k;
        }
        return last;
    };

    // shape first: pi at the root, hat pi below, truncation at depth t
    std::vector<int> counts{draw_count(true)};
    std::vector<int> depth{0};
    for (size_t v = 0; v < counts.size(); ++v) {
        for (int c = 0; c < counts[v]; ++c) {
            int child_depth = depth[v] + 1;
            counts.push_back(child_depth >= t ? 0 : draw_count(false));
            depth.push_back(child_depth);
        }
    }
    // the recorded count of truncation-depth vertices is zero by convention
    UgwShape shape = UgwShape::from_counts(counts);

    std::vector<int> colors(shape.size(), 0);
    auto draw = [&](const std::vector<double>& dist) {
        double u = rng.uniform();
        double acc = 0.0;
        for (size_t i = 0; i < dist.size(); ++i) {
            acc += dist[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(dist.size()) - 1;
    };
    colors[0] = draw(mp.root_law_);
    for (int v = 1; v < shape.size(); ++v)
        colors[v] = draw(mp.vertex_kernel_[colors[shape.parent[v]]]);
    return {std::move(shape), std::move(colors)};
}

std::string samples_csv(const MarkovProcess& mp, int t, int count, Rng& rng) {
    std::string out;
    for (int i = 0; i < count; ++i) {
        std::vector<int> colors = mp.pi() ? sample_coloring_ugw(mp, t, rng).second
                                          : sample_coloring(mp, t, rng);
        for (size_t v = 0; v < colors.size(); ++v)
            out += (v ? "," : "") + mp.defining().alphabet.symbol(colors[v]);
        out += "\n";
    }
    return out;
}

double markov_defect(const LocalLaw& p, int degree) {
    require(p.shape.kind() == BallShape::Kind::Ball && p.shape.radius() >= 2,
            "markov_defect: expects a ball law of radius >= 2");
    EntropyReport upper = sigma_r(p, degree);
    LocalLaw restricted = restrict_law(p, BallShape::ball(degree, p.shape.radius() - 1));
    EntropyReport lower = sigma_r(restricted, degree, false);
    return lower.value - upper.value;
}

double vertex_defect(const LocalLaw& p, int degree) {
    require(p.shape.kind() == BallShape::Kind::Ball && p.shape.radius() == 1,
            "vertex_defect: expects a radius-1 ball law");
    EntropyReport s1 = sigma_r(p, degree);
    EntropyReport se = sigma_e(restrict_law(p, BallShape::edge(degree, 1)), degree, false);
    return se.value - s1.value;
}

bool is_markov_extension(const LocalLaw& p, int degree, double tol) {
    int radius = p.shape.radius();
    require(radius >= 2, "is_markov_extension: radius must be >= 2");
    LocalLaw q = restrict_law(p, BallShape::ball(degree, radius - 1));
    MarkovProcess mp = build_markov(q, MarkovKind::RMarkov, degree);
    return law_tv(extend_marginal(mp, radius), p) <= tol;
}

bool is_vertex_markov_law(const LocalLaw& p, int degree, double tol) {
    require(p.shape.kind() == BallShape::Kind::Ball && p.shape.radius() == 1,
            "is_vertex_markov_law: expects a radius-1 ball law");
    LocalLaw e = restrict_law(p, BallShape::edge(degree, 1));
    MarkovProcess mp = build_markov(e, MarkovKind::VertexMarkov, degree);
    return law_tv(extend_marginal(mp, 1), p) <= tol;
}

}  // namespace treent
