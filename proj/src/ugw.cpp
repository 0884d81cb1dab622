#include "treent/ugw.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "treent/canonical.hpp"
#include "treent/error.hpp"
#include "treent/numeric.hpp"

namespace treent {

std::string UgwShape::code() const {
    std::string out;
    for (size_t i = 0; i < counts.size(); ++i)
        out += (i ? "," : "") + std::to_string(counts[i]);
    return out;
}

UgwShape UgwShape::from_counts(const std::vector<int>& counts) {
    UgwShape s;
    s.counts = counts;
    int n = static_cast<int>(counts.size());
    s.parent.assign(n, -1);
    s.depth.assign(n, 0);
    s.children.assign(n, {});
    int next = 1;
    for (int v = 0; v < n; ++v) {
        for (int c = 0; c < counts[v]; ++c) {
            require(next < n, "ugw shape: counts inconsistent with vertex count");
            s.parent[next] = v;
            s.depth[next] = s.depth[v] + 1;
            s.children[v].push_back(next);
            ++next;
        }
    }
    require(next == n, "ugw shape: counts inconsistent with vertex count");
    return s;
}

std::vector<std::pair<UgwShape, double>> enumerate_ugw_shapes(const DegreeDistribution& pi,
                                                              int radius) {
    require(radius >= 1, "ugw shapes: radius must be >= 1");
    std::vector<int> root_support, inner_support;
    for (const auto& [k, p] : pi.probs())
        if (p > 0.0) root_support.push_back(k);
    for (int k = 0; k <= pi.max_degree(); ++k)
        if (pi.size_biased(k) > 0.0) inner_support.push_back(k);

    std::vector<std::pair<UgwShape, double>> out;
    // Fill counts in BFS order; the count choices for a vertex at depth l
    // are pi (root), hat_pi (0 < l < radius) or {0} (l = radius).
    std::function<void(std::vector<int>&, std::vector<int>&, size_t, double)> rec =
        [&](std::vector<int>& counts, std::vector<int>& depths, size_t v, double prob) {
            if (v == counts.size()) {
                out.emplace_back(UgwShape::from_counts(counts), prob);
                require(out.size() <= 200'000,
                        "ugw shapes: shape space too large at this radius");
                return;
            }
            const std::vector<int>* support;
            double (DegreeDistribution::*pf)(int) const;
            if (depths[v] == radius) {
                static const std::vector<int> zero{0};
                support = &zero;
                pf = nullptr;
            } else if (v == 0) {
                support = &root_support;
                pf = &DegreeDistribution::prob;
            } else {
                support = &inner_support;
                pf = &DegreeDistribution::size_biased;
            }
            for (int k : *support) {
                double pk = pf ? (pi.*pf)(k) : 1.0;
                size_t old_n = counts.size();
                counts[v] = k;
                for (int c = 0; c < k; ++c) {
                    counts.push_back(0);
                    depths.push_back(depths[v] + 1);
                }
                rec(counts, depths, v + 1, prob * pk);
                counts.resize(old_n);
                depths.resize(old_n);
                counts[v] = 0;
            }
        };
    std::vector<int> counts{0}, depths{0};
    rec(counts, depths, 0, 1.0);
    return out;
}

UgwBallLaw::UgwBallLaw(DegreeDistribution pi_, int radius_, ColorAlphabet alphabet_)
    : pi(std::move(pi_)), radius(radius_), alphabet(std::move(alphabet_)) {
    auto enumerated = enumerate_ugw_shapes(pi, radius);
    for (auto& [shape, prob] : enumerated) {
        tables.emplace_back(shape.size(), alphabet.size());
        shapes.push_back(std::move(shape));
        shape_probs.push_back(prob);
    }
}

int UgwBallLaw::shape_index(const std::string& code) const {
    for (size_t i = 0; i < shapes.size(); ++i)
        if (shapes[i].code() == code) return static_cast<int>(i);
    throw Error("ugw law: unknown shape code " + code);
}

namespace {

// Labeled colored side tree along the oriented edge (start -> away from
// avoid), truncated at relative depth radius-1. Returns "counts;colors".
std::string side_code(const UgwShape& s, const std::vector<int>& colors, int start, int avoid,
                      int radius) {
    std::vector<int> verts{start};
    std::vector<int> rel{0};
    std::vector<int> cnt;
    for (size_t i = 0; i < verts.size(); ++i) {
        int v = verts[i];
        int kept = 0;
        if (rel[i] < radius - 1) {
            for (int w : s.children[v]) {
                if (w == avoid) continue;
                verts.push_back(w);
                rel.push_back(rel[i] + 1);
                ++kept;
            }
        }
        cnt.push_back(kept);
    }
    std::string out;
    for (size_t i = 0; i < cnt.size(); ++i) out += (i ? "," : "") + std::to_string(cnt[i]);
    out += ";";
    for (size_t i = 0; i < verts.size(); ++i)
        out += (i ? "," : "") + std::to_string(colors[verts[i]]);
    return out;
}

}  // namespace

std::map<std::string, double> vec_mu(const UgwBallLaw& law) {
    std::map<std::string, double> out;
    double d = law.pi.mean();
    std::vector<int> colors;
    for (size_t si = 0; si < law.shapes.size(); ++si) {
        const UgwShape& s = law.shapes[si];
        law.tables[si].for_each([&](uint64_t key, double p) {
            law.tables[si].decode_into(key, colors);
            for (int v : s.children[0]) {
                std::string near = side_code(s, colors, 0, v, law.radius);
                std::string far = side_code(s, colors, v, 0, law.radius);
                out[near + "~" + far] += p / d;
            }
        });
    }
    return out;
}

std::vector<Violation> validate_ugw(const UgwBallLaw& law) {
    std::vector<Violation> out;
    double mass = 0.0;
    double neg = 0.0;
    for (const auto& t : law.tables) {
        t.for_each([&](uint64_t, double p) {
            if (p < 0.0) neg = std::max(neg, -p);
        });
        mass += t.total_mass();
    }
    if (neg > 0.0) out.push_back({"negative probability entry", neg});
    if (std::fabs(mass - 1.0) > kMassTol)
        out.push_back({"mass = " + format_g17(mass), std::fabs(mass - 1.0)});

    // Shape marginal against UGW(pi)_r.
    double shape_tv = 0.0;
    for (size_t si = 0; si < law.shapes.size(); ++si)
        shape_tv += std::fabs(law.tables[si].total_mass() - law.shape_probs[si]);
    shape_tv *= 0.5;
    if (shape_tv > kMarginalTol)
        out.push_back({"shape marginal differs from UGW(pi)_r", shape_tv});

    // Random labeling: probabilities constant on isomorphism classes.
    std::map<std::string, std::pair<double, double>> ranges;  // code -> (min,max)
    std::vector<int> colors;
    for (size_t si = 0; si < law.shapes.size(); ++si) {
        const UgwShape& s = law.shapes[si];
        BallClassifier cls(s.size(), 0, [&] {
            std::vector<std::pair<int, int>> e;
            for (int v = 1; v < s.size(); ++v) e.emplace_back(s.parent[v], v);
            return e;
        }(), law.radius);
        law.tables[si].for_each([&](uint64_t key, double p) {
            law.tables[si].decode_into(key, colors);
            std::string code = cls.classify(colors);
            auto it = ranges.find(code);
            if (it == ranges.end())
                ranges[code] = {p, p};
            else {
                it->second.first = std::min(it->second.first, p);
                it->second.second = std::max(it->second.second, p);
            }
        });
    }
    double worst = 0.0;
    for (const auto& kv : ranges)
        worst = std::max(worst, kv.second.second - kv.second.first);
    if (worst > kMassTol)
        out.push_back({"law depends on the labeling", worst});

    // Edge-rooted law must be flip invariant.
    auto vm = vec_mu(law);
    double flip_tv = 0.0;
    for (const auto& [key, p] : vm) {
        auto tilde = key.find('~');
        std::string flipped = key.substr(tilde + 1) + "~" + key.substr(0, tilde);
        auto it = vm.find(flipped);
        double q = it == vm.end() ? 0.0 : it->second;
        flip_tv += std::fabs(p - q);
    }
    flip_tv *= 0.5;
    if (flip_tv > kMarginalTol)
        out.push_back({"edge-rooted law not flip invariant", flip_tv});
    return out;
}

namespace {

double entropy_of_map(const std::map<std::string, double>& m) {
    double h = 0.0;
    for (const auto& kv : m) h += xlnx(kv.second);
    return h;
}

}  // namespace

EntropyReport sigma_r_ugw(const UgwBallLaw& law, bool check) {
    if (check) {
        auto v = validate_ugw(law);
        if (!v.empty()) {
            std::string msg = "sigma_r_ugw: invalid law:";
            for (const auto& viol : v) msg += " [" + viol.what + "]";
            throw Error(msg);
        }
    }
    double d = law.pi.mean();
    double h_pi = law.pi.entropy();

    double h_s = 0.0;
    double h_shape = 0.0;
    for (size_t si = 0; si < law.shapes.size(); ++si) {
        law.tables[si].for_each([&](uint64_t, double p) { h_s += xlnx(p); });
        h_shape += xlnx(law.tables[si].total_mass());
    }

    auto vm = vec_mu(law);
    double h_e = entropy_of_map(vm);
    std::map<std::string, double> vec_shapes;
    for (const auto& [key, p] : vm) {
        auto tilde = key.find('~');
        auto semi1 = key.find(';');
        auto semi2 = key.find(';', tilde);
        std::string shape_part = key.substr(0, semi1) + "~" +
                                 key.substr(tilde + 1, semi2 - tilde - 1);
        vec_shapes[shape_part] += p;
    }
    double h_vec_shape = entropy_of_map(vec_shapes);

    EntropyReport rep;
    rep.formula = "ugw-ball";
    rep.value = h_s - 0.5 * d * h_e - h_pi;
    double conditional = (h_s - h_shape) - 0.5 * d * (h_e - h_vec_shape);
    rep.components = {{"H_S", h_s},
                      {"H_vec_E", h_e},
                      {"H_pi", h_pi},
                      {"H_shape", h_shape},
                      {"H_vec_shape", h_vec_shape},
                      {"conditional_form", conditional},
                      {"d", d},
                      {"r", double(law.radius)}};
    return rep;
}

EntropyReport sigma_e_ugw(const LocalLaw& edge_law, const DegreeDistribution& pi, bool check) {
    require(edge_law.shape.kind() == BallShape::Kind::Edge && edge_law.shape.radius() == 1,
            "sigma_e_ugw: expects an edge law on E_1");
    if (check) require_valid(edge_law, "sigma_e_ugw");
    double d = pi.mean();
    double h_e = shannon(edge_law.table);
    double h_o = shannon(root_marginal(edge_law));
    EntropyReport rep;
    rep.formula = "ugw-edge";
    // For the vertex-Markov process built from the edge law, the unbiased
    // root color law equals the edge-law marginal.
    rep.value = 0.5 * d * h_e - d * h_o + h_o - pi.entropy();
    rep.components = {{"H_vec_E", h_e},
                      {"H_vec_root", h_o},
                      {"H_root", h_o},
                      {"H_pi", pi.entropy()},
                      {"d", d}};
    return rep;
}

EntropyReport sigma_e_ugw_of_ball(const UgwBallLaw& law, bool check) {
    require(law.radius == 1, "sigma_e_ugw_of_ball: expects a radius-1 law");
    if (check) {
        auto v = validate_ugw(law);
        if (!v.empty()) throw Error("sigma_e_ugw_of_ball: invalid law: " + v.front().what);
    }
    double d = law.pi.mean();
    auto vm = vec_mu(law);
    double h_e = entropy_of_map(vm);
    std::map<std::string, double> vec_root;
    for (const auto& [key, p] : vm) vec_root[key.substr(0, key.find('~'))] += p;
    double h_vec_o = entropy_of_map(vec_root);
    std::vector<double> root(law.alphabet.size(), 0.0);
    for (size_t si = 0; si < law.shapes.size(); ++si) {
        int m = law.alphabet.size();
        law.tables[si].for_each([&](uint64_t key, double p) { root[key % m] += p; });
    }
    double h_o = entropy_nats(root);
    EntropyReport rep;
    rep.formula = "ugw-edge";
    rep.value = 0.5 * d * h_e - d * h_vec_o + h_o - law.pi.entropy();
    rep.components = {{"H_vec_E", h_e},
                      {"H_vec_root", h_vec_o},
                      {"H_root", h_o},
                      {"H_pi", law.pi.entropy()},
                      {"d", d}};
    return rep;
}

UgwBallLaw to_ugw(const LocalLaw& ball_law) {
    require(ball_law.shape.kind() == BallShape::Kind::Ball && ball_law.shape.radius() >= 1,
            "to_ugw: expects a ball law");
    int d = ball_law.shape.degree();
    UgwBallLaw out(DegreeDistribution::dirac(d), ball_law.shape.radius(), ball_law.alphabet);
    require(out.shapes.size() == 1, "to_ugw: unexpected shape count");
    require(out.shapes[0].size() == ball_law.shape.num_vertices(),
            "to_ugw: vertex count mismatch");
    // BFS orders agree: the regular shape is the unique UGW(dirac) shape.
    ball_law.table.for_each([&](uint64_t key, double p) { out.tables[0].set(key, p); });
    return out;
}

UgwBallLaw random_ugw_law(const DegreeDistribution& pi, int radius,
                          const ColorAlphabet& alphabet, Rng& rng) {
    UgwBallLaw law(pi, radius, alphabet);
    // Dirichlet colors within every shape, scaled to the shape probability.
    for (size_t si = 0; si < law.shapes.size(); ++si) {
        uint64_t space = law.tables[si].space_size();
        require(space <= ProbTable::kDenseCap, "random_ugw_law: coloring space too large");
        double total = 0.0;
        std::vector<double> w(space);
        for (auto& x : w) {
            x = rng.exponential();
            total += x;
        }
        for (uint64_t k = 0; k < space; ++k)
            law.tables[si].set(k, law.shape_probs[si] * w[k] / total);
    }
    // Average over labelings: group atoms by isomorphism class and share the
    // class mass equally.
    struct Member {
        size_t shape;
        uint64_t key;
    };
    std::map<std::string, std::vector<Member>> groups;
    std::vector<int> colors;
    for (size_t si = 0; si < law.shapes.size(); ++si) {
        const UgwShape& s = law.shapes[si];
        std::vector<std::pair<int, int>> e;
        for (int v = 1; v < s.size(); ++v) e.emplace_back(s.parent[v], v);
        BallClassifier cls(s.size(), 0, e, radius);
        law.tables[si].for_each([&](uint64_t key, double) {
            law.tables[si].decode_into(key, colors);
            groups[cls.classify(colors)].push_back({si, key});
        });
    }
    for (const auto& [code, members] : groups) {
        double total = 0.0;
        for (const auto& m : members) total += law.tables[m.shape].prob(m.key);
        double avg = total / static_cast<double>(members.size());
        for (const auto& m : members) law.tables[m.shape].set(m.key, avg);
    }
    return law;
}

}  // namespace treent
