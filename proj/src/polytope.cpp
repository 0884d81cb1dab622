#include "treent/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "treent/error.hpp"

namespace treent {

OrbitIndex orbits_under(size_t atom_count,
                        const std::vector<std::vector<uint32_t>>& generator_maps) {
    OrbitIndex idx;
    idx.orbit_of.assign(atom_count, -1);
    for (size_t a0 = 0; a0 < atom_count; ++a0) {
        if (idx.orbit_of[a0] >= 0) continue;
        int oid = static_cast<int>(idx.representative.size());
        idx.representative.push_back(static_cast<int>(a0));
        std::vector<uint32_t> stack{static_cast<uint32_t>(a0)};
        idx.orbit_of[a0] = oid;
        size_t count = 0;
        while (!stack.empty()) {
            uint32_t a = stack.back();
            stack.pop_back();
            ++count;
            for (const auto& g : generator_maps) {
                uint32_t b = g[a];
                if (idx.orbit_of[b] < 0) {
                    idx.orbit_of[b] = oid;
                    stack.push_back(b);
                }
            }
        }
        idx.weight.push_back(static_cast<double>(count));
    }
    return idx;
}

namespace {

// merges duplicate (index, coeff) entries in place
void merge_entries(std::vector<std::pair<int, double>>& v) {
    std::sort(v.begin(), v.end());
    size_t out = 0;
    for (size_t i = 0; i < v.size();) {
        size_t j = i;
        double sum = 0.0;
        while (j < v.size() && v[j].first == v[i].first) sum += v[j++].second;
        v[out++] = {v[i].first, sum};
        i = j;
    }
    v.resize(out);
}

std::vector<double> edge_law_vector(const LocalLaw& p) {
    int m = p.alphabet.size();
    std::vector<double> vec(static_cast<size_t>(m) * m, 0.0);
    p.table.for_each([&](uint64_t key, double prob) { vec[key] = prob; });
    return vec;
}

}  // namespace

CouplingProblem make_vertex_coupling_problem(const LocalLaw& p, double degree,
                                             double objective_constant) {
    require(p.shape.kind() == BallShape::Kind::Edge && p.shape.radius() == 1,
            "vertex polytope: expects an edge law on E_1");
    const int m = p.alphabet.size();
    const int U = m * m;  // edge colorings u = (a at o, b at 1), key a + m*b
    const size_t N = static_cast<size_t>(U) * U;
    std::vector<double> pvec = edge_law_vector(p);

    auto uflip = [m](int u) { return (u / m) + m * (u % m); };
    std::vector<uint32_t> flip_map(N);
    for (int u = 0; u < U; ++u)
        for (int v = 0; v < U; ++v)
            flip_map[static_cast<size_t>(u) * U + v] =
                static_cast<uint32_t>(uflip(u)) * U + uflip(v);
    OrbitIndex orb = orbits_under(N, {flip_map});
    int dim = static_cast<int>(orb.weight.size());

    CouplingProblem prob;
    prob.weight = orb.weight;
    prob.identity_coeff = 0.5 * degree;
    prob.objective_constant = objective_constant;

    // marginal constraints
    for (int u0 = 0; u0 < U; ++u0) {
        std::vector<std::pair<int, double>> row;
        for (int v = 0; v < U; ++v)
            row.emplace_back(orb.orbit_of[static_cast<size_t>(u0) * U + v], 1.0);
        merge_entries(row);
        prob.rows.push_back(std::move(row));
        prob.rhs.push_back(pvec[u0]);
    }
    for (int v0 = 0; v0 < U; ++v0) {
        std::vector<std::pair<int, double>> row;
        for (int u = 0; u < U; ++u)
            row.emplace_back(orb.orbit_of[static_cast<size_t>(u) * U + v0], 1.0);
        merge_entries(row);
        prob.rows.push_back(std::move(row));
        prob.rhs.push_back(pvec[v0]);
    }

    // -(d-1) H(root pair)
    LinearMap root_map;
    root_map.out_dim = m * m;
    root_map.cols.assign(dim, {});
    for (size_t a = 0; a < N; ++a) {
        int u = static_cast<int>(a) / U, v = static_cast<int>(a) % U;
        int img = (u % m) * m + (v % m);
        root_map.cols[orb.orbit_of[a]].emplace_back(img, 1.0);
    }
    for (auto& col : root_map.cols) merge_entries(col);
    prob.neg_terms.emplace_back(-(degree - 1.0), std::move(root_map));

    // seeds: diagonal and independent couplings
    std::vector<double> diag(dim, 0.0), indep(dim, 0.0);
    for (size_t a = 0; a < N; ++a) {
        int u = static_cast<int>(a) / U, v = static_cast<int>(a) % U;
        if (u == v) diag[orb.orbit_of[a]] = pvec[u];
        indep[orb.orbit_of[a]] = pvec[u] * pvec[v];
    }
    prob.seeds = {diag, indep};
    prob.seed_names = {"diagonal", "independent"};

    prob.random_feasible = [m, U, pvec, orb](Rng& rng) {
        const size_t n_atoms = static_cast<size_t>(U) * U;
        std::vector<double> w(n_atoms);
        for (auto& x : w) x = rng.exponential();
        for (int round = 0; round < 200; ++round) {
            for (int u = 0; u < U; ++u) {
                double s = 0.0;
                for (int v = 0; v < U; ++v) s += w[static_cast<size_t>(u) * U + v];
                double f = s > 0.0 ? pvec[u] / s : 0.0;
                for (int v = 0; v < U; ++v) w[static_cast<size_t>(u) * U + v] *= f;
            }
            for (int v = 0; v < U; ++v) {
                double s = 0.0;
                for (int u = 0; u < U; ++u) s += w[static_cast<size_t>(u) * U + v];
                double f = s > 0.0 ? pvec[v] / s : 0.0;
                for (int u = 0; u < U; ++u) w[static_cast<size_t>(u) * U + v] *= f;
            }
        }
        // orbit average = flip symmetrization
        std::vector<double> t(orb.weight.size(), 0.0);
        for (size_t a = 0; a < n_atoms; ++a) t[orb.orbit_of[a]] += w[a];
        for (size_t o = 0; o < t.size(); ++o) t[o] /= orb.weight[o];
        return t;
    };

    prob.prepare();
    return prob;
}

CouplingLaw decode_vertex_coupling(const LocalLaw& p, const CouplingProblem& prob,
                                   const std::vector<double>& t) {
    const int m = p.alphabet.size();
    const int U = m * m;
    ColorAlphabet prod = ColorAlphabet::product(p.alphabet, p.alphabet);
    LocalLaw joint(p.shape, prod);

    auto uflip = [m](int u) { return (u / m) + m * (u % m); };
    std::vector<uint32_t> flip_map(static_cast<size_t>(U) * U);
    for (int u = 0; u < U; ++u)
        for (int v = 0; v < U; ++v)
            flip_map[static_cast<size_t>(u) * U + v] =
                static_cast<uint32_t>(uflip(u)) * U + uflip(v);
    OrbitIndex orb = orbits_under(flip_map.size(), {flip_map});
    require(static_cast<int>(orb.weight.size()) == prob.dim(),
            "decode: orbit structure mismatch");
    for (size_t a = 0; a < flip_map.size(); ++a) {
        int u = static_cast<int>(a) / U, v = static_cast<int>(a) % U;
        double prob_atom = t[orb.orbit_of[a]];
        if (prob_atom <= 0.0) continue;
        int a1 = u % m, b1 = u / m, a2 = v % m, b2 = v / m;
        uint64_t key = static_cast<uint64_t>(a1 * m + a2) +
                       static_cast<uint64_t>(m) * m * (b1 * m + b2);
        joint.table.set(key, prob_atom);
    }
    return {std::move(joint), m, m};
}

CouplingProblem make_ball_coupling_problem(const LocalLaw& p, int degree) {
    require(p.shape.kind() == BallShape::Kind::Ball && p.shape.radius() >= 1,
            "ball polytope: expects a ball law");
    const int m = p.alphabet.size();
    const int n = p.shape.num_vertices();
    uint64_t U64 = ProbTable::checked_space(n, m);
    require(U64 <= (uint64_t(1) << 11), "ball polytope: coloring space too large");
    const int U = static_cast<int>(U64);
    const size_t N = static_cast<size_t>(U) * U;

    ProbTable codec(n, m);
    std::vector<double> pvec(U, 0.0);
    p.table.for_each([&](uint64_t key, double prob) { pvec[key] = prob; });

    // generator key maps on U
    std::vector<std::vector<uint32_t>> umaps;
    for (const auto& g : p.shape.aut_generators()) {
        std::vector<uint32_t> map(U);
        for (int u = 0; u < U; ++u) map[u] = static_cast<uint32_t>(codec.permute_key(u, g));
        umaps.push_back(std::move(map));
    }
    std::vector<std::vector<uint32_t>> amaps;
    for (const auto& um : umaps) {
        std::vector<uint32_t> map(N);
        for (int u = 0; u < U; ++u)
            for (int v = 0; v < U; ++v)
                map[static_cast<size_t>(u) * U + v] =
                    static_cast<uint32_t>(um[u]) * U + um[v];
        amaps.push_back(std::move(map));
    }
    OrbitIndex orb = orbits_under(N, amaps);
    OrbitIndex uorb = orbits_under(U, umaps);
    int dim = static_cast<int>(orb.weight.size());

    CouplingProblem prob;
    prob.weight = orb.weight;
    prob.identity_coeff = 1.0;

    // marginal rows at U-orbit representatives
    for (size_t uo = 0; uo < uorb.weight.size(); ++uo) {
        int u0 = uorb.representative[uo];
        std::vector<std::pair<int, double>> row1, row2;
        for (int v = 0; v < U; ++v) {
            row1.emplace_back(orb.orbit_of[static_cast<size_t>(u0) * U + v], 1.0);
            row2.emplace_back(orb.orbit_of[static_cast<size_t>(v) * U + u0], 1.0);
        }
        merge_entries(row1);
        merge_entries(row2);
        prob.rows.push_back(std::move(row1));
        prob.rhs.push_back(pvec[u0]);
        prob.rows.push_back(std::move(row2));
        prob.rhs.push_back(pvec[u0]);
    }

    // E_r restriction: projection keys and flip permutation
    BallShape eshape = BallShape::edge(degree, p.shape.radius());
    auto emb = p.shape.embedding_of(eshape);
    require(emb.has_value(), "ball polytope: no edge embedding");
    const int ne = eshape.num_vertices();
    const int NE = static_cast<int>(ProbTable::checked_space(ne, m));
    ProbTable ecodec(ne, m);
    std::vector<int> eproj(U);
    for (int u = 0; u < U; ++u)
        eproj[u] = static_cast<int>(codec.project_key(u, *emb));
    std::vector<int> eflip(NE);
    for (int e = 0; e < NE; ++e)
        eflip[e] = static_cast<int>(ecodec.permute_key(e, eshape.edge_flip()));

    // E-pair image of every atom orbit (columns of the restriction map)
    LinearMap emap;
    emap.out_dim = NE * NE;
    emap.cols.assign(dim, {});
    for (size_t a = 0; a < N; ++a) {
        int u = static_cast<int>(a / U), v = static_cast<int>(a % U);
        int img = eproj[u] * NE + eproj[v];
        emap.cols[orb.orbit_of[a]].emplace_back(img, 1.0);
    }
    for (auto& col : emap.cols) merge_entries(col);

    // flip-invariance rows on the E-pair marginal
    {
        // transpose of emap: image -> (orbit, coeff)
        std::vector<std::vector<std::pair<int, double>>> img_rows(emap.out_dim);
        for (int o = 0; o < dim; ++o)
            for (const auto& [j, c] : emap.cols[o]) img_rows[j].emplace_back(o, c);
        for (int eu = 0; eu < NE; ++eu)
            for (int ev = 0; ev < NE; ++ev) {
                int x = eu * NE + ev;
                int y = eflip[eu] * NE + eflip[ev];
                if (x >= y) continue;
                std::vector<std::pair<int, double>> row = img_rows[x];
                for (const auto& [o, c] : img_rows[y]) row.emplace_back(o, -c);
                merge_entries(row);
                row.erase(std::remove_if(row.begin(), row.end(),
                                         [](const auto& e) { return e.second == 0.0; }),
                          row.end());
                if (!row.empty()) {
                    prob.rows.push_back(std::move(row));
                    prob.rhs.push_back(0.0);
                }
            }
    }

    prob.neg_terms.emplace_back(-0.5 * degree, std::move(emap));

    std::vector<double> diag(dim, 0.0), indep(dim, 0.0);
    for (size_t a = 0; a < N; ++a) {
        int u = static_cast<int>(a / U), v = static_cast<int>(a % U);
        if (u == v) diag[orb.orbit_of[a]] = pvec[u];
        indep[orb.orbit_of[a]] = pvec[u] * pvec[v];
    }
    prob.seeds = {diag, indep};
    prob.seed_names = {"diagonal", "independent"};

    prob.random_feasible = [U, pvec, orb](Rng& rng) {
        const size_t n_atoms = static_cast<size_t>(U) * U;
        std::vector<double> w(n_atoms);
        for (auto& x : w) x = rng.exponential();
        for (int round = 0; round < 120; ++round) {
            for (int u = 0; u < U; ++u) {
                double s = 0.0;
                for (int v = 0; v < U; ++v) s += w[static_cast<size_t>(u) * U + v];
                double f = s > 0.0 ? pvec[u] / s : 0.0;
                for (int v = 0; v < U; ++v) w[static_cast<size_t>(u) * U + v] *= f;
            }
            for (int v = 0; v < U; ++v) {
                double s = 0.0;
                for (int u = 0; u < U; ++u) s += w[static_cast<size_t>(u) * U + v];
                double f = s > 0.0 ? pvec[v] / s : 0.0;
                for (int u = 0; u < U; ++u) w[static_cast<size_t>(u) * U + v] *= f;
            }
        }
        std::vector<double> t(orb.weight.size(), 0.0);
        for (size_t a = 0; a < n_atoms; ++a) t[orb.orbit_of[a]] += w[a];
        for (size_t o = 0; o < t.size(); ++o) t[o] /= orb.weight[o];
        return t;
    };

    prob.prepare();
    return prob;
}

CouplingLaw decode_ball_coupling(const LocalLaw& p, const CouplingProblem& prob,
                                 const std::vector<double>& t) {
    const int m = p.alphabet.size();
    const int n = p.shape.num_vertices();
    const int U = static_cast<int>(ProbTable::checked_space(n, m));
    ProbTable codec(n, m);
    std::vector<std::vector<uint32_t>> amaps;
    for (const auto& g : p.shape.aut_generators()) {
        std::vector<uint32_t> umap(U);
        for (int u = 0; u < U; ++u) umap[u] = static_cast<uint32_t>(codec.permute_key(u, g));
        std::vector<uint32_t> amap(static_cast<size_t>(U) * U);
        for (int u = 0; u < U; ++u)
            for (int v = 0; v < U; ++v)
                amap[static_cast<size_t>(u) * U + v] =
                    static_cast<uint32_t>(umap[u]) * U + umap[v];
        amaps.push_back(std::move(amap));
    }
    OrbitIndex orb = orbits_under(static_cast<size_t>(U) * U, amaps);
    require(static_cast<int>(orb.weight.size()) == prob.dim(),
            "decode: orbit structure mismatch");

    ColorAlphabet prod = ColorAlphabet::product(p.alphabet, p.alphabet);
    LocalLaw joint(p.shape, prod);
    std::vector<int> cu, cv;
    for (size_t a = 0; a < static_cast<size_t>(U) * U; ++a) {
        double prob_atom = t[orb.orbit_of[a]];
        if (prob_atom <= 0.0) continue;
        int u = static_cast<int>(a / U), v = static_cast<int>(a % U);
        codec.decode_into(u, cu);
        codec.decode_into(v, cv);
        uint64_t key = 0;
        uint64_t base = 1;
        for (int i = 0; i < n; ++i) {
            key += static_cast<uint64_t>(cu[i] * m + cv[i]) * base;
            base *= static_cast<uint64_t>(m) * m;
        }
        joint.table.set(key, prob_atom);
    }
    return {std::move(joint), m, m};
}

CouplingProblem make_ugw_ball1_coupling_problem(const UgwBallLaw& p) {
    require(p.radius == 1, "ugw polytope: expects a radius-1 law");
    const int m = p.alphabet.size();
    const int mm = m * m;
    const double d = p.pi.mean();

    // atom layout: per shape, pair colorings of the star
    std::vector<size_t> offset(p.shapes.size() + 1, 0);
    std::vector<uint64_t> pair_space(p.shapes.size());
    for (size_t si = 0; si < p.shapes.size(); ++si) {
        pair_space[si] = ProbTable::checked_space(p.shapes[si].size(), mm);
        offset[si + 1] = offset[si] + pair_space[si];
        require(offset[si + 1] <= (uint64_t(1) << 22), "ugw polytope: atom space too large");
    }
    const size_t N = offset.back();

    // generators: adjacent child transpositions within each shape
    std::vector<std::vector<uint32_t>> amaps;
    for (size_t si = 0; si < p.shapes.size(); ++si) {
        int k = p.shapes[si].counts[0];
        ProbTable pcodec(k + 1, mm);
        for (int c = 1; c + 1 <= k; ++c) {
            std::vector<int> perm(k + 1);
            std::iota(perm.begin(), perm.end(), 0);
            std::swap(perm[c], perm[c + 1]);
            std::vector<uint32_t> map(N);
            for (size_t a = 0; a < N; ++a) map[a] = static_cast<uint32_t>(a);
            for (uint64_t key = 0; key < pair_space[si]; ++key)
                map[offset[si] + key] =
                    static_cast<uint32_t>(offset[si] + pcodec.permute_key(key, perm));
            amaps.push_back(std::move(map));
        }
    }
    if (amaps.empty()) {
        std::vector<uint32_t> id(N);
        std::iota(id.begin(), id.end(), 0u);
        amaps.push_back(std::move(id));
    }
    OrbitIndex orb = orbits_under(N, amaps);
    int dim = static_cast<int>(orb.weight.size());

    CouplingProblem prob;
    prob.weight = orb.weight;
    prob.identity_coeff = 1.0;
    prob.objective_constant = -p.pi.entropy();

    // decompose a pair key into projections
    auto split_key = [&](size_t si, uint64_t pkey, uint64_t& k1, uint64_t& k2) {
        int verts = p.shapes[si].size();
        k1 = 0;
        k2 = 0;
        uint64_t base = 1;
        for (int i = 0; i < verts; ++i) {
            int c = static_cast<int>(pkey % mm);
            pkey /= mm;
            k1 += static_cast<uint64_t>(c / m) * base;
            k2 += static_cast<uint64_t>(c % m) * base;
            base *= m;
        }
    };

    // marginal rows per (shape, first-projection key); reduced to
    // representatives of the child-permutation action on M-colorings
    for (size_t si = 0; si < p.shapes.size(); ++si) {
        int verts = p.shapes[si].size();
        int k = p.shapes[si].counts[0];
        ProbTable ucodec(verts, m);
        std::vector<std::vector<uint32_t>> ugen;
        for (int c = 1; c + 1 <= k; ++c) {
            std::vector<int> perm(verts);
            std::iota(perm.begin(), perm.end(), 0);
            std::swap(perm[c], perm[c + 1]);
            std::vector<uint32_t> map(ucodec.space_size());
            for (uint64_t u = 0; u < ucodec.space_size(); ++u)
                map[u] = static_cast<uint32_t>(ucodec.permute_key(u, perm));
            ugen.push_back(std::move(map));
        }
        if (ugen.empty()) {
            std::vector<uint32_t> id(ucodec.space_size());
            std::iota(id.begin(), id.end(), 0u);
            ugen.push_back(std::move(id));
        }
        OrbitIndex uorb = orbits_under(ucodec.space_size(), ugen);

        // bucket atoms by first / second projection
        std::vector<std::vector<std::pair<int, double>>> rows1(ucodec.space_size()),
            rows2(ucodec.space_size());
        for (uint64_t pkey = 0; pkey < pair_space[si]; ++pkey) {
            uint64_t k1, k2;
            split_key(si, pkey, k1, k2);
            int o = orb.orbit_of[offset[si] + pkey];
            rows1[k1].emplace_back(o, 1.0);
            rows2[k2].emplace_back(o, 1.0);
        }
        for (size_t uo = 0; uo < uorb.weight.size(); ++uo) {
            uint64_t u0 = uorb.representative[uo];
            double target = p.tables[si].prob(u0);
            auto r1 = rows1[u0];
            merge_entries(r1);
            prob.rows.push_back(std::move(r1));
            prob.rhs.push_back(target);
            auto r2 = rows2[u0];
            merge_entries(r2);
            prob.rows.push_back(std::move(r2));
            prob.rhs.push_back(target);
        }
    }

    // edge-rooted pair law: image (A, B) over pair colors
    LinearMap vmap;
    vmap.out_dim = mm * mm;
    vmap.cols.assign(dim, {});
    for (size_t si = 0; si < p.shapes.size(); ++si) {
        int k = p.shapes[si].counts[0];
        for (uint64_t pkey = 0; pkey < pair_space[si]; ++pkey) {
            int o = orb.orbit_of[offset[si] + pkey];
            uint64_t rest = pkey;
            int root = static_cast<int>(rest % mm);
            rest /= mm;
            for (int j = 0; j < k; ++j) {
                int child = static_cast<int>(rest % mm);
                rest /= mm;
                vmap.cols[o].emplace_back(root * mm + child, 1.0 / d);
            }
        }
    }
    for (auto& col : vmap.cols) merge_entries(col);

    // flip rows on the edge-rooted pair law
    {
        std::vector<std::vector<std::pair<int, double>>> img_rows(vmap.out_dim);
        for (int o = 0; o < dim; ++o)
            for (const auto& [j, c] : vmap.cols[o]) img_rows[j].emplace_back(o, c);
        for (int A = 0; A < mm; ++A)
            for (int B = 0; B < mm; ++B) {
                int x = A * mm + B, y = B * mm + A;
                if (x >= y) continue;
                std::vector<std::pair<int, double>> row = img_rows[x];
                for (const auto& [o, c] : img_rows[y]) row.emplace_back(o, -c);
                merge_entries(row);
                row.erase(std::remove_if(row.begin(), row.end(),
                                         [](const auto& e) { return e.second == 0.0; }),
                          row.end());
                if (!row.empty()) {
                    prob.rows.push_back(std::move(row));
                    prob.rhs.push_back(0.0);
                }
            }
    }
    prob.neg_terms.emplace_back(-0.5 * d, std::move(vmap));

    // seeds
    std::vector<double> diag(dim, 0.0), indep(dim, 0.0);
    for (size_t si = 0; si < p.shapes.size(); ++si) {
        double sp = p.tables[si].total_mass();
        for (uint64_t pkey = 0; pkey < pair_space[si]; ++pkey) {
            uint64_t k1, k2;
            split_key(si, pkey, k1, k2);
            int o = orb.orbit_of[offset[si] + pkey];
            if (k1 == k2) diag[o] = p.tables[si].prob(k1);
            if (sp > 0.0) indep[o] = p.tables[si].prob(k1) * p.tables[si].prob(k2) / sp;
        }
    }
    prob.seeds = {diag, indep};
    prob.seed_names = {"diagonal", "independent"};

    prob.random_feasible = [p, offset, pair_space, orb, mm, m](Rng& rng) {
        std::vector<double> w(offset.back());
        for (auto& x : w) x = rng.exponential();
        for (size_t si = 0; si < p.shapes.size(); ++si) {
            int verts = p.shapes[si].size();
            uint64_t uspace = 1;
            for (int i = 0; i < verts; ++i) uspace *= m;
            // IPF within the shape block
            for (int round = 0; round < 150; ++round) {
                std::vector<double> sums(uspace, 0.0);
                for (uint64_t pk = 0; pk < pair_space[si]; ++pk) {
                    uint64_t k1 = 0, base = 1, rest = pk;
                    for (int i = 0; i < verts; ++i) {
                        k1 += static_cast<uint64_t>((rest % mm) / m) * base;
                        base *= m;
                        rest /= mm;
                    }
                    sums[k1] += w[offset[si] + pk];
                }
                for (uint64_t pk = 0; pk < pair_space[si]; ++pk) {
                    uint64_t k1 = 0, base = 1, rest = pk;
                    for (int i = 0; i < verts; ++i) {
                        k1 += static_cast<uint64_t>((rest % mm) / m) * base;
                        base *= m;
                        rest /= mm;
                    }
                    double target = p.tables[si].prob(k1);
                    w[offset[si] + pk] *= sums[k1] > 0.0 ? target / sums[k1] : 0.0;
                }
                std::vector<double> sums2(uspace, 0.0);
                for (uint64_t pk = 0; pk < pair_space[si]; ++pk) {
                    uint64_t k2 = 0, base = 1, rest = pk;
                    for (int i = 0; i < verts; ++i) {
                        k2 += static_cast<uint64_t>(rest % m) * base;
                        base *= m;
                        rest /= mm;
                    }
                    sums2[k2] += w[offset[si] + pk];
                }
                for (uint64_t pk = 0; pk < pair_space[si]; ++pk) {
                    uint64_t k2 = 0, base = 1, rest = pk;
                    for (int i = 0; i < verts; ++i) {
                        k2 += static_cast<uint64_t>(rest % m) * base;
                        base *= m;
                        rest /= mm;
                    }
                    double target = p.tables[si].prob(k2);
                    w[offset[si] + pk] *= sums2[k2] > 0.0 ? target / sums2[k2] : 0.0;
                }
            }
        }
        std::vector<double> t(orb.weight.size(), 0.0);
        for (size_t a = 0; a < w.size(); ++a) t[orb.orbit_of[a]] += w[a];
        for (size_t o = 0; o < t.size(); ++o) t[o] /= orb.weight[o];
        return t;
    };

    prob.prepare();
    return prob;
}

CouplingProblem make_edge_law_problem(int alphabet_size, double degree,
                                      const std::vector<double>& psi_atom) {
    const int m = alphabet_size;
    const size_t N = static_cast<size_t>(m) * m;
    require(psi_atom.empty() || psi_atom.size() == N, "edge law polytope: psi size mismatch");

    std::vector<uint32_t> flip(N);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) flip[a + m * b] = static_cast<uint32_t>(b + m * a);
    OrbitIndex orb = orbits_under(N, {flip});
    int dim = static_cast<int>(orb.weight.size());

    CouplingProblem prob;
    prob.weight = orb.weight;
    prob.identity_coeff = 0.5 * degree;

    std::vector<std::pair<int, double>> mass_row;
    for (int o = 0; o < dim; ++o) mass_row.emplace_back(o, orb.weight[o]);
    prob.rows.push_back(std::move(mass_row));
    prob.rhs.push_back(1.0);

    LinearMap root_map;
    root_map.out_dim = m;
    root_map.cols.assign(dim, {});
    for (size_t a = 0; a < N; ++a)
        root_map.cols[orb.orbit_of[a]].emplace_back(static_cast<int>(a) % m, 1.0);
    for (auto& col : root_map.cols) merge_entries(col);
    prob.neg_terms.emplace_back(-(degree - 1.0), std::move(root_map));

    if (!psi_atom.empty()) {
        prob.linear.assign(dim, 0.0);
        for (size_t a = 0; a < N; ++a) prob.linear[orb.orbit_of[a]] += psi_atom[a];
    }

    std::vector<double> uniform(dim, 1.0 / static_cast<double>(N));
    std::vector<double> mono(dim, 0.0);
    mono[orb.orbit_of[0]] = 1.0;  // point mass on color 0 at both ends
    prob.seeds = {uniform, mono};
    prob.seed_names = {"uniform", "monochromatic"};

    prob.random_feasible = [N, orb](Rng& rng) {
        std::vector<double> w(N);
        double s = 0.0;
        for (auto& x : w) {
            x = rng.exponential();
            s += x;
        }
        for (auto& x : w) x /= s;
        std::vector<double> t(orb.weight.size(), 0.0);
        for (size_t a = 0; a < N; ++a) t[orb.orbit_of[a]] += w[a];
        for (size_t o = 0; o < t.size(); ++o) t[o] /= orb.weight[o];
        return t;
    };

    prob.prepare();
    return prob;
}

LocalLaw decode_edge_law(int alphabet_size, int degree, const CouplingProblem& prob,
                         const std::vector<double>& t) {
    const int m = alphabet_size;
    std::vector<uint32_t> flip(static_cast<size_t>(m) * m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) flip[a + m * b] = static_cast<uint32_t>(b + m * a);
    OrbitIndex orb = orbits_under(flip.size(), {flip});
    require(static_cast<int>(orb.weight.size()) == prob.dim(),
            "decode: orbit structure mismatch");
    LocalLaw law(BallShape::edge(degree, 1), ColorAlphabet::of_size(m));
    for (size_t a = 0; a < flip.size(); ++a) {
        double v = t[orb.orbit_of[a]];
        if (v > 0.0) law.table.set(a, v);
    }
    return law;
}

CouplingProblem make_ball_law_problem(int alphabet_size, int degree, int radius,
                                      const std::vector<double>& psi_atom) {
    const int m = alphabet_size;
    BallShape shape = BallShape::ball(degree, radius);
    uint64_t U64 = ProbTable::checked_space(shape.num_vertices(), m);
    require(U64 <= ProbTable::kDenseCap, "ball law polytope: coloring space too large");
    const size_t N = U64;
    require(psi_atom.empty() || psi_atom.size() == N, "ball law polytope: psi size mismatch");

    ProbTable codec(shape.num_vertices(), m);
    std::vector<std::vector<uint32_t>> maps;
    for (const auto& g : shape.aut_generators()) {
        std::vector<uint32_t> map(N);
        for (size_t u = 0; u < N; ++u) map[u] = static_cast<uint32_t>(codec.permute_key(u, g));
        maps.push_back(std::move(map));
    }
    OrbitIndex orb = orbits_under(N, maps);
    int dim = static_cast<int>(orb.weight.size());

    CouplingProblem prob;
    prob.weight = orb.weight;
    prob.identity_coeff = 1.0;

    std::vector<std::pair<int, double>> mass_row;
    for (int o = 0; o < dim; ++o) mass_row.emplace_back(o, orb.weight[o]);
    prob.rows.push_back(std::move(mass_row));
    prob.rhs.push_back(1.0);

    BallShape eshape = BallShape::edge(degree, radius);
    auto emb = shape.embedding_of(eshape);
    require(emb.has_value(), "ball law polytope: no edge embedding");
    const int NE = static_cast<int>(ProbTable::checked_space(eshape.num_vertices(), m));
    ProbTable ecodec(eshape.num_vertices(), m);
    std::vector<int> eproj(N);
    for (size_t u = 0; u < N; ++u)
        eproj[u] = static_cast<int>(codec.project_key(u, *emb));
    std::vector<int> eflip(NE);
    for (int e = 0; e < NE; ++e)
        eflip[e] = static_cast<int>(ecodec.permute_key(e, eshape.edge_flip()));

    LinearMap emap;
    emap.out_dim = NE;
    emap.cols.assign(dim, {});
    for (size_t u = 0; u < N; ++u) emap.cols[orb.orbit_of[u]].emplace_back(eproj[u], 1.0);
    for (auto& col : emap.cols) merge_entries(col);

    {
        std::vector<std::vector<std::pair<int, double>>> img_rows(NE);
        for (int o = 0; o < dim; ++o)
            for (const auto& [j, c] : emap.cols[o]) img_rows[j].emplace_back(o, c);
        for (int x = 0; x < NE; ++x) {
            int y = eflip[x];
            if (x >= y) continue;
            std::vector<std::pair<int, double>> row = img_rows[x];
            for (const auto& [o, c] : img_rows[y]) row.emplace_back(o, -c);
            merge_entries(row);
            row.erase(std::remove_if(row.begin(), row.end(),
                                     [](const auto& e) { return e.second == 0.0; }),
                      row.end());
            if (!row.empty()) {
                prob.rows.push_back(std::move(row));
                prob.rhs.push_back(0.0);
            }
        }
    }
    prob.neg_terms.emplace_back(-0.5 * degree, std::move(emap));

    if (!psi_atom.empty()) {
        prob.linear.assign(dim, 0.0);
        for (size_t a = 0; a < N; ++a) prob.linear[orb.orbit_of[a]] += psi_atom[a];
    }

    std::vector<double> uniform(dim, 1.0 / static_cast<double>(N));
    std::vector<double> mono(dim, 0.0);
    mono[orb.orbit_of[0]] = 1.0;
    prob.seeds = {uniform, mono};
    prob.seed_names = {"uniform", "monochromatic"};

    prob.random_feasible = [N, orb](Rng& rng) {
        std::vector<double> w(N);
        double s = 0.0;
        for (auto& x : w) {
            x = rng.exponential();
            s += x;
        }
        for (auto& x : w) x /= s;
        std::vector<double> t(orb.weight.size(), 0.0);
        for (size_t a = 0; a < N; ++a) t[orb.orbit_of[a]] += w[a];
        for (size_t o = 0; o < t.size(); ++o) t[o] /= orb.weight[o];
        return t;
    };

    prob.prepare();
    return prob;
}

LocalLaw decode_ball_law(int alphabet_size, int degree, int radius, const CouplingProblem& prob,
                         const std::vector<double>& t) {
    const int m = alphabet_size;
    BallShape shape = BallShape::ball(degree, radius);
    const size_t N = ProbTable::checked_space(shape.num_vertices(), m);
    ProbTable codec(shape.num_vertices(), m);
    std::vector<std::vector<uint32_t>> maps;
    for (const auto& g : shape.aut_generators()) {
        std::vector<uint32_t> map(N);
        for (size_t u = 0; u < N; ++u) map[u] = static_cast<uint32_t>(codec.permute_key(u, g));
        maps.push_back(std::move(map));
    }
    OrbitIndex orb = orbits_under(N, maps);
    require(static_cast<int>(orb.weight.size()) == prob.dim(),
            "decode: orbit structure mismatch");
    LocalLaw law(shape, ColorAlphabet::of_size(m));
    for (size_t u = 0; u < N; ++u) {
        double v = t[orb.orbit_of[u]];
        if (v > 0.0) law.table.set(u, v);
    }
    return law;
}

}  // namespace treent
