#include "treent/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "treent/canonical.hpp"
#include "treent/error.hpp"
#include "treent/numeric.hpp"

namespace treent {

double EntropyReport::component(const std::string& name) const {
    for (const auto& kv : components)
        if (kv.first == name) return kv.second;
    throw Error("report: no component named " + name);
}

std::string EntropyReport::serialize() const {
    std::string out = "formula=" + formula + "\n";
    out += "value=" + format_g17(value) + "\n";
    for (const auto& kv : components) out += kv.first + "=" + format_g17(kv.second) + "\n";
    return out;
}

namespace {

void check_dist_entries(double p, double& mass) {
    require(p >= 0.0, "shannon: negative probability");
    mass += p;
}

}  // namespace

double shannon(const std::vector<double>& dist) {
    double mass = 0.0;
    double h = 0.0;
    for (double p : dist) {
        check_dist_entries(p, mass);
        h += xlnx(p);
    }
    require(std::fabs(mass - 1.0) <= kMassTol, "shannon: mass = " + format_g17(mass));
    return h;
}

double shannon(const ProbTable& dist) {
    double mass = 0.0;
    double h = 0.0;
    dist.for_each([&](uint64_t, double p) {
        check_dist_entries(p, mass);
        h += xlnx(p);
    });
    require(std::fabs(mass - 1.0) <= kMassTol, "shannon: mass = " + format_g17(mass));
    return h;
}

double conditional_entropy(const ProbTable& joint, const std::vector<int>& y_vertices) {
    for (int v : y_vertices)
        require(v >= 0 && v < joint.num_vertices(), "conditional_entropy: bad split index");
    double h_joint = shannon(joint);
    std::map<uint64_t, double> y_marg;
    joint.for_each([&](uint64_t key, double p) {
        y_marg[joint.project_key(key, y_vertices)] += p;
    });
    double h_y = 0.0;
    for (const auto& kv : y_marg) h_y += xlnx(kv.second);
    return h_joint - h_y;
}

EntropyReport sigma_r(const LocalLaw& ball_law, int degree, bool check) {
    require(ball_law.shape.kind() == BallShape::Kind::Ball && ball_law.shape.radius() >= 1,
            "sigma_r: expects a ball law of radius >= 1");
    require(ball_law.shape.degree() == degree, "sigma_r: degree mismatch");
    if (check) require_valid(ball_law, "sigma_r");
    int r = ball_law.shape.radius();
    double h_s = shannon(ball_law.table);
    LocalLaw edge = restrict_law(ball_law, BallShape::edge(degree, r));
    double h_e = shannon(edge.table);
    EntropyReport rep;
    rep.formula = "regular-ball";
    rep.value = h_s - 0.5 * degree * h_e;
    rep.components = {{"H_S", h_s}, {"H_E", h_e}, {"d", double(degree)}, {"r", double(r)}};
    return rep;
}

EntropyReport sigma_e(const LocalLaw& edge_law, int degree, bool check) {
    require(edge_law.shape.kind() == BallShape::Kind::Edge && edge_law.shape.radius() == 1,
            "sigma_e: expects an edge law on E_1");
    require(edge_law.shape.degree() == degree, "sigma_e: degree mismatch");
    if (check) require_valid(edge_law, "sigma_e");
    double h_e = shannon(edge_law.table);
    double h_o = shannon(root_marginal(edge_law));
    EntropyReport rep;
    rep.formula = "regular-edge";
    rep.value = 0.5 * degree * h_e - (degree - 1) * h_o;
    rep.components = {{"H_E", h_e}, {"H_root", h_o}, {"d", double(degree)}};
    return rep;
}

EntropyReport sigma_of(const LocalLaw& law, int degree, bool check) {
    return law.is_edge_law() ? sigma_e(law, degree, check) : sigma_r(law, degree, check);
}

namespace {

// Colored side tree along the oriented edge (o, v): the (d-1)-ary tree of
// depth r-1 rooted at `start`, grown away from `avoid`.
RootedColoredGraph side_tree(const BallShape& shape, const std::vector<int>& colors,
                             int start, int avoid) {
    RootedColoredGraph g;
    g.root = 0;
    std::vector<int> queue{start};
    std::vector<int> local{0};
    std::vector<int> dist{0};
    g.n = 1;
    g.colors.push_back(colors[start]);
    int r = shape.radius();
    for (size_t i = 0; i < queue.size(); ++i) {
        int v = queue[i];
        if (dist[i] == r - 1) continue;
        std::vector<int> nbrs = shape.children(v);
        if (shape.parent(v) >= 0) nbrs.push_back(shape.parent(v));
        for (int w : nbrs) {
            if (w == avoid) continue;
            bool seen = false;
            for (size_t j = 0; j < queue.size(); ++j)
                if (queue[j] == w) seen = true;
            if (seen) continue;
            int lw = g.n++;
            g.colors.push_back(colors[w]);
            g.edges.emplace_back(local[i], lw);
            queue.push_back(w);
            local.push_back(lw);
            dist.push_back(dist[i] + 1);
        }
    }
    return g;
}

}  // namespace

EntropyReport sigma_unlabeled(const LocalLaw& ball_law, int degree, bool check) {
    require(ball_law.shape.kind() == BallShape::Kind::Ball && ball_law.shape.radius() >= 1,
            "sigma_unlabeled: expects a ball law of radius >= 1");
    if (check) require_valid(ball_law, "sigma_unlabeled");
    const BallShape& shape = ball_law.shape;
    int r = shape.radius();

    // Unlabeled colored ball classes of S_r.
    BallStatistics ball_classes = class_distribution(ball_law);
    double h_tilde = 0.0;
    for (const auto& kv : ball_classes.freq) h_tilde += xlnx(kv.second);

    // Edge classes g = (near side, far side) along each root edge; pi_mu is
    // the mean count over root neighbors divided by d, and the ln N! terms
    // are exact expectations over the law.
    std::map<std::string, double> pi_mu;
    double e_ln_n_fact = 0.0;
    std::vector<int> colors;
    std::map<std::string, int> counts;
    ball_law.table.for_each([&](uint64_t key, double p) {
        ball_law.table.decode_into(key, colors);
        counts.clear();
        for (int v : shape.children(0)) {
            RootedColoredGraph near = side_tree(shape, colors, 0, v);
            RootedColoredGraph far = side_tree(shape, colors, v, 0);
            std::string code = canonicalize(near, r).code + "~" + canonicalize(far, r).code;
            counts[code] += 1;
        }
        for (const auto& kv : counts) {
            pi_mu[kv.first] += p * kv.second / degree;
            e_ln_n_fact += p * ln_factorial(kv.second);
        }
    });
    double h_pi = 0.0;
    for (const auto& kv : pi_mu) h_pi += xlnx(kv.second);

    EntropyReport rep;
    rep.formula = "regular-ball-unlabeled";
    rep.value = h_tilde - 0.5 * degree * h_pi - e_ln_n_fact + ln_factorial(degree);
    rep.components = {{"H_unlabeled_S", h_tilde},
                      {"H_pi_mu", h_pi},
                      {"E_ln_N_fact", e_ln_n_fact},
                      {"ln_d_fact", ln_factorial(degree)},
                      {"d", double(degree)}};
    return rep;
}

std::pair<double, double> exchangeable_entropy_identity(const ProbTable& dist) {
    const int n = dist.num_vertices();
    const int m = dist.alphabet_size();
    // exchangeability: invariance under adjacent coordinate transpositions
    std::vector<int> perm(n);
    std::vector<int> scratch;
    for (int i = 0; i + 1 < n; ++i) {
        std::iota(perm.begin(), perm.end(), 0);
        std::swap(perm[i], perm[i + 1]);
        double worst = 0.0;
        dist.for_each([&](uint64_t key, double p) {
            dist.decode_into(key, scratch);
            uint64_t out = 0;
            uint64_t base = 1;
            for (int v = 0; v < n; ++v) {
                out += static_cast<uint64_t>(scratch[perm[v]]) * base;
                base *= m;
            }
            worst = std::max(worst, std::fabs(p - dist.prob(out)));
        });
        require(worst <= kMassTol, "exchangeable identity: law is not exchangeable");
    }

    double lhs = shannon(dist);

    std::map<std::vector<int>, double> type_dist;  // counting measure law
    double e_ln_fact = 0.0;
    std::vector<int> type(m);
    dist.for_each([&](uint64_t key, double p) {
        dist.decode_into(key, scratch);
        std::fill(type.begin(), type.end(), 0);
        for (int v = 0; v < n; ++v) type[scratch[v]] += 1;
        type_dist[type] += p;
        for (int x = 0; x < m; ++x) e_ln_fact += p * ln_factorial(type[x]);
    });
    double h_type = 0.0;
    for (const auto& kv : type_dist) h_type += xlnx(kv.second);

    double rhs = h_type - e_ln_fact + ln_factorial(n);
    return {lhs, rhs};
}

}  // namespace treent
