#include "treent/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "treent/error.hpp"
#include "treent/numeric.hpp"
#include "treent/parallel.hpp"

namespace treent {

namespace {

double eta(double t) { return t <= 0.0 ? 0.0 : -t * std::log(t); }

// max over [lo, hi] of c*eta(t) + kappa*t, c >= 0
double coord_max(double c, double kappa, double lo, double hi, double* argmax = nullptr) {
    double t;
    if (c <= 0.0) {
        t = kappa > 0.0 ? hi : lo;
    } else {
        double e = kappa / c - 1.0;
        t = e > 700.0 ? hi : std::exp(e);
        t = std::clamp(t, lo, hi);
    }
    if (argmax) *argmax = t;
    return c * eta(t) + kappa * t;
}

}  // namespace

// Least-squares projector onto {A t = b}; a small ridge tolerates redundant
// rows.
class AffineProjector {
public:
    AffineProjector(const std::vector<std::vector<std::pair<int, double>>>& rows,
                    const std::vector<double>& rhs)
        : rows_(rows), rhs_(rhs) {
        int m = static_cast<int>(rows.size());
        std::vector<std::vector<double>> gram(m, std::vector<double>(m, 0.0));
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                double s = 0.0;
                size_t pi = 0, pj = 0;
                while (pi < rows[i].size() && pj < rows[j].size()) {
                    if (rows[i][pi].first < rows[j][pj].first)
                        ++pi;
                    else if (rows[j][pj].first < rows[i][pi].first)
                        ++pj;
                    else {
                        s += rows[i][pi].second * rows[j][pj].second;
                        ++pi;
                        ++pj;
                    }
                }
                gram[i][j] = gram[j][i] = s;
            }
        for (int i = 0; i < m; ++i) gram[i][i] += 1e-12;
        factor_ = std::move(gram);
        piv_.resize(m);
        for (int i = 0; i < m; ++i) piv_[i] = i;
        for (int k = 0; k < m; ++k) {
            int p = k;
            for (int i = k + 1; i < m; ++i)
                if (std::fabs(factor_[i][k]) > std::fabs(factor_[p][k])) p = i;
            std::swap(factor_[k], factor_[p]);
            std::swap(piv_[k], piv_[p]);
            if (std::fabs(factor_[k][k]) < 1e-300) continue;
            for (int i = k + 1; i < m; ++i) {
                double f = factor_[i][k] / factor_[k][k];
                factor_[i][k] = f;
                for (int j = k + 1; j < m; ++j) factor_[i][j] -= f * factor_[k][j];
            }
        }
    }

    // t <- t - A^T (AA^T)^-1 (A t - b)
    void project(std::vector<double>& t) const {
        int m = static_cast<int>(rows_.size());
        std::vector<double> resid(m, 0.0);
        for (int i = 0; i < m; ++i) {
            double s = -rhs_[i];
            for (const auto& [v, a] : rows_[i]) s += a * t[v];
            resid[i] = s;
        }
        std::vector<double> z(m);
        for (int i = 0; i < m; ++i) z[i] = resid[piv_[i]];
        for (int k = 0; k < m; ++k)
            for (int i = k + 1; i < m; ++i) z[i] -= factor_[i][k] * z[k];
        for (int k = m - 1; k >= 0; --k) {
            for (int j = k + 1; j < m; ++j) z[k] -= factor_[k][j] * z[j];
            z[k] = std::fabs(factor_[k][k]) < 1e-300 ? 0.0 : z[k] / factor_[k][k];
        }
        for (int i = 0; i < m; ++i)
            for (const auto& [v, a] : rows_[i]) t[v] -= a * z[i];
    }

    double residual(const std::vector<double>& t) const {
        double worst = 0.0;
        for (size_t i = 0; i < rows_.size(); ++i) {
            double s = -rhs_[i];
            for (const auto& [v, a] : rows_[i]) s += a * t[v];
            worst = std::max(worst, std::fabs(s));
        }
        return worst;
    }

private:
    std::vector<std::vector<std::pair<int, double>>> rows_;
    std::vector<double> rhs_;
    std::vector<std::vector<double>> factor_;
    std::vector<int> piv_;
};

double CouplingProblem::objective(const std::vector<double>& t) const {
    double v = objective_constant;
    for (int o = 0; o < dim(); ++o) {
        v += identity_coeff * weight[o] * eta(t[o]);
        if (!linear.empty()) v += linear[o] * t[o];
    }
    std::vector<double> y;
    for (const auto& [c, map] : neg_terms) {
        map.apply(t, y);
        double h = 0.0;
        for (double x : y) h += eta(x);
        v += c * h;
    }
    return v;
}

double CouplingProblem::linear_value(const std::vector<double>& t) const {
    if (linear.empty()) return 0.0;
    double v = 0.0;
    for (int o = 0; o < dim(); ++o) v += linear[o] * t[o];
    return v;
}

double CouplingProblem::sigma_value(const std::vector<double>& t) const {
    return objective(t) - linear_value(t);
}

void CouplingProblem::gradient(const std::vector<double>& t, std::vector<double>& g) const {
    g.assign(dim(), 0.0);
    const double floor_p = 1e-12;
    for (int o = 0; o < dim(); ++o) {
        g[o] = identity_coeff * weight[o] * (-std::log(std::max(t[o], floor_p)) - 1.0);
        if (!linear.empty()) g[o] += linear[o];
    }
    std::vector<double> y;
    for (const auto& [c, map] : neg_terms) {
        map.apply(t, y);
        for (size_t v = 0; v < map.cols.size(); ++v)
            for (const auto& [j, a] : map.cols[v])
                g[v] += c * a * (-std::log(std::max(y[j], floor_p)) - 1.0);
    }
}

void CouplingProblem::prepare() {
    if (!projector) projector = std::make_shared<AffineProjector>(rows, rhs);
}

double CouplingProblem::project_feasible(std::vector<double>& t, int max_rounds) const {
    require(projector != nullptr, "optimize: problem not prepared");
    const AffineProjector& proj = *projector;
    std::vector<double> p_inc(dim(), 0.0);
    for (int round = 0; round < max_rounds; ++round) {
        proj.project(t);
        bool clipped = false;
        for (int o = 0; o < dim(); ++o) {
            double y = t[o] + p_inc[o];
            double x = std::max(y, 0.0);
            p_inc[o] = y - x;
            if (x != y) clipped = true;
            t[o] = x;
        }
        if (!clipped && proj.residual(t) < 1e-13) break;
    }
    proj.project(t);
    for (double& x : t) x = std::max(x, 0.0);
    return proj.residual(t);
}

AscentResult ascend(const CouplingProblem& prob, int restarts, uint64_t seed, int threads,
                    int max_iters) {
    std::vector<std::vector<double>> starts = prob.seeds;
    std::vector<std::string> names = prob.seed_names;
    names.resize(starts.size(), "seed");
    if (prob.random_feasible) {
        for (int i = 0; i < restarts; ++i) {
            Rng rng = Rng::stream(seed, i + 1);
            starts.push_back(prob.random_feasible(rng));
            names.push_back("restart-" + std::to_string(i));
        }
    }
    std::vector<AscentResult> results(starts.size());
    parallel_for(
        static_cast<int>(starts.size()),
        [&](int si) {
            std::vector<double> t = starts[si];
            prob.project_feasible(t);
            double f = prob.objective(t);
            std::vector<double> g, trial;
            double step = 0.1;
            for (int it = 0; it < max_iters; ++it) {
                prob.gradient(t, g);
                bool improved = false;
                for (int bt = 0; bt < 25; ++bt) {
                    trial = t;
                    for (int o = 0; o < prob.dim(); ++o) trial[o] += step * g[o];
                    prob.project_feasible(trial, 200);
                    double ft = prob.objective(trial);
                    if (ft > f + 1e-15) {
                        t = trial;
                        f = ft;
                        improved = true;
                        step *= 1.6;
                        break;
                    }
                    step *= 0.5;
                }
                if (!improved || step < 1e-14) break;
            }
            results[si] = {f, std::move(t), names[si]};
        },
        threads);

    // the raw seeds always stand: the diagonal and independent couplings
    // are exact feasible points whose values must never be lost
    AscentResult best;
    best.value = -1e300;
    for (size_t si = 0; si < prob.seeds.size(); ++si) {
        double f = prob.objective(prob.seeds[si]);
        if (f > best.value) best = {f, prob.seeds[si], names[si] + "-raw"};
    }
    for (const auto& r : results)
        if (r.value > best.value) best = r;
    return best;
}

namespace {

struct Node {
    std::vector<double> lo, hi;
    std::vector<double> lambda;
    double ub = 0.0;
    int64_t id = 0;
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.ub != b.ub) return a.ub < b.ub;  // max-heap on ub
        return a.id > b.id;
    }
};

struct DualView {
    const CouplingProblem* prob;
    bool use_entropy_terms;  // identity + neg terms + constant
    bool use_linear;
};

// Sound upper bound of the cell problem via Lagrangian duality; lambda is
// refined in place (warm start for children).
double cell_bound(const DualView& view, const std::vector<double>& lo,
                  const std::vector<double>& hi, std::vector<double>& lambda) {
    const CouplingProblem& P = *view.prob;
    int n = P.dim();
    int m = static_cast<int>(P.rows.size());

    std::vector<double> base(n, 0.0);
    double const_part = view.use_entropy_terms ? P.objective_constant : 0.0;
    if (view.use_linear && !P.linear.empty())
        for (int o = 0; o < n; ++o) base[o] += P.linear[o];
    std::vector<double> ylo, yhi;
    if (view.use_entropy_terms) {
        // secant underestimates of the concave image entropies over the
        // cell's image box turn the negative terms into linear ones
        for (const auto& [c, map] : P.neg_terms) {
            map.apply(lo, ylo);
            map.apply(hi, yhi);
            std::vector<double> slope(map.out_dim, 0.0);
            for (int j = 0; j < map.out_dim; ++j) {
                double a = ylo[j], b = yhi[j];
                if (b - a <= 1e-14) {
                    const_part += c * eta(0.5 * (a + b));
                } else {
                    double s = (eta(b) - eta(a)) / (b - a);
                    slope[j] = s;
                    const_part += c * (eta(a) - s * a);
                }
            }
            for (size_t v = 0; v < map.cols.size(); ++v)
                for (const auto& [j, a] : map.cols[v]) base[v] += c * a * slope[j];
        }
    }

    double ic = view.use_entropy_terms ? P.identity_coeff : 0.0;

    std::vector<double> kappa(n), that(n), grad(m);
    auto eval = [&](const std::vector<double>& lam, std::vector<double>* g) {
        for (int o = 0; o < n; ++o) kappa[o] = base[o];
        for (int i = 0; i < m; ++i)
            for (const auto& [v, a] : P.rows[i]) kappa[v] -= a * lam[i];
        double val = const_part;
        for (int i = 0; i < m; ++i) val += lam[i] * P.rhs[i];
        for (int o = 0; o < n; ++o)
            val += coord_max(ic * P.weight[o], kappa[o], lo[o], hi[o], &that[o]);
        if (g) {
            for (int i = 0; i < m; ++i) {
                double s = P.rhs[i];
                for (const auto& [v, a] : P.rows[i]) s -= a * that[v];
                (*g)[i] = s;
            }
        }
        return val;
    };

    if (lambda.empty()) lambda.assign(m, 0.0);
    double best = eval(lambda, &grad);
    double step = 0.5;
    std::vector<double> trial(m);
    for (int it = 0; it < 120; ++it) {
        bool improved = false;
        for (int bt = 0; bt < 20; ++bt) {
            for (int i = 0; i < m; ++i) trial[i] = lambda[i] - step * grad[i];
            double v = eval(trial, nullptr);
            if (v < best - 1e-15) {
                lambda = trial;
                best = v;
                eval(lambda, &grad);
                step *= 1.7;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved || step < 1e-13) break;
    }
    return best;
}

// quick infeasibility check: every row's interval must contain its rhs
bool box_feasible(const CouplingProblem& P, const std::vector<double>& lo,
                  const std::vector<double>& hi) {
    for (size_t i = 0; i < P.rows.size(); ++i) {
        double mn = 0.0, mx = 0.0;
        for (const auto& [v, a] : P.rows[i]) {
            if (a >= 0.0) {
                mn += a * lo[v];
                mx += a * hi[v];
            } else {
                mn += a * hi[v];
                mx += a * lo[v];
            }
        }
        if (P.rhs[i] < mn - 1e-11 || P.rhs[i] > mx + 1e-11) return false;
    }
    return true;
}

// modulus-of-continuity bound anchored at the incumbent when it lies in
// the cell: f(q) <= f(best) + ic*omega(tv_id) + sum |c_k| omega(tv_k)
double fannes_bound(const CouplingProblem& P, const std::vector<double>& lo,
                    const std::vector<double>& hi, const std::vector<double>& best_point,
                    double best_value) {
    for (int o = 0; o < P.dim(); ++o)
        if (best_point[o] < lo[o] - 1e-12 || best_point[o] > hi[o] + 1e-12) return 1e300;
    double total_atoms = 0.0;
    double tv_id = 0.0;
    for (int o = 0; o < P.dim(); ++o) {
        total_atoms += P.weight[o];
        tv_id += 0.5 * P.weight[o] * (hi[o] - lo[o]);
    }
    double bound =
        best_value + P.identity_coeff * entropy_modulus(tv_id, static_cast<uint64_t>(total_atoms));
    std::vector<double> ylo, yhi;
    for (const auto& [c, map] : P.neg_terms) {
        map.apply(lo, ylo);
        map.apply(hi, yhi);
        double tv = 0.0;
        for (int j = 0; j < map.out_dim; ++j) tv += 0.5 * (yhi[j] - ylo[j]);
        bound += std::fabs(c) * entropy_modulus(tv, static_cast<uint64_t>(map.out_dim));
    }
    if (!P.linear.empty()) {
        double lin = 0.0;
        for (int o = 0; o < P.dim(); ++o) lin += std::fabs(P.linear[o]) * (hi[o] - lo[o]);
        bound += lin;
    }
    return bound;
}

int pick_split(const CouplingProblem& P, const Node& node) {
    int best = 0;
    double score = -1.0;
    for (int o = 0; o < P.dim(); ++o) {
        double s = (node.hi[o] - node.lo[o]) * P.weight[o];
        if (s > score) {
            score = s;
            best = o;
        }
    }
    return best;
}

BnbResult bnb_core(const CouplingProblem& prob, const BnbSettings& settings, bool linear_mode) {
    DualView obj_view{&prob, true, true};
    DualView sigma_view{&prob, true, false};
    DualView lin_view{&prob, false, true};

    BnbResult res;
    res.best_value = -1e300;
    if (!linear_mode) {
        AscentResult inc =
            ascend(prob, settings.restarts, settings.seed, settings.threads, settings.ascent_iters);
        res.best_value = inc.value;
        res.best_point = inc.point;
    } else {
        // seeds with nonnegative sigma provide linear-mode incumbents
        for (const auto& s : prob.seeds) {
            if (prob.sigma_value(s) >= 0.0 && prob.linear_value(s) > res.best_value) {
                res.best_value = prob.linear_value(s);
                res.best_point = s;
            }
        }
    }

    int n = prob.dim();
    Node root;
    root.lo.assign(n, 0.0);
    root.hi.assign(n, 1.0);
    for (size_t i = 0; i < prob.rows.size(); ++i) {
        bool nonneg = true;
        for (const auto& [v, a] : prob.rows[i])
            if (a < 0.0) nonneg = false;
        if (!nonneg || prob.rhs[i] < 0.0) continue;
        for (const auto& [v, a] : prob.rows[i])
            if (a > 0.0) root.hi[v] = std::min(root.hi[v], prob.rhs[i] / a + 1e-15);
    }
    root.id = 0;

    auto try_incumbent = [&](const Node& node) {
        std::vector<double> t(n);
        for (int o = 0; o < n; ++o) t[o] = 0.5 * (node.lo[o] + node.hi[o]);
        if (prob.project_feasible(t, 120) > 1e-10) return;
        if (linear_mode) {
            if (prob.sigma_value(t) >= 0.0 && prob.linear_value(t) > res.best_value) {
                res.best_value = prob.linear_value(t);
                res.best_point = t;
            }
        } else {
            double f = prob.objective(t);
            if (f > res.best_value) {
                res.best_value = f;
                res.best_point = t;
            }
        }
    };

    auto node_bound = [&](Node& node) {
        if (!box_feasible(prob, node.lo, node.hi)) {
            node.ub = -1e300;
            return;
        }
        if (linear_mode) {
            std::vector<double> lam_sigma;
            double sig_ub = cell_bound(sigma_view, node.lo, node.hi, lam_sigma);
            if (sig_ub < 0.0) {
                node.ub = -1e300;  // no point with sigma >= 0 in this cell
                return;
            }
            node.ub = cell_bound(lin_view, node.lo, node.hi, node.lambda);
            return;
        }
        node.ub = cell_bound(obj_view, node.lo, node.hi, node.lambda);
        if (!res.best_point.empty()) {
            double fb = fannes_bound(prob, node.lo, node.hi, res.best_point, res.best_value);
            node.ub = std::min(node.ub, fb);
        }
    };

    node_bound(root);
    std::priority_queue<Node, std::vector<Node>, NodeOrder> queue;
    queue.push(std::move(root));
    int64_t next_id = 1;
    double pruned_max = -1e300;
    res.nodes = 1;

    auto prune_level = [&]() {
        double lvl = res.best_value + settings.tol;
        if (settings.prune_threshold) lvl = std::max(lvl, *settings.prune_threshold);
        return lvl;
    };

    while (!queue.empty() && res.nodes < settings.node_budget) {
        Node node = queue.top();
        queue.pop();
        if (node.ub <= prune_level()) {
            pruned_max = std::max(pruned_max, node.ub);
            continue;
        }
        int split = pick_split(prob, node);
        double mid = 0.5 * (node.lo[split] + node.hi[split]);
        for (int half = 0; half < 2; ++half) {
            Node child;
            child.lo = node.lo;
            child.hi = node.hi;
            child.lambda = node.lambda;
            if (half == 0)
                child.hi[split] = mid;
            else
                child.lo[split] = mid;
            child.id = next_id++;
            node_bound(child);
            ++res.nodes;
            if (child.ub <= prune_level()) {
                pruned_max = std::max(pruned_max, child.ub);
            } else {
                if (node.hi[split] - node.lo[split] < 0.25) try_incumbent(child);
                if (child.ub <= prune_level()) {
                    pruned_max = std::max(pruned_max, child.ub);
                } else {
                    queue.push(std::move(child));
                }
            }
        }
    }

    res.complete = queue.empty();
    double active_max = queue.empty() ? -1e300 : queue.top().ub;
    res.upper_bound = std::max({pruned_max, active_max, res.best_value});
    return res;
}

}  // namespace

BnbResult branch_and_bound(const CouplingProblem& prob, const BnbSettings& settings) {
    return bnb_core(prob, settings, false);
}

BnbResult branch_and_bound_linear_sigma_nonneg(const CouplingProblem& prob,
                                               const BnbSettings& settings) {
    return bnb_core(prob, settings, true);
}

}  // namespace treent
