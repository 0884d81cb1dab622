#include "treent/certify.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "treent/entropy.hpp"
#include "treent/error.hpp"
#include "treent/markov.hpp"
#include "treent/numeric.hpp"
#include "treent/polytope.hpp"

namespace treent {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::CertifiedTypical: return "certified-typical";
        case Verdict::RefutedNecessary: return "refuted-necessary";
        default: return "inconclusive";
    }
}

std::string Certificate::serialize() const {
    std::ostringstream os;
    os << "verdict=" << to_string(verdict) << "\n";
    os << "theorem=" << theorem << "\n";
    os << "mode=" << mode_desc << "\n";
    os << "sigma_p=" << format_g17(sigma_p) << "\n";
    os << "threshold=" << format_g17(threshold) << "\n";
    os << "best_coupling_value=" << format_g17(best_value) << "\n";
    os << "gap_bound=" << format_g17(gap_bound) << "\n";
    if (entropy) os << "entropy=" << format_g17(*entropy) << "\n";
    os << "radius_condition_propagates=" << (radius_condition_propagates ? "yes" : "no") << "\n";
    os << "nodes=" << nodes << "\n";
    os << "search_complete=" << (search_complete ? "yes" : "no") << "\n";
    for (const auto& n : notes) os << "note=" << n << "\n";
    if (!best_coupling_text.empty()) {
        os << "best_coupling:\n";
        std::istringstream is(best_coupling_text);
        std::string line;
        while (std::getline(is, line)) os << "  " << line << "\n";
    }
    return os.str();
}

NecessaryCheck necessary_check(const LocalLaw& p, int degree) {
    EntropyReport rep = sigma_of(p, degree);
    return {rep.value >= -kMarginalTol, rep.value};
}

NecessaryCheck necessary_check_ugw(const LocalLaw& edge_law, const DegreeDistribution& pi) {
    EntropyReport rep = sigma_e_ugw(edge_law, pi);
    return {rep.value >= -kMarginalTol, rep.value};
}

NecessaryCheck necessary_check_ugw(const UgwBallLaw& p) {
    EntropyReport rep = sigma_r_ugw(p);
    return {rep.value >= -kMarginalTol, rep.value};
}

namespace {

BnbSettings to_bnb(const CertifySettings& s, std::optional<double> threshold) {
    BnbSettings b;
    b.resolution = s.resolution;
    b.node_budget = s.node_budget;
    b.tol = s.tol;
    b.threads = s.threads;
    b.prune_threshold = threshold;
    b.restarts = s.restarts;
    b.ascent_iters = s.ascent_iters;
    b.seed = s.seed;
    return b;
}

std::string describe_mode(const CertifySettings& s) {
    std::ostringstream os;
    if (s.mode == CertifyMode::RigorousNet)
        os << "rigorous-net(resolution=1/" << s.resolution << ",budget=" << s.node_budget
           << ",adaptive-refinement)";
    else
        os << "heuristic(restarts=" << s.restarts << ",seed=" << s.seed << ")";
    return os.str();
}

struct RouteResult {
    CouplingProblem prob;
    std::string theorem;
    std::string coupling_serializer;  // unused marker
};

// shared tail: run the optimizer against threshold = 2 sigma and assemble
// the certificate
Certificate run_condition_check(CouplingProblem& prob, double sigma, const std::string& theorem,
                                bool propagates, const CertifySettings& settings,
                                const std::function<std::string(const std::vector<double>&)>&
                                    serialize_point) {
    Certificate cert;
    cert.theorem = theorem;
    cert.mode_desc = describe_mode(settings);
    cert.sigma_p = sigma;
    cert.threshold = 2.0 * sigma;
    cert.radius_condition_propagates = propagates;

    if (settings.mode == CertifyMode::Heuristic) {
        AscentResult best = ascend(prob, settings.restarts, settings.seed, settings.threads,
                                   settings.ascent_iters);
        cert.best_value = best.value;
        cert.gap_bound = std::numeric_limits<double>::infinity();
        cert.verdict = Verdict::Inconclusive;
        cert.notes.push_back("heuristic mode cannot certify; best coupling from " + best.origin);
        if (best.value > cert.threshold + 1e-6)
            cert.notes.push_back("second-moment condition violated at the defining radius: "
                                 "found coupling with Sigma above the threshold");
        if (serialize_point) cert.best_coupling_text = serialize_point(best.point);
        return cert;
    }

    BnbResult res = branch_and_bound(prob, to_bnb(settings, cert.threshold + settings.tol));
    cert.best_value = res.best_value;
    cert.gap_bound = res.upper_bound - res.best_value;
    cert.nodes = res.nodes;
    cert.search_complete = res.complete;
    if (serialize_point && !res.best_point.empty())
        cert.best_coupling_text = serialize_point(res.best_point);

    if (res.complete && cert.best_value + cert.gap_bound <= cert.threshold + settings.tol) {
        cert.verdict = Verdict::CertifiedTypical;
        cert.entropy = sigma;
    } else {
        cert.verdict = Verdict::Inconclusive;
        if (res.best_value > cert.threshold + 1e-6)
            cert.notes.push_back("second-moment condition violated at the defining radius");
        else if (!res.complete)
            cert.notes.push_back("node budget exhausted before the bound closed");
    }
    return cert;
}

}  // namespace

MaximizeResult maximize_coupling_sigma(const LocalLaw& p, int degree,
                                       const CertifySettings& settings) {
    require_valid(p, "maximize_coupling_sigma");
    MaximizeResult out;
    if (p.is_edge_law()) {
        CouplingProblem prob = make_vertex_coupling_problem(p, degree);
        if (settings.mode == CertifyMode::Heuristic) {
            AscentResult best = ascend(prob, settings.restarts, settings.seed, settings.threads,
                                       settings.ascent_iters);
            out.s = best.value;
            out.gap_bound = std::numeric_limits<double>::infinity();
            std::ostringstream os;
            write_law(os, decode_vertex_coupling(p, prob, best.point).joint);
            out.coupling_text = os.str();
            return out;
        }
        BnbResult res = branch_and_bound(prob, to_bnb(settings, std::nullopt));
        out.s = res.best_value;
        out.gap_bound = res.upper_bound - res.best_value;
        out.rigorous = res.complete;
        out.nodes = res.nodes;
        std::ostringstream os;
        write_law(os, decode_vertex_coupling(p, prob, res.best_point).joint);
        out.coupling_text = os.str();
        return out;
    }
    CouplingProblem prob = make_ball_coupling_problem(p, degree);
    if (settings.mode == CertifyMode::Heuristic) {
        AscentResult best = ascend(prob, settings.restarts, settings.seed, settings.threads,
                                   settings.ascent_iters);
        out.s = best.value;
        out.gap_bound = std::numeric_limits<double>::infinity();
        std::ostringstream os;
        write_law(os, decode_ball_coupling(p, prob, best.point).joint);
        out.coupling_text = os.str();
        return out;
    }
    BnbResult res = branch_and_bound(prob, to_bnb(settings, std::nullopt));
    out.s = res.best_value;
    out.gap_bound = res.upper_bound - res.best_value;
    out.rigorous = res.complete;
    out.nodes = res.nodes;
    std::ostringstream os;
    write_law(os, decode_ball_coupling(p, prob, res.best_point).joint);
    out.coupling_text = os.str();
    return out;
}

Certificate certify(const LocalLaw& p_in, int degree, const CertifySettings& settings) {
    require_valid(p_in, "certify");
    LocalLaw p = p_in;
    std::vector<std::string> notes;

    // Necessary condition first.
    {
        NecessaryCheck nc = necessary_check(p, degree);
        if (!nc.pass) {
            Certificate cert;
            cert.verdict = Verdict::RefutedNecessary;
            cert.theorem = "star-edge-necessary";
            cert.mode_desc = describe_mode(settings);
            cert.sigma_p = nc.sigma;
            cert.threshold = 2.0 * nc.sigma;
            cert.notes.push_back("Sigma(p) < 0: the law cannot be weakly typical");
            return cert;
        }
    }

    // Lemma 11/12 equality reductions down to the smallest defining radius.
    const double defect_tol = 1e-10;
    while (p.shape.kind() == BallShape::Kind::Ball && p.shape.radius() >= 2) {
        double defect = markov_defect(p, degree);
        if (defect <= defect_tol && is_markov_extension(p, degree, 1e-8)) {
            int r = p.shape.radius();
            p = restrict_law(p, BallShape::ball(degree, r - 1));
            notes.push_back("reduced radius " + std::to_string(r) + " -> " +
                            std::to_string(r - 1) + " (Markov extension, defect " +
                            format_g17(defect) + ")");
        } else {
            break;
        }
    }
    bool reduced_to_vertex = false;
    if (p.shape.kind() == BallShape::Kind::Ball && p.shape.radius() == 1) {
        double defect = vertex_defect(p, degree);
        if (defect <= defect_tol && is_vertex_markov_law(p, degree, 1e-8)) {
            p = restrict_law(p, BallShape::edge(degree, 1));
            reduced_to_vertex = true;
            notes.push_back("reduced radius-1 ball to its edge law (vertex-Markov, defect " +
                            format_g17(defect) + ")");
        }
    }

    double sigma = sigma_of(p, degree, false).value;
    Certificate cert;
    if (p.is_edge_law()) {
        CouplingProblem prob = make_vertex_coupling_problem(p, degree);
        LocalLaw p_copy = p;
        auto ser = [p_copy, &prob](const std::vector<double>& t) {
            std::ostringstream os;
            write_law(os, decode_vertex_coupling(p_copy, prob, t).joint);
            return os.str();
        };
        cert = run_condition_check(prob, sigma, "vertex-markov", true, settings, ser);
    } else {
        int r = p.shape.radius();
        CouplingProblem prob = make_ball_coupling_problem(p, degree);
        LocalLaw p_copy = p;
        auto ser = [p_copy, &prob](const std::vector<double>& t) {
            std::ostringstream os;
            write_law(os, decode_ball_coupling(p_copy, prob, t).joint);
            return os.str();
        };
        std::string theorem = (r == 1 && !reduced_to_vertex)
                                  ? "edge-markov(r=1)"
                                  : "second-moment(r=" + std::to_string(r) + ")";
        cert = run_condition_check(prob, sigma, theorem, true, settings, ser);
    }
    for (const auto& n : notes) cert.notes.push_back(n);
    return cert;
}

Certificate certify_ugw_vertex(const LocalLaw& edge_law, const DegreeDistribution& pi,
                               const CertifySettings& settings) {
    require_valid(edge_law, "certify_ugw_vertex");
    NecessaryCheck nc = necessary_check_ugw(edge_law, pi);
    if (!nc.pass) {
        Certificate cert;
        cert.verdict = Verdict::RefutedNecessary;
        cert.theorem = "ugw-star-edge-necessary";
        cert.mode_desc = describe_mode(settings);
        cert.sigma_p = nc.sigma;
        cert.threshold = 2.0 * nc.sigma;
        return cert;
    }
    double sigma = nc.sigma;
    CouplingProblem prob =
        make_vertex_coupling_problem(edge_law, pi.mean(), -pi.entropy());
    LocalLaw p_copy = edge_law;
    auto ser = [p_copy, &prob](const std::vector<double>& t) {
        std::ostringstream os;
        write_law(os, decode_vertex_coupling(p_copy, prob, t).joint);
        return os.str();
    };
    Certificate cert =
        run_condition_check(prob, sigma, "ugw-vertex-markov", true, settings, ser);
    cert.notes.push_back("pi=" + pi.serialize());
    return cert;
}

Certificate certify_ugw_ball1(const UgwBallLaw& p, const CertifySettings& settings) {
    {
        auto v = validate_ugw(p);
        if (!v.empty()) throw Error("certify_ugw_ball1: invalid law: " + v.front().what);
    }
    NecessaryCheck nc = necessary_check_ugw(p);
    if (!nc.pass) {
        Certificate cert;
        cert.verdict = Verdict::RefutedNecessary;
        cert.theorem = "ugw-star-edge-necessary";
        cert.mode_desc = describe_mode(settings);
        cert.sigma_p = nc.sigma;
        cert.threshold = 2.0 * nc.sigma;
        return cert;
    }
    CouplingProblem prob = make_ugw_ball1_coupling_problem(p);
    Certificate cert =
        run_condition_check(prob, nc.sigma, "ugw-edge-markov(r=1)", true, settings, nullptr);
    cert.notes.push_back("pi=" + p.pi.serialize());
    return cert;
}

}  // namespace treent
