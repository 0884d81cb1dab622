#include "treent/law.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "treent/error.hpp"
#include "treent/numeric.hpp"

namespace treent {

namespace {

// Applies a vertex permutation to a coloring key without heap traffic.
uint64_t apply_perm(const ProbTable& t, uint64_t key, const std::vector<int>& perm,
                    std::vector<int>& scratch) {
    t.decode_into(key, scratch);
    uint64_t out = 0;
    uint64_t base = 1;
    int m = t.alphabet_size();
    for (size_t v = 0; v < perm.size(); ++v) {
        out += static_cast<uint64_t>(scratch[perm[v]]) * base;
        base *= m;
    }
    return out;
}

}  // namespace

std::vector<Violation> validate(const LocalLaw& law) {
    std::vector<Violation> out;
    const ProbTable& t = law.table;

    double neg = 0.0, over = 0.0;
    t.for_each([&](uint64_t, double p) {
        if (p < 0.0) neg = std::max(neg, -p);
        if (p > 1.0) over = std::max(over, p - 1.0);
    });
    if (neg > 0.0) out.push_back({"negative probability entry", neg});
    if (over > kMassTol) out.push_back({"probability entry above 1", over});

    double mass = t.total_mass();
    if (std::fabs(mass - 1.0) > kMassTol)
        out.push_back({"mass = " + format_g17(mass), std::fabs(mass - 1.0)});

    // Invariance under the automorphism generators (includes the edge flip
    // for edge shapes).
    std::vector<int> scratch;
    double worst = 0.0;
    for (const auto& gen : law.shape.aut_generators()) {
        t.for_each([&](uint64_t key, double p) {
            double q = t.prob(apply_perm(t, key, gen, scratch));
            worst = std::max(worst, std::fabs(p - q));
        });
    }
    if (worst > kMassTol)
        out.push_back({"automorphism invariance violated", worst});

    // Ball laws: the E_r restriction must be flip invariant.
    if (law.shape.kind() == BallShape::Kind::Ball && law.shape.radius() >= 1) {
        LocalLaw edge = restrict_law(law, BallShape::edge(law.shape.degree(), law.shape.radius()));
        const auto& flip = edge.shape.edge_flip();
        double worst_flip = 0.0;
        edge.table.for_each([&](uint64_t key, double p) {
            double q = edge.table.prob(apply_perm(edge.table, key, flip, scratch));
            worst_flip = std::max(worst_flip, std::fabs(p - q));
        });
        if (worst_flip > kMassTol)
            out.push_back({"edge restriction not flip invariant", worst_flip});
    }
    return out;
}

void require_valid(const LocalLaw& law, const std::string& context) {
    auto violations = validate(law);
    if (violations.empty()) return;
    std::string msg = context + ": invalid law:";
    for (const auto& v : violations) msg += " [" + v.what + "]";
    throw Error(msg);
}

LocalLaw restrict_law(const LocalLaw& law, const BallShape& target) {
    auto emb = law.shape.embedding_of(target);
    require(emb.has_value(), "restrict: target is not a sub-shape");
    LocalLaw out(target, law.alphabet);
    const int m = law.alphabet.size();
    std::vector<int> scratch;
    std::vector<uint64_t> base(emb->size());
    uint64_t b = 1;
    for (size_t i = 0; i < emb->size(); ++i) {
        base[i] = b;
        b *= m;
    }
    law.table.for_each([&](uint64_t key, double p) {
        law.table.decode_into(key, scratch);
        uint64_t tkey = 0;
        for (size_t i = 0; i < emb->size(); ++i)
            tkey += static_cast<uint64_t>(scratch[(*emb)[i]]) * base[i];
        out.table.add(tkey, p);
    });
    return out;
}

std::vector<double> root_marginal(const LocalLaw& law) {
    std::vector<double> out(law.alphabet.size(), 0.0);
    const int m = law.alphabet.size();
    law.table.for_each([&](uint64_t key, double p) { out[key % m] += p; });
    return out;
}

LocalLaw symmetrize(const BallShape& shape, const ColorAlphabet& alphabet,
                    const ProbTable& raw) {
    require(raw.num_vertices() == shape.num_vertices() &&
                raw.alphabet_size() == alphabet.size(),
            "symmetrize: table does not match shape/alphabet");
    double mass = 0.0;
    raw.for_each([&](uint64_t, double p) {
        require(p >= 0.0, "symmetrize: negative entry");
        mass += p;
    });
    require(mass > 0.0, "symmetrize: zero total mass");

    LocalLaw out(shape, alphabet);
    const auto& gens = shape.aut_generators();
    std::vector<int> scratch;
    std::unordered_set<uint64_t> visited;
    raw.for_each([&](uint64_t key0, double) {
        if (visited.count(key0)) return;
        // Orbit closure under the generators.
        std::vector<uint64_t> orbit{key0};
        std::unordered_set<uint64_t> in_orbit{key0};
        for (size_t i = 0; i < orbit.size(); ++i) {
            for (const auto& g : gens) {
                uint64_t img = apply_perm(raw, orbit[i], g, scratch);
                if (in_orbit.insert(img).second) orbit.push_back(img);
            }
        }
        double total = 0.0;
        for (uint64_t k : orbit) total += raw.prob(k);
        double avg = total / (mass * static_cast<double>(orbit.size()));
        for (uint64_t k : orbit) {
            out.table.set(k, avg);
            visited.insert(k);
        }
    });
    return out;
}

LocalLaw symmetrize(const LocalLaw& law) {
    return symmetrize(law.shape, law.alphabet, law.table);
}

LocalLaw project_coupling(const LocalLaw& joint, int m1, int m2, int which) {
    require(joint.alphabet.size() == m1 * m2, "project: alphabet is not a product");
    std::vector<std::string> syms;
    for (int i = 0; i < (which == 0 ? m1 : m2); ++i) {
        const std::string& s = joint.alphabet.symbol(which == 0 ? i * m2 : i);
        auto bar = s.find('|');
        syms.push_back(bar == std::string::npos
                           ? s
                           : (which == 0 ? s.substr(0, bar) : s.substr(bar + 1)));
    }
    LocalLaw out(joint.shape, ColorAlphabet(std::move(syms)));
    const int prod = m1 * m2;
    const int n = joint.shape.num_vertices();
    std::vector<int> scratch;
    std::vector<uint64_t> base(n);
    uint64_t b = 1;
    int m = (which == 0) ? m1 : m2;
    for (int i = 0; i < n; ++i) {
        base[i] = b;
        b *= m;
    }
    joint.table.for_each([&](uint64_t key, double p) {
        joint.table.decode_into(key, scratch);
        uint64_t tkey = 0;
        for (int i = 0; i < n; ++i) {
            int c = scratch[i] % prod;
            int part = (which == 0) ? c / m2 : c % m2;
            tkey += static_cast<uint64_t>(part) * base[i];
        }
        out.table.add(tkey, p);
    });
    return out;
}

CouplingLaw couple(const LocalLaw& p, const LocalLaw& q, const ProbTable& joint_table) {
    require(p.shape.same_shape(q.shape), "couple: marginal shapes differ");
    ColorAlphabet prod = ColorAlphabet::product(p.alphabet, q.alphabet);
    LocalLaw joint(p.shape, prod);
    require(joint_table.num_vertices() == joint.table.num_vertices() &&
                joint_table.alphabet_size() == prod.size(),
            "couple: joint table does not match the product space");
    joint_table.for_each([&](uint64_t key, double v) { joint.table.set(key, v); });

    require_valid(joint, "couple: joint");
    CouplingLaw c{std::move(joint), p.alphabet.size(), q.alphabet.size()};
    double tv1 = law_tv(project_coupling(c.joint, c.m1, c.m2, 0), p);
    double tv2 = law_tv(project_coupling(c.joint, c.m1, c.m2, 1), q);
    require(tv1 <= kMarginalTol, "couple: first marginal mismatch, TV = " + format_g17(tv1));
    require(tv2 <= kMarginalTol, "couple: second marginal mismatch, TV = " + format_g17(tv2));
    return c;
}

CouplingLaw diagonal_coupling(const LocalLaw& p) {
    ColorAlphabet prod = ColorAlphabet::product(p.alphabet, p.alphabet);
    LocalLaw joint(p.shape, prod);
    const int m = p.alphabet.size();
    const int n = p.shape.num_vertices();
    std::vector<int> scratch;
    p.table.for_each([&](uint64_t key, double v) {
        p.table.decode_into(key, scratch);
        uint64_t jkey = 0;
        uint64_t base = 1;
        for (int i = 0; i < n; ++i) {
            jkey += static_cast<uint64_t>(scratch[i] * m + scratch[i]) * base;
            base *= static_cast<uint64_t>(m) * m;
        }
        joint.table.set(jkey, v);
    });
    return {std::move(joint), m, m};
}

CouplingLaw independent_coupling(const LocalLaw& p) {
    ColorAlphabet prod = ColorAlphabet::product(p.alphabet, p.alphabet);
    LocalLaw joint(p.shape, prod);
    const int m = p.alphabet.size();
    const int n = p.shape.num_vertices();
    std::vector<int> sa, sb;
    p.table.for_each([&](uint64_t ka, double va) {
        p.table.decode_into(ka, sa);
        p.table.for_each([&](uint64_t kb, double vb) {
            p.table.decode_into(kb, sb);
            uint64_t jkey = 0;
            uint64_t base = 1;
            for (int i = 0; i < n; ++i) {
                jkey += static_cast<uint64_t>(sa[i] * m + sb[i]) * base;
                base *= static_cast<uint64_t>(m) * m;
            }
            joint.table.set(jkey, va * vb);
        });
    });
    return {std::move(joint), m, m};
}

double table_tv(const ProbTable& a, const ProbTable& b) {
    require(a.space_size() == b.space_size(), "tv: tables on different spaces");
    double sum = 0.0;
    std::unordered_map<uint64_t, double> diff;
    a.for_each([&](uint64_t k, double p) { diff[k] += p; });
    b.for_each([&](uint64_t k, double p) { diff[k] -= p; });
    for (const auto& kv : diff) sum += std::fabs(kv.second);
    return 0.5 * sum;
}

double law_tv(const LocalLaw& a, const LocalLaw& b) {
    require(a.shape.same_shape(b.shape), "tv: laws on different shapes");
    require(a.alphabet == b.alphabet, "tv: laws on different alphabets");
    return table_tv(a.table, b.table);
}

void write_law(std::ostream& os, const LocalLaw& law,
               const std::map<std::string, std::string>& extra_headers) {
    os << "d=" << law.shape.degree() << "\n";
    os << "r=" << law.shape.radius() << "\n";
    os << "alphabet=";
    for (int i = 0; i < law.alphabet.size(); ++i)
        os << (i ? "," : "") << law.alphabet.symbol(i);
    os << "\n";
    os << "kind=" << (law.is_edge_law() ? "edge" : "ball") << "\n";
    for (const auto& kv : extra_headers) os << kv.first << "=" << kv.second << "\n";
    std::vector<int> scratch;
    law.table.for_each([&](uint64_t key, double p) {
        law.table.decode_into(key, scratch);
        for (size_t i = 0; i < scratch.size(); ++i)
            os << (i ? "," : "") << law.alphabet.symbol(scratch[i]);
        os << " " << format_g17(p) << "\n";
    });
}

void write_law_file(const std::string& path, const LocalLaw& law,
                    const std::map<std::string, std::string>& extra_headers) {
    std::ofstream f(path);
    require(f.good(), "cannot open for writing: " + path);
    write_law(f, law, extra_headers);
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string strip(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

LawFile read_law(std::istream& is) {
    std::map<std::string, std::string> headers;
    std::vector<std::pair<std::vector<std::string>, double>> atoms;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string s = strip(line);
        if (s.empty() || s[0] == '#') continue;
        auto where = [&] { return " (line " + std::to_string(lineno) + ")"; };
        auto eq = s.find('=');
        auto sp = s.find_first_of(" \t");
        if (eq != std::string::npos && (sp == std::string::npos || eq < sp)) {
            headers[s.substr(0, eq)] = strip(s.substr(eq + 1));
            continue;
        }
        require(sp != std::string::npos, "law file: malformed atom line" + where());
        std::string colors = s.substr(0, sp);
        std::string prob = strip(s.substr(sp + 1));
        char* end = nullptr;
        double p = std::strtod(prob.c_str(), &end);
        require(end && *end == '\0', "law file: bad probability '" + prob + "'" + where());
        atoms.emplace_back(split(colors, ','), p);
    }
    for (const char* key : {"d", "r", "alphabet", "kind"})
        require(headers.count(key), std::string("law file: missing header ") + key);
    require(headers["kind"] == "ball" || headers["kind"] == "edge",
            "law file: kind must be ball or edge (use the ugw reader for kind=ugw)");
    int d = std::stoi(headers["d"]);
    int r = std::stoi(headers["r"]);
    ColorAlphabet alphabet(split(headers["alphabet"], ','));
    BallShape shape = headers["kind"] == "edge" ? BallShape::edge(d, r) : BallShape::ball(d, r);
    LocalLaw law(shape, alphabet);
    std::vector<int> colors(shape.num_vertices());
    for (const auto& [syms, p] : atoms) {
        require(static_cast<int>(syms.size()) == shape.num_vertices(),
                "law file: atom has " + std::to_string(syms.size()) + " colors, shape has " +
                    std::to_string(shape.num_vertices()) + " vertices");
        for (size_t i = 0; i < syms.size(); ++i) colors[i] = alphabet.index_of(syms[i]);
        law.table.add(law.table.encode(colors), p);
    }
    std::map<std::string, std::string> extra;
    for (const auto& kv : headers)
        if (kv.first != "d" && kv.first != "r" && kv.first != "alphabet" && kv.first != "kind")
            extra[kv.first] = kv.second;
    return {std::move(law), std::move(extra)};
}

LawFile read_law_file(const std::string& path) {
    std::ifstream f(path);
    require(f.good(), "cannot open law file: " + path);
    return read_law(f);
}

}  // namespace treent
