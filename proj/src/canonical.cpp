#include "treent/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>

#include "treent/error.hpp"

namespace treent {

namespace {

constexpr int64_t kOrderingCap = 2'000'000;
constexpr size_t kMinOrderingsCap = 100'000;

char color_char(int c) {
    require(c >= 0 && c < 36, "canonical: alphabet too large for class codes");
    return c < 10 ? static_cast<char>('0' + c) : static_cast<char>('a' + (c - 10));
}

int color_index(char ch) {
    if (ch >= '0' && ch <= '9') return ch - '0';
    if (ch >= 'a' && ch <= 'z') return ch - 'a' + 10;
    throw Error("canonical: bad color character in class code");
}

size_t pair_index(int i, int j, int n) {
    // upper triangle, i < j, row-major
    return static_cast<size_t>(i) * (2 * n - i - 1) / 2 + (j - i - 1);
}

}  // namespace

BallClassifier::BallClassifier(int n, int root, const std::vector<std::pair<int, int>>& edges,
                               int radius_cap)
    : n_(n), root_(root) {
    require(n >= 1 && root >= 0 && root < n, "classifier: bad vertex count or root");
    adj_.assign(n, {});
    for (auto [u, v] : edges) {
        require(u >= 0 && u < n && v >= 0 && v < n && u != v, "classifier: bad edge");
        adj_[u].push_back(v);
        adj_[v].push_back(u);
    }
    for (auto& a : adj_) std::sort(a.begin(), a.end());

    std::vector<int> dist(n, -1);
    std::queue<int> q;
    dist[root] = 0;
    q.push(root);
    std::vector<int> bfs_order;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        bfs_order.push_back(v);
        for (int w : adj_[v]) {
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                q.push(w);
            }
        }
    }
    require(static_cast<int>(bfs_order.size()) == n, "classifier: graph is disconnected");
    depth_ = *std::max_element(dist.begin(), dist.end());
    require(depth_ <= radius_cap, "classifier: radius exceeds bound");

    is_tree_ = (edges.size() == static_cast<size_t>(n) - 1);
    if (is_tree_) {
        children_.assign(n, {});
        order_.clear();
        for (int v : bfs_order)
            for (int w : adj_[v])
                if (dist[w] == dist[v] + 1) children_[v].push_back(w);
        // postorder
        order_ = bfs_order;
        std::reverse(order_.begin(), order_.end());
        return;
    }

    // Cyclic ball: minimize the adjacency code over orderings that list the
    // root first and otherwise respect BFS levels.
    std::vector<std::vector<int>> levels(depth_ + 1);
    for (int v = 0; v < n; ++v) levels[dist[v]].push_back(v);
    int64_t combos = 1;
    for (const auto& lv : levels) {
        int64_t f = 1;
        for (size_t i = 2; i <= lv.size(); ++i) f *= static_cast<int64_t>(i);
        combos *= f;
        require(combos <= kOrderingCap,
                "classifier: too many vertex orderings; reduce the ball radius");
    }

    std::string lv_str;
    for (size_t l = 0; l < levels.size(); ++l)
        lv_str += (l ? "," : "") + std::to_string(levels[l].size());

    std::vector<std::vector<bool>> am(n, std::vector<bool>(n, false));
    for (auto [u, v] : edges) am[u][v] = am[v][u] = true;

    size_t nbits = static_cast<size_t>(n) * (n - 1) / 2;
    std::vector<uint64_t> best;
    std::vector<int> ordering;
    ordering.reserve(n);
    std::vector<std::vector<int>> perms = levels;  // mutable per-level perms
    for (auto& lv : perms) std::sort(lv.begin(), lv.end());

    std::vector<uint64_t> bits((nbits + 63) / 64);
    auto emit = [&]() {
        std::fill(bits.begin(), bits.end(), 0);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (am[ordering[i]][ordering[j]]) {
                    size_t b = pair_index(i, j, n);
                    bits[b >> 6] |= uint64_t(1) << (b & 63);
                }
        if (best.empty() || bits < best) {
            best = bits;
            min_orderings_.clear();
            min_orderings_.push_back(ordering);
        } else if (bits == best) {
            require(min_orderings_.size() < kMinOrderingsCap,
                    "classifier: automorphism set too large");
            min_orderings_.push_back(ordering);
        }
    };
    // odometer over per-level permutations
    std::function<void(size_t)> rec = [&](size_t level) {
        if (level == perms.size()) {
            emit();
            return;
        }
        auto& lv = perms[level];
        std::sort(lv.begin(), lv.end());
        do {
            size_t base = ordering.size();
            ordering.insert(ordering.end(), lv.begin(), lv.end());
            rec(level + 1);
            ordering.resize(base);
        } while (std::next_permutation(lv.begin(), lv.end()));
    };
    rec(0);

    std::string hex;
    for (size_t b = 0; b < nbits; b += 4) {
        int nib = 0;
        for (int k = 0; k < 4 && b + k < nbits; ++k)
            if (best[(b + k) >> 6] & (uint64_t(1) << ((b + k) & 63))) nib |= 1 << k;
        hex += "0123456789abcdef"[nib];
    }
    struct_prefix_ = "g|n=" + std::to_string(n) + "|l=" + lv_str + "|a=" + hex + "|c=";
}

std::string BallClassifier::classify(const std::vector<int>& colors) const {
    require(static_cast<int>(colors.size()) == n_, "classifier: color vector length mismatch");
    return is_tree_ ? classify_tree(colors) : classify_cyclic(colors);
}

std::string BallClassifier::classify_tree(const std::vector<int>& colors) const {
    std::vector<std::string> code(n_);
    std::vector<std::string> kids;
    for (int v : order_) {
        kids.clear();
        for (int w : children_[v]) kids.push_back(std::move(code[w]));
        std::sort(kids.begin(), kids.end());
        std::string& c = code[v];
        c = "(";
        c += color_char(colors[v]);
        for (const auto& k : kids) c += k;
        c += ")";
    }
    return "t" + code[root_];
}

std::string BallClassifier::classify_cyclic(const std::vector<int>& colors) const {
    std::string best;
    std::string cur(n_, '0');
    for (const auto& ord : min_orderings_) {
        for (int i = 0; i < n_; ++i) cur[i] = color_char(colors[ord[i]]);
        if (best.empty() || cur < best) best = cur;
    }
    return struct_prefix_ + best;
}

CanonicalBallClass canonicalize(const RootedColoredGraph& g, int radius_cap) {
    BallClassifier cls(g.n, g.root, g.edges, radius_cap);
    return {cls.classify(g.colors)};
}

double tv_distance(const std::map<std::string, double>& a,
                   const std::map<std::string, double>& b) {
    double sum = 0.0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
            sum += std::fabs(ia->second);
            ++ia;
        } else if (ia == a.end() || ib->first < ia->first) {
            sum += std::fabs(ib->second);
            ++ib;
        } else {
            sum += std::fabs(ia->second - ib->second);
            ++ia;
            ++ib;
        }
    }
    return 0.5 * sum;
}

double tv_distance(const BallStatistics& a, const BallStatistics& b) {
    require(a.radius == b.radius, "tv: class distributions at different radii");
    require(a.alphabet_size == b.alphabet_size, "tv: class distributions over different alphabets");
    return tv_distance(a.freq, b.freq);
}

BallStatistics class_distribution(const LocalLaw& law) {
    require(law.shape.kind() == BallShape::Kind::Ball,
            "class_distribution: expects a ball law");
    BallClassifier cls(law.shape.num_vertices(), 0, law.shape.edges(), law.shape.radius());
    BallStatistics out;
    out.radius = law.shape.radius();
    out.alphabet_size = law.alphabet.size();
    std::vector<int> colors;
    law.table.for_each([&](uint64_t key, double p) {
        law.table.decode_into(key, colors);
        out.freq[cls.classify(colors)] += p;
    });
    return out;
}

namespace {

// Recursive parse of the tree code "(<color><children>)".
int parse_tree_node(const std::string& s, size_t& pos, RootedColoredGraph& g, int parent) {
    require(pos < s.size() && s[pos] == '(', "class code: expected (");
    ++pos;
    require(pos < s.size(), "class code: truncated");
    int v = g.n++;
    g.colors.push_back(color_index(s[pos]));
    if (parent >= 0) g.edges.emplace_back(parent, v);
    ++pos;
    while (pos < s.size() && s[pos] == '(') parse_tree_node(s, pos, g, v);
    require(pos < s.size() && s[pos] == ')', "class code: expected )");
    ++pos;
    return v;
}

}  // namespace

RootedColoredGraph parse_class_code(const std::string& code) {
    require(!code.empty(), "class code: empty");
    RootedColoredGraph g;
    g.root = 0;
    if (code[0] == 't') {
        size_t pos = 1;
        parse_tree_node(code, pos, g, -1);
        require(pos == code.size(), "class code: trailing characters");
        return g;
    }
    require(code.rfind("g|n=", 0) == 0, "class code: unknown format");
    size_t p0 = 4;
    size_t p1 = code.find('|', p0);
    g.n = std::stoi(code.substr(p0, p1 - p0));
    size_t pa = code.find("|a=", p1);
    size_t pc = code.find("|c=", pa);
    require(pa != std::string::npos && pc != std::string::npos, "class code: malformed");
    std::string hex = code.substr(pa + 3, pc - pa - 3);
    std::string cols = code.substr(pc + 3);
    require(static_cast<int>(cols.size()) == g.n, "class code: color count mismatch");
    for (char ch : cols) g.colors.push_back(color_index(ch));
    size_t nbits = static_cast<size_t>(g.n) * (g.n - 1) / 2;
    auto bit = [&](size_t b) {
        size_t c = b / 4;
        require(c < hex.size(), "class code: adjacency bits truncated");
        char ch = hex[c];
        int nib = (ch <= '9') ? ch - '0' : ch - 'a' + 10;
        return (nib >> (b % 4)) & 1;
    };
    for (int i = 0; i < g.n; ++i)
        for (int j = i + 1; j < g.n; ++j) {
            size_t b = pair_index(i, j, g.n);
            require(b < nbits, "class code: bad pair index");
            if (bit(b)) g.edges.emplace_back(i, j);
        }
    return g;
}

}  // namespace treent
