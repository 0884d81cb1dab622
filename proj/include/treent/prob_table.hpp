#pragma once

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

namespace treent {

// Probability table over colorings of a fixed vertex set, keyed by the
// mixed-radix code key = sum_i color[i] * m^i in BFS vertex order.
//
// Dense storage up to kDenseCap entries, hashed storage above. Zero entries
// are treated as absent; iteration visits only positive atoms in increasing
// key order.
class ProbTable {
public:
    static constexpr uint64_t kDenseCap = uint64_t(1) << 20;
    static constexpr uint64_t kExactCap = uint64_t(1) << 24;  // extension cap

    ProbTable() = default;
    ProbTable(int num_vertices, int alphabet_size);

    int num_vertices() const { return num_vertices_; }
    int alphabet_size() const { return alphabet_size_; }
    uint64_t space_size() const { return space_; }
    bool dense() const { return !dense_.empty() || space_ <= kDenseCap; }

    double prob(uint64_t key) const;
    void set(uint64_t key, double p);
    void add(uint64_t key, double p);

    size_t support_size() const;
    double total_mass() const;
    void scale(double factor);

    // Visits (key, prob) for every positive atom in increasing key order.
    void for_each(const std::function<void(uint64_t, double)>& fn) const;

    // Key codec helpers.
    uint64_t encode(const std::vector<int>& colors) const;
    std::vector<int> decode(uint64_t key) const;
    void decode_into(uint64_t key, std::vector<int>& colors) const;

    // Key of the image coloring under a vertex permutation: vertex v of the
    // image gets the color of perm[v].
    uint64_t permute_key(uint64_t key, const std::vector<int>& perm) const;

    // Marginal key over a vertex subset (target vertex i reads source vertex
    // emb[i]).
    uint64_t project_key(uint64_t key, const std::vector<int>& emb) const;

    static uint64_t checked_space(int num_vertices, int alphabet_size);

private:
    int num_vertices_ = 0;
    int alphabet_size_ = 0;
    uint64_t space_ = 0;
    std::vector<double> dense_;
    std::unordered_map<uint64_t, double> sparse_;
    std::vector<uint64_t> pow_;  // m^i
};

}  // namespace treent
