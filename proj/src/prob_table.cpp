#include "treent/prob_table.hpp"

#include <algorithm>
#include <limits>

#include "treent/error.hpp"

namespace treent {

uint64_t ProbTable::checked_space(int num_vertices, int alphabet_size) {
    require(num_vertices >= 1, "table: need at least one vertex");
    require(alphabet_size >= 1, "table: need at least one color");
    uint64_t space = 1;
    for (int i = 0; i < num_vertices; ++i) {
        require(space <= std::numeric_limits<uint64_t>::max() / alphabet_size,
                "table: coloring space exceeds 64-bit key range");
        space *= alphabet_size;
    }
    return space;
}

ProbTable::ProbTable(int num_vertices, int alphabet_size)
    : num_vertices_(num_vertices), alphabet_size_(alphabet_size) {
    space_ = checked_space(num_vertices, alphabet_size);
    pow_.resize(num_vertices + 1);
    pow_[0] = 1;
    for (int i = 0; i < num_vertices; ++i) pow_[i + 1] = pow_[i] * alphabet_size;
    if (space_ <= kDenseCap) dense_.assign(space_, 0.0);
}

double ProbTable::prob(uint64_t key) const {
    if (!dense_.empty()) return dense_[key];
    auto it = sparse_.find(key);
    return it == sparse_.end() ? 0.0 : it->second;
}

void ProbTable::set(uint64_t key, double p) {
    require(key < space_, "table: key out of range");
    if (!dense_.empty()) {
        dense_[key] = p;
    } else if (p == 0.0) {
        sparse_.erase(key);
    } else {
        sparse_[key] = p;
    }
}

void ProbTable::add(uint64_t key, double p) {
    require(key < space_, "table: key out of range");
    if (!dense_.empty())
        dense_[key] += p;
    else
        sparse_[key] += p;
}

size_t ProbTable::support_size() const {
    size_t n = 0;
    for_each([&](uint64_t, double) { ++n; });
    return n;
}

double ProbTable::total_mass() const {
    double s = 0.0;
    for_each([&](uint64_t, double p) { s += p; });
    return s;
}

void ProbTable::scale(double factor) {
    if (!dense_.empty()) {
        for (double& p : dense_) p *= factor;
    } else {
        for (auto& kv : sparse_) kv.second *= factor;
    }
}

void ProbTable::for_each(const std::function<void(uint64_t, double)>& fn) const {
    if (!dense_.empty()) {
        for (uint64_t k = 0; k < space_; ++k)
            if (dense_[k] != 0.0) fn(k, dense_[k]);
        return;
    }
    std::vector<uint64_t> keys;
    keys.reserve(sparse_.size());
    for (const auto& kv : sparse_)
        if (kv.second != 0.0) keys.push_back(kv.first);
    std::sort(keys.begin(), keys.end());
    for (uint64_t k : keys) fn(k, sparse_.at(k));
}

uint64_t ProbTable::encode(const std::vector<int>& colors) const {
    require(static_cast<int>(colors.size()) == num_vertices_, "table: coloring length mismatch");
    uint64_t key = 0;
    for (int i = 0; i < num_vertices_; ++i) {
        require(colors[i] >= 0 && colors[i] < alphabet_size_, "table: color index out of range");
        key += static_cast<uint64_t>(colors[i]) * pow_[i];
    }
    return key;
}

std::vector<int> ProbTable::decode(uint64_t key) const {
    std::vector<int> colors(num_vertices_);
    decode_into(key, colors);
    return colors;
}

void ProbTable::decode_into(uint64_t key, std::vector<int>& colors) const {
    colors.resize(num_vertices_);
    for (int i = 0; i < num_vertices_; ++i) {
        colors[i] = static_cast<int>(key % alphabet_size_);
        key /= alphabet_size_;
    }
}

uint64_t ProbTable::permute_key(uint64_t key, const std::vector<int>& perm) const {
    uint64_t out = 0;
    std::vector<int> colors(num_vertices_);
    decode_into(key, colors);
    for (int v = 0; v < num_vertices_; ++v)
        out += static_cast<uint64_t>(colors[perm[v]]) * pow_[v];
    return out;
}

uint64_t ProbTable::project_key(uint64_t key, const std::vector<int>& emb) const {
    uint64_t out = 0;
    uint64_t base = 1;
    std::vector<int> colors(num_vertices_);
    decode_into(key, colors);
    for (size_t i = 0; i < emb.size(); ++i) {
        out += static_cast<uint64_t>(colors[emb[i]]) * base;
        base *= alphabet_size_;
    }
    return out;
}

}  // namespace treent
