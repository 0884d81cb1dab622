#include "treent/degree.hpp"

#include <cmath>

#include "treent/error.hpp"
#include "treent/numeric.hpp"

namespace treent {

DegreeDistribution::DegreeDistribution(std::map<int, double> probs) : probs_(std::move(probs)) {
    double mass = 0.0;
    for (const auto& [k, p] : probs_) {
        require(k >= 0, "degree distribution: negative degree");
        require(p >= 0.0, "degree distribution: negative probability");
        mass += p;
        mean_ += k * p;
        if (p > 0.0) max_degree_ = std::max(max_degree_, k);
    }
    require(std::fabs(mass - 1.0) <= kMassTol,
            "degree distribution: mass = " + format_g17(mass));
    require(mean_ > 0.0, "degree distribution: mean degree must be positive");
    for (const auto& [k, p] : probs_)
        if (k >= 1 && p > 0.0) biased_[k - 1] = k * p / mean_;
}

DegreeDistribution DegreeDistribution::dirac(int d) {
    return DegreeDistribution({{d, 1.0}});
}

double DegreeDistribution::prob(int k) const {
    auto it = probs_.find(k);
    return it == probs_.end() ? 0.0 : it->second;
}

double DegreeDistribution::size_biased(int k) const {
    auto it = biased_.find(k);
    return it == biased_.end() ? 0.0 : it->second;
}

double DegreeDistribution::entropy() const {
    double h = 0.0;
    for (const auto& kv : probs_) h += xlnx(kv.second);
    return h;
}

bool DegreeDistribution::is_dirac() const {
    int support = 0;
    for (const auto& kv : probs_)
        if (kv.second > 0.0) ++support;
    return support == 1;
}

std::string DegreeDistribution::serialize() const {
    std::string out;
    for (const auto& [k, p] : probs_) {
        if (p == 0.0) continue;
        if (!out.empty()) out += ",";
        out += std::to_string(k) + ":" + format_g17(p);
    }
    return out;
}

DegreeDistribution DegreeDistribution::parse(const std::string& s) {
    std::map<int, double> probs;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t comma = s.find(',', pos);
        std::string tok = s.substr(pos, comma == std::string::npos ? std::string::npos
                                                                   : comma - pos);
        size_t colon = tok.find(':');
        require(colon != std::string::npos, "degree distribution: expected k:prob, got " + tok);
        probs[std::stoi(tok.substr(0, colon))] = std::stod(tok.substr(colon + 1));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return DegreeDistribution(std::move(probs));
}

}  // namespace treent
