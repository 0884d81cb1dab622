#pragma once

#include <map>
#include <string>

namespace treent {

// Bounded-support degree distribution pi with its size-biased companion
// hat_pi(k) = (k+1) pi(k+1) / mean.
class DegreeDistribution {
public:
    explicit DegreeDistribution(std::map<int, double> probs);

    static DegreeDistribution dirac(int d);

    double prob(int k) const;
    double size_biased(int k) const;
    double mean() const { return mean_; }
    int max_degree() const { return max_degree_; }
    double entropy() const;

    bool is_dirac() const;
    const std::map<int, double>& probs() const { return probs_; }

    std::string serialize() const;                       // "k:prob,k:prob"
    static DegreeDistribution parse(const std::string&);

private:
    std::map<int, double> probs_;
    std::map<int, double> biased_;
    double mean_ = 0.0;
    int max_degree_ = 0;
};

}  // namespace treent
