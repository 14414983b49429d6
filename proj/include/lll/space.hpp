#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "lll/error.hpp"
#include "lll/rng.hpp"

namespace lll {

/// Values are stored as indices into each variable's domain.
using Configuration = std::vector<int>;

/// Product distribution over n independent finite variables.
class ProductSpace {
public:
    ProductSpace() = default;

    explicit ProductSpace(std::vector<std::vector<double>> probs) : probs_(std::move(probs)) {
        point_mass_.assign(probs_.size(), -1);
        for (std::size_t i = 0; i < probs_.size(); ++i) {
            const auto& p = probs_[i];
            require(!p.empty(), ErrorKind::InvalidArgument, "variable " + std::to_string(i) + " has an empty domain");
            double sum = 0.0;
            for (std::size_t j = 0; j < p.size(); ++j) {
                require(p[j] >= 0.0 && std::isfinite(p[j]), ErrorKind::InvalidArgument,
                        "variable " + std::to_string(i) + " has a negative or non-finite probability");
                sum += p[j];
                if (p[j] == 1.0) point_mass_[i] = static_cast<int>(j);
            }
            require(std::abs(sum - 1.0) <= 1e-9, ErrorKind::InvalidArgument,
                    "probabilities of variable " + std::to_string(i) + " sum to " + std::to_string(sum));
        }
    }

    static ProductSpace uniform(std::size_t n, std::size_t domain) {
        return ProductSpace(std::vector<std::vector<double>>(n, std::vector<double>(domain, 1.0 / static_cast<double>(domain))));
    }

    static ProductSpace bernoulli(const std::vector<double>& p_one) {
        std::vector<std::vector<double>> probs;
        probs.reserve(p_one.size());
        for (double p : p_one) probs.push_back({1.0 - p, p});
        return ProductSpace(std::move(probs));
    }

    std::size_t size() const { return probs_.size(); }
    std::size_t domain_size(std::size_t var) const { return probs_[var].size(); }
    const std::vector<double>& probs(std::size_t var) const { return probs_[var]; }
    double prob(std::size_t var, int value) const { return probs_[var][static_cast<std::size_t>(value)]; }

    /// Inverse-CDF draw. Point masses return without touching the generator.
    int sample(std::size_t var, CounterRng& rng) const {
        if (point_mass_[var] >= 0) return point_mass_[var];
        const auto& p = probs_[var];
        const double u = rng.uniform();
        double acc = 0.0;
        for (std::size_t j = 0; j + 1 < p.size(); ++j) {
            acc += p[j];
            if (u < acc) return static_cast<int>(j);
        }
        // Skip trailing zero-mass values so rounding never lands on them.
        std::size_t last = p.size() - 1;
        while (last > 0 && p[last] == 0.0) --last;
        return static_cast<int>(last);
    }

    /// Appends a variable and returns its index.
    std::size_t add_variable(std::vector<double> probs) {
        ProductSpace single(std::vector<std::vector<double>>{probs});
        probs_.push_back(std::move(probs));
        point_mass_.push_back(single.point_mass_[0]);
        return probs_.size() - 1;
    }

private:
    std::vector<std::vector<double>> probs_;
    std::vector<int> point_mass_;
};

/// Draws every variable independently, in index order.
inline Configuration sample_initial(const ProductSpace& space, CounterRng& rng) {
    Configuration x(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) x[i] = space.sample(i, rng);
    return x;
}

inline Configuration sample_initial(const ProductSpace& space, std::uint64_t seed, std::uint64_t stream = 0) {
    CounterRng rng(seed, stream);
    return sample_initial(space, rng);
}

}  // namespace lll
