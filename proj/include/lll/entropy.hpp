#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "lll/analysis.hpp"
#include "lll/error.hpp"
#include "lll/events.hpp"
#include "lll/space.hpp"

namespace lll {

inline constexpr double kRhoInfinity = std::numeric_limits<double>::infinity();

/// Renyi entropy of order rho > 1 (or infinity), in nats.
inline double renyi(std::span<const double> dist, double rho) {
    require(rho > 1.0, ErrorKind::InvalidArgument, "rho must exceed 1");
    require(!dist.empty(), ErrorKind::InvalidArgument, "empty distribution");
    double sum = 0.0, top = 0.0;
    for (double p : dist) {
        require(p >= 0.0 && std::isfinite(p), ErrorKind::InvalidArgument, "bad probability");
        sum += p;
        top = std::max(top, p);
    }
    require(std::abs(sum - 1.0) <= 1e-9, ErrorKind::InvalidArgument, "probabilities do not sum to 1");
    if (std::isinf(rho)) return -std::log(top);
    double s = 0.0;
    for (double p : dist)
        if (p > 0.0) s += std::pow(p, rho);
    return std::log(s) / (1.0 - rho);
}

/// Entropy is additive over independent coordinates.
inline double renyi(const ProductSpace& space, double rho) {
    double h = 0.0;
    for (std::size_t v = 0; v < space.size(); ++v) h += renyi(std::span<const double>(space.probs(v)), rho);
    return h;
}

struct DistortionBounds {
    double exact = std::numeric_limits<double>::quiet_NaN();
    bool has_exact = false;
    double crude = 0.0;
    double variable_based = std::numeric_limits<double>::quiet_NaN();  // NaN under a custom relation

    double best() const {
        double b = crude;
        if (has_exact) b = std::min(b, exact);
        if (!std::isnan(variable_based)) b = std::min(b, variable_based);
        return b;
    }
};

/// ln of the independence polynomial of the whole family at mu, together with
/// the sum-of-weights bound and the per-variable product bound.
inline DistortionBounds distortion_bounds(const BadEventFamily& family, const std::vector<double>& mu,
                                          std::size_t num_vars, std::size_t exact_limit = kDefaultExactLimit) {
    require(mu.size() == family.size(), ErrorKind::InvalidArgument, "mu vector has wrong length");
    DistortionBounds db;
    for (double m : mu) {
        require(m >= 0.0, ErrorKind::InvalidArgument, "mu must be nonnegative");
        db.crude += m;
    }
    DependencyGraph g(family, num_vars);
    if (family.size() <= std::min<std::size_t>(exact_limit, 64)) {
        std::vector<std::size_t> all(family.size());
        std::iota(all.begin(), all.end(), 0);
        db.exact = std::log(independent_subset_sum(all, mu, g, exact_limit).value);
        db.has_exact = true;
    }
    if (!family.has_custom_relation()) {
        std::vector<double> per_var(num_vars, 0.0);
        for (std::size_t b = 0; b < family.size(); ++b) {
            const double y = std::pow(1.0 + mu[b], 1.0 / static_cast<double>(family[b].scope.size())) - 1.0;
            for (auto v : family[b].scope) per_var[v] += y;
        }
        db.variable_based = 0.0;
        for (double s : per_var) db.variable_based += std::log1p(s);
    }
    return db;
}

struct EntropyBound {
    double rho = 0.0;
    double base_entropy = 0.0;
    double distortion = 0.0;
    std::string distortion_source;
    DistortionBounds distortions;
    double bound = 0.0;
    double log_count = 0.0;
    double count_bound = 0.0;  // exp(bound): guaranteed number of good configurations
};

inline double rho_factor(double rho) { return std::isinf(rho) ? 1.0 : rho / (rho - 1.0); }

inline EntropyBound mt_entropy_bound(const ProductSpace& space, const BadEventFamily& family,
                                     const std::vector<double>& mu, double rho,
                                     std::size_t exact_limit = kDefaultExactLimit) {
    DependencyGraph g(family, space.size());
    const auto crit = check_pegden(family, g, mu, exact_limit);
    require(crit.satisfied, ErrorKind::CriterionViolated,
            "weights fail the criterion at event " + std::to_string(crit.worst_event));
    EntropyBound eb;
    eb.rho = rho;
    eb.base_entropy = renyi(space, rho);
    eb.distortions = distortion_bounds(family, mu, space.size(), exact_limit);
    eb.distortion = eb.distortions.best();
    if (eb.distortions.has_exact && eb.distortion == eb.distortions.exact)
        eb.distortion_source = "exact";
    else if (eb.distortion == eb.distortions.variable_based)
        eb.distortion_source = "variable";
    else
        eb.distortion_source = "crude";
    eb.bound = eb.base_entropy - rho_factor(rho) * eb.distortion;
    eb.log_count = eb.bound;
    eb.count_bound = std::exp(eb.bound);
    return eb;
}

/// Weight that makes the criterion hold for independent transversals with
/// blocks of size b in a graph of maximum degree delta (b >= 4 delta).
inline double transversal_mu(double b, double delta) {
    require(delta > 0.0 && b >= 4.0 * delta, ErrorKind::InvalidArgument, "need b >= 4 delta > 0");
    const double s = b - std::sqrt(b * b - 4.0 * b * delta);
    return s * s / (4.0 * b * b * delta * delta);
}

/// Min-entropy lower bound k ln(4b / (2 + x - sqrt(x^2 - 4x))), x = b/delta.
inline double transversal_min_entropy(double k, double b, double delta) {
    require(delta > 0.0 && b >= 4.0 * delta, ErrorKind::InvalidArgument, "need b >= 4 delta > 0");
    const double x = b / delta;
    return k * std::log(4.0 * b / (2.0 + x - std::sqrt(std::max(0.0, x * x - 4.0 * x))));
}

struct KsatEntropy {
    double beta = 0.0;
    double rho = 0.0;
    double per_var = 0.0;     // ln 2 - beta (4 + 4 sqrt(beta) + beta) / k^2
    double entropy = 0.0;     // n * per_var
    double satisfied = 0.0;   // m (1 - 2^-k e ln(alpha)/alpha) - 1
};

/// Entropy of the biased k-SAT output when every variable meets at most
/// L <= alpha 2^(k+1)/(e k) - 2/k clauses.
inline KsatEntropy ksat_entropy(double n, double m, double k, double alpha) {
    require(alpha >= 1.0 && alpha <= std::numbers::e * (1 + 1e-15), ErrorKind::InvalidArgument,
            "alpha must lie in [1, e]");
    require(k >= 1.0 && n >= 0.0 && m >= 0.0, ErrorKind::InvalidArgument, "bad sizes");
    KsatEntropy ke;
    ke.beta = std::max(0.0, 1.0 - std::log(alpha));
    ke.rho = ke.beta > 0.0 ? 1.0 + 2.0 / std::sqrt(ke.beta) : kRhoInfinity;
    ke.per_var = std::log(2.0) - ke.beta * (4.0 + 4.0 * std::sqrt(ke.beta) + ke.beta) / (k * k);
    ke.entropy = n * ke.per_var;
    ke.satisfied = m * (1.0 - std::ldexp(1.0, -static_cast<int>(k)) * std::numbers::e * std::log(alpha) / alpha) - 1.0;
    return ke;
}

}  // namespace lll
