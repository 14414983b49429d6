#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "lll/error.hpp"
#include "lll/rng.hpp"

namespace lll {

struct StatSummary {
    std::string name;
    std::uint64_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double sem = 0.0;
    double ci3 = 0.0;        // 3 standard errors
    double hoeffding = 0.0;  // 99.9% two-sided half-width over [min, max] or the declared range
    double min = 0.0;
    double max = 0.0;
};

/// Two-pass mean and variance over values in the given order.
inline StatSummary summarize(std::string name, std::span<const double> v, double lo = NAN, double hi = NAN) {
    StatSummary s;
    s.name = std::move(name);
    s.n = v.size();
    if (v.empty()) return s;
    double sum = 0.0;
    s.min = s.max = v[0];
    for (double x : v) {
        sum += x;
        s.min = std::min(s.min, x);
        s.max = std::max(s.max, x);
    }
    s.mean = sum / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.variance = ss / static_cast<double>(v.size() - 1);
    }
    s.sem = std::sqrt(s.variance / static_cast<double>(v.size()));
    s.ci3 = 3.0 * s.sem;
    const double a = std::isnan(lo) ? s.min : lo;
    const double b = std::isnan(hi) ? s.max : hi;
    s.hoeffding = (b - a) * std::sqrt(std::log(2.0 / 0.001) / (2.0 * static_cast<double>(v.size())));
    return s;
}

struct TrialReport {
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::vector<StatSummary> stats;
    std::vector<std::string> violations;

    const StatSummary& operator[](const std::string& name) const {
        for (const auto& s : stats)
            if (s.name == name) return s;
        fail(ErrorKind::InvalidArgument, "no statistic named " + name);
    }
};

/// Runs `trials` independent trials; trial i draws from stream i of `seed`.
/// f(rng, i, out) writes one value per statistic into out. Values are kept
/// per trial and reduced in trial order, so the report does not depend on
/// `jobs`.
template <class F>
TrialReport mc_run(const std::vector<std::string>& names, std::uint64_t trials, std::uint64_t seed, F&& f,
                   unsigned jobs = 1) {
    require(!names.empty(), ErrorKind::InvalidArgument, "mc_run needs at least one statistic");
    const std::size_t k = names.size();
    std::vector<double> table(static_cast<std::size_t>(trials) * k, 0.0);
    auto work = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t i = begin; i < end; ++i) {
            CounterRng rng(seed, i);
            f(rng, i, std::span<double>(table.data() + i * k, k));
        }
    };
    if (jobs <= 1 || trials < 2) {
        work(0, trials);
    } else {
        jobs = static_cast<unsigned>(std::min<std::uint64_t>(jobs, trials));
        std::vector<std::thread> pool;
        std::exception_ptr first_error;
        std::mutex mu;
        const std::uint64_t chunk = (trials + jobs - 1) / jobs;
        for (unsigned j = 0; j < jobs; ++j) {
            const std::uint64_t b = j * chunk, e = std::min(trials, b + chunk);
            if (b >= e) break;
            pool.emplace_back([&, b, e] {
                try {
                    work(b, e);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!first_error) first_error = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }
    TrialReport rep;
    rep.trials = trials;
    rep.seed = seed;
    std::vector<double> col(static_cast<std::size_t>(trials));
    for (std::size_t s = 0; s < k; ++s) {
        for (std::uint64_t i = 0; i < trials; ++i) col[i] = table[i * k + s];
        rep.stats.push_back(summarize(names[s], col));
    }
    return rep;
}

/// Standard error for a frequency f checked against a claimed bound w. Using
/// the larger of the two variances keeps the check honest when f is 0.
inline double bernoulli_sigma(double f, double w, std::uint64_t n) {
    const double wv = std::clamp(w, 0.0, 1.0);
    const double v = std::max(f * (1.0 - f), wv * (1.0 - wv));
    return std::sqrt(v / static_cast<double>(n));
}

/// One-sided check of an upper-bound claim.
inline bool within_upper(double observed, double bound, double sigma, double k = 3.0) {
    return observed <= bound + k * sigma;
}

/// One-sided check of a lower-bound claim.
inline bool within_lower(double observed, double bound, double sigma, double k = 3.0) {
    return observed >= bound - k * sigma;
}

}  // namespace lll
