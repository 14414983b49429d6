// Small tour: resampling on the reference instance, then a 2-coloring of a
// random 8-uniform hypergraph.

#include <cstdio>

#include "lll/lll.hpp"

using namespace lll;

int main() {
    auto in = reference_instance();
    DependencyGraph g(in.family, in.space.size());
    auto r = run_mt(in.space, in.family, 42);
    std::printf("%s: %zu variables, %zu bad events, %llu resamplings\n", in.name.c_str(), in.space.size(),
                in.family.size(), static_cast<unsigned long long>(r.resamplings));
    std::printf("output:");
    for (auto v : r.config) std::printf(" %d", v);
    std::printf("\n");

    const auto mu = in.family.mu();
    for (const auto& p : in.probes) {
        const double th = theta_of_scope(p.prob, p.scope, mu, g).value;
        std::printf("  P(%s) = %.4f, bound on output %.4f, holds now: %s\n", p.name.c_str(), p.prob, th,
                    p.holds(r.config) ? "yes" : "no");
    }

    auto h = random_hypergraph(1700, 2000, 8, 10, 7);
    auto c = run_hyp2col(h, 7);
    auto chk = check_hyp2col(h, c.coloring);
    std::printf("hypergraph n=%zu m=%zu: %llu resamplings, proper 2-coloring: %s\n", h.n, h.edges.size(),
                static_cast<unsigned long long>(c.resamplings), chk.pass ? "yes" : "no");
    return chk.pass ? 0 : 1;
}
