#pragma once

// Shared random-instance generators for the test suites. Everything is
// seeded explicitly so failures reproduce.

#include <utility>
#include <vector>

#include "cqw/common.hpp"
#include "cqw/netgraph.hpp"

namespace cqw::test {

/// Uniform random spanning tree (random parent attachment), random phases.
inline PhasedGraph random_tree(int n_sites, Rng& rng, double max_coupling = 2.0) {
    PhasedGraph g(n_sites);
    for (int v = 1; v < n_sites; ++v) {
        const int parent = static_cast<int>(rng.integer(static_cast<std::uint64_t>(v)));
        g.add_edge(parent, v, 0.2 + rng.uniform() * (max_coupling - 0.2),
                   rng.uniform(-pi, pi));
    }
    return g;
}

/// Connected graph: random tree plus `extra_edges` random chords.
inline PhasedGraph random_connected_graph(int n_sites, int extra_edges, Rng& rng) {
    PhasedGraph g = random_tree(n_sites, rng);
    int added = 0, tries = 0;
    while (added < extra_edges && tries < 100 * (extra_edges + 1)) {
        ++tries;
        const int a = static_cast<int>(rng.integer(static_cast<std::uint64_t>(n_sites)));
        const int b = static_cast<int>(rng.integer(static_cast<std::uint64_t>(n_sites)));
        if (a == b || g.has_edge(a, b)) continue;
        g.add_edge(a, b, 0.2 + rng.uniform() * 1.8, rng.uniform(-pi, pi));
        ++added;
    }
    return g;
}

/// Random bipartite connected graph with arbitrary phases: sites split into
/// two shells, edges only across the split (tree first, then chords).
inline PhasedGraph random_bipartite_graph(int n_sites, int extra_edges, Rng& rng) {
    PhasedGraph g(n_sites);
    std::vector<int> side(static_cast<std::size_t>(n_sites));
    for (int v = 0; v < n_sites; ++v) side[static_cast<std::size_t>(v)] = v % 2;
    for (int v = 1; v < n_sites; ++v) {
        // attach to a random earlier vertex on the other side
        for (int tries = 0;; ++tries) {
            const int u = static_cast<int>(rng.integer(static_cast<std::uint64_t>(v)));
            if (side[static_cast<std::size_t>(u)] != side[static_cast<std::size_t>(v)]) {
                g.add_edge(u, v, 0.2 + rng.uniform() * 1.8, rng.uniform(-pi, pi));
                break;
            }
            if (tries > 200) {  // only opposite-side vertex is v-1
                g.add_edge(v - 1, v, 1.0, rng.uniform(-pi, pi));
                break;
            }
        }
    }
    int added = 0, tries = 0;
    while (added < extra_edges && tries < 100 * (extra_edges + 1)) {
        ++tries;
        const int a = static_cast<int>(rng.integer(static_cast<std::uint64_t>(n_sites)));
        const int b = static_cast<int>(rng.integer(static_cast<std::uint64_t>(n_sites)));
        if (a == b || g.has_edge(a, b) ||
            side[static_cast<std::size_t>(a)] == side[static_cast<std::size_t>(b)])
            continue;
        g.add_edge(a, b, 0.2 + rng.uniform() * 1.8, rng.uniform(-pi, pi));
        ++added;
    }
    return g;
}

inline GaugeTransform random_gauge(int n_sites, Rng& rng) {
    GaugeTransform u;
    for (int i = 0; i < n_sites; ++i) u.alphas.push_back(rng.uniform(-pi, pi));
    return u;
}

}  // namespace cqw::test
