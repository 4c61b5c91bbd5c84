// Copyright 2026 The chiralwalk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <optional>
#include <queue>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cqw/common.hpp"

namespace cqw {

/// One undirected edge. Canonical orientation n < m; the stored phase is the
/// phase picked up traversing n -> m, traversing m -> n uses -phase.
struct Edge {
    int n = 0;
    int m = 0;
    double coupling = 1.0;  // magnitude, >= 0
    double phase = 0.0;     // radians, kept in (-pi, pi]
};

/// Undirected weighted graph with a complex hopping phase per edge.
/// Values are immutable once built up; treat instances as values and copy
/// before modifying phases.
class PhasedGraph {
public:
    explicit PhasedGraph(int n_sites) : n_sites_(n_sites) {
        if (n_sites <= 0) throw std::invalid_argument("PhasedGraph: site count must be positive");
    }

    int site_count() const { return n_sites_; }
    const std::vector<Edge>& edges() const { return edges_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }

    /// Add edge {a, b}. Orientation is canonicalized: if a > b the phase sign
    /// is flipped so the stored value refers to min(a,b) -> max(a,b).
    void add_edge(int a, int b, double coupling, double phase = 0.0) {
        check_site(a);
        check_site(b);
        if (a == b) throw std::invalid_argument("PhasedGraph: self-loops are not allowed");
        if (coupling < 0.0) throw std::invalid_argument("PhasedGraph: coupling must be >= 0");
        if (a > b) {
            std::swap(a, b);
            phase = -phase;
        }
        if (index_.count(key(a, b)) != 0)
            throw std::invalid_argument("PhasedGraph: duplicate edge");
        index_[key(a, b)] = static_cast<int>(edges_.size());
        edges_.push_back(Edge{a, b, coupling, wrap_phase(phase)});
    }

    bool has_edge(int a, int b) const {
        if (a > b) std::swap(a, b);
        return index_.count(key(a, b)) != 0;
    }

    /// Index into edges() for the unordered pair {a, b}, if present.
    std::optional<int> edge_index(int a, int b) const {
        if (a > b) std::swap(a, b);
        auto it = index_.find(key(a, b));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    /// Phase picked up when hopping from site `from` to site `to`.
    double phase_between(int from, int to) const {
        auto idx = edge_index(from, to);
        if (!idx) throw std::invalid_argument("PhasedGraph: no such edge");
        const Edge& e = edges_[*idx];
        return from == e.n ? e.phase : -e.phase;
    }

    /// Overwrite the canonical phase of edge `index` (wrapped to (-pi, pi]).
    void set_edge_phase(int index, double phase) {
        edges_.at(static_cast<std::size_t>(index)).phase = wrap_phase(phase);
    }

    /// Multiply the edge's complex coupling by e^{i*delta} (canonical
    /// orientation); magnitudes are untouched.
    void shift_edge_phase(int index, double delta) {
        Edge& e = edges_.at(static_cast<std::size_t>(index));
        e.phase = wrap_phase(e.phase + delta);
    }

    std::vector<std::vector<int>> adjacency() const {
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(n_sites_));
        for (const Edge& e : edges_) {
            adj[static_cast<std::size_t>(e.n)].push_back(e.m);
            adj[static_cast<std::size_t>(e.m)].push_back(e.n);
        }
        for (auto& nb : adj) std::sort(nb.begin(), nb.end());
        return adj;
    }

    bool is_connected() const {
        if (n_sites_ == 1) return true;
        auto adj = adjacency();
        std::vector<char> seen(static_cast<std::size_t>(n_sites_), 0);
        std::queue<int> q;
        q.push(0);
        seen[0] = 1;
        int count = 1;
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : adj[static_cast<std::size_t>(u)]) {
                if (!seen[static_cast<std::size_t>(v)]) {
                    seen[static_cast<std::size_t>(v)] = 1;
                    ++count;
                    q.push(v);
                }
            }
        }
        return count == n_sites_;
    }

private:
    static std::uint64_t key(int a, int b) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
               static_cast<std::uint32_t>(b);
    }
    void check_site(int s) const {
        if (s < 0 || s >= n_sites_) throw std::invalid_argument("PhasedGraph: site index out of range");
    }

    int n_sites_;
    std::vector<Edge> edges_;
    std::unordered_map<std::uint64_t, int> index_;
};

/// Per-site gauge angles alpha_n. Acting on a graph shifts the canonical
/// phase of edge (n, m), n < m, by alpha_m - alpha_n; site-basis transfer
/// probabilities are invariant under any such transform.
struct GaugeTransform {
    std::vector<double> alphas;

    GaugeTransform inverse() const {
        GaugeTransform inv{alphas};
        for (double& a : inv.alphas) a = -a;
        return inv;
    }
};

inline PhasedGraph apply_gauge(const PhasedGraph& g, const GaugeTransform& u) {
    if (static_cast<int>(u.alphas.size()) != g.site_count())
        throw dimension_error("apply_gauge: gauge size does not match graph site count");
    PhasedGraph out(g.site_count());
    for (const Edge& e : g.edges()) {
        const double shifted = e.phase + u.alphas[static_cast<std::size_t>(e.m)] -
                               u.alphas[static_cast<std::size_t>(e.n)];
        out.add_edge(e.n, e.m, e.coupling, shifted);
    }
    return out;
}

namespace detail {

/// BFS spanning forest. Roots are the lowest-index site of each component;
/// neighbors are visited in ascending order, so the forest is deterministic.
struct SpanningForest {
    std::vector<int> parent;       // -1 at roots
    std::vector<int> parent_edge;  // edge index to parent, -1 at roots
    std::vector<int> bfs_order;
    std::vector<char> in_tree;     // per edge index
};

inline SpanningForest bfs_spanning_forest(const PhasedGraph& g) {
    const int n = g.site_count();
    SpanningForest f;
    f.parent.assign(static_cast<std::size_t>(n), -1);
    f.parent_edge.assign(static_cast<std::size_t>(n), -1);
    f.in_tree.assign(static_cast<std::size_t>(g.edge_count()), 0);
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    auto adj = g.adjacency();
    for (int root = 0; root < n; ++root) {
        if (seen[static_cast<std::size_t>(root)]) continue;
        seen[static_cast<std::size_t>(root)] = 1;
        std::queue<int> q;
        q.push(root);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            f.bfs_order.push_back(u);
            for (int v : adj[static_cast<std::size_t>(u)]) {
                if (seen[static_cast<std::size_t>(v)]) continue;
                seen[static_cast<std::size_t>(v)] = 1;
                f.parent[static_cast<std::size_t>(v)] = u;
                int ei = *g.edge_index(u, v);
                f.parent_edge[static_cast<std::size_t>(v)] = ei;
                f.in_tree[static_cast<std::size_t>(ei)] = 1;
                q.push(v);
            }
        }
    }
    return f;
}

}  // namespace detail

/// Gauge away every spanning-tree phase. The returned graph is gauge
/// equivalent to the input with zero phase on all tree edges; the remaining
/// non-tree phases are the fundamental-cycle loop sums. The transform that
/// maps the input onto the result is returned alongside.
inline std::pair<PhasedGraph, GaugeTransform> eliminate_tree_phases(const PhasedGraph& g) {
    auto forest = detail::bfs_spanning_forest(g);
    GaugeTransform u;
    u.alphas.assign(static_cast<std::size_t>(g.site_count()), 0.0);
    // Child phase after gauging: theta + alpha_m - alpha_n == 0 on tree edges.
    for (int v : forest.bfs_order) {
        const int p = forest.parent[static_cast<std::size_t>(v)];
        if (p < 0) continue;
        const Edge& e = g.edges()[static_cast<std::size_t>(forest.parent_edge[static_cast<std::size_t>(v)])];
        const double ap = u.alphas[static_cast<std::size_t>(p)];
        if (e.n == p)  // v == e.m: theta + alpha_v - alpha_p = 0
            u.alphas[static_cast<std::size_t>(v)] = ap - e.phase;
        else  // v == e.n: theta + alpha_p - alpha_v = 0
            u.alphas[static_cast<std::size_t>(v)] = ap + e.phase;
    }
    PhasedGraph out = apply_gauge(g, u);
    // Snap the (analytically exact) zeros so downstream comparisons are clean.
    for (int i = 0; i < out.edge_count(); ++i) {
        if (forest.in_tree[static_cast<std::size_t>(i)] &&
            std::abs(out.edges()[static_cast<std::size_t>(i)].phase) < 1e-12)
            out.set_edge_phase(i, 0.0);
    }
    return {std::move(out), std::move(u)};
}

/// Fundamental cycle basis of a graph plus per-cycle phase sums.
struct LoopBasis {
    /// Each cycle is a closed vertex walk: first vertex repeated at the end.
    std::vector<std::vector<int>> cycles;
    /// Oriented phase sum along each cycle, reduced to (-pi, pi].
    std::vector<double> sums;

    std::size_t size() const { return cycles.size(); }
};

/// Fundamental cycles induced by the BFS spanning forest: one per non-tree
/// edge. Per-cycle sums are invariant (mod 2pi) under apply_gauge.
inline LoopBasis loop_sums(const PhasedGraph& g) {
    auto forest = detail::bfs_spanning_forest(g);
    // Depths for path walking.
    std::vector<int> depth(static_cast<std::size_t>(g.site_count()), 0);
    for (int v : forest.bfs_order) {
        int p = forest.parent[static_cast<std::size_t>(v)];
        depth[static_cast<std::size_t>(v)] = p < 0 ? 0 : depth[static_cast<std::size_t>(p)] + 1;
    }
    LoopBasis basis;
    for (int ei = 0; ei < g.edge_count(); ++ei) {
        if (forest.in_tree[static_cast<std::size_t>(ei)]) continue;
        const Edge& e = g.edges()[static_cast<std::size_t>(ei)];
        // Tree paths from both endpoints up to their lowest common ancestor.
        std::vector<int> up_from_m, up_from_n;
        int a = e.m, b = e.n;
        while (depth[static_cast<std::size_t>(a)] > depth[static_cast<std::size_t>(b)]) {
            up_from_m.push_back(a);
            a = forest.parent[static_cast<std::size_t>(a)];
        }
        while (depth[static_cast<std::size_t>(b)] > depth[static_cast<std::size_t>(a)]) {
            up_from_n.push_back(b);
            b = forest.parent[static_cast<std::size_t>(b)];
        }
        while (a != b) {
            up_from_m.push_back(a);
            up_from_n.push_back(b);
            a = forest.parent[static_cast<std::size_t>(a)];
            b = forest.parent[static_cast<std::size_t>(b)];
        }
        // Oriented cycle: n -> m over the chord, m -> lca -> n over the tree.
        std::vector<int> cycle;
        cycle.push_back(e.n);
        for (int v : up_from_m) cycle.push_back(v);  // starts at m (may be empty if m is the lca)
        cycle.push_back(a);                          // lca
        for (std::size_t i = up_from_n.size(); i-- > 0;) cycle.push_back(up_from_n[i]);  // ends at n
        if (cycle.back() != e.n) cycle.push_back(e.n);
        double sum = 0.0;
        for (std::size_t i = 0; i + 1 < cycle.size(); ++i)
            sum += g.phase_between(cycle[i], cycle[i + 1]);
        basis.cycles.push_back(std::move(cycle));
        basis.sums.push_back(wrap_phase(sum));
    }
    return basis;
}

/// Two-coloring if the graph is bipartite, std::nullopt otherwise.
inline std::optional<std::vector<int>> is_bipartite(const PhasedGraph& g) {
    const int n = g.site_count();
    std::vector<int> color(static_cast<std::size_t>(n), -1);
    auto adj = g.adjacency();
    for (int root = 0; root < n; ++root) {
        if (color[static_cast<std::size_t>(root)] != -1) continue;
        color[static_cast<std::size_t>(root)] = 0;
        std::queue<int> q;
        q.push(root);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : adj[static_cast<std::size_t>(u)]) {
                if (color[static_cast<std::size_t>(v)] == -1) {
                    color[static_cast<std::size_t>(v)] = 1 - color[static_cast<std::size_t>(u)];
                    q.push(v);
                } else if (color[static_cast<std::size_t>(v)] == color[static_cast<std::size_t>(u)]) {
                    return std::nullopt;
                }
            }
        }
    }
    return color;
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// N-cycle with uniform coupling and a uniform per-edge phase phi, oriented
/// along 0 -> 1 -> ... -> N-1 -> 0 (loop sum N*phi).
inline PhasedGraph generate_cycle(int n_sites, double coupling, double phase_per_edge) {
    if (n_sites < 3) throw std::invalid_argument("generate_cycle: need at least 3 sites");
    PhasedGraph g(n_sites);
    for (int i = 0; i < n_sites; ++i) {
        // add_edge canonicalizes; passing (i, i+1) keeps the ring orientation.
        g.add_edge(i, (i + 1) % n_sites, coupling, phase_per_edge);
    }
    return g;
}

/// Chain of corner-sharing triangles on 2n+1 sites. Triangle t spans sites
/// (2t, 2t+1, 2t+2); the rising edge (2t, 2t+1) is the control edge and
/// carries theta, so every triangle's loop sum (spine orientation) is theta.
/// Start designates site 0, end site 2n.
struct TriangleChain {
    PhasedGraph graph;
    int start = 0;
    int end = 0;
    std::vector<int> control_edges;
};

inline TriangleChain generate_triangle_chain(int n_triangles, double theta_control) {
    if (n_triangles < 1) throw std::invalid_argument("generate_triangle_chain: need at least one triangle");
    PhasedGraph g(2 * n_triangles + 1);
    std::vector<int> control;
    for (int t = 0; t < n_triangles; ++t) {
        const int a = 2 * t, b = 2 * t + 1, c = 2 * t + 2;
        control.push_back(g.edge_count());
        g.add_edge(a, b, 1.0, theta_control);
        g.add_edge(b, c, 1.0, 0.0);
        g.add_edge(a, c, 1.0, 0.0);
    }
    return TriangleChain{std::move(g), 0, 2 * n_triangles, std::move(control)};
}

/// Connected Watts-Strogatz graph: ring of N sites, each tied to its k
/// nearest neighbours, then every clockwise edge rewired (far endpoint
/// resampled) with probability p. Whole graphs are resampled until
/// connected. Unit couplings, zero phases, exactly N*k/2 edges.
inline PhasedGraph generate_watts_strogatz(int n_sites, int degree, double rewire_probability,
                                           std::uint64_t seed) {
    if (degree < 2 || degree % 2 != 0) throw std::invalid_argument("generate_watts_strogatz: k must be even and >= 2");
    if (n_sites <= degree) throw std::invalid_argument("generate_watts_strogatz: need N > k");
    if (rewire_probability < 0.0 || rewire_probability > 1.0)
        throw std::invalid_argument("generate_watts_strogatz: p must lie in [0, 1]");
    Rng rng(seed);
    auto key = [](int a, int b) {
        if (a > b) std::swap(a, b);
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
               static_cast<std::uint32_t>(b);
    };
    const int max_graph_attempts = 10000;
    for (int attempt = 0; attempt < max_graph_attempts; ++attempt) {
        // Full ring lattice first, then in-place rewiring of each clockwise
        // edge (near endpoint kept, far endpoint resampled).
        std::unordered_map<std::uint64_t, std::pair<int, int>> edges;
        for (int lane = 1; lane <= degree / 2; ++lane)
            for (int i = 0; i < n_sites; ++i) {
                int far = (i + lane) % n_sites;
                edges.emplace(key(i, far), std::make_pair(i, far));
            }
        for (int lane = 1; lane <= degree / 2; ++lane) {
            for (int i = 0; i < n_sites; ++i) {
                const int far = (i + lane) % n_sites;
                if (rng.uniform() >= rewire_probability) continue;
                if (edges.count(key(i, far)) == 0) continue;  // already rewired away
                for (int tries = 0; tries < 8 * n_sites; ++tries) {
                    int c = static_cast<int>(rng.integer(static_cast<std::uint64_t>(n_sites)));
                    if (c != i && edges.count(key(i, c)) == 0) {
                        edges.erase(key(i, far));
                        edges.emplace(key(i, c), std::make_pair(i, c));
                        break;
                    }
                }
            }
        }
        PhasedGraph g(n_sites);
        std::vector<std::pair<int, int>> sorted_edges;
        sorted_edges.reserve(edges.size());
        for (const auto& [k, e] : edges) sorted_edges.push_back(e);
        std::sort(sorted_edges.begin(), sorted_edges.end(),
                  [](auto& a, auto& b) { return std::minmax(a.first, a.second) < std::minmax(b.first, b.second); });
        for (const auto& [a, b] : sorted_edges) g.add_edge(a, b, 1.0, 0.0);
        if (g.is_connected()) return g;
    }
    throw numerical_error("generate_watts_strogatz: no connected graph found");
}

/// Barabasi-Albert preferential attachment, seeded from a complete graph on
/// m sites. Unit couplings, zero phases.
inline PhasedGraph generate_barabasi_albert(int n_sites, int attach_count, std::uint64_t seed) {
    if (attach_count < 1) throw std::invalid_argument("generate_barabasi_albert: m must be >= 1");
    if (n_sites <= attach_count) throw std::invalid_argument("generate_barabasi_albert: need N > m");
    Rng rng(seed);
    PhasedGraph g(n_sites);
    std::vector<int> bag;  // one entry per edge endpoint
    for (int a = 0; a < attach_count; ++a)
        for (int b = a + 1; b < attach_count; ++b) {
            g.add_edge(a, b, 1.0, 0.0);
            bag.push_back(a);
            bag.push_back(b);
        }
    if (attach_count == 1) bag.push_back(0);  // lone seed vertex, uniform pick
    for (int v = attach_count; v < n_sites; ++v) {
        std::vector<int> chosen;
        while (static_cast<int>(chosen.size()) < attach_count) {
            int t = bag[static_cast<std::size_t>(rng.integer(bag.size()))];
            if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) chosen.push_back(t);
        }
        for (int t : chosen) {
            g.add_edge(v, t, 1.0, 0.0);
            bag.push_back(v);
            bag.push_back(t);
        }
    }
    return g;
}

}  // namespace cqw
