#pragma once

// Independent brute-force oracles used only by the test suite. These deliberately
// avoid the library's reachability / Meek-closure code paths: d-separation is
// decided by enumerating simple paths, and compelled edges by walking the whole
// Markov equivalence class via covered-edge reversals.

#include <map>
#include <random>
#include <set>
#include <vector>

#include "causal/graph.hpp"

namespace testoracles {

using causal::Dag;
using causal::NodeSet;
using causal::Pdag;

// d-separation by exhaustive enumeration of simple paths in the skeleton.
inline bool d_separated_by_paths(const Dag &dag, int x, int y, const NodeSet &z) {
    const int n = dag.node_count();
    std::vector<NodeSet> desc(static_cast<size_t>(n));
    for (int v = 0; v < n; ++v) desc[static_cast<size_t>(v)] = causal::descendants(dag, v);
    auto collider_open = [&](int v) {
        if (causal::set_contains(z, v)) return true;
        for (int d : desc[static_cast<size_t>(v)])
            if (causal::set_contains(z, d)) return true;
        return false;
    };

    std::vector<int> path{x};
    std::vector<char> on_path(static_cast<size_t>(n), 0);
    on_path[static_cast<size_t>(x)] = 1;

    // Checks whether the current complete path is active given z.
    auto path_active = [&]() {
        for (size_t i = 1; i + 1 < path.size(); ++i) {
            int prev = path[i - 1], v = path[i], next = path[i + 1];
            bool into_from_prev = dag.has_edge(prev, v);
            bool into_from_next = dag.has_edge(next, v);
            bool is_collider = into_from_prev && into_from_next;
            if (is_collider) {
                if (!collider_open(v)) return false;
            } else {
                if (causal::set_contains(z, v)) return false;
            }
        }
        return true;
    };

    bool connected = false;
    auto dfs = [&](auto &&self, int v) -> void {
        if (connected) return;
        if (v == y) {
            if (path_active()) connected = true;
            return;
        }
        for (int u = 0; u < n; ++u) {
            if (on_path[static_cast<size_t>(u)] || !dag.adjacent(v, u)) continue;
            path.push_back(u);
            on_path[static_cast<size_t>(u)] = 1;
            self(self, u);
            path.pop_back();
            on_path[static_cast<size_t>(u)] = 0;
        }
    };
    dfs(dfs, x);
    return !connected;
}

// All DAGs in the Markov equivalence class of `dag`, found by breadth-first
// search over covered-edge reversals (an edge x->y is covered when
// parents(y) \ {x} == parents(x)).
inline std::vector<std::vector<std::pair<int, int>>> equivalence_class(const Dag &dag) {
    using EdgeList = std::vector<std::pair<int, int>>;
    std::set<EdgeList> seen;
    std::vector<EdgeList> queue{dag.edges()};
    seen.insert(queue[0]);
    auto names = dag.names();
    for (size_t head = 0; head < queue.size(); ++head) {
        EdgeList current = queue[head];
        Dag g(names);
        for (auto [p, c] : current) g.add_edge(p, c);
        for (auto [p, c] : current) {
            NodeSet pa_c = g.parents(c);
            causal::set_erase(pa_c, p);
            if (pa_c != g.parents(p)) continue; // not covered
            EdgeList flipped;
            for (auto e : current) flipped.push_back(e == std::make_pair(p, c) ? std::make_pair(c, p) : e);
            std::sort(flipped.begin(), flipped.end());
            if (seen.insert(flipped).second) queue.push_back(flipped);
        }
    }
    return queue;
}

// CPDAG computed from the equivalence class itself: a pair is undirected exactly
// when both orientations occur among class members.
inline Pdag cpdag_by_class_enumeration(const Dag &dag) {
    auto members = equivalence_class(dag);
    std::map<std::pair<int, int>, std::pair<bool, bool>> orientations; // (min,max) -> (saw min->max, saw max->min)
    for (const auto &member : members)
        for (auto [p, c] : member) {
            auto key = std::minmax(p, c);
            auto &o = orientations[{key.first, key.second}];
            if (p < c) o.first = true;
            else o.second = true;
        }
    Pdag out(dag.names());
    for (const auto &[pair, o] : orientations) {
        if (o.first && o.second) out.add_undirected_edge(pair.first, pair.second);
        else if (o.first) out.add_directed_edge(pair.first, pair.second);
        else out.add_directed_edge(pair.second, pair.first);
    }
    return out;
}

inline std::vector<std::string> synthetic_names(int n) {
    std::vector<std::string> names;
    names.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) names.push_back("X" + std::to_string(i));
    return names;
}

// Enumerates every labeled DAG on n nodes (choose ->, <- or no edge per pair,
// then keep the acyclic ones). Feasible for n <= 5.
template <typename F>
void for_each_dag(int n, F &&f) {
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
    const auto names = synthetic_names(n);
    std::vector<int> choice(pairs.size(), 0);
    while (true) {
        Dag dag(names);
        for (size_t i = 0; i < pairs.size(); ++i) {
            if (choice[i] == 1) dag.add_edge(pairs[i].first, pairs[i].second);
            else if (choice[i] == 2) dag.add_edge(pairs[i].second, pairs[i].first);
        }
        if (causal::is_acyclic(dag)) f(dag);
        size_t pos = 0;
        while (pos < choice.size() && choice[pos] == 2) choice[pos++] = 0;
        if (pos == choice.size()) break;
        ++choice[pos];
    }
}

inline Dag random_dag(int n, double edge_prob, std::mt19937 &rng) {
    // Random permutation fixes an order; edges only point forward along it.
    std::vector<int> perm(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::bernoulli_distribution coin(edge_prob);
    Dag dag(synthetic_names(n));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (coin(rng)) dag.add_edge(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)]);
    return dag;
}

inline Pdag random_pdag(int n, double edge_prob, double undirected_prob, std::mt19937 &rng) {
    Dag dag = random_dag(n, edge_prob, rng);
    Pdag out(dag.names());
    std::bernoulli_distribution coin(undirected_prob);
    for (auto [p, c] : dag.edges()) {
        if (coin(rng)) out.add_undirected_edge(p, c);
        else out.add_directed_edge(p, c);
    }
    return out;
}

inline NodeSet random_subset(const NodeSet &pool, int max_size, std::mt19937 &rng) {
    NodeSet shuffled = pool;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    std::uniform_int_distribution<int> size_dist(0, std::min<int>(max_size, static_cast<int>(pool.size())));
    int k = size_dist(rng);
    NodeSet out(shuffled.begin(), shuffled.begin() + k);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace testoracles
