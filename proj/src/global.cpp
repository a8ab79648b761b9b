#include "causal/global.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mb_engine.hpp"

namespace causal {

namespace {

using detail::MbEngine;

// Score improvements below this threshold do not count: equivalent moves can
// differ by rounding noise, and accepting them would add spurious steps.
constexpr double kScoreEps = 1e-9;

// Subset enumerations over undirected neighborhoods are exponential; abort
// rather than hang when a neighborhood is implausibly dense.
constexpr int kMaxSubsetPool = 20;

// --- registry ----------------------------------------------------------------

struct GlobalEntry {
    GlobalAlgorithm algorithm;
    const char* name;
    bool score_based;
};

constexpr GlobalEntry kRegistry[] = {
    {GlobalAlgorithm::Pc, "PC", false},
    {GlobalAlgorithm::PcStable, "PC-stable", false},
    {GlobalAlgorithm::Ges, "GES", true},
    {GlobalAlgorithm::Gsbn, "GSBN", false},
    {GlobalAlgorithm::Mmhc, "MMHC", true},
    {GlobalAlgorithm::F2slC, "F2SL-c", false},
    {GlobalAlgorithm::F2slS, "F2SL-s", true},
};

std::string fold_name(const std::string& name) {
    std::string out;
    for (char c : name) {
        if (c == '-' || c == '_') continue;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

const GlobalEntry& entry_of(GlobalAlgorithm a) {
    for (const auto& e : kRegistry)
        if (e.algorithm == a) return e;
    throw Error(ErrorKind::UnknownAlgorithm, "unknown global algorithm id");
}

std::pair<int, int> pair_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

std::vector<std::string> resolve_names(int n, const std::vector<std::string>& given,
                                       const char* who) {
    if (given.empty()) {
        std::vector<std::string> out;
        out.reserve(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) out.push_back("v" + std::to_string(i));
        return out;
    }
    if (static_cast<int>(given.size()) != n)
        throw Error(ErrorKind::Mismatch, std::string(who) + ": " + std::to_string(given.size()) +
                                             " names for " + std::to_string(n) + " variables");
    return given;
}

double now_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Distinct tests performed; cached answers are lookups, not work.
std::int64_t ci_count(const CiSource& ci) {
    return ci.counter().total_tests;
}

// --- blanket-based skeletons ---------------------------------------------------
//
// GSBN and F2SL differ only in the feature-selection subroutine: both keep an
// edge when each endpoint selected the other and no conditioning set drawn
// from the smaller of the two selected sets separates the pair. Every removal
// leaves a recorded separating set behind for the orientation stage.

template <typename BlanketOf>
Pdag blanket_skeleton(MbEngine& e, const std::vector<std::string>& names, BlanketOf&& blanket_of) {
    const int n = e.n_vars();
    std::vector<NodeSet> sel(static_cast<size_t>(n));
    for (int v = 0; v < n; ++v) sel[static_cast<size_t>(v)] = blanket_of(v);

    Pdag skel(names);
    for (int x = 0; x < n; ++x) {
        for (int y : sel[static_cast<size_t>(x)]) {
            if (y <= x) continue;
            if (!set_contains(sel[static_cast<size_t>(y)], x)) continue;
            const NodeSet& sx = sel[static_cast<size_t>(x)];
            const NodeSet& sy = sel[static_cast<size_t>(y)];
            const NodeSet& pool = sx.size() <= sy.size() ? sx : sy;
            if (!e.try_separate(x, y, pool)) skel.add_undirected_edge(x, y);
        }
    }
    return skel;
}

// MMHC's candidate skeleton: mutual membership in the per-node parent-child
// candidates, no further pruning (those sets carry no spouses to remove).
Pdag mutual_pc_skeleton(MbEngine& e, const std::vector<std::string>& names) {
    const int n = e.n_vars();
    std::vector<NodeSet> pc(static_cast<size_t>(n));
    for (int v = 0; v < n; ++v) pc[static_cast<size_t>(v)] = e.cpc(MbEngine::Flavor::Mmpc, v);

    Pdag skel(names);
    for (int x = 0; x < n; ++x)
        for (int y : pc[static_cast<size_t>(x)])
            if (y > x && set_contains(pc[static_cast<size_t>(y)], x))
                skel.add_undirected_edge(x, y);
    return skel;
}

// --- GES support ---------------------------------------------------------------

bool is_clique(const Pdag& g, const NodeSet& s) {
    for (size_t i = 0; i < s.size(); ++i)
        for (size_t j = i + 1; j < s.size(); ++j)
            if (!g.adjacent(s[static_cast<size_t>(i)], s[j])) return false;
    return true;
}

// True when some semi-directed path (following directed edges forward or
// undirected edges either way) runs from `from` to `to` without passing
// through `blocked`.
bool semi_directed_reachable(const Pdag& g, int from, int to, const NodeSet& blocked) {
    std::vector<char> seen(static_cast<size_t>(g.node_count()), 0);
    std::deque<int> queue{from};
    seen[static_cast<size_t>(from)] = 1;
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int w : set_union(g.children(v), g.neighbors(v))) {
            if (w == to) return true;
            if (seen[static_cast<size_t>(w)] || set_contains(blocked, w)) continue;
            seen[static_cast<size_t>(w)] = 1;
            queue.push_back(w);
        }
    }
    return false;
}

// Undirected neighbors of y that are adjacent to x: the set the insert and
// delete validity conditions are built from.
NodeSet common_boundary(const Pdag& g, int y, int x) {
    NodeSet out;
    for (int w : g.neighbors(y))
        if (g.adjacent(w, x)) set_insert(out, w);
    return out;
}

void check_pool_size(size_t size) {
    if (size > static_cast<size_t>(kMaxSubsetPool))
        throw Error(ErrorKind::TooLarge, "ges_operators: neighborhood of size " +
                                             std::to_string(size) + " exceeds the subset guard");
}

// --- conservative orientation propagation -----------------------------------

// Mirror of graph-core's four Meek predicates: would some rule orient the
// undirected edge a - b as a -> b in the current graph?
bool meek_wants(const Pdag& g, int a, int b) {
    // Rule 1: c -> a, a - b, c and b non-adjacent.
    for (int c : g.parents(a))
        if (c != b && !g.adjacent(c, b)) return true;
    // Rule 2: a -> c -> b and a - b.
    for (int c : g.children(a))
        if (c != b && g.has_directed_edge(c, b)) return true;
    // Rule 3: a - c, a - d, c -> b, d -> b, c and d non-adjacent.
    NodeSet candidates;
    for (int c : g.parents(b))
        if (g.has_undirected_edge(a, c)) candidates.push_back(c);
    for (size_t i = 0; i < candidates.size(); ++i)
        for (size_t j = i + 1; j < candidates.size(); ++j)
            if (!g.adjacent(candidates[i], candidates[j])) return true;
    // Rule 4: a - d, d -> c, c -> b, a - b, a and c adjacent, d and b
    // non-adjacent.
    for (int c : g.parents(b)) {
        if (c == a || !g.adjacent(a, c)) continue;
        for (int d : g.parents(c)) {
            if (d == a || d == b) continue;
            if (g.has_undirected_edge(a, d) && !g.adjacent(d, b)) return true;
        }
    }
    return false;
}

// Meek closure in simultaneous rounds: each round collects every orientation
// any rule proposes, applies the unanimous ones together, and permanently
// freezes edges proposed in both directions (counting them as conflicts).
// On consistent input no disagreement can arise and the result equals the
// sequential closure; on inconsistent input (noisy-data v-structures) the
// outcome, unlike a sequential sweep, cannot depend on edge order.
Pdag propagate_orientations(Pdag g, int& conflicts) {
    std::set<std::pair<int, int>> frozen;
    while (true) {
        std::map<std::pair<int, int>, int> want;  // bit 1: min->max, bit 2: max->min
        for (const auto& [a, b] : g.undirected_edges()) {
            if (frozen.count({a, b})) continue;
            int mask = 0;
            if (meek_wants(g, a, b)) mask |= 1;
            if (meek_wants(g, b, a)) mask |= 2;
            if (mask) want[{a, b}] = mask;
        }
        if (want.empty()) break;
        for (const auto& [edge, mask] : want) {
            if (mask == 3) {
                frozen.insert(edge);
                ++conflicts;
            } else if (mask == 1) {
                g.orient(edge.first, edge.second);
            } else {
                g.orient(edge.second, edge.first);
            }
        }
    }
    return g;
}

// --- restricted hill climbing ----------------------------------------------------
//
// Mutable DAG state as parent/child sets; the Dag type itself stays
// append-only, so the final graph is rebuilt once at the end.

struct HcState {
    std::vector<NodeSet> pa;
    std::vector<NodeSet> ch;

    explicit HcState(int n) : pa(static_cast<size_t>(n)), ch(static_cast<size_t>(n)) {}

    // Directed path from `from` to `to`. Skipping the direct edge from->skip
    // is all a reversal check needs: no other path revisits `from`.
    bool path(int from, int to, int skip = -1) const {
        std::vector<char> seen(pa.size(), 0);
        std::deque<int> queue{from};
        seen[static_cast<size_t>(from)] = 1;
        while (!queue.empty()) {
            const int v = queue.front();
            queue.pop_front();
            for (int w : ch[static_cast<size_t>(v)]) {
                if (v == from && w == skip) continue;
                if (w == to) return true;
                if (seen[static_cast<size_t>(w)]) continue;
                seen[static_cast<size_t>(w)] = 1;
                queue.push_back(w);
            }
        }
        return false;
    }

    void add(int x, int y) {
        set_insert(pa[static_cast<size_t>(y)], x);
        set_insert(ch[static_cast<size_t>(x)], y);
    }
    void remove(int x, int y) {
        set_erase(pa[static_cast<size_t>(y)], x);
        set_erase(ch[static_cast<size_t>(x)], y);
    }
};

enum class HcMove { Add, Delete, Reverse };

// --- shared learner plumbing -----------------------------------------------------

StructureResult constraint_based(CiSource& ci, GlobalAlgorithm algorithm,
                                 const std::vector<std::string>& names) {
    const auto start = std::chrono::steady_clock::now();
    const std::int64_t before = ci_count(ci);

    StructureResult r;
    r.algorithm = global_algorithm_name(algorithm);
    r.graph = Pdag(names);

    if (ci.n_vars() >= 2) {
        switch (algorithm) {
            case GlobalAlgorithm::Pc:
            case GlobalAlgorithm::PcStable: {
                SkeletonResult sk =
                    pc_skeleton(ci, algorithm == GlobalAlgorithm::PcStable, names);
                r.graph = orient_colliders(sk.skeleton, sk.sepsets, &r.n_collider_conflicts);
                break;
            }
            case GlobalAlgorithm::Gsbn:
            case GlobalAlgorithm::F2slC: {
                MbEngine e(ci);
                const Pdag skel =
                    algorithm == GlobalAlgorithm::Gsbn
                        ? blanket_skeleton(e, names, [&](int v) { return detail::gs_blanket(e, v); })
                        : blanket_skeleton(e, names,
                                           [&](int v) { return detail::fbed_blanket(e, v, 1); });
                r.graph = orient_colliders(skel, e.sepsets(), &r.n_collider_conflicts);
                break;
            }
            default:
                throw Error(ErrorKind::UnknownAlgorithm, "constraint_based: not constraint-based");
        }
    }

    r.n_ci_tests = ci_count(ci) - before;
    r.elapsed = now_seconds(start);
    return r;
}

StructureResult ges_search(const Dataset& data, const GlobalOptions& options) {
    const auto start = std::chrono::steady_clock::now();

    StructureResult r;
    r.algorithm = global_algorithm_name(GlobalAlgorithm::Ges);

    ScoreCache cache(data, options.score);
    Pdag state(data.names());

    // Forward sweep over inserts, then backward sweep over deletes; each
    // phase takes the best strictly improving operator until none is left.
    for (const bool forward : {true, false}) {
        while (true) {
            const std::vector<GesOperator> ops = ges_operators(state, cache);
            const GesOperator* best = nullptr;
            for (const auto& op : ops) {
                if (op.insert != forward || op.delta <= kScoreEps) continue;
                if (!best || op.delta > best->delta) best = &op;
            }
            if (!best) break;
            state = apply_ges_operator(state, *best);
        }
    }

    r.graph = state;
    r.dag = pdag_to_dag(state);
    r.n_score_evals = cache.evaluations();
    r.elapsed = now_seconds(start);
    return r;
}

StructureResult hybrid_search(const Dataset& data, GlobalAlgorithm algorithm,
                              const GlobalOptions& options) {
    const auto start = std::chrono::steady_clock::now();

    StructureResult r;
    r.algorithm = global_algorithm_name(algorithm);

    DataCi ci(data, options.alpha, options.max_cond);
    MbEngine e(ci);
    const Pdag skel =
        algorithm == GlobalAlgorithm::Mmhc
            ? mutual_pc_skeleton(e, data.names())
            : blanket_skeleton(e, data.names(), [&](int v) { return detail::fbed_blanket(e, v, 1); });
    r.n_ci_tests = ci_count(ci);

    const Dag dag = hill_climb_restricted(data, skel, options.score, &r.n_score_evals);
    r.graph = dag_to_cpdag(dag);
    r.dag = dag;
    r.elapsed = now_seconds(start);
    return r;
}

} // namespace

// --- registry ------------------------------------------------------------------

std::vector<GlobalAlgorithm> all_global_algorithms() {
    std::vector<GlobalAlgorithm> out;
    for (const auto& e : kRegistry) out.push_back(e.algorithm);
    return out;
}

std::string global_algorithm_name(GlobalAlgorithm a) { return entry_of(a).name; }

GlobalAlgorithm parse_global_algorithm(const std::string& name) {
    const std::string folded = fold_name(name);
    for (const auto& e : kRegistry)
        if (folded == fold_name(e.name)) return e.algorithm;
    throw Error(ErrorKind::UnknownAlgorithm, "unknown global algorithm: " + name);
}

bool is_score_based(GlobalAlgorithm a) { return entry_of(a).score_based; }

// --- PC adjacency search ---------------------------------------------------------

SkeletonResult pc_skeleton(CiSource& ci, bool stable, const std::vector<std::string>& names) {
    const int n = ci.n_vars();
    if (n < 2)
        throw Error(ErrorKind::Precondition, "pc_skeleton: needs at least two variables, got " +
                                                 std::to_string(n));
    const std::vector<std::string> node_names = resolve_names(n, names, "pc_skeleton");
    const std::int64_t before = ci_count(ci);

    std::vector<NodeSet> adj(static_cast<size_t>(n));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (y != x) adj[static_cast<size_t>(x)].push_back(y);

    // The stable variant owes its order-independence guarantee to two
    // choices: pools are the adjacencies frozen at the start of the level,
    // and the subset search runs in name order (smaller-named endpoint's
    // pool first, subsets by name rank), so the recorded witness — and with
    // it every downstream orientation — cannot depend on column order.
    const auto name_rank_search = [&](int x, int y, const std::vector<NodeSet>& frozen, int level,
                                      NodeSet& witness) {
        int first = x;
        int second = y;
        if (node_names[static_cast<size_t>(second)] < node_names[static_cast<size_t>(first)])
            std::swap(first, second);
        for (const int side : {first, second}) {
            const int other = side == first ? second : first;
            NodeSet pool = frozen[static_cast<size_t>(side)];
            set_erase(pool, other);
            if (static_cast<int>(pool.size()) < level) continue;
            std::sort(pool.begin(), pool.end(), [&](int a, int b) {
                return node_names[static_cast<size_t>(a)] < node_names[static_cast<size_t>(b)];
            });
            const bool found = for_each_subset_of_size(pool, level, [&](const NodeSet& subset) {
                const NodeSet z = sorted(subset);
                if (!ci.independent(x, y, z)) return false;
                witness = z;
                return true;
            });
            if (found) return true;
        }
        return false;
    };

    SepsetMap sepsets;
    for (int level = 0; level <= n - 2 && level <= ci.max_cond(); ++level) {
        bool any_pool = false;
        for (int x = 0; x < n && !any_pool; ++x)
            any_pool = !adj[static_cast<size_t>(x)].empty() &&
                       static_cast<int>(adj[static_cast<size_t>(x)].size()) - 1 >= level;
        if (!any_pool) break;

        const std::vector<NodeSet> frozen = adj;
        for (int x = 0; x < n; ++x) {
            const NodeSet neighbors = adj[static_cast<size_t>(x)];
            for (int y : neighbors) {
                if (stable && y < x) continue;  // one canonical visit per pair
                if (!set_contains(adj[static_cast<size_t>(x)], y)) continue;

                NodeSet witness;
                bool separated = false;
                if (stable) {
                    separated = name_rank_search(x, y, frozen, level, witness);
                } else {
                    // Plain PC: one-sided pools over the live adjacencies,
                    // order-dependent by design.
                    NodeSet pool = adj[static_cast<size_t>(x)];
                    set_erase(pool, y);
                    if (static_cast<int>(pool.size()) < level) continue;
                    separated = for_each_subset_of_size(pool, level, [&](const NodeSet& z) {
                        if (!ci.independent(x, y, z)) return false;
                        witness = z;
                        return true;
                    });
                }
                if (separated) {
                    set_erase(adj[static_cast<size_t>(x)], y);
                    set_erase(adj[static_cast<size_t>(y)], x);
                    sepsets.emplace(pair_key(x, y), witness);
                }
            }
        }
    }

    SkeletonResult out;
    out.skeleton = Pdag(node_names);
    for (int x = 0; x < n; ++x)
        for (int y : adj[static_cast<size_t>(x)])
            if (y > x) out.skeleton.add_undirected_edge(x, y);
    out.sepsets = std::move(sepsets);
    out.n_ci_tests = ci_count(ci) - before;
    return out;
}

// --- collider orientation ----------------------------------------------------------

Pdag orient_colliders(const Pdag& skeleton, const SepsetMap& sepsets, int* n_conflicts) {
    Pdag g = skeleton;

    // Gather every triple's proposal first and apply them all at once, so no
    // orientation can overwrite another and the outcome cannot depend on the
    // order triples are visited in. Bit 1 proposes min->max, bit 2 max->min.
    std::map<std::pair<int, int>, int> proposals;
    for (int z = 0; z < g.node_count(); ++z) {
        const NodeSet around = g.adjacent_nodes(z);
        for (size_t i = 0; i < around.size(); ++i) {
            for (size_t j = i + 1; j < around.size(); ++j) {
                const int x = around[i];
                const int y = around[j];
                if (g.adjacent(x, y)) continue;
                const auto it = sepsets.find(pair_key(x, y));
                if (it == sepsets.end() || set_contains(it->second, z)) continue;
                for (const int parent : {x, y})
                    proposals[pair_key(parent, z)] |= parent < z ? 1 : 2;
            }
        }
    }

    int conflicts = 0;
    for (const auto& [edge, mask] : proposals) {
        if (mask == 3) {
            ++conflicts;  // triples disagree: the edge stays undirected
            continue;
        }
        const int parent = mask == 1 ? edge.first : edge.second;
        const int child = mask == 1 ? edge.second : edge.first;
        if (g.has_undirected_edge(parent, child)) g.orient(parent, child);
    }
    g = propagate_orientations(std::move(g), conflicts);
    if (n_conflicts) *n_conflicts = conflicts;
    return g;
}

// --- GES operators -----------------------------------------------------------------

std::vector<GesOperator> ges_operators(const Pdag& state, ScoreCache& cache) {
    const int n = state.node_count();
    std::vector<GesOperator> ops;

    // Insert(x, y, T): x, y non-adjacent, T drawn from the undirected
    // neighbors of y not adjacent to x. Valid when the common boundary plus T
    // is a clique and blocks every semi-directed y-to-x path.
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            if (x == y || state.adjacent(x, y)) continue;
            const NodeSet boundary = common_boundary(state, y, x);
            NodeSet t_pool;
            for (int w : state.neighbors(y))
                if (!state.adjacent(w, x)) set_insert(t_pool, w);
            check_pool_size(t_pool.size());

            for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << t_pool.size()); ++mask) {
                NodeSet t;
                for (size_t i = 0; i < t_pool.size(); ++i)
                    if (mask & (std::uint64_t(1) << i)) t.push_back(t_pool[i]);
                const NodeSet block = set_union(boundary, t);
                if (!is_clique(state, block)) continue;
                if (semi_directed_reachable(state, y, x, block)) continue;

                const NodeSet base = set_union(state.parents(y), block);
                NodeSet with = base;
                set_insert(with, x);
                ops.push_back({true, x, y, t, cache.local(y, with) - cache.local(y, base)});
            }
        }
    }

    // Delete(x, y, H): x -> y or x - y, H drawn from the common boundary.
    // Valid when the boundary minus H stays a clique.
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            if (x == y) continue;
            if (!state.has_directed_edge(x, y) && !state.has_undirected_edge(x, y)) continue;
            const NodeSet boundary = common_boundary(state, y, x);
            check_pool_size(boundary.size());

            for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << boundary.size()); ++mask) {
                NodeSet h;
                for (size_t i = 0; i < boundary.size(); ++i)
                    if (mask & (std::uint64_t(1) << i)) h.push_back(boundary[i]);
                const NodeSet keep = set_difference(boundary, h);
                if (!is_clique(state, keep)) continue;

                NodeSet base = set_union(state.parents(y), keep);
                set_erase(base, x);
                NodeSet with = base;
                set_insert(with, x);
                ops.push_back({false, x, y, h, cache.local(y, base) - cache.local(y, with)});
            }
        }
    }
    return ops;
}

Pdag apply_ges_operator(const Pdag& state, const GesOperator& op) {
    Pdag g = state;
    if (op.insert) {
        g.add_directed_edge(op.x, op.y);
        for (int t : op.set) g.orient(t, op.y);
    } else {
        g.remove_edge(op.x, op.y);
        for (int h : op.set) {
            if (g.has_undirected_edge(op.y, h)) g.orient(op.y, h);
            if (g.has_undirected_edge(op.x, h)) g.orient(op.x, h);
        }
    }
    return dag_to_cpdag(pdag_to_dag(g));
}

// --- restricted hill climbing --------------------------------------------------------

Dag hill_climb_restricted(const Dataset& data, const Pdag& skeleton, ScoreParams params,
                          std::int64_t* n_score_evals) {
    const int n = data.n_columns();
    if (skeleton.node_count() != n)
        throw Error(ErrorKind::Mismatch, "hill_climb_restricted: skeleton has " +
                                             std::to_string(skeleton.node_count()) +
                                             " nodes for " + std::to_string(n) + " columns");

    ScoreCache cache(data, params);
    HcState g(n);

    // One move per iteration: the strictly best of all valid additions,
    // deletions and reversals, ties resolved by enumeration order.
    while (true) {
        HcMove best_move = HcMove::Add;
        int best_x = -1;
        int best_y = -1;
        double best_delta = kScoreEps;

        auto consider = [&](HcMove move, int x, int y, double delta) {
            if (delta > best_delta) {
                best_move = move;
                best_x = x;
                best_y = y;
                best_delta = delta;
            }
        };
        auto local_gain = [&](int node, const NodeSet& parents, int added) {
            NodeSet with = parents;
            set_insert(with, added);
            return cache.local(node, with) - cache.local(node, parents);
        };
        auto local_loss = [&](int node, const NodeSet& parents, int removed) {
            NodeSet without = parents;
            set_erase(without, removed);
            return cache.local(node, without) - cache.local(node, parents);
        };

        for (int x = 0; x < n; ++x) {
            for (int y = 0; y < n; ++y) {
                if (x == y || !skeleton.adjacent(x, y)) continue;
                if (set_contains(g.pa[static_cast<size_t>(y)], x) ||
                    set_contains(g.pa[static_cast<size_t>(x)], y))
                    continue;
                if (g.path(y, x)) continue;
                consider(HcMove::Add, x, y, local_gain(y, g.pa[static_cast<size_t>(y)], x));
            }
        }
        for (int x = 0; x < n; ++x)
            for (int y : g.ch[static_cast<size_t>(x)])
                consider(HcMove::Delete, x, y, local_loss(y, g.pa[static_cast<size_t>(y)], x));
        for (int x = 0; x < n; ++x) {
            for (int y : g.ch[static_cast<size_t>(x)]) {
                if (g.path(x, y, y)) continue;
                consider(HcMove::Reverse, x, y,
                         local_gain(x, g.pa[static_cast<size_t>(x)], y) +
                             local_loss(y, g.pa[static_cast<size_t>(y)], x));
            }
        }

        if (best_x < 0) break;
        switch (best_move) {
            case HcMove::Add: g.add(best_x, best_y); break;
            case HcMove::Delete: g.remove(best_x, best_y); break;
            case HcMove::Reverse:
                g.remove(best_x, best_y);
                g.add(best_y, best_x);
                break;
        }
    }

    if (n_score_evals) *n_score_evals += cache.evaluations();

    Dag out(data.names());
    for (int y = 0; y < n; ++y)
        for (int x : g.pa[static_cast<size_t>(y)]) out.add_edge(x, y);
    return out;
}

// --- entry points ---------------------------------------------------------------------

StructureResult learn_global(CiSource& ci, GlobalAlgorithm algorithm,
                             const GlobalOptions& options) {
    if (is_score_based(algorithm))
        throw Error(ErrorKind::Unsupported,
                    "learn_global: " + global_algorithm_name(algorithm) +
                        " maximizes a data score and cannot run from a CI source alone");
    const std::vector<std::string> names = resolve_names(ci.n_vars(), options.names, "learn_global");
    return constraint_based(ci, algorithm, names);
}

StructureResult learn_global(CiSource& ci, const std::string& algorithm,
                             const GlobalOptions& options) {
    return learn_global(ci, parse_global_algorithm(algorithm), options);
}

StructureResult learn_global(const Dataset& data, GlobalAlgorithm algorithm,
                             const GlobalOptions& options) {
    if (!is_score_based(algorithm)) {
        DataCi ci(data, options.alpha, options.max_cond);
        GlobalOptions forwarded = options;
        forwarded.names = data.names();
        return learn_global(ci, algorithm, forwarded);
    }
    if (algorithm == GlobalAlgorithm::Ges) return ges_search(data, options);
    return hybrid_search(data, algorithm, options);
}

StructureResult learn_global(const Dataset& data, const std::string& algorithm,
                             const GlobalOptions& options) {
    return learn_global(data, parse_global_algorithm(algorithm), options);
}

} // namespace causal
