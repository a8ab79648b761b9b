#include "causal/local.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <deque>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mb_engine.hpp"

namespace causal {

namespace {

using detail::MbEngine;

// --- registries ------------------------------------------------------------

struct PcVariantEntry {
    PcVariant variant;
    const char* name;
};

constexpr PcVariantEntry kPcRegistry[] = {
    {PcVariant::Mmpc, "MMPC"},
    {PcVariant::HitonPc, "HITON-PC"},
    {PcVariant::GetPc, "GetPC"},
};

struct LocalEntry {
    LocalAlgorithm algorithm;
    const char* name;
};

constexpr LocalEntry kLocalRegistry[] = {
    {LocalAlgorithm::PcdByPcd, "PCD-by-PCD"},
    {LocalAlgorithm::MbByMb, "MB-by-MB"},
    {LocalAlgorithm::Cmb, "CMB"},
    {LocalAlgorithm::LcsFs, "LCS-FS"},
};

std::string fold_name(const std::string& name) {
    std::string out;
    for (char c : name) {
        if (c == '-' || c == '_') continue;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

void check_target(const CiSource& ci, const char* who, int target) {
    if (target < 0 || target >= ci.n_vars())
        throw Error(ErrorKind::UnknownNode, std::string(who) + ": target index " +
                                                std::to_string(target) + " out of range for " +
                                                std::to_string(ci.n_vars()) + " variables");
}

// --- blanket-to-adjacency filter ---------------------------------------------
//
// Keeps the blanket members that no subset of the rest of the blanket can
// separate from v. Parents and children survive (nothing separates a true
// edge); spouses fall to the subset containing neither the shared child nor
// its descendants. Every removal records the separating set, which the
// orientation stage consumes.

NodeSet blanket_adjacency(MbEngine& e, int v, const NodeSet& mb) {
    NodeSet adj;
    for (int x : mb)
        if (!e.try_separate(v, x, mb)) set_insert(adj, x);
    return adj;
}

// --- expansion engine --------------------------------------------------------
//
// Shared by all four local algorithms: learn one-sided neighborhood
// estimates outward from the target in deterministic breadth-first order,
// keep only edges both endpoints agree on, orient v-structures witnessed by
// recorded separating sets, close under the Meek rules, and stop as soon as
// every target-adjacent edge is classified (or the frontier runs out).

class Expansion {
  public:
    Expansion(MbEngine& e, int target, int limit,
              std::function<NodeSet(int)> neighbors_of)
        : e_(e), t_(target), limit_(limit), neighbors_of_(std::move(neighbors_of)) {}

    // Extra compelled orientations discovered outside the assembly (CMB's
    // blanket phase); applied wherever the assembled edge exists undirected.
    void inject(int parent, int child) { injected_.push_back({parent, child}); }

    const std::vector<int>& visit_order() const { return visit_order_; }

    LocalStructure run() {
        std::deque<int> queue{t_};
        NodeSet queued{t_};
        Pdag g = assemble();
        while (!queue.empty() && static_cast<int>(visit_order_.size()) < limit_) {
            const int v = queue.front();
            queue.pop_front();
            adj_[v] = neighbors_of_(v);
            set_insert(visited_, v);
            visit_order_.push_back(v);
            for (int u : adj_[v]) {
                if (set_contains(queued, u)) continue;
                queue.push_back(u);
                set_insert(queued, u);
            }
            g = assemble();
            if (target_resolved(g)) break;
        }

        LocalStructure out;
        out.target = t_;
        out.parents = g.parents(t_);
        out.children = g.children(t_);
        out.undirected_neighbors = g.neighbors(t_);
        return out;
    }

  private:
    bool is_visited(int v) const { return set_contains(visited_, v); }

    // An edge is confirmed when both endpoints were visited and each keeps
    // the other in its estimate. One-sided estimates may hold descendants
    // that no local subset separates; the reverse run always separates
    // those, so agreement is what certifies a true edge.
    bool confirmed(int a, int b) const {
        return is_visited(a) && is_visited(b) && set_contains(adj_.at(a), b) &&
               set_contains(adj_.at(b), a);
    }

    Pdag assemble() const {
        std::vector<std::string> names;
        names.reserve(static_cast<std::size_t>(e_.n_vars()));
        for (int i = 0; i < e_.n_vars(); ++i) names.push_back("v" + std::to_string(i));
        Pdag g(names);

        for (int a : visited_)
            for (int b : adj_.at(a))
                if (a < b && confirmed(a, b)) g.add_undirected_edge(a, b);

        // V-structures: for each confirmed pair of neighbors of a common
        // node, both-endpoint agreement certifies the absence of the third
        // edge, and any recorded separating set is a valid witness — the
        // common node is a collider exactly when it lies outside the set.
        for (int c : visited_) {
            NodeSet nb;
            for (int x : adj_.at(c))
                if (confirmed(c, x)) set_insert(nb, x);
            for (std::size_t i = 0; i < nb.size(); ++i) {
                for (std::size_t j = i + 1; j < nb.size(); ++j) {
                    const int a = nb[i];
                    const int b = nb[j];
                    if (confirmed(a, b)) continue;
                    const NodeSet* z = e_.recorded_sepset(a, b);
                    if (z == nullptr || set_contains(*z, c)) continue;
                    if (g.has_undirected_edge(a, c)) g.orient(a, c);
                    if (g.has_undirected_edge(b, c)) g.orient(b, c);
                }
            }
        }
        for (const auto& [p, c] : injected_)
            if (g.has_undirected_edge(p, c)) g.orient(p, c);

        return apply_meek_rules(g);
    }

    // Every candidate partner of the target must be visited, and every
    // surviving edge oriented, before the expansion may stop early.
    bool target_resolved(const Pdag& g) const {
        if (!is_visited(t_)) return false;
        for (int x : adj_.at(t_)) {
            if (!is_visited(x)) return false;
            if (!set_contains(adj_.at(x), t_)) continue;  // dropped by agreement
            if (g.has_undirected_edge(t_, x)) return false;
        }
        return true;
    }

    MbEngine& e_;
    int t_;
    int limit_;
    std::function<NodeSet(int)> neighbors_of_;
    std::map<int, NodeSet> adj_;
    NodeSet visited_;
    std::vector<int> visit_order_;
    std::vector<std::pair<int, int>> injected_;
};

int visit_limit(const CiSource& ci, const LocalOptions& options) {
    const int n = ci.n_vars();
    if (options.max_visited <= 0) return n;
    return std::min(options.max_visited, n);
}

// --- CMB ----------------------------------------------------------------------
//
// Blanket-first: learn MB(target), split it into adjacency and spouses, and
// read orientations straight off the conditional-independence changes —
// adjacent pairs that separate without the target form colliders at it,
// spouses activated by one adjacent member mark that member as a child, and
// a parent plus a separated-through-target pair compels the remaining
// direction. Expansion into the neighbors runs only when this local
// evidence leaves some target edge unclassified.

struct CmbPhase {
    NodeSet adjacency;
    std::vector<std::pair<int, int>> oriented;  // (parent, child), t on one side
    bool complete = false;
};

CmbPhase cmb_blanket_phase(MbEngine& e, int t) {
    CmbPhase phase;
    const NodeSet mb = detail::gs_blanket(e, t);
    const NodeSet adj = blanket_adjacency(e, t, mb);
    const NodeSet spouses = set_difference(mb, adj);
    phase.adjacency = adj;

    std::map<int, int> direction;  // +1: parent of t, -1: child of t
    auto orient_in = [&](int x) { direction.emplace(x, +1); };
    auto orient_out = [&](int x) { direction.emplace(x, -1); };

    // Colliders at the target: adjacent pair separable without the target.
    for (std::size_t i = 0; i < adj.size(); ++i) {
        for (std::size_t j = i + 1; j < adj.size(); ++j) {
            const int a = adj[i];
            const int b = adj[j];
            const NodeSet* z = e.recorded_sepset(a, b);
            if (z == nullptr) {
                NodeSet pool = mb;
                set_insert(pool, t);
                if (!e.try_separate(a, b, pool)) continue;
                z = e.recorded_sepset(a, b);
            }
            if (set_contains(*z, t)) continue;
            orient_in(a);
            orient_in(b);
        }
    }

    // Children witnessed by spouse activation: the spouse is independent of
    // the target given its recorded set, dependent again once the shared
    // child joins it.
    for (int s : spouses) {
        const NodeSet* z = e.recorded_sepset(t, s);
        if (z == nullptr) continue;
        for (int c : adj) {
            NodeSet activated = *z;
            set_insert(activated, c);
            if (e.dep(t, s, activated)) orient_out(c);
        }
    }

    // Local propagation: a parent of t plus an unoriented neighbor that the
    // parent separates from through t cannot form a collider at t, so the
    // neighbor must be a child. Repeat until nothing new orients.
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [p, dir] : std::map<int, int>(direction)) {
            if (dir != +1) continue;
            for (int c : adj) {
                if (c == p || direction.count(c) != 0) continue;
                const NodeSet* z = e.recorded_sepset(p, c);
                if (z != nullptr && set_contains(*z, t)) {
                    orient_out(c);
                    changed = true;
                }
            }
        }
    }

    for (const auto& [x, dir] : direction)
        phase.oriented.push_back(dir == +1 ? std::make_pair(x, t) : std::make_pair(t, x));
    phase.complete = direction.size() == adj.size();
    return phase;
}

// --- learn_local dispatch ----------------------------------------------------

LocalStructure run_local(MbEngine& e, int t, LocalAlgorithm algorithm, int limit,
                         std::vector<int>& visit_order) {
    switch (algorithm) {
        case LocalAlgorithm::PcdByPcd: {
            Expansion ex(e, t, limit,
                         [&](int v) { return e.cpc(MbEngine::Flavor::Getpcd, v); });
            LocalStructure out = ex.run();
            visit_order = ex.visit_order();
            return out;
        }
        case LocalAlgorithm::MbByMb: {
            Expansion ex(e, t, limit, [&](int v) {
                return blanket_adjacency(e, v, detail::iamb_blanket(e, v));
            });
            LocalStructure out = ex.run();
            visit_order = ex.visit_order();
            return out;
        }
        case LocalAlgorithm::LcsFs: {
            Expansion ex(e, t, limit, [&](int v) {
                return blanket_adjacency(e, v, detail::fbed_blanket(e, v, 1));
            });
            LocalStructure out = ex.run();
            visit_order = ex.visit_order();
            return out;
        }
        case LocalAlgorithm::Cmb: {
            const CmbPhase phase = cmb_blanket_phase(e, t);
            if (phase.complete) {
                LocalStructure out;
                out.target = t;
                for (const auto& [p, c] : phase.oriented) {
                    if (c == t)
                        set_insert(out.parents, p);
                    else
                        set_insert(out.children, c);
                }
                visit_order = {t};
                return out;
            }
            Expansion ex(e, t, limit, [&](int v) {
                return blanket_adjacency(e, v, detail::gs_blanket(e, v));
            });
            for (const auto& [p, c] : phase.oriented) ex.inject(p, c);
            LocalStructure out = ex.run();
            visit_order = ex.visit_order();
            return out;
        }
    }
    throw Error(ErrorKind::UnknownAlgorithm, "unknown local algorithm id");
}

} // namespace

// --- parent-child set discovery ------------------------------------------

const std::vector<PcVariant>& all_pc_variants() {
    static const std::vector<PcVariant> all = [] {
        std::vector<PcVariant> v;
        for (const auto& entry : kPcRegistry) v.push_back(entry.variant);
        return v;
    }();
    return all;
}

std::string pc_variant_name(PcVariant variant) {
    for (const auto& entry : kPcRegistry)
        if (entry.variant == variant) return entry.name;
    throw Error(ErrorKind::UnknownAlgorithm, "unknown pc variant id");
}

PcVariant parse_pc_variant(const std::string& name) {
    const std::string folded = fold_name(name);
    for (const auto& entry : kPcRegistry)
        if (folded == fold_name(entry.name)) return entry.variant;
    throw Error(ErrorKind::UnknownAlgorithm, "unknown pc variant: " + name);
}

PcSetResult learn_pc_set(CiSource& ci, int target, PcVariant variant) {
    check_target(ci, "learn_pc_set", target);
    const long long before = ci.counter().total_tests;

    MbEngine e(ci);
    NodeSet pc;
    switch (variant) {
        case PcVariant::Mmpc: pc = e.cpc(MbEngine::Flavor::Mmpc, target); break;
        case PcVariant::HitonPc: pc = e.cpc(MbEngine::Flavor::Hiton, target); break;
        case PcVariant::GetPc: pc = e.sym_pc(MbEngine::Flavor::Hiton, target); break;
    }

    PcSetResult out;
    out.target = target;
    out.pc = pc;
    for (const auto& [key, z] : e.sepsets()) {
        const int other = key.first == target ? key.second : key.first;
        if ((key.first != target && key.second != target) || set_contains(pc, other)) continue;
        out.sepsets.emplace(other, z);
    }
    out.variant = pc_variant_name(variant);
    out.n_ci_tests = ci.counter().total_tests - before;
    return out;
}

PcSetResult learn_pc_set(CiSource& ci, int target, const std::string& variant) {
    return learn_pc_set(ci, target, parse_pc_variant(variant));
}

// --- local structure learning ----------------------------------------------

const std::vector<LocalAlgorithm>& all_local_algorithms() {
    static const std::vector<LocalAlgorithm> all = [] {
        std::vector<LocalAlgorithm> v;
        for (const auto& entry : kLocalRegistry) v.push_back(entry.algorithm);
        return v;
    }();
    return all;
}

std::string local_algorithm_name(LocalAlgorithm algorithm) {
    for (const auto& entry : kLocalRegistry)
        if (entry.algorithm == algorithm) return entry.name;
    throw Error(ErrorKind::UnknownAlgorithm, "unknown local algorithm id");
}

LocalAlgorithm parse_local_algorithm(const std::string& name) {
    const std::string folded = fold_name(name);
    for (const auto& entry : kLocalRegistry)
        if (folded == fold_name(entry.name)) return entry.algorithm;
    throw Error(ErrorKind::UnknownAlgorithm, "unknown local algorithm: " + name);
}

LocalResult learn_local(CiSource& ci, int target, LocalAlgorithm algorithm,
                        const LocalOptions& options) {
    check_target(ci, "learn_local", target);
    const auto t0 = std::chrono::steady_clock::now();
    const long long before = ci.counter().total_tests;

    MbEngine e(ci);
    LocalResult out;
    out.structure = run_local(e, target, algorithm, visit_limit(ci, options), out.visited);
    out.algorithm = local_algorithm_name(algorithm);
    out.n_ci_tests = ci.counter().total_tests - before;
    out.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

LocalResult learn_local(CiSource& ci, int target, const std::string& algorithm,
                        const LocalOptions& options) {
    return learn_local(ci, target, parse_local_algorithm(algorithm), options);
}

} // namespace causal
