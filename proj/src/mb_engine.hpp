#pragma once

// Internal machinery shared by the Markov-blanket and local-structure
// learners: a CI probe that records every separating set it observes, the
// candidate parent-child constructions, spouse discovery, the backward
// shrink, and the per-variant blanket routines built from them. Not part of
// the public interface.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "causal/ci.hpp"
#include "causal/common.hpp"

namespace causal {
namespace detail {

// Association with its tie-break channel: a larger (assoc, |statistic|) pair
// is a stronger dependence. Index order breaks exact ties at the call sites.
struct Strength {
    double assoc = 0.0;
    double stat = 0.0;

    bool operator<(const Strength& o) const {
        if (assoc != o.assoc) return assoc < o.assoc;
        return stat < o.stat;
    }
};

// Shared state for one learner invocation.
class MbEngine {
  public:
    explicit MbEngine(CiSource& ci) : ci_(ci), n_(ci.n_vars()), cap_(ci.max_cond()) {}

    int n_vars() const { return n_; }
    int cap() const { return cap_; }

    NodeSet all_but(int v) const {
        NodeSet out;
        out.reserve(static_cast<std::size_t>(n_ > 0 ? n_ - 1 : 0));
        for (int u = 0; u < n_; ++u)
            if (u != v) out.push_back(u);
        return out;
    }

    // Every CI query funnels through here so that observed independences are
    // recorded as separating sets (first finding wins, which keeps the
    // record deterministic).
    const CiDecision& probe(int a, int b, const NodeSet& z) {
        const CiDecision& d = ci_.test(a, b, z);
        if (d.independent) sepsets_.emplace(pair_key(a, b), z);
        return d;
    }
    bool indep(int a, int b, const NodeSet& z) { return probe(a, b, z).independent; }
    bool dep(int a, int b, const NodeSet& z) { return !probe(a, b, z).independent; }

    Strength strength(int a, int b, const NodeSet& z) {
        const CiDecision& d = probe(a, b, z);
        return {d.reliable ? 1.0 - d.p_value : 0.0, std::abs(d.statistic)};
    }

    const NodeSet* recorded_sepset(int a, int b) const {
        auto it = sepsets_.find(pair_key(a, b));
        return it == sepsets_.end() ? nullptr : &it->second;
    }

    const std::map<std::pair<int, int>, NodeSet>& sepsets() const { return sepsets_; }

    // Nodes (other than `center`) holding a recorded separating set against
    // `center` — the candidate pool for spouse scans.
    NodeSet separated_from(int center) const {
        NodeSet out;
        for (const auto& [key, z] : sepsets_) {
            if (key.first == center) set_insert(out, key.second);
            if (key.second == center) set_insert(out, key.first);
        }
        return out;
    }

    // Searches Z ⊆ pool ∖ {a, b} by increasing size within the conditioning
    // cap; reports (and records) the first separating set found.
    bool try_separate(int a, int b, NodeSet pool) {
        set_erase(pool, a);
        set_erase(pool, b);
        const int limit = std::min<int>(cap_, static_cast<int>(pool.size()));
        for (int k = 0; k <= limit; ++k) {
            const bool found = for_each_subset_of_size(
                pool, k, [&](const NodeSet& z) { return indep(a, b, z); });
            if (found) return true;
        }
        return false;
    }

    // --- candidate parent-child constructions ----------------------------

    // Level-wise separation sweep: for growing conditioning sizes, remove
    // any pool member separable by a same-size subset of the current pool.
    NodeSet sweep_cpc(int center) {
        NodeSet pool = all_but(center);
        for (int k = 0;; ++k) {
            if (k > cap_ || k > static_cast<int>(pool.size()) - 1) break;
            for (int x : NodeSet(pool)) {
                NodeSet rest = pool;
                set_erase(rest, x);
                if (static_cast<int>(rest.size()) < k) continue;
                const bool sep = for_each_subset_of_size(
                    rest, k, [&](const NodeSet& z) { return indep(center, x, z); });
                if (sep) set_erase(pool, x);
            }
        }
        return pool;
    }

    // Max-min forward admission with elimination interleaved after every
    // admission (and once more at the end). Interleaving keeps the
    // candidate set near the true parent-child set, which matters because
    // the subset scans below are exponential in its size; the final set is
    // the same either way, since elimination only ever removes members a
    // recorded separating set vouches for.
    NodeSet mmpc_cpc(int center) {
        NodeSet cpc;
        NodeSet cand = all_but(center);
        while (true) {
            int best = -1;
            Strength best_minassoc;
            for (int x : NodeSet(cand)) {
                bool sep = false;
                Strength minassoc{2.0, 0.0};
                bool first = true;
                for_each_subset_up_to(cpc, std::min<int>(cap_, static_cast<int>(cpc.size())),
                                      [&](const NodeSet& z) {
                                          const CiDecision& d = probe(center, x, z);
                                          if (d.independent) {
                                              sep = true;
                                              return true;
                                          }
                                          const Strength s{d.reliable ? 1.0 - d.p_value : 0.0,
                                                           std::abs(d.statistic)};
                                          if (first || s < minassoc) minassoc = s;
                                          first = false;
                                          return false;
                                      });
                if (sep) {
                    set_erase(cand, x);
                    continue;
                }
                if (best == -1 || best_minassoc < minassoc) {
                    best = x;
                    best_minassoc = minassoc;
                }
            }
            if (best == -1) break;
            set_insert(cpc, best);
            set_erase(cand, best);
            for (int y : NodeSet(cpc)) {
                NodeSet rest = cpc;
                set_erase(rest, y);
                if (try_separate(center, y, rest)) set_erase(cpc, y);
            }
        }
        for (int x : NodeSet(cpc)) {
            NodeSet rest = cpc;
            set_erase(rest, x);
            if (try_separate(center, x, rest)) set_erase(cpc, x);
        }
        return cpc;
    }

    // Admission in decreasing marginal association, eliminating any member
    // separable within the current candidate set after every insertion.
    NodeSet hiton_cpc(int center) {
        std::vector<std::pair<Strength, int>> order;
        for (int x : all_but(center)) {
            const CiDecision& d = probe(center, x, {});
            if (d.independent) continue;
            order.push_back({{d.reliable ? 1.0 - d.p_value : 0.0, std::abs(d.statistic)}, x});
        }
        std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
            if (b.first < a.first) return true;
            if (a.first < b.first) return false;
            return a.second < b.second;
        });
        NodeSet cpc;
        for (const auto& [s, x] : order) {
            set_insert(cpc, x);
            for (int y : NodeSet(cpc)) {
                NodeSet rest = cpc;
                set_erase(rest, y);
                if (try_separate(center, y, rest)) set_erase(cpc, y);
            }
        }
        return cpc;
    }

    // Greedy candidate set with interleaved pruning (the PCMB flavor):
    // per round, drop candidates separable by a subset of the current set,
    // admit the max-min survivor, then prune the set itself.
    NodeSet getpcd_cpc(int center) {
        NodeSet pcd;
        NodeSet cand = all_but(center);
        while (!cand.empty()) {
            int best = -1;
            Strength best_minassoc;
            for (int x : NodeSet(cand)) {
                bool sep = false;
                Strength minassoc{2.0, 0.0};
                bool first = true;
                for_each_subset_up_to(pcd, std::min<int>(cap_, static_cast<int>(pcd.size())),
                                      [&](const NodeSet& z) {
                                          const CiDecision& d = probe(center, x, z);
                                          if (d.independent) {
                                              sep = true;
                                              return true;
                                          }
                                          const Strength s{d.reliable ? 1.0 - d.p_value : 0.0,
                                                           std::abs(d.statistic)};
                                          if (first || s < minassoc) minassoc = s;
                                          first = false;
                                          return false;
                                      });
                if (sep) {
                    set_erase(cand, x);
                    continue;
                }
                if (best == -1 || best_minassoc < minassoc) {
                    best = x;
                    best_minassoc = minassoc;
                }
            }
            if (best == -1) break;
            set_insert(pcd, best);
            set_erase(cand, best);
            for (int y : NodeSet(pcd)) {
                NodeSet rest = pcd;
                set_erase(rest, y);
                if (try_separate(center, y, rest)) set_erase(pcd, y);
            }
        }
        return pcd;
    }

    // Single ordered pass admitting any candidate dependent on the current
    // set, eliminating members that the newcomer helps separate (the EEMB
    // parent-child pass), closed by one full elimination sweep.
    NodeSet eemb_cpc(int center) {
        NodeSet cpc;
        for (int x : all_but(center)) {
            if (indep(center, x, cpc)) continue;
            set_insert(cpc, x);
            for (int y : NodeSet(cpc)) {
                NodeSet rest = cpc;
                set_erase(rest, y);
                if (try_separate(center, y, rest)) set_erase(cpc, y);
            }
        }
        for (int y : NodeSet(cpc)) {
            NodeSet rest = cpc;
            set_erase(rest, y);
            if (try_separate(center, y, rest)) set_erase(cpc, y);
        }
        return cpc;
    }

    // --- CPC caching, symmetry, spouses, shrink ---------------------------

    enum class Flavor { Sweep, Mmpc, Hiton, Getpcd, Eemb };

    NodeSet cpc(Flavor f, int center) {
        const auto key = std::make_pair(static_cast<int>(f), center);
        if (auto it = cpc_cache_.find(key); it != cpc_cache_.end()) return it->second;
        NodeSet result;
        switch (f) {
            case Flavor::Sweep: result = sweep_cpc(center); break;
            case Flavor::Mmpc: result = mmpc_cpc(center); break;
            case Flavor::Hiton: result = hiton_cpc(center); break;
            case Flavor::Getpcd: result = getpcd_cpc(center); break;
            case Flavor::Eemb: result = eemb_cpc(center); break;
        }
        cpc_cache_.emplace(key, result);
        return result;
    }

    // AND-rule symmetry correction: keep x only when the reverse run keeps
    // the center. This is what makes the candidate sets exact under the
    // oracle — one-sided candidate sets may retain descendants of the center
    // that no subset of the local pool can separate.
    NodeSet sym_pc(Flavor f, int center) {
        NodeSet out;
        for (int x : cpc(f, center))
            if (set_contains(cpc(f, x), center)) set_insert(out, x);
        return out;
    }

    // Spouse discovery through PC(y) for each y in the parent-child set:
    // x is a spouse when it is independent of the target somewhere (the
    // recorded set Z) but dependent again given Z ∪ {y}.
    NodeSet spouses_via_pc(int t, const NodeSet& pc, Flavor f) {
        NodeSet sp;
        for (int y : pc) {
            for (int x : sym_pc(f, y)) {
                if (x == t || set_contains(pc, x) || set_contains(sp, x)) continue;
                const NodeSet* z = recorded_sepset(t, x);
                if (z == nullptr) {
                    if (!try_separate(t, x, set_union(pc, cpc(f, x)))) continue;
                    z = recorded_sepset(t, x);
                }
                NodeSet activated = *z;
                set_insert(activated, y);
                if (dep(t, x, activated)) set_insert(sp, x);
            }
        }
        return sp;
    }

    // Spouse scan over every node with a recorded separating set (the
    // whole-remainder style used by STMB, BAMB, EEMB and MBOR).
    NodeSet spouses_via_record(int t, const NodeSet& pc) {
        NodeSet sp;
        for (int x : separated_from(t)) {
            if (x == t || set_contains(pc, x)) continue;
            const NodeSet z = *recorded_sepset(t, x);
            for (int y : pc) {
                NodeSet activated = z;
                set_insert(activated, y);
                if (dep(t, x, activated)) {
                    set_insert(sp, x);
                    break;
                }
            }
        }
        return sp;
    }

    // Backward conditioning pass: repeatedly condition each member on the
    // rest of the estimate and drop it if independent. Whenever the estimate
    // covers the true blanket this removes exactly the non-members, because
    // the blanket d-separates the target from everything else.
    NodeSet shrink(int t, NodeSet s) {
        for (int x : NodeSet(s)) {
            NodeSet rest = s;
            set_erase(rest, x);
            if (indep(t, x, rest)) set_erase(s, x);
        }
        return s;
    }

  private:
    static std::pair<int, int> pair_key(int a, int b) {
        return {std::min(a, b), std::max(a, b)};
    }

    CiSource& ci_;
    int n_;
    int cap_;
    std::map<std::pair<int, int>, NodeSet> sepsets_;
    std::map<std::pair<int, int>, NodeSet> cpc_cache_;
};

// --- grow-shrink family ------------------------------------------------

inline NodeSet gs_blanket(MbEngine& e, int t) {
    NodeSet s;
    bool added = true;
    while (added) {
        added = false;
        for (int x : e.all_but(t)) {
            if (set_contains(s, x)) continue;
            if (e.dep(t, x, s)) {
                set_insert(s, x);
                added = true;
            }
        }
    }
    return e.shrink(t, s);
}

// Best dependent candidate outside s, by (assoc, |stat|) with index ties
// falling to the lower index; -1 when every candidate tests independent.
inline int best_candidate(MbEngine& e, int t, const NodeSet& s) {
    int best = -1;
    Strength best_s;
    for (int x : e.all_but(t)) {
        if (set_contains(s, x)) continue;
        const CiDecision& d = e.probe(t, x, s);
        if (d.independent) continue;
        const Strength cur{d.reliable ? 1.0 - d.p_value : 0.0, std::abs(d.statistic)};
        if (best == -1 || best_s < cur) {
            best = x;
            best_s = cur;
        }
    }
    return best;
}

inline NodeSet iamb_grow(MbEngine& e, int t) {
    NodeSet s;
    for (int x = best_candidate(e, t, s); x != -1; x = best_candidate(e, t, s))
        set_insert(s, x);
    return s;
}

inline NodeSet iamb_blanket(MbEngine& e, int t) { return e.shrink(t, iamb_grow(e, t)); }

inline NodeSet inter_iamb_blanket(MbEngine& e, int t) {
    NodeSet s;
    std::set<NodeSet> seen{s};
    while (true) {
        const int x = best_candidate(e, t, s);
        if (x == -1) break;
        set_insert(s, x);
        s = e.shrink(t, s);
        if (!seen.insert(s).second) break;  // deterministic-cycle safeguard
    }
    // The interleaved passes ran against partial estimates; one last pass
    // against the full estimate clears any member they could not see past.
    return e.shrink(t, s);
}

// PC-style backward phase shared by the nPC variants: members are tested
// against subsets of the remaining estimate, by increasing subset size with
// immediate removal, so the easy separations shrink the estimate before the
// larger subset spaces are touched. The removals record separating sets,
// which the collider re-admission below uses to pull back spouses that the
// subset search stripped (a spouse is separable from the target precisely
// until one of its children enters the conditioning set).
inline NodeSet npc_backward(MbEngine& e, int t, const NodeSet& grown) {
    NodeSet s = grown;
    for (int k = 0;; ++k) {
        if (k > e.cap() || k > static_cast<int>(s.size()) - 1) break;
        for (int x : NodeSet(s)) {
            NodeSet rest = s;
            set_erase(rest, x);
            if (static_cast<int>(rest.size()) < k) continue;
            const bool sep = for_each_subset_of_size(
                rest, k, [&](const NodeSet& z) { return e.indep(t, x, z); });
            if (sep) set_erase(s, x);
        }
    }
    return s;
}

inline NodeSet npc_finish(MbEngine& e, int t, const NodeSet& kept) {
    NodeSet est = kept;
    for (int x : e.separated_from(t)) {
        if (set_contains(est, x)) continue;
        const NodeSet z = *e.recorded_sepset(t, x);
        for (int y : kept) {
            NodeSet activated = z;
            set_insert(activated, y);
            if (e.dep(t, x, activated)) {
                set_insert(est, x);
                break;
            }
        }
    }
    return e.shrink(t, est);
}

inline NodeSet iamb_npc_blanket(MbEngine& e, int t) {
    const NodeSet grown = iamb_grow(e, t);
    return npc_finish(e, t, npc_backward(e, t, grown));
}

inline NodeSet inter_iamb_npc_blanket(MbEngine& e, int t) {
    // Members the interleaved backward pass strips are parked rather than
    // re-admitted: every strip records a separating set, so the collider
    // re-admission in npc_finish can pull back the ones that matter. Without
    // parking, the admit/strip pair would repeat forever and starve the
    // candidates behind it.
    NodeSet s;
    NodeSet parked;
    while (true) {
        int x = -1;
        Strength best_s;
        for (int c : e.all_but(t)) {
            if (set_contains(s, c) || set_contains(parked, c)) continue;
            const CiDecision& d = e.probe(t, c, s);
            if (d.independent) continue;
            const Strength cur{d.reliable ? 1.0 - d.p_value : 0.0, std::abs(d.statistic)};
            if (x == -1 || best_s < cur) {
                x = c;
                best_s = cur;
            }
        }
        if (x == -1) break;
        set_insert(s, x);
        const NodeSet after = npc_backward(e, t, s);
        parked = set_union(parked, set_difference(s, after));
        s = after;
    }
    return npc_finish(e, t, s);
}

inline NodeSet fast_iamb_blanket(MbEngine& e, int t) {
    NodeSet s;
    std::set<NodeSet> seen{s};
    while (true) {
        // Rank the currently dependent candidates, then admit them in order
        // until one of the admission tests turns unreliable.
        std::vector<std::pair<Strength, int>> batch;
        for (int x : e.all_but(t)) {
            if (set_contains(s, x)) continue;
            const CiDecision& d = e.probe(t, x, s);
            if (d.independent) continue;
            batch.push_back({{d.reliable ? 1.0 - d.p_value : 0.0, std::abs(d.statistic)}, x});
        }
        if (batch.empty()) break;
        std::stable_sort(batch.begin(), batch.end(), [](const auto& a, const auto& b) {
            if (b.first < a.first) return true;
            if (a.first < b.first) return false;
            return a.second < b.second;
        });
        for (const auto& [st, x] : batch) {
            const CiDecision& d = e.probe(t, x, s);
            if (!d.reliable) break;
            if (d.independent) continue;
            set_insert(s, x);
        }
        s = e.shrink(t, s);
        if (!seen.insert(s).second) break;
    }
    return e.shrink(t, s);
}

inline NodeSet fbed_blanket(MbEngine& e, int t, int k) {
    if (k < 0) throw Error(ErrorKind::Validation, "fbed: repeat count must be >= 0");
    NodeSet s;
    for (int pass = 0; pass <= k; ++pass) {
        NodeSet pool = set_difference(e.all_but(t), s);
        while (!pool.empty()) {
            // Early dropping: candidates independent given the current
            // estimate leave the pool for the rest of the pass.
            int best = -1;
            Strength best_s;
            for (int x : NodeSet(pool)) {
                const CiDecision& d = e.probe(t, x, s);
                if (d.independent) {
                    set_erase(pool, x);
                    continue;
                }
                const Strength cur{d.reliable ? 1.0 - d.p_value : 0.0, std::abs(d.statistic)};
                if (best == -1 || best_s < cur) {
                    best = x;
                    best_s = cur;
                }
            }
            if (best == -1) break;
            set_insert(s, best);
            set_erase(pool, best);
        }
    }
    return e.shrink(t, s);
}

// --- topology family -----------------------------------------------------

struct PcMb {
    NodeSet pc;
    NodeSet mb;
};

inline PcMb mmmb_run(MbEngine& e, int t) {
    const NodeSet pc = e.sym_pc(MbEngine::Flavor::Mmpc, t);
    return {pc, set_union(pc, e.spouses_via_pc(t, pc, MbEngine::Flavor::Mmpc))};
}

inline PcMb hiton_mb_run(MbEngine& e, int t) {
    const NodeSet pc = e.sym_pc(MbEngine::Flavor::Hiton, t);
    return {pc, set_union(pc, e.spouses_via_pc(t, pc, MbEngine::Flavor::Hiton))};
}

inline PcMb pcmb_run(MbEngine& e, int t) {
    const NodeSet pc = e.sym_pc(MbEngine::Flavor::Getpcd, t);
    return {pc, set_union(pc, e.spouses_via_pc(t, pc, MbEngine::Flavor::Getpcd))};
}

inline PcMb ipcmb_run(MbEngine& e, int t) {
    const NodeSet pc = e.sym_pc(MbEngine::Flavor::Sweep, t);
    return {pc, set_union(pc, e.spouses_via_pc(t, pc, MbEngine::Flavor::Sweep))};
}

inline PcMb mbor_run(MbEngine& e, int t) {
    // OR-rule superset: keep x when either direction's candidate set admits
    // the pair, then filter the assembled blanket back down.
    const NodeSet cpc_t = e.cpc(MbEngine::Flavor::Sweep, t);
    NodeSet pc_or = cpc_t;
    for (int x : e.all_but(t))
        if (!set_contains(pc_or, x) && set_contains(e.cpc(MbEngine::Flavor::Sweep, x), t))
            set_insert(pc_or, x);
    const NodeSet sp_or = e.spouses_via_record(t, pc_or);
    const NodeSet mb = e.shrink(t, set_union(pc_or, sp_or));
    return {set_intersection(pc_or, mb), mb};
}

inline PcMb stmb_run(MbEngine& e, int t) {
    // Separation sweep, collider activation against the survivors over the
    // whole remainder, then the backward pass that clears descendants and
    // any other false member.
    const NodeSet cpc = e.cpc(MbEngine::Flavor::Sweep, t);
    const NodeSet marks = e.spouses_via_record(t, cpc);
    const NodeSet mb = e.shrink(t, set_union(cpc, marks));
    return {set_intersection(cpc, mb), mb};
}

inline PcMb bamb_run(MbEngine& e, int t) {
    NodeSet cpc;
    NodeSet cand = e.all_but(t);
    NodeSet spmarks;
    while (true) {
        // Admit the strongest surviving candidate (max-min association).
        int best = -1;
        Strength best_minassoc;
        for (int x : NodeSet(cand)) {
            bool sep = false;
            Strength minassoc{2.0, 0.0};
            bool first = true;
            for_each_subset_up_to(
                cpc, std::min<int>(e.cap(), static_cast<int>(cpc.size())),
                [&](const NodeSet& z) {
                    const CiDecision& d = e.probe(t, x, z);
                    if (d.independent) {
                        sep = true;
                        return true;
                    }
                    const Strength s{d.reliable ? 1.0 - d.p_value : 0.0, std::abs(d.statistic)};
                    if (first || s < minassoc) minassoc = s;
                    first = false;
                    return false;
                });
            if (sep) {
                set_erase(cand, x);
                continue;
            }
            if (best == -1 || best_minassoc < minassoc) {
                best = x;
                best_minassoc = minassoc;
            }
        }
        if (best == -1) break;
        set_insert(cpc, best);
        set_erase(cand, best);

        // Immediate spouse tracking against the newcomer.
        for (int x : e.separated_from(t)) {
            if (set_contains(cpc, x) || set_contains(spmarks, x)) continue;
            NodeSet activated = *e.recorded_sepset(t, x);
            set_insert(activated, best);
            if (e.dep(t, x, activated)) set_insert(spmarks, x);
        }
        // Shrink both candidate sets as evidence accumulates.
        for (int y : NodeSet(cpc)) {
            NodeSet rest = cpc;
            set_erase(rest, y);
            if (e.try_separate(t, y, rest)) set_erase(cpc, y);
        }
        for (int x : NodeSet(spmarks)) {
            NodeSet rest = set_union(cpc, spmarks);
            set_erase(rest, x);
            if (e.indep(t, x, rest)) set_erase(spmarks, x);
        }
    }
    // Spouses whose children entered the set after they were dropped from
    // the candidate pool are picked up by one closing scan.
    spmarks = set_union(spmarks, e.spouses_via_record(t, cpc));
    const NodeSet mb = e.shrink(t, set_union(cpc, spmarks));
    return {set_intersection(cpc, mb), mb};
}

inline PcMb eemb_run(MbEngine& e, int t) {
    const NodeSet cpc = e.cpc(MbEngine::Flavor::Eemb, t);
    NodeSet sp = e.spouses_via_record(t, cpc);
    // Simultaneous false-positive removal in the spouse pass: every member
    // is conditioned on the rest of the combined estimate.
    NodeSet pc = cpc;
    for (int x : NodeSet(sp)) {
        NodeSet rest = set_union(pc, sp);
        set_erase(rest, x);
        if (e.indep(t, x, rest)) set_erase(sp, x);
    }
    for (int y : NodeSet(pc)) {
        NodeSet rest = set_union(pc, sp);
        set_erase(rest, y);
        if (e.indep(t, y, rest)) set_erase(pc, y);
    }
    return {pc, set_union(pc, sp)};
}

} // namespace detail
} // namespace causal
