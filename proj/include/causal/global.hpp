#pragma once

// Whole-graph structure learning. Seven learners share one entry point:
//
//   constraint-based  PC, PC-stable            skeleton + collider orientation
//                     GSBN                     Markov blankets -> skeleton
//                     F2SL-c                   feature selection -> skeleton
//   score-based       GES                      equivalence-class greedy search
//                     MMHC, F2SL-s             constrained hill climbing
//
// Constraint-based learners run against any CiSource (including the
// d-separation oracle) and return a completed PDAG. Score-based learners need
// an actual dataset; they return the DAG the search ended on together with
// its equivalence class, so `graph` is always a class representative of `dag`
// whenever `dag` is present.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "causal/ci.hpp"
#include "causal/common.hpp"
#include "causal/dataset.hpp"
#include "causal/graph.hpp"
#include "causal/score.hpp"

namespace causal {

enum class GlobalAlgorithm {
    Pc,
    PcStable,
    Ges,
    Gsbn,
    Mmhc,
    F2slC,
    F2slS,
};

std::vector<GlobalAlgorithm> all_global_algorithms();
std::string global_algorithm_name(GlobalAlgorithm a);

// Case- and punctuation-insensitive ("pc_stable" == "PC-stable"). Throws
// UnknownAlgorithm otherwise.
GlobalAlgorithm parse_global_algorithm(const std::string& name);

// GES, MMHC and F2SL-s optimize a data score, so they cannot run against a
// CI oracle alone.
bool is_score_based(GlobalAlgorithm a);

// Separating sets observed on the way, keyed by unordered pair (min, max).
using SepsetMap = std::map<std::pair<int, int>, NodeSet>;

struct SkeletonResult {
    Pdag skeleton;  // undirected edges only
    SepsetMap sepsets;
    std::int64_t n_ci_tests = 0;
};

// The PC adjacency search. Starts from the complete graph and, level by
// level, removes any edge x - y for which some conditioning set of the
// current level's size drawn from the neighbors of x (or of y) makes the
// pair independent; the witness is recorded in `sepsets`. The stable variant
// freezes every node's neighbor set for the duration of each level and runs
// the subset search in name order, which makes skeleton and witnesses alike
// independent of variable order. Levels stop at the source's max_cond.
// Needs at least two variables (Precondition).
SkeletonResult pc_skeleton(CiSource& ci, bool stable,
                           const std::vector<std::string>& names = {});

// Collider orientation plus Meek closure. Every unshielded triple x - z - y
// whose recorded sepset(x, y) omits z proposes x -> z <- y; the proposals
// are applied together, so none can overwrite another, and the Meek rules
// are then closed in the same simultaneous style. An edge whose proposals
// disagree — at either stage — stays undirected, and `n_conflicts` (when
// given) counts such edges. Triples whose endpoint pair has no recorded
// sepset are skipped. On conflict-free input the result is exactly the
// standard Meek closure of the oriented skeleton.
Pdag orient_colliders(const Pdag& skeleton, const SepsetMap& sepsets,
                      int* n_conflicts = nullptr);

// One candidate move of the GES search: Insert(x, y, T) adds x -> y and
// orients t -> y for each t in `set`; Delete(x, y, H) removes x - y (or
// x -> y) and orients y -> h, x -> h for each h in `set`. `delta` is the
// score change of the move, measured on any consistent extension.
struct GesOperator {
    bool insert = true;
    int x = -1;
    int y = -1;
    NodeSet set;  // T for inserts, H for deletes
    double delta = 0.0;
};

// All valid GES operators for a completed PDAG, in a fixed order: inserts
// before deletes, each block sorted by (x, y, subset bitmask). Validity and
// deltas follow the standard equivalence-class characterization (the
// neighbor-clique and blocked-path conditions); deltas price only the one
// local score that changes.
std::vector<GesOperator> ges_operators(const Pdag& state, ScoreCache& cache);

// Applies one operator to a completed PDAG and recanonicalizes, returning
// the completed PDAG of the modified class.
Pdag apply_ges_operator(const Pdag& state, const GesOperator& op);

// Greedy DAG search from the empty graph. Moves are single-edge additions
// (restricted to pairs that `skeleton` joins), deletions, and reversals;
// each move must keep the graph acyclic and strictly improve the score, and
// ties go to the move enumerated first (additions, deletions, reversals,
// each sorted by edge). `n_score_evals` (when given) accumulates distinct
// local-score evaluations; cached lookups are free.
Dag hill_climb_restricted(const Dataset& data, const Pdag& skeleton,
                          ScoreParams params,
                          std::int64_t* n_score_evals = nullptr);

struct GlobalOptions {
    // Data overload only: significance level and conditioning cap of the
    // internal CI source used by the constraint-based learners.
    double alpha = 0.05;
    int max_cond = DataCi::kDefaultMaxCond;

    // Score-based learners.
    ScoreParams score;

    // CI overload only: node names for the output graphs ("v0", "v1", ...
    // when empty).
    std::vector<std::string> names;
};

struct StructureResult {
    // Constraint-based learners: the learned completed PDAG. Score-based
    // learners: the equivalence class of `dag`.
    Pdag graph;

    // The concrete DAG a score-based search ended on; empty otherwise.
    std::optional<Dag> dag;

    std::string algorithm;
    std::int64_t n_ci_tests = 0;     // distinct CI tests performed by this call
    std::int64_t n_score_evals = 0;  // distinct local scores evaluated by this call
    int n_collider_conflicts = 0;    // edges left undirected by disagreement
    double elapsed = 0.0;            // wall seconds
};

// Learns a global structure from a CI source. Supports the constraint-based
// algorithms only; score-based choices throw Unsupported since no dataset is
// available to score. Fewer than two variables yields the empty graph.
StructureResult learn_global(CiSource& ci, GlobalAlgorithm algorithm,
                             const GlobalOptions& options = {});
StructureResult learn_global(CiSource& ci, const std::string& algorithm,
                             const GlobalOptions& options = {});

// Learns a global structure from data; all seven algorithms. The
// constraint-based ones run over an internal DataCi built with
// options.alpha / options.max_cond.
StructureResult learn_global(const Dataset& data, GlobalAlgorithm algorithm,
                             const GlobalOptions& options = {});
StructureResult learn_global(const Dataset& data, const std::string& algorithm,
                             const GlobalOptions& options = {});

} // namespace causal
