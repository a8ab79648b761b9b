#pragma once

// Evaluation layer: accuracy metrics for node-set outputs (Markov blankets,
// PC sets) and structure outputs (PDAGs against a ground-truth DAG), plus the
// efficiency snapshot every benchmark row carries.
//
// Structure comparison happens in orientation-class space: the truth DAG is
// converted to its CPDAG and each variable pair is classified as nonadjacent,
// directed (either way), or undirected. SHD is then the number of pairs whose
// classes disagree — equivalently the minimal number of single-edge edits
// (add, remove, or change orientation class) turning the learned graph into
// the true CPDAG, since one edit fixes exactly one pair and no edit fixes two.

#include <cstdint>
#include <string>

#include "causal/ci.hpp"
#include "causal/common.hpp"
#include "causal/graph.hpp"
#include "causal/score.hpp"

namespace causal {

// Precision/recall family for set-valued outputs. distance is the Euclidean
// distance from the ideal corner: sqrt((1-p)^2 + (1-r)^2), in [0, sqrt(2)].
struct SetMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double distance = 0.0;

    bool operator==(const SetMetrics&) const = default;
};

// The ten accuracy values reported for a learned structure. Arrowhead (ar_*)
// metrics compare directed edges as ordered pairs; adjacency (ad_*) metrics
// compare skeletons. extra/missing count skeleton differences, reversed counts
// pairs adjacent on both sides whose orientation classes differ, and
// shd = extra_edges + missing_edges + reversed_edges.
struct StructureMetrics {
    double ar_precision = 0.0;
    double ar_recall = 0.0;
    double ar_f1 = 0.0;
    double ad_precision = 0.0;
    double ad_recall = 0.0;
    double ad_f1 = 0.0;
    int shd = 0;
    int extra_edges = 0;
    int missing_edges = 0;
    int reversed_edges = 0;

    bool operator==(const StructureMetrics&) const = default;
};

// The two efficiency values: wall-clock seconds around the learner call and
// the learner's work counter (CI tests for constraint-based learners, local
// score evaluations for score-based ones; hybrids report the sum via two
// snapshots). Only distinct evaluations count — a cached answer is a lookup,
// not work performed, matching the CiCounter convention.
struct EfficiencyMetrics {
    double elapsed_seconds = 0.0;
    std::int64_t n_ci_tests_or_score_evals = 0;
};

// Precision/recall of a learned node set against the true one. Empty-set
// conventions keep benchmark tables total: an empty learned set has precision
// 1 when the truth is also empty and 0 otherwise, and recall mirrors that with
// the roles swapped. f1 is 0 whenever precision + recall is 0, so
// f1(learned, truth) == f1(truth, learned) for all inputs.
SetMetrics compare_sets(const NodeSet& learned, const NodeSet& truth);

// Compares a learned PDAG to the CPDAG of the truth DAG. Nodes are matched by
// name, so the two graphs may index their shared universe in different orders;
// a differing node count or name set throws Mismatch. The learned graph does
// not have to be a valid CPDAG (or even orientable) — every PDAG classifies
// each pair into an orientation class, which is all the metrics need.
StructureMetrics compare_structure(const Pdag& learned, const Dag& truth);

// Efficiency snapshots. The CiCounter form reports total_tests; the
// ScoreCache form reports evaluations(). Negative elapsed values are clamped
// to zero.
EfficiencyMetrics record_efficiency(const CiCounter& counter, double elapsed_seconds);
EfficiencyMetrics record_efficiency(const ScoreCache& cache, double elapsed_seconds);

// Flat JSON objects with exactly the struct field names as keys; benchmark
// CSV columns reuse the same names. Doubles render in shortest round-trip
// form, so equal values always serialize to identical bytes.
std::string to_json(const SetMetrics& m);
std::string to_json(const StructureMetrics& m);
std::string to_json(const EfficiencyMetrics& m);

}  // namespace causal
