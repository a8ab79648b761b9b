#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "causal/ci.hpp"
#include "causal/common.hpp"
#include "causal/graph.hpp"

namespace causal {

// --- parent-child set discovery -------------------------------------------
//
// Shared subroutine for the local learners and the hybrid global learners:
// estimate PC(target) from conditional-independence queries alone. The
// variants differ in admission strategy; all of them record a separating set
// for every candidate they reject, which is what the orientation stages
// later consume.

enum class PcVariant {
    Mmpc,    // max-min admission with backward removal
    HitonPc, // admission by marginal strength, elimination interleaved
    GetPc,   // HITON-PC plus the symmetry filter (x kept iff target in PC(x))
};

const std::vector<PcVariant>& all_pc_variants();
std::string pc_variant_name(PcVariant variant);        // "MMPC", "HITON-PC", "GetPC"
PcVariant parse_pc_variant(const std::string& name);   // case/separator-insensitive

struct PcSetResult {
    int target = -1;
    NodeSet pc;
    // Separating set for every rejected candidate, keyed by node index. For
    // GetPC this includes candidates removed by the symmetry filter (the
    // reverse run's rejection recorded the set).
    std::map<int, NodeSet> sepsets;
    std::string variant;
    std::int64_t n_ci_tests = 0;
};

PcSetResult learn_pc_set(CiSource& ci, int target, PcVariant variant);
PcSetResult learn_pc_set(CiSource& ci, int target, const std::string& variant);

// --- local structure learning ----------------------------------------------
//
// The four local algorithms learn the parents and children of one target,
// orienting edges where the discovered v-structures and their Meek closure
// compel a direction. Edges whose direction is not compelled stay in
// undirected_neighbors; the spouses field of the returned structure is
// always empty (these learners classify the adjacency only).

enum class LocalAlgorithm {
    PcdByPcd, // PC-set expansion outward from the target
    MbByMb,   // blanket expansion, adjacency extracted from each blanket
    Cmb,      // blanket of the target first, expansion only when unresolved
    LcsFs,    // forward-backward selection in place of full PC discovery
};

const std::vector<LocalAlgorithm>& all_local_algorithms();
std::string local_algorithm_name(LocalAlgorithm algorithm); // Table names, e.g. "PCD-by-PCD"
LocalAlgorithm parse_local_algorithm(const std::string& name);

struct LocalResult {
    LocalStructure structure;
    std::string algorithm;
    // Nodes whose neighborhood was learned, in expansion order (the target
    // is always first). A pure function of the inputs.
    std::vector<int> visited;
    std::int64_t n_ci_tests = 0;
    double elapsed = 0.0;
};

struct LocalOptions {
    // Upper bound on the number of nodes the expansion may visit; 0 means
    // no bound beyond the node count itself.
    int max_visited = 0;
};

LocalResult learn_local(CiSource& ci, int target, LocalAlgorithm algorithm,
                        const LocalOptions& options = {});
LocalResult learn_local(CiSource& ci, int target, const std::string& algorithm,
                        const LocalOptions& options = {});

} // namespace causal
