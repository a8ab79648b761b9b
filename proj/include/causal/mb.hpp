#pragma once

// The fifteen Markov-blanket learners, in two families that share the CI
// plumbing. The grow-shrink family (GS, IAMB, interIAMB, IAMBnPC,
// interIAMBnPC, Fast-IAMB, FBED) maintains one candidate blanket, growing it
// by dependence tests against the current estimate and shrinking it by
// conditional-independence removal. The topology family (MMMB, HITON-MB,
// PCMB, IPCMB, MBOR, STMB, BAMB, EEMB) first recovers the parent-child set
// around the target and then completes the blanket with spouses found
// through collider activation.
//
// Every learner is deterministic: candidates are examined in ascending node
// index, association ties resolve to the lower index, and subset searches
// enumerate lexicographically by increasing size. Under a faithfulness
// oracle (OracleCi) with its unlimited conditioning cap, every learner
// returns exactly parents ∪ children ∪ spouses of the target.

#include <cstdint>
#include <string>
#include <vector>

#include "causal/ci.hpp"
#include "causal/common.hpp"

namespace causal {

enum class MbAlgorithm {
    Gs,
    Iamb,
    InterIamb,
    IambNpc,
    InterIambNpc,
    FastIamb,
    Fbed,
    Mmmb,
    HitonMb,
    Pcmb,
    Ipcmb,
    Mbor,
    Stmb,
    Bamb,
    Eemb,
};

// All fifteen, in the fixed presentation order above.
const std::vector<MbAlgorithm>& all_mb_algorithms();

// Canonical spelling ("GS", "interIAMB", "HITON-MB", ...).
std::string mb_algorithm_name(MbAlgorithm a);

// Case-insensitive lookup, tolerant of '-'/'_' variation; throws
// ErrorKind::UnknownAlgorithm for anything not in the registry.
MbAlgorithm parse_mb_algorithm(const std::string& name);

// True for the grow-shrink family, false for the topology family.
bool is_grow_shrink(MbAlgorithm a);

struct MbResult {
    int target = -1;
    NodeSet mb;
    NodeSet pc;  // populated by the topology family only; pc ⊆ mb
    std::string algorithm;
    std::int64_t n_ci_tests = 0;  // distinct CI tests performed by this call
    double elapsed = 0.0;         // wall seconds
};

struct MbOptions {
    int fbed_k = 1;  // extra forward passes in FBED
};

// Dispatch by algorithm; the CI source supplies alpha and the conditioning
// cap. Throws UnknownNode for a bad target and UnknownAlgorithm via the
// string overload for names outside the registry.
MbResult learn_mb(CiSource& ci, int target, MbAlgorithm algorithm, const MbOptions& options = {});
MbResult learn_mb(CiSource& ci, int target, const std::string& algorithm,
                  const MbOptions& options = {});

// The two family entry points; `variant` must belong to the family.
MbResult grow_shrink_mb(CiSource& ci, int target, MbAlgorithm variant,
                        const MbOptions& options = {});
MbResult topology_mb(CiSource& ci, int target, MbAlgorithm variant);

// Spouse completion given an already-discovered parent-child set: for each
// Y ∈ pc and each X adjacent to Y (but not to the target), X is a spouse
// when some separating set Z renders X independent of the target while
// Z ∪ {Y} restores dependence (collider activation through the shared
// child Y).
NodeSet find_spouses(CiSource& ci, int target, const NodeSet& pc);

} // namespace causal
