#pragma once

// Decomposable network scores (log scale) used by the score-based and hybrid
// structure learners, plus a per-search cache of local scores.
//
// Both scores are score-equivalent: Markov-equivalent DAGs receive the same
// total, which is what lets equivalence-class search (GES) work over DAG
// representatives. Local scores depend only on (node, parent set), so a DAG
// score is the plain sum of its locals and search moves can be priced by
// rescoring the touched nodes alone.

#include <cstdint>
#include <map>
#include <utility>

#include "causal/common.hpp"
#include "causal/dataset.hpp"
#include "causal/graph.hpp"

namespace causal {

enum class ScoreKind {
    Bdeu,  // discrete data only
    Bic,   // discrete or continuous data
};

struct ScoreParams {
    ScoreKind kind = ScoreKind::Bdeu;
    double ess = 1.0;  // BDeu equivalent sample size

    bool operator==(const ScoreParams&) const = default;
};

// One evaluated local score.
struct LocalScore {
    int node = 0;
    NodeSet parents;
    double value = 0.0;  // log scale
};

// log BDeu local score with a uniform structure prior:
//   sum over parent configs j of
//     lnG(a_j) - lnG(a_j + n_j) + sum_k [lnG(a_jk + n_jk) - lnG(a_jk)]
// with a_jk = ess/(q*r), a_j = ess/q, r the node cardinality and q the
// parent-configuration count. Unobserved configurations contribute zero, so
// only observed ones are enumerated. An empty dataset scores 0.
//
// Errors: non-discrete columns (Unsupported), ess <= 0 (Validation),
// node in parents (Precondition), bad indices (UnknownNode).
LocalScore bdeu_local(const Dataset& data, int node, const NodeSet& parents, double ess);

// BIC local score.
//   discrete:   max log-likelihood - 0.5*ln(n)*(r-1)*q
//   continuous: Gaussian log-likelihood of the least-squares model of the
//               node on its parents (with intercept) - 0.5*ln(n)*(|parents|+2)
// The node and its parents must share one data kind; an empty dataset scores
// 0. A singular regression or zero residual variance raises Degenerate.
LocalScore bic_local(const Dataset& data, int node, const NodeSet& parents);

// Cache of local scores for one search over one dataset. Cached values equal
// recomputation bit-exactly (same code path). Not synchronized: each search
// confines its cache to a single thread.
class ScoreCache {
  public:
    ScoreCache(const Dataset& data, ScoreParams params);

    // Local score of node given parents, computing it on first use.
    double local(int node, const NodeSet& parents);

    // Number of fresh evaluations and of cache hits so far.
    std::int64_t evaluations() const { return evaluations_; }
    std::int64_t hits() const { return hits_; }

    const Dataset& data() const { return *data_; }
    const ScoreParams& params() const { return params_; }

  private:
    const Dataset* data_;
    ScoreParams params_;
    std::int64_t evaluations_ = 0;
    std::int64_t hits_ = 0;
    std::map<std::pair<int, NodeSet>, double> cache_;
};

// Total score of a DAG: the sum of its local scores. The graph must have one
// node per data column (Mismatch otherwise).
double score_dag(const Dataset& data, const Dag& g, ScoreParams params);
double score_dag(const Dag& g, ScoreCache& cache);

} // namespace causal
