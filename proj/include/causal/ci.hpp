#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <tuple>

#include "causal/common.hpp"
#include "causal/dataset.hpp"
#include "causal/graph.hpp"

namespace causal {

// Outcome of one conditional-independence decision.
struct CiDecision {
    double statistic = 0.0;
    double p_value = 1.0;
    long long dof = 1;
    bool independent = true;
    bool reliable = true;

    bool operator==(const CiDecision&) const = default;
};

// Evaluation bookkeeping: distinct statistic evaluations, a histogram by
// conditioning-set size, and the decision cache itself. Cache hits never
// count as tests.
struct CiCounter {
    long long total_tests = 0;
    long long cache_hits = 0;
    std::map<int, long long> tests_by_conditioning_size;
    std::map<std::tuple<int, int, NodeSet>, CiDecision> cache;
};

// G² likelihood-ratio test on discrete columns. Zero-observed cells are
// skipped in the sum; the reported dof drops (rows−1)(cols−1) degrees for
// structurally empty marginal rows/columns per stratum, clamped to >= 1.
// Reliability requires n >= 5 × nominal dof, where nominal dof is
// (r_x−1)(r_y−1)·prod(r_z); an unreliable decision is "independent" with
// p-value 1 and statistic 0, flagged reliable = false.
CiDecision g2_test(const Dataset& data, int x, int y, const NodeSet& z, double alpha);

// Fisher-z test on continuous columns: partial correlation via inversion of
// the correlation submatrix over {x, y} ∪ z, clamped to ±(1 − 1e-12), then
// statistic = 0.5·ln((1+r)/(1−r))·sqrt(n − |z| − 3) with a two-sided normal
// p-value. Throws Degenerate on singular submatrices, InsufficientData when
// n <= |z| + 3.
CiDecision fisher_z_test(const Dataset& data, int x, int y, const NodeSet& z, double alpha);

// Exact faithfulness oracle: independent iff d-separated, p-value 1 or 0.
CiDecision oracle_ci(const Dag& truth, int x, int y, const NodeSet& z);

// The abstraction every learner consumes: a cached, counted, symmetric CI
// source with its significance level and conditioning-size cap attached.
class CiSource {
public:
    static constexpr int kUnlimited = std::numeric_limits<int>::max();

    CiSource(double alpha, int max_cond);
    virtual ~CiSource() = default;

    // Cached decision for (x, y | z); symmetric in x and y by construction.
    const CiDecision& test(int x, int y, const NodeSet& z);
    bool independent(int x, int y, const NodeSet& z) { return test(x, y, z).independent; }
    bool dependent(int x, int y, const NodeSet& z) { return !test(x, y, z).independent; }

    // 1 − p of the decision; 0 when the decision is unreliable.
    double assoc_strength(int x, int y, const NodeSet& z);

    double alpha() const { return alpha_; }
    int max_cond() const { return max_cond_; }
    virtual int n_vars() const = 0;
    virtual std::string kind() const = 0;
    CiCounter& counter() { return counter_; }
    const CiCounter& counter() const { return counter_; }

protected:
    virtual CiDecision evaluate(int x, int y, const NodeSet& z) const = 0;

private:
    double alpha_;
    int max_cond_;
    CiCounter counter_;
};

// Sample-based source; picks G² or Fisher-z from the column kinds. Mixed
// datasets are rejected. Keeps only a reference to the data: the caller owns
// the dataset for the lifetime of the source.
class DataCi : public CiSource {
public:
    static constexpr int kDefaultMaxCond = 3;

    DataCi(const Dataset& data, double alpha, int max_cond = kDefaultMaxCond);

    int n_vars() const override { return data_.n_columns(); }
    std::string kind() const override { return discrete_ ? "g2" : "fisher-z"; }
    const Dataset& data() const { return data_; }

protected:
    CiDecision evaluate(int x, int y, const NodeSet& z) const override;

private:
    const Dataset& data_;
    bool discrete_;
};

// d-separation oracle source over a known DAG; unlimited conditioning size.
class OracleCi : public CiSource {
public:
    explicit OracleCi(const Dag& truth, double alpha = 0.05);

    int n_vars() const override { return truth_.node_count(); }
    std::string kind() const override { return "oracle"; }
    const Dag& truth() const { return truth_; }

protected:
    CiDecision evaluate(int x, int y, const NodeSet& z) const override;

private:
    const Dag& truth_;
};

} // namespace causal
