#include "causal/score.hpp"

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "causal/special.hpp"

namespace causal {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_score_args(const Dataset& data, int node, const NodeSet& parents) {
    const int p = data.n_columns();
    if (node < 0 || node >= p)
        throw Error(ErrorKind::UnknownNode, "score: node index " + std::to_string(node) +
                                                " out of range for " + std::to_string(p) + " columns");
    for (int v : parents)
        if (v < 0 || v >= p)
            throw Error(ErrorKind::UnknownNode, "score: parent index " + std::to_string(v) +
                                                    " out of range for " + std::to_string(p) + " columns");
    if (set_contains(parents, node))
        throw Error(ErrorKind::Precondition,
                    "score: node " + data.columns[static_cast<std::size_t>(node)].name +
                        " cannot be its own parent");
}

// Parent-configuration index of one row, mixed radix with the last (largest
// index) parent varying fastest — the same layout the CPTs use.
long long parent_config(const Dataset& data, const NodeSet& parents, std::int64_t row) {
    long long j = 0;
    for (int p : parents) {
        const auto& col = data.columns[static_cast<std::size_t>(p)];
        j = j * col.cardinality + col.ints[static_cast<std::size_t>(row)];
    }
    return j;
}

// Counts n_jk for the observed parent configurations only; configurations
// that never occur contribute nothing to either discrete score.
std::map<long long, std::vector<long long>> count_table(const Dataset& data, int node,
                                                        const NodeSet& parents) {
    const auto& ncol = data.columns[static_cast<std::size_t>(node)];
    std::map<long long, std::vector<long long>> counts;
    for (std::int64_t i = 0; i < data.n; ++i) {
        auto& cell = counts[parent_config(data, parents, i)];
        if (cell.empty()) cell.assign(static_cast<std::size_t>(ncol.cardinality), 0);
        ++cell[static_cast<std::size_t>(ncol.ints[static_cast<std::size_t>(i)])];
    }
    return counts;
}

void require_discrete(const Dataset& data, int node, const NodeSet& parents, const char* what) {
    auto check = [&](int v) {
        if (!data.columns[static_cast<std::size_t>(v)].discrete())
            throw Error(ErrorKind::Unsupported,
                        std::string(what) + ": column " + data.columns[static_cast<std::size_t>(v)].name +
                            " is not discrete");
    };
    check(node);
    for (int v : parents) check(v);
}

// Number of parent configurations q = product of parent cardinalities.
double config_count(const Dataset& data, const NodeSet& parents) {
    double q = 1.0;
    for (int p : parents) q *= static_cast<double>(data.columns[static_cast<std::size_t>(p)].cardinality);
    return q;
}

// BIC for a continuous node: ordinary least squares on the parents plus an
// intercept, scored by the Gaussian likelihood at the MLE variance.
double bic_continuous(const Dataset& data, int node, const NodeSet& parents) {
    const std::int64_t n = data.n;
    const int p = static_cast<int>(parents.size());
    const int m = p + 1;  // intercept first, then parents in sorted order
    const auto& y = data.columns[static_cast<std::size_t>(node)].reals;

    // Normal equations X^T X b = X^T y.
    std::vector<double> xtx(static_cast<std::size_t>(m * m), 0.0);
    std::vector<double> xty(static_cast<std::size_t>(m), 0.0);
    std::vector<double> xrow(static_cast<std::size_t>(m), 1.0);
    for (std::int64_t i = 0; i < n; ++i) {
        for (int a = 0; a < p; ++a)
            xrow[static_cast<std::size_t>(a + 1)] =
                data.columns[static_cast<std::size_t>(parents[static_cast<std::size_t>(a)])]
                    .reals[static_cast<std::size_t>(i)];
        for (int a = 0; a < m; ++a) {
            for (int b = a; b < m; ++b)
                xtx[static_cast<std::size_t>(a * m + b)] +=
                    xrow[static_cast<std::size_t>(a)] * xrow[static_cast<std::size_t>(b)];
            xty[static_cast<std::size_t>(a)] += xrow[static_cast<std::size_t>(a)] * y[static_cast<std::size_t>(i)];
        }
    }
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < a; ++b)
            xtx[static_cast<std::size_t>(a * m + b)] = xtx[static_cast<std::size_t>(b * m + a)];

    // Gauss-Jordan solve with partial pivoting.
    std::vector<double> beta = xty;
    std::vector<double> work = xtx;
    for (int col = 0; col < m; ++col) {
        int pivot = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(work[static_cast<std::size_t>(r * m + col)]) >
                std::abs(work[static_cast<std::size_t>(pivot * m + col)]))
                pivot = r;
        if (std::abs(work[static_cast<std::size_t>(pivot * m + col)]) < 1e-10)
            throw Error(ErrorKind::Degenerate, "bic: singular regression for node " +
                                                   data.columns[static_cast<std::size_t>(node)].name);
        if (pivot != col) {
            for (int c = 0; c < m; ++c)
                std::swap(work[static_cast<std::size_t>(pivot * m + c)],
                          work[static_cast<std::size_t>(col * m + c)]);
            std::swap(beta[static_cast<std::size_t>(pivot)], beta[static_cast<std::size_t>(col)]);
        }
        const double scale = 1.0 / work[static_cast<std::size_t>(col * m + col)];
        for (int c = 0; c < m; ++c) work[static_cast<std::size_t>(col * m + c)] *= scale;
        beta[static_cast<std::size_t>(col)] *= scale;
        for (int r = 0; r < m; ++r) {
            if (r == col) continue;
            const double f = work[static_cast<std::size_t>(r * m + col)];
            if (f == 0.0) continue;
            for (int c = 0; c < m; ++c)
                work[static_cast<std::size_t>(r * m + c)] -= f * work[static_cast<std::size_t>(col * m + c)];
            beta[static_cast<std::size_t>(r)] -= f * beta[static_cast<std::size_t>(col)];
        }
    }

    double rss = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        double fit = beta[0];
        for (int a = 0; a < p; ++a)
            fit += beta[static_cast<std::size_t>(a + 1)] *
                   data.columns[static_cast<std::size_t>(parents[static_cast<std::size_t>(a)])]
                       .reals[static_cast<std::size_t>(i)];
        const double e = y[static_cast<std::size_t>(i)] - fit;
        rss += e * e;
    }
    const double sigma2 = rss / static_cast<double>(n);
    if (!(sigma2 > 0.0))
        throw Error(ErrorKind::Degenerate, "bic: zero residual variance for node " +
                                               data.columns[static_cast<std::size_t>(node)].name);
    const double loglik =
        -0.5 * static_cast<double>(n) * (std::log(2.0 * kPi * sigma2) + 1.0);
    const double penalty = 0.5 * std::log(static_cast<double>(n)) * static_cast<double>(p + 2);
    return loglik - penalty;
}

} // namespace

LocalScore bdeu_local(const Dataset& data, int node, const NodeSet& parents, double ess) {
    check_score_args(data, node, parents);
    if (!(ess > 0.0)) throw Error(ErrorKind::Validation, "bdeu: ess must be positive");
    require_discrete(data, node, parents, "bdeu");
    LocalScore out{node, parents, 0.0};
    if (data.n == 0) return out;

    const double r = static_cast<double>(data.columns[static_cast<std::size_t>(node)].cardinality);
    const double q = config_count(data, parents);
    const double a_j = ess / q;
    const double a_jk = ess / (q * r);
    const double lg_a_j = log_gamma(a_j);
    const double lg_a_jk = log_gamma(a_jk);

    double value = 0.0;
    for (const auto& [j, njk] : count_table(data, node, parents)) {
        long long n_j = 0;
        for (long long c : njk) n_j += c;
        value += lg_a_j - log_gamma(a_j + static_cast<double>(n_j));
        for (long long c : njk)
            if (c > 0) value += log_gamma(a_jk + static_cast<double>(c)) - lg_a_jk;
    }
    out.value = value;
    return out;
}

LocalScore bic_local(const Dataset& data, int node, const NodeSet& parents) {
    check_score_args(data, node, parents);
    LocalScore out{node, parents, 0.0};
    if (data.n == 0) return out;

    if (!data.columns[static_cast<std::size_t>(node)].discrete()) {
        for (int v : parents)
            if (data.columns[static_cast<std::size_t>(v)].discrete())
                throw Error(ErrorKind::Unsupported,
                            "bic: discrete parent of continuous node " +
                                data.columns[static_cast<std::size_t>(node)].name);
        out.value = bic_continuous(data, node, parents);
        return out;
    }

    require_discrete(data, node, parents, "bic");
    const double n = static_cast<double>(data.n);
    const double r = static_cast<double>(data.columns[static_cast<std::size_t>(node)].cardinality);
    const double q = config_count(data, parents);
    double loglik = 0.0;
    for (const auto& [j, njk] : count_table(data, node, parents)) {
        long long n_j = 0;
        for (long long c : njk) n_j += c;
        for (long long c : njk)
            if (c > 0)
                loglik += static_cast<double>(c) *
                          std::log(static_cast<double>(c) / static_cast<double>(n_j));
    }
    out.value = loglik - 0.5 * std::log(n) * (r - 1.0) * q;
    return out;
}

ScoreCache::ScoreCache(const Dataset& data, ScoreParams params) : data_(&data), params_(params) {
    if (params.kind == ScoreKind::Bdeu && !(params.ess > 0.0))
        throw Error(ErrorKind::Validation, "bdeu: ess must be positive");
}

double ScoreCache::local(int node, const NodeSet& parents) {
    const auto key = std::make_pair(node, parents);
    if (auto it = cache_.find(key); it != cache_.end()) {
        ++hits_;
        return it->second;
    }
    const double value = params_.kind == ScoreKind::Bdeu
                             ? bdeu_local(*data_, node, parents, params_.ess).value
                             : bic_local(*data_, node, parents).value;
    ++evaluations_;
    cache_.emplace(key, value);
    return value;
}

double score_dag(const Dag& g, ScoreCache& cache) {
    if (g.node_count() != cache.data().n_columns())
        throw Error(ErrorKind::Mismatch, "score: graph has " + std::to_string(g.node_count()) +
                                             " nodes but the data has " +
                                             std::to_string(cache.data().n_columns()) + " columns");
    if (!is_acyclic(g)) throw Error(ErrorKind::Cycle, "score: graph is not acyclic");
    double total = 0.0;
    for (int v = 0; v < g.node_count(); ++v) total += cache.local(v, g.parents(v));
    return total;
}

double score_dag(const Dataset& data, const Dag& g, ScoreParams params) {
    ScoreCache cache(data, params);
    return score_dag(g, cache);
}

} // namespace causal
