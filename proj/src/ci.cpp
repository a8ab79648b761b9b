#include "causal/ci.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "causal/special.hpp"

namespace causal {

namespace {

void check_test_args(int n_vars, int x, int y, const NodeSet& z, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error(ErrorKind::Validation, "alpha must lie strictly between 0 and 1");
    if (x < 0 || x >= n_vars || y < 0 || y >= n_vars)
        throw Error(ErrorKind::UnknownNode, "ci test: variable index out of range");
    if (x == y) throw Error(ErrorKind::Precondition, "ci test: x and y must differ");
    if (set_contains(z, x) || set_contains(z, y))
        throw Error(ErrorKind::Precondition, "ci test: x and y must not appear in z");
    for (int v : z)
        if (v < 0 || v >= n_vars)
            throw Error(ErrorKind::UnknownNode, "ci test: conditioning index out of range");
}

} // namespace

CiDecision g2_test(const Dataset& data, int x, int y, const NodeSet& z, double alpha) {
    check_test_args(data.n_columns(), x, y, z, alpha);
    if (x > y) std::swap(x, y);  // exact symmetry, down to summation order
    NodeSet involved = z;
    set_insert(involved, x);
    set_insert(involved, y);
    for (int v : involved)
        if (!data.columns[static_cast<std::size_t>(v)].discrete())
            throw Error(ErrorKind::Unsupported,
                        "g2 test: column " + data.columns[static_cast<std::size_t>(v)].name +
                            " is not discrete");

    const int rx = data.columns[static_cast<std::size_t>(x)].cardinality;
    const int ry = data.columns[static_cast<std::size_t>(y)].cardinality;
    long long strata = 1;
    for (int v : z) strata *= data.columns[static_cast<std::size_t>(v)].cardinality;
    const long long nominal_dof =
        static_cast<long long>(rx - 1) * static_cast<long long>(ry - 1) * strata;

    CiDecision d;
    // Heuristic power rule: fewer than 5 samples per nominal degree of
    // freedom cannot support the test; report an (unreliable) independence.
    if (nominal_dof < 1 || data.n < 5 * nominal_dof) {
        d.statistic = 0.0;
        d.p_value = 1.0;
        d.dof = std::max<long long>(nominal_dof, 1);
        d.independent = true;
        d.reliable = false;
        return d;
    }

    // One rx × ry contingency table per z-configuration.
    std::vector<long long> counts(static_cast<std::size_t>(strata * rx * ry), 0);
    const auto& cx = data.columns[static_cast<std::size_t>(x)].ints;
    const auto& cy = data.columns[static_cast<std::size_t>(y)].ints;
    for (std::int64_t i = 0; i < data.n; ++i) {
        long long s = 0;
        for (int v : z) {
            const auto& col = data.columns[static_cast<std::size_t>(v)];
            s = s * col.cardinality + col.ints[static_cast<std::size_t>(i)];
        }
        ++counts[static_cast<std::size_t>((s * rx + cx[static_cast<std::size_t>(i)]) * ry +
                                          cy[static_cast<std::size_t>(i)])];
    }

    double g2 = 0.0;
    long long dof = 0;
    std::vector<long long> row_total(static_cast<std::size_t>(rx));
    std::vector<long long> col_total(static_cast<std::size_t>(ry));
    for (long long s = 0; s < strata; ++s) {
        const long long* table = counts.data() + s * rx * ry;
        std::fill(row_total.begin(), row_total.end(), 0);
        std::fill(col_total.begin(), col_total.end(), 0);
        long long total = 0;
        for (int a = 0; a < rx; ++a)
            for (int b = 0; b < ry; ++b) {
                const long long o = table[a * ry + b];
                row_total[static_cast<std::size_t>(a)] += o;
                col_total[static_cast<std::size_t>(b)] += o;
                total += o;
            }
        if (total == 0) continue;
        const long long nnz_rows = std::count_if(row_total.begin(), row_total.end(),
                                                 [](long long t) { return t > 0; });
        const long long nnz_cols = std::count_if(col_total.begin(), col_total.end(),
                                                 [](long long t) { return t > 0; });
        dof += std::max<long long>(nnz_rows - 1, 0) * std::max<long long>(nnz_cols - 1, 0);
        for (int a = 0; a < rx; ++a)
            for (int b = 0; b < ry; ++b) {
                const long long o = table[a * ry + b];
                if (o == 0) continue;
                const double expected =
                    static_cast<double>(row_total[static_cast<std::size_t>(a)]) *
                    static_cast<double>(col_total[static_cast<std::size_t>(b)]) /
                    static_cast<double>(total);
                g2 += 2.0 * static_cast<double>(o) * std::log(static_cast<double>(o) / expected);
            }
    }
    if (g2 < 0.0) g2 = 0.0;  // guard against tiny negative rounding residue

    d.statistic = g2;
    d.dof = std::max<long long>(dof, 1);
    d.p_value = chi2_sf(g2, static_cast<double>(d.dof));
    d.independent = d.p_value > alpha;
    d.reliable = true;
    return d;
}

CiDecision fisher_z_test(const Dataset& data, int x, int y, const NodeSet& z, double alpha) {
    check_test_args(data.n_columns(), x, y, z, alpha);
    if (x > y) std::swap(x, y);  // exact symmetry, down to summation order
    // Variable order in the working matrix: x, y, then z ascending.
    std::vector<int> vars = {x, y};
    vars.insert(vars.end(), z.begin(), z.end());
    const int m = static_cast<int>(vars.size());
    for (int v : vars)
        if (data.columns[static_cast<std::size_t>(v)].discrete())
            throw Error(ErrorKind::Unsupported,
                        "fisher-z test: column " + data.columns[static_cast<std::size_t>(v)].name +
                            " is not continuous");
    const std::int64_t n = data.n;
    const long long zsize = static_cast<long long>(z.size());
    if (n <= zsize + 3)
        throw Error(ErrorKind::InsufficientData,
                    "fisher-z test: need n > |z| + 3, have n = " + std::to_string(n));

    // Correlation matrix over the involved columns.
    std::vector<double> mean(static_cast<std::size_t>(m), 0.0);
    for (int a = 0; a < m; ++a) {
        const auto& col = data.columns[static_cast<std::size_t>(vars[static_cast<std::size_t>(a)])].reals;
        for (std::int64_t i = 0; i < n; ++i) mean[static_cast<std::size_t>(a)] += col[static_cast<std::size_t>(i)];
        mean[static_cast<std::size_t>(a)] /= static_cast<double>(n);
    }
    std::vector<double> cov(static_cast<std::size_t>(m * m), 0.0);
    for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b) {
            const auto& ca = data.columns[static_cast<std::size_t>(vars[static_cast<std::size_t>(a)])].reals;
            const auto& cb = data.columns[static_cast<std::size_t>(vars[static_cast<std::size_t>(b)])].reals;
            double s = 0.0;
            for (std::int64_t i = 0; i < n; ++i)
                s += (ca[static_cast<std::size_t>(i)] - mean[static_cast<std::size_t>(a)]) *
                     (cb[static_cast<std::size_t>(i)] - mean[static_cast<std::size_t>(b)]);
            cov[static_cast<std::size_t>(a * m + b)] = cov[static_cast<std::size_t>(b * m + a)] = s;
        }
    for (int a = 0; a < m; ++a)
        if (!(cov[static_cast<std::size_t>(a * m + a)] > 0.0))
            throw Error(ErrorKind::Degenerate, "fisher-z test: constant column in the inputs");
    std::vector<double> corr(static_cast<std::size_t>(m * m), 0.0);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            corr[static_cast<std::size_t>(a * m + b)] =
                cov[static_cast<std::size_t>(a * m + b)] /
                std::sqrt(cov[static_cast<std::size_t>(a * m + a)] *
                          cov[static_cast<std::size_t>(b * m + b)]);

    double r;
    if (m == 2) {
        // Marginal correlation needs no inversion; this also keeps a perfectly
        // collinear pair on the clamp path instead of the singular-matrix path.
        r = corr[1];
    } else {
        // Invert by Gauss-Jordan with partial pivoting; the partial correlation
        // falls out of the precision matrix.
        std::vector<double> inv(static_cast<std::size_t>(m * m), 0.0);
        for (int a = 0; a < m; ++a) inv[static_cast<std::size_t>(a * m + a)] = 1.0;
        std::vector<double> work = corr;
        for (int col = 0; col < m; ++col) {
            int pivot = col;
            for (int row = col + 1; row < m; ++row)
                if (std::abs(work[static_cast<std::size_t>(row * m + col)]) >
                    std::abs(work[static_cast<std::size_t>(pivot * m + col)]))
                    pivot = row;
            const double pv = work[static_cast<std::size_t>(pivot * m + col)];
            if (std::abs(pv) < 1e-12)
                throw Error(ErrorKind::Degenerate, "fisher-z test: singular correlation matrix");
            if (pivot != col)
                for (int c = 0; c < m; ++c) {
                    std::swap(work[static_cast<std::size_t>(pivot * m + c)],
                              work[static_cast<std::size_t>(col * m + c)]);
                    std::swap(inv[static_cast<std::size_t>(pivot * m + c)],
                              inv[static_cast<std::size_t>(col * m + c)]);
                }
            const double scale = 1.0 / work[static_cast<std::size_t>(col * m + col)];
            for (int c = 0; c < m; ++c) {
                work[static_cast<std::size_t>(col * m + c)] *= scale;
                inv[static_cast<std::size_t>(col * m + c)] *= scale;
            }
            for (int row = 0; row < m; ++row) {
                if (row == col) continue;
                const double f = work[static_cast<std::size_t>(row * m + col)];
                if (f == 0.0) continue;
                for (int c = 0; c < m; ++c) {
                    work[static_cast<std::size_t>(row * m + c)] -= f * work[static_cast<std::size_t>(col * m + c)];
                    inv[static_cast<std::size_t>(row * m + c)] -= f * inv[static_cast<std::size_t>(col * m + c)];
                }
            }
        }
        r = -inv[static_cast<std::size_t>(0 * m + 1)] /
            std::sqrt(inv[static_cast<std::size_t>(0 * m + 0)] *
                      inv[static_cast<std::size_t>(1 * m + 1)]);
    }
    const double clamp = 1.0 - 1e-12;
    r = std::clamp(r, -clamp, clamp);

    CiDecision d;
    d.statistic = 0.5 * std::log((1.0 + r) / (1.0 - r)) *
                  std::sqrt(static_cast<double>(n) - static_cast<double>(zsize) - 3.0);
    d.dof = n - zsize - 3;
    d.p_value = 2.0 * normal_sf(std::abs(d.statistic));
    if (d.p_value > 1.0) d.p_value = 1.0;
    d.independent = d.p_value > alpha;
    d.reliable = true;
    return d;
}

CiDecision oracle_ci(const Dag& truth, int x, int y, const NodeSet& z) {
    const bool indep = d_separated(truth, x, y, z);
    CiDecision d;
    d.statistic = indep ? 0.0 : 1.0;
    d.p_value = indep ? 1.0 : 0.0;
    d.dof = 1;
    d.independent = indep;
    d.reliable = true;
    return d;
}

CiSource::CiSource(double alpha, int max_cond) : alpha_(alpha), max_cond_(max_cond) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error(ErrorKind::Validation, "alpha must lie strictly between 0 and 1");
    if (max_cond < 0)
        throw Error(ErrorKind::Validation, "max conditioning size must be nonnegative");
}

const CiDecision& CiSource::test(int x, int y, const NodeSet& z) {
    if (x > y) std::swap(x, y);  // symmetry by normalization
    const auto key = std::make_tuple(x, y, z);
    if (const auto it = counter_.cache.find(key); it != counter_.cache.end()) {
        ++counter_.cache_hits;
        return it->second;
    }
    const CiDecision d = evaluate(x, y, z);
    ++counter_.total_tests;
    ++counter_.tests_by_conditioning_size[static_cast<int>(z.size())];
    return counter_.cache.emplace(key, d).first->second;
}

double CiSource::assoc_strength(int x, int y, const NodeSet& z) {
    const CiDecision& d = test(x, y, z);
    if (!d.reliable) return 0.0;
    return 1.0 - d.p_value;
}

DataCi::DataCi(const Dataset& data, double alpha, int max_cond)
    : CiSource(alpha, max_cond), data_(data) {
    if (data.n_columns() == 0)
        throw Error(ErrorKind::Validation, "ci source: dataset has no columns");
    if (data.all_discrete())
        discrete_ = true;
    else if (data.all_continuous())
        discrete_ = false;
    else
        throw Error(ErrorKind::Unsupported, "ci source: mixed discrete/continuous data");
}

CiDecision DataCi::evaluate(int x, int y, const NodeSet& z) const {
    return discrete_ ? g2_test(data_, x, y, z, alpha()) : fisher_z_test(data_, x, y, z, alpha());
}

OracleCi::OracleCi(const Dag& truth, double alpha)
    : CiSource(alpha, kUnlimited), truth_(truth) {}

CiDecision OracleCi::evaluate(int x, int y, const NodeSet& z) const {
    return oracle_ci(truth_, x, y, z);
}

} // namespace causal
