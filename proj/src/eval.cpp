#include "causal/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "json.hpp"

namespace causal {

namespace {

// |intersection| / denom with the totality conventions: an empty denominator
// set scores 1 against an empty counterpart and 0 against a nonempty one.
double safe_ratio(std::size_t intersection, std::size_t denom, std::size_t counterpart) {
    if (denom == 0) return counterpart == 0 ? 1.0 : 0.0;
    return static_cast<double>(intersection) / static_cast<double>(denom);
}

double f1_of(double precision, double recall) {
    const double sum = precision + recall;
    if (sum == 0.0) return 0.0;
    return 2.0 * precision * recall / sum;
}

double corner_distance(double precision, double recall) {
    const double dp = 1.0 - precision;
    const double dr = 1.0 - recall;
    return std::sqrt(dp * dp + dr * dr);
}

// Orientation class of one adjacent pair, keyed by (min, max).
enum class PairClass { MinToMax, MaxToMin, Undirected };

using PairClassMap = std::map<std::pair<int, int>, PairClass>;

// Classifies every edge of g, optionally relabeling nodes through to_common
// so graphs with different index orders land in one shared key space.
PairClassMap classify_pairs(const Pdag& g, const std::vector<int>& to_common) {
    PairClassMap classes;
    for (const auto& [p, c] : g.directed_edges()) {
        const int a = to_common[static_cast<size_t>(p)];
        const int b = to_common[static_cast<size_t>(c)];
        classes.emplace(std::minmax(a, b), a < b ? PairClass::MinToMax : PairClass::MaxToMin);
    }
    for (const auto& [x, y] : g.undirected_edges()) {
        const int a = to_common[static_cast<size_t>(x)];
        const int b = to_common[static_cast<size_t>(y)];
        classes.emplace(std::minmax(a, b), PairClass::Undirected);
    }
    return classes;
}

// Directed edges as ordered pairs in the shared key space.
std::set<std::pair<int, int>> arrow_set(const Pdag& g, const std::vector<int>& to_common) {
    std::set<std::pair<int, int>> arrows;
    for (const auto& [p, c] : g.directed_edges())
        arrows.emplace(to_common[static_cast<size_t>(p)], to_common[static_cast<size_t>(c)]);
    return arrows;
}

template <typename Set>
std::size_t intersection_size(const Set& a, const Set& b) {
    std::size_t n = 0;
    for (const auto& item : a)
        if (b.contains(item)) ++n;
    return n;
}

// Maps truth node index -> learned node index. The graphs must share one name
// universe; the order may differ.
std::vector<int> align_by_name(const Pdag& learned, const Dag& truth) {
    if (learned.node_count() != truth.node_count())
        throw Error(ErrorKind::Mismatch,
                    "compare_structure: learned graph has " + std::to_string(learned.node_count()) +
                        " nodes, truth has " + std::to_string(truth.node_count()));
    std::vector<int> map(static_cast<size_t>(truth.node_count()));
    if (learned.names() == truth.names()) {
        std::iota(map.begin(), map.end(), 0);
        return map;
    }
    std::map<std::string, int> by_name;
    for (int v = 0; v < learned.node_count(); ++v) by_name.emplace(learned.name(v), v);
    for (int v = 0; v < truth.node_count(); ++v) {
        const auto it = by_name.find(truth.name(v));
        if (it == by_name.end())
            throw Error(ErrorKind::Mismatch,
                        "compare_structure: truth node '" + truth.name(v) +
                            "' is missing from the learned graph");
        map[static_cast<size_t>(v)] = it->second;
    }
    return map;
}

}  // namespace

SetMetrics compare_sets(const NodeSet& learned, const NodeSet& truth) {
    const NodeSet l = sorted(learned);
    const NodeSet t = sorted(truth);
    const std::size_t inter = set_intersection(l, t).size();
    SetMetrics m;
    m.precision = safe_ratio(inter, l.size(), t.size());
    m.recall = safe_ratio(inter, t.size(), l.size());
    m.f1 = f1_of(m.precision, m.recall);
    m.distance = corner_distance(m.precision, m.recall);
    return m;
}

StructureMetrics compare_structure(const Pdag& learned, const Dag& truth) {
    std::vector<int> identity(static_cast<size_t>(learned.node_count()));
    std::iota(identity.begin(), identity.end(), 0);
    const std::vector<int> truth_map = align_by_name(learned, truth);

    const Pdag target = dag_to_cpdag(truth);
    const PairClassMap learned_pairs = classify_pairs(learned, identity);
    const PairClassMap target_pairs = classify_pairs(target, truth_map);

    StructureMetrics m;
    for (const auto& [pair, cls] : learned_pairs) {
        const auto it = target_pairs.find(pair);
        if (it == target_pairs.end())
            ++m.extra_edges;
        else if (it->second != cls)
            ++m.reversed_edges;
    }
    for (const auto& [pair, cls] : target_pairs)
        if (!learned_pairs.contains(pair)) ++m.missing_edges;
    m.shd = m.extra_edges + m.missing_edges + m.reversed_edges;

    const std::size_t adj_inter =
        learned_pairs.size() - static_cast<std::size_t>(m.extra_edges);
    m.ad_precision = safe_ratio(adj_inter, learned_pairs.size(), target_pairs.size());
    m.ad_recall = safe_ratio(adj_inter, target_pairs.size(), learned_pairs.size());
    m.ad_f1 = f1_of(m.ad_precision, m.ad_recall);

    const auto learned_arrows = arrow_set(learned, identity);
    const auto target_arrows = arrow_set(target, truth_map);
    const std::size_t arrow_inter = intersection_size(learned_arrows, target_arrows);
    m.ar_precision = safe_ratio(arrow_inter, learned_arrows.size(), target_arrows.size());
    m.ar_recall = safe_ratio(arrow_inter, target_arrows.size(), learned_arrows.size());
    m.ar_f1 = f1_of(m.ar_precision, m.ar_recall);
    return m;
}

EfficiencyMetrics record_efficiency(const CiCounter& counter, double elapsed_seconds) {
    EfficiencyMetrics m;
    m.elapsed_seconds = std::max(0.0, elapsed_seconds);
    m.n_ci_tests_or_score_evals = counter.total_tests;
    return m;
}

EfficiencyMetrics record_efficiency(const ScoreCache& cache, double elapsed_seconds) {
    EfficiencyMetrics m;
    m.elapsed_seconds = std::max(0.0, elapsed_seconds);
    m.n_ci_tests_or_score_evals = cache.evaluations();
    return m;
}

std::string to_json(const SetMetrics& m) {
    nlohmann::ordered_json j;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f1"] = m.f1;
    j["distance"] = m.distance;
    return j.dump();
}

std::string to_json(const StructureMetrics& m) {
    nlohmann::ordered_json j;
    j["ar_precision"] = m.ar_precision;
    j["ar_recall"] = m.ar_recall;
    j["ar_f1"] = m.ar_f1;
    j["ad_precision"] = m.ad_precision;
    j["ad_recall"] = m.ad_recall;
    j["ad_f1"] = m.ad_f1;
    j["shd"] = m.shd;
    j["extra_edges"] = m.extra_edges;
    j["missing_edges"] = m.missing_edges;
    j["reversed_edges"] = m.reversed_edges;
    return j.dump();
}

std::string to_json(const EfficiencyMetrics& m) {
    nlohmann::ordered_json j;
    j["elapsed_seconds"] = m.elapsed_seconds;
    j["n_ci_tests_or_score_evals"] = m.n_ci_tests_or_score_evals;
    return j.dump();
}

}  // namespace causal
