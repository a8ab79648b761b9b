#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace causal {

enum class ErrorKind {
    Parse,            // malformed input text
    Validation,       // structurally invalid value (row sums, duplicate edge, ...)
    Cycle,            // edge set admits no topological order
    UnknownNode,      // node name/index not present
    UnknownAlgorithm, // algorithm name not in the registry
    Degenerate,       // singular matrix / collinear input
    InsufficientData, // too few samples for the requested test
    TooLarge,         // guard against intractable enumeration
    Precondition,     // caller violated an operation precondition
    Unsupported,      // e.g. oracle mode for a score-based learner
    Mismatch,         // data/parameter or node-universe mismatch
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string &msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

// Sorted vector of unique node indices. All set algebra below assumes sortedness.
using NodeSet = std::vector<int>;

inline bool set_contains(const NodeSet &s, int v) {
    return std::binary_search(s.begin(), s.end(), v);
}

inline void set_insert(NodeSet &s, int v) {
    auto it = std::lower_bound(s.begin(), s.end(), v);
    if (it == s.end() || *it != v) s.insert(it, v);
}

inline void set_erase(NodeSet &s, int v) {
    auto it = std::lower_bound(s.begin(), s.end(), v);
    if (it != s.end() && *it == v) s.erase(it);
}

inline NodeSet set_union(const NodeSet &a, const NodeSet &b) {
    NodeSet out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline NodeSet set_difference(const NodeSet &a, const NodeSet &b) {
    NodeSet out;
    out.reserve(a.size());
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline NodeSet set_intersection(const NodeSet &a, const NodeSet &b) {
    NodeSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline bool set_disjoint(const NodeSet &a, const NodeSet &b) {
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) ++ia;
        else if (*ib < *ia) ++ib;
        else return false;
    }
    return true;
}

inline bool set_is_subset(const NodeSet &sub, const NodeSet &sup) {
    return std::includes(sup.begin(), sup.end(), sub.begin(), sub.end());
}

inline NodeSet sorted(NodeSet s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

// Visits subsets of `pool` of exactly `k` elements in lexicographic order.
// The callback returns true to stop early; the function reports whether it stopped.
template <typename F>
bool for_each_subset_of_size(const NodeSet &pool, int k, F &&f) {
    const int n = static_cast<int>(pool.size());
    if (k < 0 || k > n) return false;
    NodeSet subset(static_cast<size_t>(k));
    std::vector<int> idx(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i;
    while (true) {
        for (int i = 0; i < k; ++i) subset[static_cast<size_t>(i)] = pool[static_cast<size_t>(idx[static_cast<size_t>(i)])];
        if (f(static_cast<const NodeSet &>(subset))) return true;
        int i = k - 1;
        while (i >= 0 && idx[static_cast<size_t>(i)] == n - k + i) --i;
        if (i < 0) return false;
        ++idx[static_cast<size_t>(i)];
        for (int j = i + 1; j < k; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
    }
}

// Subsets by increasing size 0..max_size (lexicographic within a size).
template <typename F>
bool for_each_subset_up_to(const NodeSet &pool, int max_size, F &&f) {
    const int cap = std::min<int>(max_size, static_cast<int>(pool.size()));
    for (int k = 0; k <= cap; ++k)
        if (for_each_subset_of_size(pool, k, f)) return true;
    return false;
}

} // namespace causal
