#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "causal/dataset.hpp"
#include "causal/graph.hpp"

namespace causal {

// Identification header shared by both network kinds.
struct BnDescriptor {
    std::string name;
    int node_count = 0;
    int arc_count = 0;
};

// Discrete Bayesian network. CPT rows are indexed by parent configuration in
// mixed-radix order over the parents sorted ascending by node index, with the
// last (highest-index) parent varying fastest:
//   row = ((value[p1] * card[p2] + value[p2]) * card[p3] + ...) for parents p1 < p2 < p3.
struct DiscreteBn {
    std::string name;
    Dag graph;
    std::vector<int> cardinalities;                      // per node
    std::vector<std::vector<std::vector<double>>> cpts;  // node -> row -> entry
    std::vector<std::vector<std::string>> value_names;   // node -> category labels

    BnDescriptor descriptor() const;
    int cpt_row_count(int node) const;
    // Row index for a node's parent values taken from a full joint assignment.
    int cpt_row_index(int node, const std::vector<int>& assignment) const;
    void validate() const;  // row shapes, nonnegative entries, sums within 1e-9, acyclicity
};

// Linear-Gaussian network: node = intercept + sum(coeff * parent) + Normal(0, sigma).
// Coefficients align with graph.parents(node), i.e. sorted by node index.
struct GaussianBn {
    std::string name;
    Dag graph;
    std::vector<double> intercepts;
    std::vector<std::vector<double>> coefficients;
    std::vector<double> sigmas;

    BnDescriptor descriptor() const;
    void validate() const;  // coefficient counts, sigma > 0, acyclicity
};

// BIF-compatible subset parser: network / variable / probability blocks,
// discrete variables only; `table` rows for parentless nodes, `( values )`
// rows otherwise. Throws Parse with a line number on grammar errors,
// Validation on semantic ones, Cycle if the arcs are cyclic.
DiscreteBn parse_discrete_network(const std::string& text);

// Line-oriented linear-Gaussian descriptor: `node <name> <intercept> <sigma>`
// lines, then `arc <parent> <child> <coefficient>` lines. Blank lines and
// `#` comments are ignored. The optional name labels the descriptor.
GaussianBn parse_gaussian_network(const std::string& text, const std::string& name = "");

// Forward sampling in topological order. Pure in (bn, n, seed): each row is
// drawn from its own counter stream, so row i does not depend on n.
Dataset forward_sample(const DiscreteBn& bn, std::int64_t n, std::uint64_t seed);
Dataset forward_sample(const GaussianBn& bn, std::int64_t n, std::uint64_t seed);

// Marginal distribution of one node by full joint enumeration. Throws
// TooLarge when the joint state count exceeds 10^7.
std::vector<double> exact_marginal(const DiscreteBn& bn, int node);

// Either network kind, as loaded from a file. Discrete text is recognized by
// its leading `network` keyword; anything else parses as a Gaussian descriptor.
struct AnyBn {
    bool is_discrete = false;
    DiscreteBn discrete;
    GaussianBn gaussian;

    const Dag& graph() const { return is_discrete ? discrete.graph : gaussian.graph; }
    BnDescriptor descriptor() const {
        return is_discrete ? discrete.descriptor() : gaussian.descriptor();
    }
};
AnyBn parse_network_auto(const std::string& text, const std::string& name = "");
AnyBn read_network_file(const std::string& path);

} // namespace causal
