#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "causal/common.hpp"

namespace causal {

class Pdag;

// Directed acyclic graph over a fixed node universe. Node identity is the index
// into the name list; acyclicity is checked by topological_order / validate_acyclic,
// not on every insertion, so construction from edge lists stays linear.
class Dag {
public:
    Dag() = default;
    explicit Dag(std::vector<std::string> names);

    int node_count() const { return static_cast<int>(names_.size()); }
    int edge_count() const { return edge_count_; }
    const std::vector<std::string> &names() const { return names_; }
    const std::string &name(int v) const { return names_.at(static_cast<size_t>(v)); }
    int index_of(std::string_view name) const; // throws UnknownNode

    void add_edge(int parent, int child);
    bool has_edge(int parent, int child) const;
    bool adjacent(int a, int b) const { return has_edge(a, b) || has_edge(b, a); }

    const NodeSet &parents(int v) const { return parents_.at(static_cast<size_t>(v)); }
    const NodeSet &children(int v) const { return children_.at(static_cast<size_t>(v)); }
    std::vector<std::pair<int, int>> edges() const; // (parent, child), sorted

    bool operator==(const Dag &other) const = default;

private:
    std::vector<std::string> names_;
    std::vector<NodeSet> parents_;
    std::vector<NodeSet> children_;
    int edge_count_ = 0;
};

// Partially directed graph: at most one edge (directed or undirected) per pair.
// Used both for learner output and as the representation of CPDAGs.
class Pdag {
public:
    Pdag() = default;
    explicit Pdag(std::vector<std::string> names);
    explicit Pdag(const Dag &dag); // all edges directed

    int node_count() const { return static_cast<int>(names_.size()); }
    int directed_count() const { return directed_count_; }
    int undirected_count() const { return undirected_count_; }
    int edge_count() const { return directed_count_ + undirected_count_; }
    const std::vector<std::string> &names() const { return names_; }
    const std::string &name(int v) const { return names_.at(static_cast<size_t>(v)); }
    int index_of(std::string_view name) const;

    void add_directed_edge(int parent, int child);
    void add_undirected_edge(int a, int b);
    void remove_edge(int a, int b); // either kind
    void orient(int parent, int child); // undirected (parent,child) becomes parent->child
    void undirect(int a, int b);        // directed edge becomes undirected

    bool has_directed_edge(int parent, int child) const;
    bool has_undirected_edge(int a, int b) const;
    bool adjacent(int a, int b) const;

    const NodeSet &parents(int v) const { return parents_.at(static_cast<size_t>(v)); }
    const NodeSet &children(int v) const { return children_.at(static_cast<size_t>(v)); }
    const NodeSet &neighbors(int v) const { return neighbors_.at(static_cast<size_t>(v)); }
    NodeSet adjacent_nodes(int v) const;

    std::vector<std::pair<int, int>> directed_edges() const;   // (parent, child)
    std::vector<std::pair<int, int>> undirected_edges() const; // (min, max)
    std::vector<std::pair<int, int>> skeleton_pairs() const;   // (min, max), both kinds

    bool operator==(const Pdag &other) const = default;

private:
    void check_node(int v) const;
    std::vector<std::string> names_;
    std::vector<NodeSet> parents_;
    std::vector<NodeSet> children_;
    std::vector<NodeSet> neighbors_;
    int directed_count_ = 0;
    int undirected_count_ = 0;
};

// Local causal structure around one target node.
struct LocalStructure {
    int target = -1;
    NodeSet parents;
    NodeSet children;
    NodeSet undirected_neighbors;
    NodeSet spouses;

    NodeSet adjacency() const { return set_union(set_union(parents, children), undirected_neighbors); }
    NodeSet markov_blanket() const { return set_union(adjacency(), spouses); }
};

// Deterministic topological order: among nodes whose parents are all placed,
// the smallest index goes first. Throws ErrorKind::Cycle.
std::vector<int> topological_order(const Dag &dag);

// True iff every node is reachable-as-ancestor-free, i.e. the edge set is acyclic.
bool is_acyclic(const Dag &dag);

NodeSet ancestors(const Dag &dag, int v);   // proper ancestors
NodeSet descendants(const Dag &dag, int v); // proper descendants

// d-separation of x and y given z, via the reachability ("Bayes ball") algorithm.
bool d_separated(const Dag &dag, int x, int y, const NodeSet &z);

// Parents, children and spouses of `target` read off the true graph.
LocalStructure true_local(const Dag &dag, int target);

// Completed PDAG of the Markov equivalence class of `dag`: v-structure arrows
// plus the Meek-rule closure; everything else undirected.
Pdag dag_to_cpdag(const Dag &dag);

// Closure of the four Meek orientation rules. Idempotent; result does not depend
// on edge processing order.
Pdag apply_meek_rules(const Pdag &pdag);

// Consistent extension (Dor-Tarsi). Throws ErrorKind::Validation when none exists.
Dag pdag_to_dag(const Pdag &pdag);

// Unshielded colliders x->z<-y (x, y non-adjacent), as triples (x, z, y) with x < y.
std::vector<std::array<int, 3>> v_structures(const Dag &dag);

// Text graph format: node count line, name line, then one edge per line
// ("parent child ->" or "a b --").
Pdag read_graph_text(std::istream &in);
void write_graph_text(const Pdag &pdag, std::ostream &out);
Pdag parse_graph_text(const std::string &text);
std::string format_graph_text(const Pdag &pdag);

} // namespace causal
