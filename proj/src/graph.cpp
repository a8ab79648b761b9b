#include "causal/graph.hpp"

#include <array>
#include <cctype>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>

namespace causal {

namespace {

void check_name_list(const std::vector<std::string> &names) {
    for (const auto &n : names) {
        if (n.empty()) throw Error(ErrorKind::Validation, "empty node name");
        for (char c : n)
            if (std::isspace(static_cast<unsigned char>(c)))
                throw Error(ErrorKind::Validation, "node name contains whitespace: '" + n + "'");
    }
    for (size_t i = 0; i < names.size(); ++i)
        for (size_t j = i + 1; j < names.size(); ++j)
            if (names[i] == names[j])
                throw Error(ErrorKind::Validation, "duplicate node name: '" + names[i] + "'");
}

int find_index(const std::vector<std::string> &names, std::string_view name) {
    for (size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    throw Error(ErrorKind::UnknownNode, "unknown node: '" + std::string(name) + "'");
}

} // namespace

Dag::Dag(std::vector<std::string> names) : names_(std::move(names)) {
    check_name_list(names_);
    parents_.resize(names_.size());
    children_.resize(names_.size());
}

int Dag::index_of(std::string_view name) const { return find_index(names_, name); }

void Dag::add_edge(int parent, int child) {
    if (parent < 0 || parent >= node_count() || child < 0 || child >= node_count())
        throw Error(ErrorKind::UnknownNode, "edge endpoint out of range");
    if (parent == child) throw Error(ErrorKind::Validation, "self loop on node " + names_[static_cast<size_t>(parent)]);
    if (has_edge(parent, child) || has_edge(child, parent))
        throw Error(ErrorKind::Validation,
                    "duplicate edge between " + names_[static_cast<size_t>(parent)] + " and " + names_[static_cast<size_t>(child)]);
    set_insert(children_[static_cast<size_t>(parent)], child);
    set_insert(parents_[static_cast<size_t>(child)], parent);
    ++edge_count_;
}

bool Dag::has_edge(int parent, int child) const {
    if (parent < 0 || parent >= node_count() || child < 0 || child >= node_count()) return false;
    return set_contains(children_[static_cast<size_t>(parent)], child);
}

std::vector<std::pair<int, int>> Dag::edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<size_t>(edge_count_));
    for (int p = 0; p < node_count(); ++p)
        for (int c : children_[static_cast<size_t>(p)]) out.emplace_back(p, c);
    return out;
}

Pdag::Pdag(std::vector<std::string> names) : names_(std::move(names)) {
    check_name_list(names_);
    parents_.resize(names_.size());
    children_.resize(names_.size());
    neighbors_.resize(names_.size());
}

Pdag::Pdag(const Dag &dag) : Pdag(dag.names()) {
    for (auto [p, c] : dag.edges()) add_directed_edge(p, c);
}

int Pdag::index_of(std::string_view name) const { return find_index(names_, name); }

void Pdag::check_node(int v) const {
    if (v < 0 || v >= node_count()) throw Error(ErrorKind::UnknownNode, "node index out of range");
}

void Pdag::add_directed_edge(int parent, int child) {
    check_node(parent);
    check_node(child);
    if (parent == child) throw Error(ErrorKind::Validation, "self loop");
    if (adjacent(parent, child)) throw Error(ErrorKind::Validation, "duplicate edge");
    set_insert(children_[static_cast<size_t>(parent)], child);
    set_insert(parents_[static_cast<size_t>(child)], parent);
    ++directed_count_;
}

void Pdag::add_undirected_edge(int a, int b) {
    check_node(a);
    check_node(b);
    if (a == b) throw Error(ErrorKind::Validation, "self loop");
    if (adjacent(a, b)) throw Error(ErrorKind::Validation, "duplicate edge");
    set_insert(neighbors_[static_cast<size_t>(a)], b);
    set_insert(neighbors_[static_cast<size_t>(b)], a);
    ++undirected_count_;
}

void Pdag::remove_edge(int a, int b) {
    check_node(a);
    check_node(b);
    if (has_directed_edge(a, b)) {
        set_erase(children_[static_cast<size_t>(a)], b);
        set_erase(parents_[static_cast<size_t>(b)], a);
        --directed_count_;
    } else if (has_directed_edge(b, a)) {
        set_erase(children_[static_cast<size_t>(b)], a);
        set_erase(parents_[static_cast<size_t>(a)], b);
        --directed_count_;
    } else if (has_undirected_edge(a, b)) {
        set_erase(neighbors_[static_cast<size_t>(a)], b);
        set_erase(neighbors_[static_cast<size_t>(b)], a);
        --undirected_count_;
    } else {
        throw Error(ErrorKind::Precondition, "no edge to remove");
    }
}

void Pdag::orient(int parent, int child) {
    if (!has_undirected_edge(parent, child))
        throw Error(ErrorKind::Precondition, "orient requires an undirected edge");
    set_erase(neighbors_[static_cast<size_t>(parent)], child);
    set_erase(neighbors_[static_cast<size_t>(child)], parent);
    --undirected_count_;
    set_insert(children_[static_cast<size_t>(parent)], child);
    set_insert(parents_[static_cast<size_t>(child)], parent);
    ++directed_count_;
}

void Pdag::undirect(int a, int b) {
    int p = -1, c = -1;
    if (has_directed_edge(a, b)) p = a, c = b;
    else if (has_directed_edge(b, a)) p = b, c = a;
    else throw Error(ErrorKind::Precondition, "undirect requires a directed edge");
    set_erase(children_[static_cast<size_t>(p)], c);
    set_erase(parents_[static_cast<size_t>(c)], p);
    --directed_count_;
    set_insert(neighbors_[static_cast<size_t>(a)], b);
    set_insert(neighbors_[static_cast<size_t>(b)], a);
    ++undirected_count_;
}

bool Pdag::has_directed_edge(int parent, int child) const {
    if (parent < 0 || parent >= node_count() || child < 0 || child >= node_count()) return false;
    return set_contains(children_[static_cast<size_t>(parent)], child);
}

bool Pdag::has_undirected_edge(int a, int b) const {
    if (a < 0 || a >= node_count() || b < 0 || b >= node_count()) return false;
    return set_contains(neighbors_[static_cast<size_t>(a)], b);
}

bool Pdag::adjacent(int a, int b) const {
    return has_directed_edge(a, b) || has_directed_edge(b, a) || has_undirected_edge(a, b);
}

NodeSet Pdag::adjacent_nodes(int v) const {
    return set_union(set_union(parents(v), children(v)), neighbors(v));
}

std::vector<std::pair<int, int>> Pdag::directed_edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<size_t>(directed_count_));
    for (int p = 0; p < node_count(); ++p)
        for (int c : children_[static_cast<size_t>(p)]) out.emplace_back(p, c);
    return out;
}

std::vector<std::pair<int, int>> Pdag::undirected_edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<size_t>(undirected_count_));
    for (int a = 0; a < node_count(); ++a)
        for (int b : neighbors_[static_cast<size_t>(a)])
            if (a < b) out.emplace_back(a, b);
    return out;
}

std::vector<std::pair<int, int>> Pdag::skeleton_pairs() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<size_t>(edge_count()));
    for (int a = 0; a < node_count(); ++a) {
        for (int b : children_[static_cast<size_t>(a)]) out.emplace_back(std::min(a, b), std::max(a, b));
        for (int b : neighbors_[static_cast<size_t>(a)])
            if (a < b) out.emplace_back(a, b);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> topological_order(const Dag &dag) {
    const int n = dag.node_count();
    std::vector<int> in_degree(static_cast<size_t>(n));
    for (int v = 0; v < n; ++v) in_degree[static_cast<size_t>(v)] = static_cast<int>(dag.parents(v).size());
    // Smallest ready index first, so the order is a deterministic function of the graph.
    NodeSet ready;
    for (int v = 0; v < n; ++v)
        if (in_degree[static_cast<size_t>(v)] == 0) set_insert(ready, v);
    std::vector<int> order;
    order.reserve(static_cast<size_t>(n));
    while (!ready.empty()) {
        int v = ready.front();
        ready.erase(ready.begin());
        order.push_back(v);
        for (int c : dag.children(v))
            if (--in_degree[static_cast<size_t>(c)] == 0) set_insert(ready, c);
    }
    if (static_cast<int>(order.size()) != n) throw Error(ErrorKind::Cycle, "graph contains a directed cycle");
    return order;
}

bool is_acyclic(const Dag &dag) {
    try {
        topological_order(dag);
        return true;
    } catch (const Error &e) {
        if (e.kind() == ErrorKind::Cycle) return false;
        throw;
    }
}

NodeSet ancestors(const Dag &dag, int v) {
    NodeSet out;
    std::deque<int> queue(dag.parents(v).begin(), dag.parents(v).end());
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        if (set_contains(out, u)) continue;
        set_insert(out, u);
        for (int p : dag.parents(u)) queue.push_back(p);
    }
    return out;
}

NodeSet descendants(const Dag &dag, int v) {
    NodeSet out;
    std::deque<int> queue(dag.children(v).begin(), dag.children(v).end());
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        if (set_contains(out, u)) continue;
        set_insert(out, u);
        for (int c : dag.children(u)) queue.push_back(c);
    }
    return out;
}

bool d_separated(const Dag &dag, int x, int y, const NodeSet &z) {
    const int n = dag.node_count();
    if (x < 0 || x >= n || y < 0 || y >= n) throw Error(ErrorKind::UnknownNode, "node index out of range");
    if (x == y) throw Error(ErrorKind::Precondition, "d-separation endpoints must differ");
    if (set_contains(z, x) || set_contains(z, y))
        throw Error(ErrorKind::Precondition, "conditioning set must exclude the endpoints");

    // Nodes in z or with a descendant in z: exactly where a collider is open.
    std::vector<char> in_z(static_cast<size_t>(n), 0);
    for (int v : z) in_z[static_cast<size_t>(v)] = 1;
    std::vector<char> anc_of_z(static_cast<size_t>(n), 0);
    {
        std::deque<int> queue(z.begin(), z.end());
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            if (anc_of_z[static_cast<size_t>(v)]) continue;
            anc_of_z[static_cast<size_t>(v)] = 1;
            for (int p : dag.parents(v)) queue.push_back(p);
        }
    }

    // Reachability over (node, arrival direction) states.
    enum : int { kFromChild = 0, kFromParent = 1 };
    std::vector<std::array<char, 2>> seen(static_cast<size_t>(n), {0, 0});
    std::deque<std::pair<int, int>> queue;
    queue.emplace_back(x, kFromChild); // start as if entered from below; allows all moves
    while (!queue.empty()) {
        auto [v, dir] = queue.front();
        queue.pop_front();
        if (seen[static_cast<size_t>(v)][static_cast<size_t>(dir)]) continue;
        seen[static_cast<size_t>(v)][static_cast<size_t>(dir)] = 1;
        if (v == y) return false;
        if (dir == kFromChild) {
            if (!in_z[static_cast<size_t>(v)]) {
                for (int p : dag.parents(v)) queue.emplace_back(p, kFromChild);
                for (int c : dag.children(v)) queue.emplace_back(c, kFromParent);
            }
        } else {
            if (!in_z[static_cast<size_t>(v)])
                for (int c : dag.children(v)) queue.emplace_back(c, kFromParent);
            if (anc_of_z[static_cast<size_t>(v)]) // collider on the trail is open
                for (int p : dag.parents(v)) queue.emplace_back(p, kFromChild);
        }
    }
    return true;
}

LocalStructure true_local(const Dag &dag, int target) {
    if (target < 0 || target >= dag.node_count()) throw Error(ErrorKind::UnknownNode, "target out of range");
    LocalStructure ls;
    ls.target = target;
    ls.parents = dag.parents(target);
    ls.children = dag.children(target);
    NodeSet excluded = set_union(ls.parents, ls.children);
    set_insert(excluded, target);
    for (int c : ls.children)
        for (int p : dag.parents(c))
            if (!set_contains(excluded, p)) set_insert(ls.spouses, p);
    return ls;
}

std::vector<std::array<int, 3>> v_structures(const Dag &dag) {
    std::vector<std::array<int, 3>> out;
    for (int z = 0; z < dag.node_count(); ++z) {
        const NodeSet &ps = dag.parents(z);
        for (size_t i = 0; i < ps.size(); ++i)
            for (size_t j = i + 1; j < ps.size(); ++j)
                if (!dag.adjacent(ps[i], ps[j])) out.push_back({ps[i], z, ps[j]});
    }
    std::sort(out.begin(), out.end());
    return out;
}

Pdag dag_to_cpdag(const Dag &dag) {
    topological_order(dag); // reject cyclic input
    Pdag pattern(dag.names());
    for (auto [p, c] : dag.edges()) pattern.add_undirected_edge(p, c);
    for (const auto &vs : v_structures(dag)) {
        if (pattern.has_undirected_edge(vs[0], vs[1])) pattern.orient(vs[0], vs[1]);
        if (pattern.has_undirected_edge(vs[2], vs[1])) pattern.orient(vs[2], vs[1]);
    }
    return apply_meek_rules(pattern);
}

namespace {

// One sweep of the four Meek rules; reports whether anything was oriented.
bool meek_sweep(Pdag &g) {
    const int n = g.node_count();
    bool changed = false;
    for (int a = 0; a < n; ++a) {
        // Copy: orientation mutates neighbor sets while we iterate.
        const NodeSet nbrs = g.neighbors(a);
        for (int b : nbrs) {
            if (!g.has_undirected_edge(a, b)) continue;
            bool orient_ab = false;
            // Rule 1: c -> a, a - b, c and b non-adjacent  =>  a -> b.
            for (int c : g.parents(a))
                if (c != b && !g.adjacent(c, b)) { orient_ab = true; break; }
            // Rule 2: a -> c -> b and a - b  =>  a -> b.
            if (!orient_ab)
                for (int c : g.children(a))
                    if (c != b && g.has_directed_edge(c, b)) { orient_ab = true; break; }
            // Rule 3: a - c, a - d, c -> b, d -> b, c and d non-adjacent  =>  a -> b.
            if (!orient_ab) {
                const NodeSet &pb = g.parents(b);
                NodeSet candidates;
                for (int c : pb)
                    if (g.has_undirected_edge(a, c)) candidates.push_back(c);
                for (size_t i = 0; i < candidates.size() && !orient_ab; ++i)
                    for (size_t j = i + 1; j < candidates.size() && !orient_ab; ++j)
                        if (!g.adjacent(candidates[i], candidates[j])) orient_ab = true;
            }
            // Rule 4: a - d, d -> c, c -> b, a - b, with a and c adjacent,
            //         d and b non-adjacent  =>  a -> b.
            if (!orient_ab) {
                for (int c : g.parents(b)) {
                    if (c == a || !g.adjacent(a, c)) continue;
                    for (int d : g.parents(c)) {
                        if (d == a || d == b) continue;
                        if (g.has_undirected_edge(a, d) && !g.adjacent(d, b)) { orient_ab = true; break; }
                    }
                    if (orient_ab) break;
                }
            }
            if (orient_ab) {
                g.orient(a, b);
                changed = true;
            }
        }
    }
    return changed;
}

} // namespace

Pdag apply_meek_rules(const Pdag &pdag) {
    Pdag g = pdag;
    while (meek_sweep(g)) {
    }
    return g;
}

Dag pdag_to_dag(const Pdag &pdag) {
    Pdag work = pdag;
    Dag result(pdag.names());
    for (auto [p, c] : pdag.directed_edges()) result.add_edge(p, c);

    const int n = work.node_count();
    std::vector<char> removed(static_cast<size_t>(n), 0);
    int remaining = n;
    while (remaining > 0) {
        int chosen = -1;
        for (int v = 0; v < n && chosen < 0; ++v) {
            if (removed[static_cast<size_t>(v)]) continue;
            if (!work.children(v).empty()) continue; // must be a sink in the directed part
            // Every undirected neighbor of v must be adjacent to all other nodes adjacent to v.
            const NodeSet adj = work.adjacent_nodes(v);
            bool ok = true;
            for (int u : work.neighbors(v)) {
                for (int w : adj) {
                    if (w == u) continue;
                    if (!work.adjacent(u, w)) { ok = false; break; }
                }
                if (!ok) break;
            }
            if (ok) chosen = v;
        }
        if (chosen < 0) throw Error(ErrorKind::Validation, "pdag admits no consistent extension");
        for (int u : NodeSet(work.neighbors(chosen))) {
            result.add_edge(u, chosen);
            work.remove_edge(u, chosen);
        }
        for (int p : NodeSet(work.parents(chosen))) work.remove_edge(p, chosen);
        removed[static_cast<size_t>(chosen)] = 1;
        --remaining;
    }
    if (!is_acyclic(result)) throw Error(ErrorKind::Validation, "pdag admits no consistent extension");
    return result;
}

Pdag read_graph_text(std::istream &in) {
    std::string line;
    auto next_line = [&](std::string &out) {
        while (std::getline(in, line)) {
            // Strip trailing carriage returns; skip blank lines.
            while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
            if (!line.empty()) { out = line; return true; }
        }
        return false;
    };
    std::string header;
    if (!next_line(header)) throw Error(ErrorKind::Parse, "graph text: missing node count line");
    int n = 0;
    {
        std::istringstream ss(header);
        if (!(ss >> n) || n < 0) throw Error(ErrorKind::Parse, "graph text: bad node count '" + header + "'");
        std::string extra;
        if (ss >> extra) throw Error(ErrorKind::Parse, "graph text: trailing tokens after node count");
    }
    std::string name_line;
    if (n > 0 && !next_line(name_line)) throw Error(ErrorKind::Parse, "graph text: missing name line");
    std::vector<std::string> names;
    {
        std::istringstream ss(name_line);
        std::string tok;
        while (ss >> tok) names.push_back(tok);
    }
    if (static_cast<int>(names.size()) != n)
        throw Error(ErrorKind::Parse, "graph text: expected " + std::to_string(n) + " names, got " +
                                          std::to_string(names.size()));
    Pdag g(names);
    std::string edge_line;
    while (next_line(edge_line)) {
        std::istringstream ss(edge_line);
        std::string a, b, kind;
        if (!(ss >> a >> b >> kind)) throw Error(ErrorKind::Parse, "graph text: bad edge line '" + edge_line + "'");
        std::string extra;
        if (ss >> extra) throw Error(ErrorKind::Parse, "graph text: trailing tokens on edge line '" + edge_line + "'");
        int ia = g.index_of(a), ib = g.index_of(b);
        if (kind == "->") g.add_directed_edge(ia, ib);
        else if (kind == "--") g.add_undirected_edge(ia, ib);
        else throw Error(ErrorKind::Parse, "graph text: bad edge kind '" + kind + "'");
    }
    return g;
}

void write_graph_text(const Pdag &pdag, std::ostream &out) {
    out << pdag.node_count() << "\n";
    for (int v = 0; v < pdag.node_count(); ++v) out << (v ? "\t" : "") << pdag.name(v);
    out << "\n";
    for (auto [p, c] : pdag.directed_edges()) out << pdag.name(p) << "\t" << pdag.name(c) << "\t->\n";
    for (auto [a, b] : pdag.undirected_edges()) out << pdag.name(a) << "\t" << pdag.name(b) << "\t--\n";
}

Pdag parse_graph_text(const std::string &text) {
    std::istringstream ss(text);
    return read_graph_text(ss);
}

std::string format_graph_text(const Pdag &pdag) {
    std::ostringstream ss;
    write_graph_text(pdag, ss);
    return ss.str();
}

} // namespace causal
