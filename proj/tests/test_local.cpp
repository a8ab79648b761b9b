#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <string>
#include <vector>

#include "causal/bn.hpp"
#include "causal/ci.hpp"
#include "causal/common.hpp"
#include "causal/dataset.hpp"
#include "causal/graph.hpp"
#include "causal/local.hpp"
#include "causal/rng.hpp"

using namespace causal;

namespace {

std::string data_path(const std::string& file) {
    return std::string(CAUSAL_DATA_DIR) + "/networks/" + file;
}

std::string golden_path(const std::string& file) {
    return std::string(CAUSAL_GOLDEN_DIR) + "/" + file;
}

Dag make_dag(const std::vector<std::string>& names,
             const std::vector<std::pair<std::string, std::string>>& edges) {
    Dag g(names);
    for (const auto& [p, c] : edges) g.add_edge(g.index_of(p), g.index_of(c));
    return g;
}

// Every DAG on k nodes: one base-3 digit per node pair (absent / forward /
// backward), keeping the acyclic codes.
std::vector<Dag> all_dags(int k) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) pairs.push_back({i, j});
    long long total = 1;
    for (std::size_t i = 0; i < pairs.size(); ++i) total *= 3;

    std::vector<std::string> names;
    for (int i = 0; i < k; ++i) names.push_back("N" + std::to_string(i));

    std::vector<Dag> out;
    for (long long code = 0; code < total; ++code) {
        Dag g(names);
        long long c = code;
        for (const auto& [a, b] : pairs) {
            const int digit = static_cast<int>(c % 3);
            c /= 3;
            if (digit == 1) g.add_edge(a, b);
            if (digit == 2) g.add_edge(b, a);
        }
        if (is_acyclic(g)) out.push_back(g);
    }
    return out;
}

// Random DAG via lower-triangular coin flips under a seed-derived node
// permutation, so edge direction is not tied to index order.
Dag random_dag(std::uint64_t seed, int k, double edge_prob) {
    std::vector<std::string> names;
    for (int i = 0; i < k; ++i) names.push_back("N" + std::to_string(i));
    RowRng rng(seed, 0);
    std::vector<int> order;
    for (int i = 0; i < k; ++i) order.push_back(i);
    for (int i = k - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.next_double() * (i + 1));
        std::swap(order[i], order[j]);
    }
    Dag g(names);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            if (rng.next_double() < edge_prob) g.add_edge(order[i], order[j]);
    return g;
}

void check_disjoint(const LocalStructure& s) {
    CHECK(set_intersection(s.parents, s.children).empty());
    CHECK(set_intersection(s.parents, s.undirected_neighbors).empty());
    CHECK(set_intersection(s.children, s.undirected_neighbors).empty());
    CHECK(!set_contains(s.parents, s.target));
    CHECK(!set_contains(s.children, s.target));
    CHECK(!set_contains(s.undirected_neighbors, s.target));
}

// Runs one local algorithm against the oracle and checks the classification
// against the true CPDAG: the three sets must partition the true adjacency
// exactly as the compelled and reversible edges at the target do.
void check_against_cpdag(OracleCi& ci, const Dag& truth, const Pdag& cpdag, int t,
                         LocalAlgorithm a) {
    const LocalResult r = learn_local(ci, t, a);
    INFO("algorithm ", local_algorithm_name(a), " target ", truth.name(t), " graph ",
         format_graph_text(Pdag(truth)));

    NodeSet cp_parents;
    NodeSet cp_children;
    NodeSet cp_undirected;
    for (int v = 0; v < truth.node_count(); ++v) {
        if (cpdag.has_directed_edge(v, t)) set_insert(cp_parents, v);
        if (cpdag.has_directed_edge(t, v)) set_insert(cp_children, v);
        if (cpdag.has_undirected_edge(t, v)) set_insert(cp_undirected, v);
    }
    CHECK(r.structure.parents == cp_parents);
    CHECK(r.structure.children == cp_children);
    CHECK(r.structure.undirected_neighbors == cp_undirected);
    CHECK(r.structure.adjacency() == true_local(truth, t).adjacency());
    CHECK(r.structure.spouses.empty());
    CHECK(r.structure.target == t);
    check_disjoint(r.structure);

    CHECK(r.algorithm == local_algorithm_name(a));
    REQUIRE(!r.visited.empty());
    CHECK(r.visited.front() == t);
    if (truth.node_count() >= 2) CHECK(r.n_ci_tests > 0);
}

void check_network_against_cpdag(const std::string& file) {
    const AnyBn bn = read_network_file(data_path(file));
    const Dag& g = bn.graph();
    const Pdag cpdag = dag_to_cpdag(g);
    OracleCi ci(g);
    for (int t = 0; t < g.node_count(); ++t)
        for (LocalAlgorithm a : all_local_algorithms()) check_against_cpdag(ci, g, cpdag, t, a);
}

// Oracle-level contract of learn_pc_set: the estimate covers the true
// adjacency, every rejected node carries a separating set that actually
// d-separates it from the target, and no kept node carries one. GetPC is
// exact; the one-sided variants may keep extra members, but only
// descendants of the target — any non-descendant is separated by the
// parents, which the final elimination pool always contains.
void check_pc_set(OracleCi& ci, const Dag& truth, int t, PcVariant v) {
    const PcSetResult r = learn_pc_set(ci, t, v);
    const NodeSet adj = true_local(truth, t).adjacency();
    INFO("variant ", pc_variant_name(v), " target ", truth.name(t));

    CHECK(set_is_subset(adj, r.pc));
    if (v == PcVariant::GetPc)
        CHECK(r.pc == adj);
    else
        CHECK(set_is_subset(set_difference(r.pc, adj), descendants(truth, t)));
    CHECK(r.target == t);
    CHECK(r.variant == pc_variant_name(v));
    if (truth.node_count() >= 2) CHECK(r.n_ci_tests > 0);

    for (int x = 0; x < truth.node_count(); ++x) {
        if (x == t || set_contains(r.pc, x)) continue;
        REQUIRE(r.sepsets.count(x) == 1);
        CHECK(d_separated(truth, t, x, r.sepsets.at(x)));
    }
    for (int x : r.pc) CHECK(r.sepsets.count(x) == 0);
}

std::string join_names(const Dag& g, const NodeSet& s) {
    if (s.empty()) return "-";
    std::string out;
    for (int v : s) {
        if (!out.empty()) out += ",";
        out += g.name(v);
    }
    return out;
}

} // namespace

TEST_CASE("pc variant and local algorithm registries round-trip") {
    REQUIRE(all_pc_variants().size() == 3);
    for (PcVariant v : all_pc_variants()) CHECK(parse_pc_variant(pc_variant_name(v)) == v);
    CHECK(pc_variant_name(PcVariant::Mmpc) == "MMPC");
    CHECK(pc_variant_name(PcVariant::HitonPc) == "HITON-PC");
    CHECK(pc_variant_name(PcVariant::GetPc) == "GetPC");
    CHECK(parse_pc_variant("mmpc") == PcVariant::Mmpc);
    CHECK(parse_pc_variant("hiton_pc") == PcVariant::HitonPc);
    CHECK(parse_pc_variant("getpc") == PcVariant::GetPc);

    REQUIRE(all_local_algorithms().size() == 4);
    for (LocalAlgorithm a : all_local_algorithms())
        CHECK(parse_local_algorithm(local_algorithm_name(a)) == a);
    CHECK(local_algorithm_name(LocalAlgorithm::PcdByPcd) == "PCD-by-PCD");
    CHECK(local_algorithm_name(LocalAlgorithm::MbByMb) == "MB-by-MB");
    CHECK(local_algorithm_name(LocalAlgorithm::Cmb) == "CMB");
    CHECK(local_algorithm_name(LocalAlgorithm::LcsFs) == "LCS-FS");
    CHECK(parse_local_algorithm("pcdbypcd") == LocalAlgorithm::PcdByPcd);
    CHECK(parse_local_algorithm("MB_BY_MB") == LocalAlgorithm::MbByMb);
    CHECK(parse_local_algorithm("cmb") == LocalAlgorithm::Cmb);
    CHECK(parse_local_algorithm("lcs-fs") == LocalAlgorithm::LcsFs);

    for (const char* bad : {"PC", "SCA", "", "MMPC2", "local"}) {
        try {
            parse_local_algorithm(bad);
            FAIL_CHECK("expected UnknownAlgorithm for ", bad);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::UnknownAlgorithm);
        }
    }
    try {
        parse_pc_variant("GetPCD");
        FAIL_CHECK("expected UnknownAlgorithm");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnknownAlgorithm);
    }
}

TEST_CASE("learn_pc_set on an edgeless graph rejects everything") {
    const Dag g = make_dag({"A", "B", "C", "D"}, {});
    OracleCi ci(g);
    for (PcVariant v : all_pc_variants()) {
        const PcSetResult r = learn_pc_set(ci, 0, v);
        CHECK(r.pc.empty());
        CHECK(r.sepsets.size() == 3);
        for (const auto& [x, z] : r.sepsets) CHECK(z.empty());
        CHECK(r.n_ci_tests > 0);
    }
}

TEST_CASE("learn_pc_set recovers the adjacency on bundled networks") {
    for (const char* file : {"asia.bif", "child.bif", "insurance.bif", "alarm.bif"}) {
        const AnyBn bn = read_network_file(data_path(file));
        const Dag& g = bn.graph();
        OracleCi ci(g);
        INFO("network ", std::string(file));
        for (int t = 0; t < g.node_count(); ++t)
            for (PcVariant v : all_pc_variants()) check_pc_set(ci, g, t, v);
    }
}

TEST_CASE("GetPC stays inside HITON-PC where one-sided discovery overshoots") {
    // N4 is both a spouse of N1 (shared child N2) and a descendant of N1
    // (through N3), so no subset of N1's one-sided candidate pool separates
    // the pair; only the reverse run does. HITON-PC keeps it, the symmetry
    // filter removes it.
    const Dag g = make_dag({"N0", "N1", "N2", "N3", "N4", "N5"},
                           {{"N0", "N4"},
                            {"N0", "N5"},
                            {"N1", "N2"},
                            {"N1", "N3"},
                            {"N3", "N4"},
                            {"N4", "N2"},
                            {"N5", "N3"}});
    OracleCi ci(g);
    const int t = g.index_of("N1");
    const PcSetResult hiton = learn_pc_set(ci, t, PcVariant::HitonPc);
    const PcSetResult getpc = learn_pc_set(ci, t, PcVariant::GetPc);
    CHECK(set_is_subset(getpc.pc, hiton.pc));
    CHECK(getpc.pc.size() < hiton.pc.size());
    CHECK(getpc.pc == true_local(g, t).adjacency());
    CHECK(set_contains(hiton.pc, g.index_of("N4")));

    // Capped conditioning sets on sampled data create asymmetries in both
    // directions; the filter output stays inside its base either way.
    const AnyBn bn = read_network_file(data_path("asia.bif"));
    const Dataset ds = forward_sample(bn.discrete, 2000, 41);
    DataCi capped(ds, 0.05, 1);
    for (int target = 0; target < ds.n_columns(); ++target) {
        const PcSetResult h = learn_pc_set(capped, target, PcVariant::HitonPc);
        const PcSetResult s = learn_pc_set(capped, target, PcVariant::GetPc);
        CHECK(set_is_subset(s.pc, h.pc));
    }
}

TEST_CASE("a lone parent stays undirected in a two-node equivalence class") {
    const Dag g = make_dag({"A", "T"}, {{"A", "T"}});
    OracleCi ci(g);
    const int t = g.index_of("T");
    for (LocalAlgorithm a : all_local_algorithms()) {
        const LocalResult r = learn_local(ci, t, a);
        INFO("algorithm ", local_algorithm_name(a));
        CHECK(r.structure.parents.empty());
        CHECK(r.structure.children.empty());
        CHECK(r.structure.undirected_neighbors == NodeSet{g.index_of("A")});
        CHECK(r.visited.front() == t);
    }
}

TEST_CASE("a compelled collider orients both parents") {
    const Dag g = make_dag({"A", "T", "B"}, {{"A", "T"}, {"B", "T"}});
    OracleCi ci(g);
    const int t = g.index_of("T");
    const NodeSet ab{g.index_of("A"), g.index_of("B")};
    for (LocalAlgorithm a : all_local_algorithms()) {
        const LocalResult r = learn_local(ci, t, a);
        INFO("algorithm ", local_algorithm_name(a));
        CHECK(r.structure.parents == ab);
        CHECK(r.structure.children.empty());
        CHECK(r.structure.undirected_neighbors.empty());
    }

    // The same collider seen from a parent: the parent-side edge is
    // compelled away from the target's side only at the collider, so A keeps
    // T as a child and nothing else.
    const int a_node = g.index_of("A");
    for (LocalAlgorithm a : all_local_algorithms()) {
        const LocalResult r = learn_local(ci, a_node, a);
        INFO("algorithm ", local_algorithm_name(a));
        CHECK(r.structure.parents.empty());
        CHECK(r.structure.children == NodeSet{t});
        CHECK(r.structure.undirected_neighbors.empty());
    }
}

TEST_CASE("every 4-node DAG yields the true CPDAG classification for all targets") {
    const std::vector<Dag> dags = all_dags(4);
    REQUIRE(dags.size() == 543);
    for (const Dag& g : dags) {
        const Pdag cpdag = dag_to_cpdag(g);
        OracleCi ci(g);
        for (int t = 0; t < 4; ++t) {
            for (LocalAlgorithm a : all_local_algorithms())
                check_against_cpdag(ci, g, cpdag, t, a);
            for (PcVariant v : all_pc_variants()) check_pc_set(ci, g, t, v);
        }
    }
}

TEST_CASE("seeded 6-node DAGs yield the true CPDAG classification") {
    for (std::uint64_t seed = 901; seed <= 920; ++seed) {
        const Dag g = random_dag(seed, 6, 0.4);
        const Pdag cpdag = dag_to_cpdag(g);
        OracleCi ci(g);
        INFO("seed ", seed);
        for (int t = 0; t < 6; ++t)
            for (LocalAlgorithm a : all_local_algorithms())
                check_against_cpdag(ci, g, cpdag, t, a);
    }
}

TEST_CASE("local learners match the true CPDAG on the small bundled networks") {
    for (const char* file :
         {"cancer.bif", "earthquake.bif", "survey.bif", "asia.bif", "sachs.bif"}) {
        INFO("network ", file);
        check_network_against_cpdag(file);
    }
}

TEST_CASE("local learners match the true CPDAG on CHILD") {
    check_network_against_cpdag("child.bif");
}

TEST_CASE("local learners match the true CPDAG on INSURANCE") {
    check_network_against_cpdag("insurance.bif");
}

TEST_CASE("local learners match the true CPDAG on ALARM") {
    check_network_against_cpdag("alarm.bif");
}

TEST_CASE("sampled-data runs keep the structural invariants") {
    const AnyBn bn = read_network_file(data_path("asia.bif"));
    const Dataset ds = forward_sample(bn.discrete, 2000, 41);
    DataCi ci(ds, 0.05);
    for (int t = 0; t < ds.n_columns(); ++t) {
        for (LocalAlgorithm a : all_local_algorithms()) {
            const LocalResult r = learn_local(ci, t, a);
            INFO("algorithm ", local_algorithm_name(a), " target ", t);
            check_disjoint(r.structure);
            CHECK(r.structure.spouses.empty());
            REQUIRE(!r.visited.empty());
            CHECK(r.visited.front() == t);
            NodeSet seen;
            for (int v : r.visited) {
                CHECK(!set_contains(seen, v));
                set_insert(seen, v);
            }
            CHECK(r.n_ci_tests > 0);
        }
    }
}

TEST_CASE("fuzzed discrete networks keep the outputs disjoint") {
    for (std::uint64_t seed = 60; seed < 68; ++seed) {
        const Dag g = random_dag(seed, 7, 0.3);
        DiscreteBn net;
        net.name = "fuzz";
        net.graph = g;
        net.cardinalities.assign(7, 2);
        RowRng rng(seed, 1);
        for (int v = 0; v < 7; ++v) {
            const int rows = 1 << g.parents(v).size();
            std::vector<std::vector<double>> cpt;
            for (int rix = 0; rix < rows; ++rix) {
                const double p = 0.15 + 0.7 * rng.next_double();
                cpt.push_back({p, 1.0 - p});
            }
            net.cpts.push_back(cpt);
            net.value_names.push_back({"no", "yes"});
        }
        net.validate();
        const Dataset ds = forward_sample(net, 800, seed * 13 + 1);
        DataCi ci(ds, 0.05);
        for (int t = 0; t < 7; ++t) {
            for (LocalAlgorithm a : all_local_algorithms()) {
                const LocalResult r = learn_local(ci, t, a);
                check_disjoint(r.structure);
            }
        }
    }
}

TEST_CASE("expansion is deterministic across fresh and warm sources") {
    const AnyBn bn = read_network_file(data_path("child.bif"));
    const Dag& g = bn.graph();
    for (LocalAlgorithm a : all_local_algorithms()) {
        for (int t : {0, 7, 13}) {
            OracleCi ci1(g);
            OracleCi ci2(g);
            const LocalResult r1 = learn_local(ci1, t, a);
            const LocalResult r2 = learn_local(ci2, t, a);
            INFO("algorithm ", local_algorithm_name(a), " target ", t);
            CHECK(r1.visited == r2.visited);
            CHECK(r1.structure.parents == r2.structure.parents);
            CHECK(r1.structure.children == r2.structure.children);
            CHECK(r1.structure.undirected_neighbors == r2.structure.undirected_neighbors);
            CHECK(r1.n_ci_tests == r2.n_ci_tests);

            // A warm source answers everything from its cache: the walk and
            // its output repeat while no new test is performed.
            const LocalResult r3 = learn_local(ci1, t, a);
            CHECK(r3.visited == r1.visited);
            CHECK(r3.n_ci_tests == 0);
            CHECK(r3.structure.parents == r1.structure.parents);
        }
    }

    const Dataset ds = forward_sample(bn.discrete, 1500, 9);
    for (LocalAlgorithm a : all_local_algorithms()) {
        DataCi d1(ds, 0.05);
        DataCi d2(ds, 0.05);
        const LocalResult r1 = learn_local(d1, 2, a);
        const LocalResult r2 = learn_local(d2, 2, a);
        CHECK(r1.visited == r2.visited);
        CHECK(r1.n_ci_tests == r2.n_ci_tests);
    }
}

TEST_CASE("the visit guard bounds expansion") {
    const Dag g = make_dag({"A", "B", "C", "D", "E"},
                           {{"A", "B"}, {"B", "C"}, {"C", "D"}, {"D", "E"}});
    OracleCi ci(g);
    for (LocalAlgorithm a : all_local_algorithms()) {
        LocalOptions opts;
        opts.max_visited = 2;
        const LocalResult r = learn_local(ci, 0, a, opts);
        INFO("algorithm ", local_algorithm_name(a));
        CHECK(r.visited.size() <= 2);
        check_disjoint(r.structure);
    }

    // Unbounded runs classify the whole chain, so the guard is the only
    // thing that stopped the expansion above.
    const LocalResult full = learn_local(ci, 0, LocalAlgorithm::PcdByPcd);
    CHECK(full.structure.adjacency() == NodeSet{1});
}

TEST_CASE("bad targets and names are rejected") {
    const Dag g = make_dag({"A", "B"}, {{"A", "B"}});
    OracleCi ci(g);
    for (int bad : {-1, 2, 10}) {
        try {
            learn_local(ci, bad, LocalAlgorithm::Cmb);
            FAIL_CHECK("expected UnknownNode for ", bad);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::UnknownNode);
        }
        try {
            learn_pc_set(ci, bad, PcVariant::Mmpc);
            FAIL_CHECK("expected UnknownNode for ", bad);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::UnknownNode);
        }
    }

    const LocalResult byname = learn_local(ci, 0, "pcd-by-pcd");
    CHECK(byname.algorithm == "PCD-by-PCD");
    const PcSetResult pcbyname = learn_pc_set(ci, 0, "hiton-pc");
    CHECK(pcbyname.variant == "HITON-PC");
}

TEST_CASE("golden regression on sampled data") {
    const AnyBn bn = read_network_file(data_path("asia.bif"));
    const Dag& g = bn.graph();
    const Dataset ds = forward_sample(bn.discrete, 5000, 7);

    std::string report = "algorithm\ttarget\tparents\tchildren\tundirected\tvisited\tn_ci_tests\n";
    for (LocalAlgorithm a : all_local_algorithms()) {
        DataCi ci(ds, 0.05);
        for (int t = 0; t < g.node_count(); ++t) {
            const LocalResult r = learn_local(ci, t, a);
            NodeSet visited_set;
            std::string visited_names;
            for (int v : r.visited) {
                if (!visited_names.empty()) visited_names += ",";
                visited_names += g.name(v);
                set_insert(visited_set, v);
            }
            report += r.algorithm + "\t" + g.name(t) + "\t" +
                      join_names(g, r.structure.parents) + "\t" +
                      join_names(g, r.structure.children) + "\t" +
                      join_names(g, r.structure.undirected_neighbors) + "\t" + visited_names +
                      "\t" + std::to_string(r.n_ci_tests) + "\n";
        }
    }
    CHECK(report == read_text_file(golden_path("local_asia.txt")));
}
