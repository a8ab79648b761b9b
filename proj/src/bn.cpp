#include "causal/bn.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>

#include "causal/common.hpp"
#include "causal/rng.hpp"

namespace causal {

namespace {

// --- BIF subset tokenizer -------------------------------------------------

struct Token {
    std::string text;
    int line = 0;
    bool punct = false;
};

bool is_punct_char(char c) {
    return c == '{' || c == '}' || c == '(' || c == ')' || c == '[' || c == ']' || c == ',' ||
           c == ';' || c == '|';
}

std::vector<Token> tokenize_bif(const std::string& text) {
    std::vector<Token> out;
    int line = 1;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == '\n') {
            ++line;
            ++i;
        } else if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
        } else if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n') ++i;
        } else if (is_punct_char(c)) {
            out.push_back({std::string(1, c), line, true});
            ++i;
        } else {
            const std::size_t start = i;
            while (i < text.size()) {
                const char d = text[i];
                if (d == ' ' || d == '\t' || d == '\r' || d == '\n' || is_punct_char(d)) break;
                ++i;
            }
            out.push_back({text.substr(start, i - start), line, false});
        }
    }
    return out;
}

// Cursor over the token stream with positioned error reporting.
class BifReader {
public:
    explicit BifReader(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    bool done() const { return pos_ >= tokens_.size(); }
    const Token& peek() const {
        if (done()) throw Error(ErrorKind::Parse, "bif: unexpected end of input");
        return tokens_[pos_];
    }
    Token take() {
        Token t = peek();
        ++pos_;
        return t;
    }
    // Consumes one token that must equal `want`.
    Token expect(const std::string& want) {
        Token t = take();
        if (t.text != want) fail(t, "expected '" + want + "', got '" + t.text + "'");
        return t;
    }
    Token expect_word() {
        Token t = take();
        if (t.punct) fail(t, "expected a name, got '" + t.text + "'");
        return t;
    }
    double expect_number() {
        Token t = expect_word();
        double x = 0.0;
        const char* first = t.text.data();
        const char* last = t.text.data() + t.text.size();
        const auto res = std::from_chars(first, last, x);
        if (res.ec != std::errc{} || res.ptr != last)
            fail(t, "expected a number, got '" + t.text + "'");
        return x;
    }
    bool next_is(const std::string& text) const { return !done() && peek().text == text; }

    [[noreturn]] static void fail(const Token& at, const std::string& msg) {
        throw Error(ErrorKind::Parse, "bif line " + std::to_string(at.line) + ": " + msg);
    }

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

// Skip a `property ... ;` statement (allowed inside any block, ignored).
void skip_property(BifReader& r) {
    r.expect("property");
    while (r.take().text != ";") {
    }
}

struct VariableBlock {
    std::string name;
    int cardinality = 0;
    std::vector<std::string> values;
    int line = 0;
};

VariableBlock parse_variable_block(BifReader& r) {
    r.expect("variable");
    VariableBlock v;
    Token name = r.expect_word();
    v.name = name.text;
    v.line = name.line;
    r.expect("{");
    bool saw_type = false;
    while (!r.next_is("}")) {
        if (r.next_is("property")) {
            skip_property(r);
            continue;
        }
        r.expect("type");
        r.expect("discrete");
        r.expect("[");
        const double card = r.expect_number();
        r.expect("]");
        v.cardinality = static_cast<int>(card);
        if (v.cardinality < 1 || static_cast<double>(v.cardinality) != card)
            throw Error(ErrorKind::Parse, "bif: variable " + v.name + " has bad cardinality");
        r.expect("{");
        while (true) {
            v.values.push_back(r.expect_word().text);
            if (r.next_is(",")) {
                r.take();
                continue;
            }
            break;
        }
        r.expect("}");
        r.expect(";");
        saw_type = true;
    }
    r.expect("}");
    if (!saw_type)
        throw Error(ErrorKind::Parse, "bif: variable " + v.name + " has no type declaration");
    if (static_cast<int>(v.values.size()) != v.cardinality)
        throw Error(ErrorKind::Validation,
                    "bif: variable " + v.name + " declares " + std::to_string(v.cardinality) +
                        " states but lists " + std::to_string(v.values.size()) + " names");
    return v;
}

// --- linear-Gaussian descriptor -------------------------------------------

double parse_gbn_number(const std::string& tok, int line) {
    double x = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    const auto res = std::from_chars(first, last, x);
    if (res.ec != std::errc{} || res.ptr != last)
        throw Error(ErrorKind::Parse,
                    "descriptor line " + std::to_string(line) + ": bad number '" + tok + "'");
    return x;
}

std::vector<std::string> split_whitespace(const std::string& line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        if (i >= line.size()) break;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        out.push_back(line.substr(start, i - start));
    }
    return out;
}

} // namespace

// --- DiscreteBn -------------------------------------------------------------

BnDescriptor DiscreteBn::descriptor() const {
    return {name, graph.node_count(), graph.edge_count()};
}

int DiscreteBn::cpt_row_count(int node) const {
    int rows = 1;
    for (int p : graph.parents(node)) rows *= cardinalities[p];
    return rows;
}

int DiscreteBn::cpt_row_index(int node, const std::vector<int>& assignment) const {
    int idx = 0;
    for (int p : graph.parents(node)) idx = idx * cardinalities[p] + assignment[p];
    return idx;
}

void DiscreteBn::validate() const {
    const int p = graph.node_count();
    if (static_cast<int>(cardinalities.size()) != p ||
        static_cast<int>(cpts.size()) != p ||
        static_cast<int>(value_names.size()) != p)
        throw Error(ErrorKind::Validation, "network " + name + ": per-node arrays out of shape");
    for (int v = 0; v < p; ++v) {
        if (cardinalities[v] < 1)
            throw Error(ErrorKind::Validation, "node " + graph.name(v) + ": cardinality must be positive");
        if (static_cast<int>(value_names[v].size()) != cardinalities[v])
            throw Error(ErrorKind::Validation, "node " + graph.name(v) + ": value name count mismatch");
        if (static_cast<int>(cpts[v].size()) != cpt_row_count(v))
            throw Error(ErrorKind::Validation,
                        "node " + graph.name(v) + ": expected " + std::to_string(cpt_row_count(v)) +
                            " CPT rows, found " + std::to_string(cpts[v].size()));
        for (const auto& row : cpts[v]) {
            if (static_cast<int>(row.size()) != cardinalities[v])
                throw Error(ErrorKind::Validation, "node " + graph.name(v) + ": CPT row length mismatch");
            double sum = 0.0;
            for (double e : row) {
                if (!(e >= 0.0))
                    throw Error(ErrorKind::Validation, "node " + graph.name(v) + ": negative CPT entry");
                sum += e;
            }
            if (std::abs(sum - 1.0) > 1e-9)
                throw Error(ErrorKind::Validation, "node " + graph.name(v) + ": CPT row sums to " +
                                                       std::to_string(sum) + ", not 1");
        }
    }
    topological_order(graph);  // throws Cycle if the arcs are cyclic
}

DiscreteBn parse_discrete_network(const std::string& text) {
    BifReader r(tokenize_bif(text));
    r.expect("network");
    DiscreteBn bn;
    bn.name = r.expect_word().text;
    r.expect("{");
    while (!r.next_is("}")) skip_property(r);
    r.expect("}");

    std::vector<VariableBlock> vars;
    std::map<std::string, int> index;
    struct ProbBlock {
        std::string child;
        std::vector<std::string> parents;
        int line = 0;
        // rows as written: value names per header parent, then the entries
        std::vector<std::pair<std::vector<std::string>, std::vector<double>>> rows;
        std::vector<double> table;  // root form
        bool has_table = false;
    };
    std::vector<ProbBlock> blocks;

    while (!r.done()) {
        if (r.next_is("variable")) {
            VariableBlock v = parse_variable_block(r);
            if (index.count(v.name))
                throw Error(ErrorKind::Validation, "bif: duplicate variable " + v.name);
            index[v.name] = static_cast<int>(vars.size());
            vars.push_back(std::move(v));
        } else if (r.next_is("probability")) {
            Token kw = r.take();
            ProbBlock b;
            b.line = kw.line;
            r.expect("(");
            b.child = r.expect_word().text;
            if (r.next_is("|")) {
                r.take();
                while (true) {
                    b.parents.push_back(r.expect_word().text);
                    if (r.next_is(",")) {
                        r.take();
                        continue;
                    }
                    break;
                }
            }
            r.expect(")");
            r.expect("{");
            while (!r.next_is("}")) {
                if (r.next_is("property")) {
                    skip_property(r);
                    continue;
                }
                if (r.next_is("table")) {
                    r.take();
                    b.has_table = true;
                    while (true) {
                        b.table.push_back(r.expect_number());
                        if (r.next_is(",")) {
                            r.take();
                            continue;
                        }
                        break;
                    }
                    r.expect(";");
                } else {
                    r.expect("(");
                    std::vector<std::string> cfg;
                    while (true) {
                        cfg.push_back(r.expect_word().text);
                        if (r.next_is(",")) {
                            r.take();
                            continue;
                        }
                        break;
                    }
                    r.expect(")");
                    std::vector<double> entries;
                    while (true) {
                        entries.push_back(r.expect_number());
                        if (r.next_is(",")) {
                            r.take();
                            continue;
                        }
                        break;
                    }
                    r.expect(";");
                    b.rows.emplace_back(std::move(cfg), std::move(entries));
                }
            }
            r.expect("}");
            blocks.push_back(std::move(b));
        } else {
            BifReader::fail(r.peek(), "expected 'variable' or 'probability', got '" + r.peek().text + "'");
        }
    }

    const int p = static_cast<int>(vars.size());
    if (p == 0) throw Error(ErrorKind::Parse, "bif: no variables declared");
    std::vector<std::string> names;
    names.reserve(vars.size());
    for (const auto& v : vars) names.push_back(v.name);
    bn.graph = Dag(names);
    bn.cardinalities.resize(p);
    bn.value_names.resize(p);
    for (int v = 0; v < p; ++v) {
        bn.cardinalities[v] = vars[v].cardinality;
        bn.value_names[v] = vars[v].values;
    }

    // Arcs first, so parent sets are complete before CPT rows are placed.
    std::vector<const ProbBlock*> block_of(p, nullptr);
    for (const auto& b : blocks) {
        auto it = index.find(b.child);
        if (it == index.end())
            throw Error(ErrorKind::Parse, "bif line " + std::to_string(b.line) +
                                              ": probability block for undeclared variable " + b.child);
        const int child = it->second;
        if (block_of[child])
            throw Error(ErrorKind::Validation, "bif: duplicate probability block for " + b.child);
        block_of[child] = &b;
        for (const auto& pname : b.parents) {
            auto pit = index.find(pname);
            if (pit == index.end())
                throw Error(ErrorKind::Parse, "bif line " + std::to_string(b.line) +
                                                  ": undeclared parent " + pname + " of " + b.child);
            bn.graph.add_edge(pit->second, child);
        }
    }

    bn.cpts.resize(p);
    for (int child = 0; child < p; ++child) {
        const ProbBlock* b = block_of[child];
        if (!b)
            throw Error(ErrorKind::Validation, "bif: no probability block for " + vars[child].name);
        const int rows = bn.cpt_row_count(child);
        bn.cpts[child].assign(rows, {});
        std::vector<bool> seen(rows, false);
        if (b->parents.empty()) {
            if (!b->has_table || !b->rows.empty())
                throw Error(ErrorKind::Parse, "bif line " + std::to_string(b->line) + ": " + b->child +
                                                  " has no parents and needs a single table row");
            bn.cpts[child][0] = b->table;
            seen[0] = true;
        } else {
            if (b->has_table)
                throw Error(ErrorKind::Parse, "bif line " + std::to_string(b->line) + ": " + b->child +
                                                  " has parents; use ( values ) rows, not table");
            // Header order may differ from node-index order; remap each row.
            std::vector<int> header_parents;
            for (const auto& pname : b->parents) header_parents.push_back(index.at(pname));
            const NodeSet& sorted_parents = bn.graph.parents(child);
            for (const auto& [cfg, entries] : b->rows) {
                if (cfg.size() != header_parents.size())
                    throw Error(ErrorKind::Validation,
                                "bif: row of " + b->child + " lists " + std::to_string(cfg.size()) +
                                    " values for " + std::to_string(header_parents.size()) + " parents");
                std::vector<int> value_of(p, -1);
                for (std::size_t k = 0; k < cfg.size(); ++k) {
                    const int parent = header_parents[k];
                    const auto& dom = vars[parent].values;
                    int v = -1;
                    for (std::size_t s = 0; s < dom.size(); ++s)
                        if (dom[s] == cfg[k]) v = static_cast<int>(s);
                    if (v < 0)
                        throw Error(ErrorKind::Validation, "bif: '" + cfg[k] + "' is not a state of " +
                                                               vars[parent].name);
                    value_of[parent] = v;
                }
                int idx = 0;
                for (int sp : sorted_parents) idx = idx * bn.cardinalities[sp] + value_of[sp];
                if (seen[static_cast<std::size_t>(idx)])
                    throw Error(ErrorKind::Validation,
                                "bif: duplicate CPT row for " + b->child);
                seen[static_cast<std::size_t>(idx)] = true;
                bn.cpts[child][static_cast<std::size_t>(idx)] = entries;
            }
        }
        for (int rix = 0; rix < rows; ++rix)
            if (!seen[static_cast<std::size_t>(rix)])
                throw Error(ErrorKind::Validation, "bif: missing CPT rows for " + b->child);
    }

    bn.validate();
    return bn;
}

// --- GaussianBn -------------------------------------------------------------

BnDescriptor GaussianBn::descriptor() const {
    return {name, graph.node_count(), graph.edge_count()};
}

void GaussianBn::validate() const {
    const int p = graph.node_count();
    if (static_cast<int>(intercepts.size()) != p ||
        static_cast<int>(coefficients.size()) != p ||
        static_cast<int>(sigmas.size()) != p)
        throw Error(ErrorKind::Validation, "network " + name + ": per-node arrays out of shape");
    for (int v = 0; v < p; ++v) {
        if (!(sigmas[v] > 0.0))
            throw Error(ErrorKind::Validation,
                        "node " + graph.name(v) + ": sigma must be strictly positive");
        if (coefficients[v].size() != graph.parents(v).size())
            throw Error(ErrorKind::Validation, "node " + graph.name(v) + ": coefficient count mismatch");
    }
    topological_order(graph);
}

GaussianBn parse_gaussian_network(const std::string& text, const std::string& name) {
    struct ArcLine {
        std::string parent, child;
        double coeff;
        int line;
    };
    std::vector<std::string> names;
    std::vector<double> intercepts, sigmas;
    std::vector<ArcLine> arcs;
    std::map<std::string, int> index;

    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t pos = text.find('\n', start);
        std::string line = text.substr(start, pos == std::string::npos ? pos : pos - start);
        start = pos == std::string::npos ? text.size() + 1 : pos + 1;
        ++line_no;
        const auto tok = split_whitespace(line);
        if (tok.empty() || tok[0][0] == '#') continue;
        if (tok[0] == "node") {
            if (tok.size() != 4)
                throw Error(ErrorKind::Parse, "descriptor line " + std::to_string(line_no) +
                                                  ": want 'node <name> <intercept> <sigma>'");
            if (index.count(tok[1]))
                throw Error(ErrorKind::Validation, "descriptor: duplicate node " + tok[1]);
            index[tok[1]] = static_cast<int>(names.size());
            names.push_back(tok[1]);
            intercepts.push_back(parse_gbn_number(tok[2], line_no));
            sigmas.push_back(parse_gbn_number(tok[3], line_no));
        } else if (tok[0] == "arc") {
            if (tok.size() != 4)
                throw Error(ErrorKind::Parse, "descriptor line " + std::to_string(line_no) +
                                                  ": want 'arc <parent> <child> <coefficient>'");
            arcs.push_back({tok[1], tok[2], parse_gbn_number(tok[3], line_no), line_no});
        } else {
            throw Error(ErrorKind::Parse, "descriptor line " + std::to_string(line_no) +
                                              ": unknown directive '" + tok[0] + "'");
        }
    }
    if (names.empty()) throw Error(ErrorKind::Parse, "descriptor: no nodes declared");

    GaussianBn bn;
    bn.name = name;
    bn.graph = Dag(names);
    bn.intercepts = std::move(intercepts);
    bn.sigmas = std::move(sigmas);
    bn.coefficients.resize(names.size());

    // Arcs go into the graph first; coefficients then align with the sorted
    // parent lists the graph maintains.
    std::map<std::pair<int, int>, double> coeff_of;
    for (const auto& a : arcs) {
        auto pit = index.find(a.parent);
        auto cit = index.find(a.child);
        if (pit == index.end() || cit == index.end())
            throw Error(ErrorKind::Parse, "descriptor line " + std::to_string(a.line) +
                                              ": arc references an undeclared node");
        bn.graph.add_edge(pit->second, cit->second);
        coeff_of[{pit->second, cit->second}] = a.coeff;
    }
    for (int v = 0; v < bn.graph.node_count(); ++v)
        for (int p : bn.graph.parents(v)) bn.coefficients[v].push_back(coeff_of.at({p, v}));

    bn.validate();
    return bn;
}

// --- sampling and enumeration ------------------------------------------------

Dataset forward_sample(const DiscreteBn& bn, std::int64_t n, std::uint64_t seed) {
    if (n < 1) throw Error(ErrorKind::Precondition, "forward_sample: n must be >= 1");
    bn.validate();
    const auto order = topological_order(bn.graph);
    const int p = bn.graph.node_count();
    Dataset ds;
    ds.n = n;
    ds.columns.resize(p);
    for (int j = 0; j < p; ++j) {
        ds.columns[j].name = bn.graph.name(j);
        ds.columns[j].cardinality = bn.cardinalities[j];
        ds.columns[j].ints.resize(static_cast<std::size_t>(n));
    }
    std::vector<int> assignment(p, 0);
    for (std::int64_t i = 0; i < n; ++i) {
        RowRng rng(seed, static_cast<std::uint64_t>(i));
        for (int node : order) {
            const auto& row = bn.cpts[node][static_cast<std::size_t>(bn.cpt_row_index(node, assignment))];
            const double u = rng.next_double();
            int value = static_cast<int>(row.size()) - 1;
            double cum = 0.0;
            for (int k = 0; k < static_cast<int>(row.size()); ++k) {
                cum += row[k];
                if (u < cum) {
                    value = k;
                    break;
                }
            }
            assignment[node] = value;
            ds.columns[node].ints[static_cast<std::size_t>(i)] = value;
        }
    }
    return ds;
}

Dataset forward_sample(const GaussianBn& bn, std::int64_t n, std::uint64_t seed) {
    if (n < 1) throw Error(ErrorKind::Precondition, "forward_sample: n must be >= 1");
    bn.validate();
    const auto order = topological_order(bn.graph);
    const int p = bn.graph.node_count();
    Dataset ds;
    ds.n = n;
    ds.columns.resize(p);
    for (int j = 0; j < p; ++j) {
        ds.columns[j].name = bn.graph.name(j);
        ds.columns[j].reals.resize(static_cast<std::size_t>(n));
    }
    std::vector<double> assignment(p, 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
        RowRng rng(seed, static_cast<std::uint64_t>(i));
        for (int node : order) {
            double x = bn.intercepts[node];
            const NodeSet& pa = bn.graph.parents(node);
            for (std::size_t k = 0; k < pa.size(); ++k)
                x += bn.coefficients[node][k] * assignment[pa[k]];
            x += bn.sigmas[node] * rng.next_normal();
            assignment[node] = x;
            ds.columns[node].reals[static_cast<std::size_t>(i)] = x;
        }
    }
    return ds;
}

std::vector<double> exact_marginal(const DiscreteBn& bn, int node) {
    bn.validate();
    const int p = bn.graph.node_count();
    if (node < 0 || node >= p) throw Error(ErrorKind::UnknownNode, "exact_marginal: bad node index");
    double states = 1.0;
    for (int card : bn.cardinalities) states *= card;
    if (states > 1e7)
        throw Error(ErrorKind::TooLarge, "exact_marginal: joint state space exceeds 10^7");

    const auto order = topological_order(bn.graph);
    std::vector<double> out(static_cast<std::size_t>(bn.cardinalities[node]), 0.0);
    std::vector<int> assignment(p, 0);
    auto enumerate = [&](auto&& self, int pos, double prob) -> void {
        if (prob == 0.0) return;
        if (pos == p) {
            out[static_cast<std::size_t>(assignment[node])] += prob;
            return;
        }
        const int v = order[static_cast<std::size_t>(pos)];
        const auto& row = bn.cpts[v][static_cast<std::size_t>(bn.cpt_row_index(v, assignment))];
        for (int k = 0; k < static_cast<int>(row.size()); ++k) {
            assignment[v] = k;
            self(self, pos + 1, prob * row[k]);
        }
        assignment[v] = 0;
    };
    enumerate(enumerate, 0, 1.0);
    return out;
}

// --- format sniffing ----------------------------------------------------------

AnyBn parse_network_auto(const std::string& text, const std::string& name) {
    // Discrete BIF text opens with the `network` keyword (comments aside).
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == ' ' || text[i] == '\t' || text[i] == '\r' || text[i] == '\n') {
            ++i;
        } else if (text[i] == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n') ++i;
        } else if (text[i] == '#') {
            while (i < text.size() && text[i] != '\n') ++i;
        } else {
            break;
        }
    }
    AnyBn out;
    if (text.compare(i, 7, "network") == 0) {
        out.is_discrete = true;
        out.discrete = parse_discrete_network(text);
        if (!name.empty()) out.discrete.name = name;
    } else {
        out.is_discrete = false;
        out.gaussian = parse_gaussian_network(text, name);
    }
    return out;
}

AnyBn read_network_file(const std::string& path) {
    // The file stem labels Gaussian descriptors, which carry no inline name.
    std::string stem = path;
    const std::size_t slash = stem.find_last_of("/\\");
    if (slash != std::string::npos) stem = stem.substr(slash + 1);
    const std::size_t dot = stem.find_last_of('.');
    if (dot != std::string::npos && dot > 0) stem = stem.substr(0, dot);
    AnyBn out = parse_network_auto(read_text_file(path), "");
    if (out.is_discrete) {
        if (out.discrete.name.empty() || out.discrete.name == "unknown") out.discrete.name = stem;
    } else {
        out.gaussian.name = stem;
    }
    return out;
}

} // namespace causal
