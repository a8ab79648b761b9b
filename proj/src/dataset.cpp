#include "causal/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "causal/common.hpp"

namespace causal {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find('\t', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

// Splits into lines on '\n', tolerating a trailing '\r' per line and a final
// newline. A trailing empty fragment after the last '\n' is not a line.
std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t pos = text.find('\n', start);
        if (pos == std::string::npos) {
            if (start < text.size()) out.push_back(text.substr(start));
            break;
        }
        std::string line = text.substr(start, pos - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        out.push_back(std::move(line));
        start = pos + 1;
    }
    return out;
}

void append_double(std::string& out, double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    out.append(buf, res.ptr);
}

double parse_double_token(const std::string& tok, int row, int col) {
    double x = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    const auto res = std::from_chars(first, last, x);
    if (res.ec != std::errc{} || res.ptr != last)
        throw Error(ErrorKind::Parse, "dataset row " + std::to_string(row) + ", column " +
                                          std::to_string(col) + ": bad number '" + tok + "'");
    return x;
}

std::int32_t parse_int_token(const std::string& tok, int row, int col) {
    std::int32_t x = 0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    const auto res = std::from_chars(first, last, x);
    if (res.ec != std::errc{} || res.ptr != last)
        throw Error(ErrorKind::Parse, "dataset row " + std::to_string(row) + ", column " +
                                          std::to_string(col) + ": bad integer '" + tok + "'");
    return x;
}

} // namespace

int Dataset::index_of(const std::string& name) const {
    for (int j = 0; j < n_columns(); ++j)
        if (columns[j].name == name) return j;
    throw Error(ErrorKind::UnknownNode, "unknown column: " + name);
}

std::vector<std::string> Dataset::names() const {
    std::vector<std::string> out;
    out.reserve(columns.size());
    for (const auto& c : columns) out.push_back(c.name);
    return out;
}

bool Dataset::all_discrete() const {
    return std::all_of(columns.begin(), columns.end(),
                       [](const Column& c) { return c.discrete(); });
}

bool Dataset::all_continuous() const {
    return std::all_of(columns.begin(), columns.end(),
                       [](const Column& c) { return !c.discrete(); });
}

void Dataset::validate() const {
    for (int j = 0; j < n_columns(); ++j) {
        const Column& c = columns[j];
        if (c.name.empty())
            throw Error(ErrorKind::Validation, "column " + std::to_string(j) + " has no name");
        for (int k = 0; k < n_columns(); ++k)
            if (k != j && columns[k].name == c.name)
                throw Error(ErrorKind::Validation, "duplicate column name: " + c.name);
        const std::size_t want = static_cast<std::size_t>(n);
        if (c.discrete()) {
            if (c.ints.size() != want || !c.reals.empty())
                throw Error(ErrorKind::Validation, "column " + c.name + " has wrong length");
            for (std::int32_t v : c.ints)
                if (v < 0 || v >= c.cardinality)
                    throw Error(ErrorKind::Validation,
                                "column " + c.name + ": value " + std::to_string(v) +
                                    " outside cardinality " + std::to_string(c.cardinality));
        } else {
            if (c.reals.size() != want || !c.ints.empty())
                throw Error(ErrorKind::Validation, "column " + c.name + " has wrong length");
        }
    }
}

std::string write_dataset_text(const Dataset& ds) {
    std::string out;
    for (int j = 0; j < ds.n_columns(); ++j) {
        if (j) out += '\t';
        out += ds.columns[j].name;
    }
    out += '\n';
    for (int j = 0; j < ds.n_columns(); ++j) {
        if (j) out += '\t';
        if (ds.columns[j].discrete())
            out += "d" + std::to_string(ds.columns[j].cardinality);
        else
            out += "c";
    }
    out += '\n';
    for (std::int64_t i = 0; i < ds.n; ++i) {
        for (int j = 0; j < ds.n_columns(); ++j) {
            if (j) out += '\t';
            const Column& c = ds.columns[j];
            if (c.discrete())
                out += std::to_string(c.ints[static_cast<std::size_t>(i)]);
            else
                append_double(out, c.reals[static_cast<std::size_t>(i)]);
        }
        out += '\n';
    }
    return out;
}

Dataset read_dataset_text(const std::string& text) {
    const auto lines = split_lines(text);
    if (lines.size() < 2)
        throw Error(ErrorKind::Parse, "dataset text needs a name line and a kind line");
    const auto names = split_tabs(lines[0]);
    const auto kinds = split_tabs(lines[1]);
    if (names.size() != kinds.size())
        throw Error(ErrorKind::Parse, "dataset header: " + std::to_string(names.size()) +
                                          " names but " + std::to_string(kinds.size()) + " kinds");
    Dataset ds;
    ds.columns.resize(names.size());
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (names[j].empty())
            throw Error(ErrorKind::Parse, "dataset header: empty name in column " + std::to_string(j));
        ds.columns[j].name = names[j];
        const std::string& kind = kinds[j];
        if (kind == "c") {
            ds.columns[j].cardinality = 0;
        } else if (kind.size() >= 2 && kind[0] == 'd') {
            int card = 0;
            const char* first = kind.data() + 1;
            const char* last = kind.data() + kind.size();
            const auto res = std::from_chars(first, last, card);
            if (res.ec != std::errc{} || res.ptr != last || card < 1)
                throw Error(ErrorKind::Parse, "dataset header: bad kind '" + kind + "' in column " +
                                                  std::to_string(j));
            ds.columns[j].cardinality = card;
        } else {
            throw Error(ErrorKind::Parse,
                        "dataset header: bad kind '" + kind + "' in column " + std::to_string(j));
        }
    }
    ds.n = static_cast<std::int64_t>(lines.size()) - 2;
    for (auto& c : ds.columns) {
        if (c.discrete())
            c.ints.reserve(static_cast<std::size_t>(ds.n));
        else
            c.reals.reserve(static_cast<std::size_t>(ds.n));
    }
    for (std::size_t i = 2; i < lines.size(); ++i) {
        const auto fields = split_tabs(lines[i]);
        const int row = static_cast<int>(i) - 2;
        if (fields.size() != names.size())
            throw Error(ErrorKind::Parse, "dataset row " + std::to_string(row) + ": expected " +
                                              std::to_string(names.size()) + " values, got " +
                                              std::to_string(fields.size()));
        for (std::size_t j = 0; j < fields.size(); ++j) {
            Column& c = ds.columns[j];
            if (c.discrete()) {
                const std::int32_t v = parse_int_token(fields[j], row, static_cast<int>(j));
                if (v < 0 || v >= c.cardinality)
                    throw Error(ErrorKind::Validation,
                                "dataset row " + std::to_string(row) + ", column " +
                                    std::to_string(j) + ": value " + std::to_string(v) +
                                    " outside cardinality " + std::to_string(c.cardinality));
                c.ints.push_back(v);
            } else {
                c.reals.push_back(parse_double_token(fields[j], row, static_cast<int>(j)));
            }
        }
    }
    return ds;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Parse, "cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Parse, "cannot write file: " + path);
    out << text;
    if (!out) throw Error(ErrorKind::Parse, "write failed: " + path);
}

void write_dataset_file(const Dataset& ds, const std::string& path) {
    write_text_file(path, write_dataset_text(ds));
}

Dataset read_dataset_file(const std::string& path) {
    return read_dataset_text(read_text_file(path));
}

} // namespace causal
