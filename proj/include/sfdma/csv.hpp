#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sfdma/tensor.hpp"

namespace sfdma::io {

/// Deterministic CSV writer: comma separator, header row, '.' decimal
/// point, LF line endings, doubles formatted with %.12g.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path, std::ios::binary) {
        if (!out_) throw FormatError("csv: cannot write " + path);
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) out_ << ',';
            out_ << header[i];
        }
        out_ << '\n';
        columns_ = header.size();
    }

    CsvWriter& field(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.12g", v);
        return raw(buf);
    }
    CsvWriter& field(long long v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%lld", v);
        return raw(buf);
    }
    CsvWriter& field(std::size_t v) { return field(static_cast<long long>(v)); }
    CsvWriter& field(int v) { return field(static_cast<long long>(v)); }
    CsvWriter& field(const std::string& v) { return raw(v); }

    void end_row() {
        if (in_row_ != columns_) throw Error("csv: row width mismatch");
        out_ << '\n';
        in_row_ = 0;
    }

  private:
    CsvWriter& raw(const std::string& s) {
        if (in_row_) out_ << ',';
        out_ << s;
        ++in_row_;
        return *this;
    }

    std::ofstream out_;
    std::size_t columns_ = 0;
    std::size_t in_row_ = 0;
};

/// Minimal CSV reader for the artifact's own outputs: header + numeric
/// rows, no quoting.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw FormatError("csv: missing column " + name);
    }
};

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("csv: cannot open " + path);
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (first) {
            t.header = std::move(fields);
            first = false;
        } else {
            if (fields.size() != t.header.size()) throw FormatError("csv: ragged row in " + path);
            t.rows.push_back(std::move(fields));
        }
    }
    if (first) throw FormatError("csv: empty file " + path);
    return t;
}

}  // namespace sfdma::io
