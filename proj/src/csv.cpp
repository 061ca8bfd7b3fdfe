#include "kefdr/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "kefdr/errors.hpp"

namespace kefdr::csv {

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (char c : line) {
        if (quoted) {
            if (c == '"')
                quoted = false;
            else
                field.push_back(c);
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    out.push_back(field);
    return out;
}

} // namespace

Table read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open CSV file: " + path);
    Table t;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!have_header) {
            t.header = split_line(line);
            have_header = true;
        } else {
            t.rows.push_back(split_line(line));
        }
    }
    if (!have_header) throw SchemaError("CSV file has no header: " + path);
    return t;
}

void write(const std::string& path, const std::vector<std::string>& header,
           const std::vector<std::vector<std::string>>& rows,
           const std::vector<std::string>& comment_lines) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write CSV file: " + path);
    for (const auto& c : comment_lines) out << "# " << c << "\n";
    for (size_t j = 0; j < header.size(); ++j) {
        if (j) out << ',';
        out << header[j];
    }
    out << '\n';
    for (const auto& row : rows) {
        for (size_t j = 0; j < row.size(); ++j) {
            if (j) out << ',';
            out << row[j];
        }
        out << '\n';
    }
}

void write_matrix(const std::string& path, const Matrix& m) {
    std::vector<std::string> header(m.cols());
    for (int j = 0; j < m.cols(); ++j) header[j] = "c" + std::to_string(j + 1);
    std::vector<std::vector<std::string>> rows(m.rows());
    for (int i = 0; i < m.rows(); ++i) {
        rows[i].resize(m.cols());
        for (int j = 0; j < m.cols(); ++j) rows[i][j] = fmt(m(i, j));
    }
    write(path, header, rows);
}

} // namespace kefdr::csv
