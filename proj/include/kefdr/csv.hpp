#ifndef KEFDR_CSV_HPP
#define KEFDR_CSV_HPP

#include <string>
#include <vector>

#include "kefdr/matrix.hpp"

namespace kefdr::csv {

// Shortest representation that round-trips a double exactly.
std::string fmt(double v);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

Table read(const std::string& path);

void write(const std::string& path, const std::vector<std::string>& header,
           const std::vector<std::vector<std::string>>& rows,
           const std::vector<std::string>& comment_lines = {});

void write_matrix(const std::string& path, const Matrix& m);

} // namespace kefdr::csv

#endif
