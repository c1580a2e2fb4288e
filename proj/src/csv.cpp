#include "twoseel/csv.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace twoseel {

namespace {

bool parse_row(const std::string& line, Vec& out) {
    out.clear();
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim whitespace and a possible trailing CR
        const auto b = cell.find_first_not_of(" \t\r");
        if (b == std::string::npos) return false;
        const auto e = cell.find_last_not_of(" \t\r");
        cell = cell.substr(b, e - b + 1);
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str() || *end != '\0') return false;
        out.push_back(v);
    }
    return !out.empty();
}

bool blank(const std::string& line) {
    return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

}  // namespace

Mat read_csv_matrix(std::istream& is, const std::string& name) {
    std::vector<Vec> rows;
    std::string line;
    std::size_t lineno = 0;
    std::size_t width = 0;
    bool first_content = true;
    Vec parsed;
    while (std::getline(is, line)) {
        ++lineno;
        if (blank(line)) continue;
        if (!parse_row(line, parsed)) {
            if (first_content) {  // header row
                first_content = false;
                continue;
            }
            throw CsvError(name + ": row " + std::to_string(lineno) + " is not numeric");
        }
        first_content = false;
        if (width == 0) width = parsed.size();
        if (parsed.size() != width)
            throw CsvError(name + ": row " + std::to_string(lineno) + " has " +
                           std::to_string(parsed.size()) + " columns, expected " +
                           std::to_string(width));
        rows.push_back(parsed);
    }
    if (rows.empty()) throw CsvError(name + ": no data rows");
    Mat m(static_cast<int>(rows.size()), static_cast<int>(width));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < width; ++j)
            m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    return m;
}

Mat read_csv_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw CsvError(path + ": cannot open file");
    return read_csv_matrix(f, path);
}

}  // namespace twoseel
