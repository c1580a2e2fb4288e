#pragma once

#include <iosfwd>
#include <string>

#include "twoseel/linalg.hpp"

namespace twoseel {

struct CsvError : std::runtime_error {
    explicit CsvError(const std::string& what) : std::runtime_error(what) {}
};

// Reads a rectangular numeric CSV. A non-numeric first line is treated as a
// header and skipped; any other non-numeric or ragged row raises CsvError
// with the 1-based row number. Blank lines are ignored.
Mat read_csv_matrix(std::istream& is, const std::string& name);
Mat read_csv_file(const std::string& path);

}  // namespace twoseel
