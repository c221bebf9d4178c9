// csv.hpp: fixed-format CSV emission (byte-stable for identical inputs).
#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nhbrack {

// Thrown when an output file cannot be opened or written.
class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<double>& values);

private:
    std::ofstream out_;
    std::size_t columns_;
    std::string path_;
};

// Shortest round-trip decimal form ("%.17g").
std::string format_double(double v);

}  // namespace nhbrack
