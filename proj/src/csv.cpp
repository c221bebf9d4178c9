// csv.cpp: small CSV writer for trajectories, diagnostics and snapshots.
#include "nhbrack/csv.hpp"

#include "nhbrack/errors.hpp"

#include <cstdio>

namespace nhbrack {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path), columns_(header.size()), path_(path) {
    if (!out_) throw OutputError("cannot open '" + path + "' for writing");
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_) throw StructuralError("CSV row width does not match header for " + path_);
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
    out_ << '\n';
    if (!out_) throw OutputError("write failed for '" + path_ + "'");
}

}  // namespace nhbrack
