#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace esrisk {

// Shortest text form that round-trips a double.
std::string format_double(double v);

// Writes via a temporary file in the same directory plus rename, so readers
// never observe a partially written file.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

// Sample loader: one or more numbers per line, separated by commas or
// whitespace. NaN/Inf or non-numeric entries are rejected with the line
// number in the message.
std::vector<double> load_sample(const std::filesystem::path& path);

// Two-column numeric CSV, used for piecewise model tables.
std::pair<std::vector<double>, std::vector<double>> load_two_column_csv(
    const std::filesystem::path& path);

}  // namespace esrisk
