// Copyright 2026 The mpqplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mpqplan {

/// Reads a whole file. Throws ValidationError naming the path if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partially written output.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Splits one CSV line on commas and trims surrounding whitespace. Quoting is not supported.
std::vector<std::string> split_csv_line(std::string_view line);

/// Strict decimal parse ('.' separator); the whole field must be consumed.
double parse_real(std::string_view field);
long long parse_integer(std::string_view field);

/// Shortest representation that round-trips through parse_real.
std::string format_real(double value);

}  // namespace mpqplan
