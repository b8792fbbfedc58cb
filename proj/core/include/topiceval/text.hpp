#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace topiceval {

// Simple (one-to-one) Unicode lowercase over UTF-8 input. Covers ASCII,
// Latin-1, Latin Extended-A, Greek and Cyrillic capitals; everything else
// passes through unchanged. Invalid UTF-8 bytes are copied verbatim.
std::string fold_case(std::string_view text);

std::string_view trim(std::string_view s);
std::string trim_copy(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_lines(std::string_view s);
std::vector<std::string> split_whitespace(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool starts_with_ci(std::string_view s, std::string_view prefix);

// FNV-1a, 64 bit. Stable across platforms and runs.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string to_hex64(std::uint64_t value);
std::uint64_t from_hex64(std::string_view hex);

// "%.12g"; used for every number written to CSV reports.
std::string format_double(double value);

// RFC 4180 style quoting when needed.
std::string csv_field(std::string_view value);
std::vector<std::string> parse_csv_line(std::string_view line);

// Whole-file helpers; throw std::runtime_error on I/O failure.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace topiceval
