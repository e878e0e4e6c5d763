#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cscore {

// Shortest round-trip decimal form of a double (std::to_chars). NaN is the
// library-wide "undefined" marker and serializes as an empty field.
std::string format_double(double value);

// Inverse of format_double; empty or "nan" -> quiet NaN. Throws ParseError
// (with the supplied line number as offset) on malformed input.
double parse_double_field(std::string_view field, std::size_t line_number);

long long parse_int_field(std::string_view field, std::size_t line_number);

std::vector<std::string_view> split_csv_line(std::string_view line);

// Whole-file helpers.
std::string read_text_file(const std::filesystem::path& path);
std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);
void write_binary_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

// Splits text into lines, dropping a trailing empty line and tolerating CRLF.
std::vector<std::string_view> split_lines(std::string_view text);

std::string to_hex(std::uint64_t value);

}  // namespace cscore
