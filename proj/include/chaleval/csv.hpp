#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chaleval {

/// Minimal comma-separated reader: no quoting, surrounding blanks trimmed,
/// empty lines skipped.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

std::optional<int> parse_int(std::string_view s);
std::optional<double> parse_double(std::string_view s);

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double v);

/// printf-style fixed notation with `decimals` digits.
std::string format_fixed(double v, int decimals);

void write_text_file(const std::filesystem::path& path, std::string_view contents);

} // namespace chaleval
