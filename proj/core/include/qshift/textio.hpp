#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Small text helpers shared by the loaders and writers.
namespace qshift::textio {

/// Reads a whole file as bytes. Throws Error(Io).
std::string read_file(const std::filesystem::path& path);

/// Writes bytes to a file, creating parent directories. Throws Error(Io).
void write_file(const std::filesystem::path& path, std::string_view content);

/// Splits on LF. A trailing LF does not produce an extra empty line.
std::vector<std::string_view> split_lines(std::string_view text);

std::vector<std::string_view> split(std::string_view s, char sep);

/// Splits on runs of spaces and tabs.
std::vector<std::string_view> split_ws(std::string_view s);

std::optional<std::int64_t> parse_int(std::string_view s);
std::optional<double> parse_double(std::string_view s);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

/// Fixed notation with `decimals` digits after the point.
std::string format_fixed(double v, int decimals);

}  // namespace qshift::textio
