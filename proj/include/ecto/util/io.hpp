#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace ecto::util {

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partially written artifact. Creates parent directories.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

/// Shortest text that parses back to exactly the same double.
std::string format_double(double value);

}  // namespace ecto::util
