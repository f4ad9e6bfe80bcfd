#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace ragkit {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

/// FNV-1a 64-bit digest, hex encoded.
std::string content_hash(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace ragkit
