#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace tabgen {

std::string sha256_hex(std::string_view data);

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t splitmix64(std::uint64_t x);
// Uniform in [0, 1) from a 64-bit hash.
double unit_interval(std::uint64_t h);

std::string read_text_file(const std::filesystem::path& path);
// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Maps an id onto [A-Za-z0-9._-] for use as a file stem.
std::string safe_file_stem(std::string_view id);

}  // namespace tabgen
