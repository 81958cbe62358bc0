#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace llmcg {

// Lowercase (ASCII), trim, and collapse internal whitespace runs to one space.
std::string normalize_label(std::string_view text);

struct TextSpan {
  std::size_t offset = 0;
  std::size_t length = 0;
};

// Earliest occurrence of `needle` in `haystack`, ignoring ASCII case and
// treating any whitespace run as a single space on both sides. The returned
// span indexes the original haystack bytes.
std::optional<TextSpan> find_mention(std::string_view haystack, std::string_view needle);

std::string trim(std::string_view text);

// Hex-encoded SHA-256.
std::string sha256_hex(std::string_view data);

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace llmcg
