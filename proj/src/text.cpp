#include "llmcg/text.hpp"

#include "llmcg/error.hpp"

#include <openssl/evp.h>

#include <atomic>
#include <cctype>
#include <fstream>
#include <sstream>
#include <thread>
#include <vector>
#include <unistd.h>

namespace llmcg {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

// Compacted view of a string: whitespace runs folded to a single space,
// leading/trailing whitespace dropped, ASCII lowercased. `origin[i]` is the
// byte index in the source of compacted character i.
struct Folded {
  std::string chars;
  std::vector<std::size_t> origin;
};

Folded fold(std::string_view text) {
  Folded out;
  bool pending_space = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (is_space(text[i])) {
      pending_space = !out.chars.empty();
      continue;
    }
    if (pending_space) {
      out.chars.push_back(' ');
      out.origin.push_back(i - 1);
      pending_space = false;
    }
    out.chars.push_back(lower(text[i]));
    out.origin.push_back(i);
  }
  return out;
}

}  // namespace

std::string normalize_label(std::string_view text) { return fold(text).chars; }

std::string trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && is_space(text[begin])) ++begin;
  while (end > begin && is_space(text[end - 1])) --end;
  return std::string(text.substr(begin, end - begin));
}

std::optional<TextSpan> find_mention(std::string_view haystack, std::string_view needle) {
  const Folded hay = fold(haystack);
  const std::string pattern = fold(needle).chars;
  if (pattern.empty()) return std::nullopt;
  const std::size_t pos = hay.chars.find(pattern);
  if (pos == std::string::npos) return std::nullopt;
  const std::size_t first = hay.origin[pos];
  const std::size_t last = hay.origin[pos + pattern.size() - 1];
  return TextSpan{first, last - first + 1};
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0x0f]);
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  static std::atomic<unsigned long> counter{0};
  std::ostringstream tmp_name;
  tmp_name << path.filename().string() << ".tmp." << ::getpid() << '.'
           << std::hash<std::thread::id>{}(std::this_thread::get_id()) << '.' << counter++;
  const auto tmp = path.parent_path() / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::Io, "cannot rename into " + path.string());
  }
}

}  // namespace llmcg
