#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace wood {

// FNV-1a 64-bit. Used to fingerprint corpora and configs for the matrix cache.
class Fnv64 {
 public:
  void update(std::string_view data) {
    for (unsigned char c : data) {
      state_ ^= c;
      state_ *= 0x100000001b3ull;
    }
  }
  uint64_t value() const { return state_; }
  std::string hex() const;

 private:
  uint64_t state_ = 0xcbf29ce484222325ull;
};

std::string fnv64_hex(std::string_view data);

// Shortest round-trip decimal form, identical on every run. All CSV output
// goes through this so reruns are byte-identical.
inline std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);
void ensure_directory(const std::filesystem::path& dir);

}  // namespace wood
