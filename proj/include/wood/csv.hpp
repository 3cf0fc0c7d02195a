#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace wood {

// Buffered CSV writer with RFC 4180 quoting. Content is accumulated and
// flushed in one write so partially written files never appear on error.
class CsvWriter {
 public:
  void row(std::span<const std::string> fields);
  void row(std::initializer_list<std::string> fields);
  const std::string& content() const { return buf_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::string buf_;
};

// Parses CSV text into rows of fields. Handles quoted fields with embedded
// commas, quotes, and newlines. Trailing \r is stripped (CRLF input).
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

}  // namespace wood
