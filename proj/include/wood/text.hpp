#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace wood {

// NFKC-normalizes (via ICU), optionally lowercases (simple per-codepoint
// mapping, locale independent), then splits on whitespace and punctuation.
// Punctuation tokens are dropped. Empty input yields an empty sequence;
// malformed UTF-8 bytes act as delimiters.
std::vector<std::string> preprocess(std::string_view text, bool lowercase = true);

}  // namespace wood
