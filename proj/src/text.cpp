#include "wood/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "wood/error.hpp"

namespace wood {

namespace {

const icu::Normalizer2& nfkc() {
  static const icu::Normalizer2* instance = [] {
    UErrorCode ec = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFKCInstance(ec);
    if (U_FAILURE(ec) || n == nullptr)
      throw ValidationError("ICU NFKC normalizer unavailable");
    return n;
  }();
  return *instance;
}

std::string normalize_nfkc(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  icu::StringByteSink<std::string> sink(&out);
  UErrorCode ec = U_ZERO_ERROR;
  nfkc().normalizeUTF8(0,
                       icu::StringPiece(text.data(),
                                        static_cast<int32_t>(text.size())),
                       sink, nullptr, ec);
  if (U_FAILURE(ec))
    throw ValidationError(std::string("unicode normalization failed: ") +
                          u_errorName(ec));
  return out;
}

}  // namespace

std::vector<std::string> preprocess(std::string_view text, bool lowercase) {
  if (text.empty()) return {};
  const std::string norm = normalize_nfkc(text);

  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  };

  const auto* s = reinterpret_cast<const uint8_t*>(norm.data());
  const auto len = static_cast<int32_t>(norm.size());
  int32_t i = 0;
  while (i < len) {
    UChar32 c;
    U8_NEXT(s, i, len, c);
    if (c < 0 || u_isUWhiteSpace(c) || u_ispunct(c)) {
      flush();
      continue;
    }
    if (lowercase) c = u_tolower(c);
    char buf[U8_MAX_LENGTH];
    int32_t n = 0;
    UBool err = false;
    U8_APPEND(reinterpret_cast<uint8_t*>(buf), n, U8_MAX_LENGTH, c, err);
    if (!err) current.append(buf, static_cast<size_t>(n));
  }
  flush();
  return tokens;
}

}  // namespace wood
