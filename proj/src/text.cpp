// Copyright 2026 The mixdenoise Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mixdenoise/text.hpp"

namespace mixdenoise {
namespace {

constexpr std::uint32_t kReplacement = 0xfffd;

// Lead byte -> (continuation count, initial bits, minimum code point).
// Returns false for bytes that cannot start a sequence.
bool lead_byte(unsigned char c, std::size_t& extra, std::uint32_t& cp,
               std::uint32_t& min) {
  if (c < 0x80) {
    extra = 0, cp = c, min = 0;
  } else if ((c & 0xe0) == 0xc0) {
    extra = 1, cp = c & 0x1f, min = 0x80;
  } else if ((c & 0xf0) == 0xe0) {
    extra = 2, cp = c & 0x0f, min = 0x800;
  } else if ((c & 0xf8) == 0xf0) {
    extra = 3, cp = c & 0x07, min = 0x10000;
  } else {
    return false;
  }
  return true;
}

// Decodes one strictly valid sequence at `i`; returns its length or 0.
std::size_t decode_one(std::string_view s, std::size_t i, std::uint32_t& out) {
  std::size_t extra = 0;
  std::uint32_t cp = 0;
  std::uint32_t min = 0;
  if (!lead_byte(static_cast<unsigned char>(s[i]), extra, cp, min)) return 0;
  if (i + extra >= s.size() && extra > 0) return 0;
  for (std::size_t k = 1; k <= extra; ++k) {
    const auto cc = static_cast<unsigned char>(s[i + k]);
    if ((cc & 0xc0) != 0x80) return 0;
    cp = (cp << 6) | (cc & 0x3f);
  }
  if (cp < min || cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) return 0;
  out = cp;
  return extra + 1;
}

}  // namespace

std::vector<CodePoint> decode_utf8(std::string_view text) {
  std::vector<CodePoint> out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    std::uint32_t cp = 0;
    const std::size_t len = decode_one(text, i, cp);
    if (len == 0) {
      out.push_back({kReplacement, i, 1});
      ++i;
    } else {
      out.push_back({cp, i, len});
      i += len;
    }
  }
  return out;
}

std::size_t first_invalid_utf8_line(std::string_view text) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < text.size();) {
    std::uint32_t cp = 0;
    const std::size_t len = decode_one(text, i, cp);
    if (len == 0) return line;
    if (cp == '\n') ++line;
    i += len;
  }
  return 0;
}

bool is_unicode_space(std::uint32_t cp) noexcept {
  switch (cp) {
    case 0x09: case 0x0a: case 0x0b: case 0x0c: case 0x0d: case 0x20:
    case 0x85: case 0xa0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202f: case 0x205f: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200a;
  }
}

bool is_punctuation(std::uint32_t cp) noexcept {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2f) || (cp >= 0x3a && cp <= 0x40) ||
           (cp >= 0x5b && cp <= 0x60) || (cp >= 0x7b && cp <= 0x7e);
  }
  switch (cp) {
    case 0xa1: case 0xab: case 0xbb: case 0xbf:          // ¡ « » ¿
    case 0x060c: case 0x061b: case 0x061f: case 0x06d4:  // Arabic
    case 0x0964: case 0x0965:                            // danda
    case 0x0df4:                                         // Sinhala full stop
    case 0x3001: case 0x3002:                            // 、 。
    case 0xff01: case 0xff0c: case 0xff0e: case 0xff1a: case 0xff1b:
    case 0xff1f:
      return true;
    default:
      return (cp >= 0x2010 && cp <= 0x2027) ||  // dashes, quotes, ellipsis
             (cp >= 0x2030 && cp <= 0x205e) ||
             (cp >= 0x3008 && cp <= 0x3011);    // CJK brackets
  }
}

bool is_blank(std::string_view text) {
  for (const CodePoint& cp : decode_utf8(text)) {
    if (!is_unicode_space(cp.value)) return false;
  }
  return true;
}

std::string_view trim_unicode(std::string_view text) {
  const auto cps = decode_utf8(text);
  std::size_t lo = 0;
  std::size_t hi = cps.size();
  while (lo < hi && is_unicode_space(cps[lo].value)) ++lo;
  while (hi > lo && is_unicode_space(cps[hi - 1].value)) --hi;
  if (lo == hi) return {};
  const std::size_t begin = cps[lo].offset;
  const std::size_t end = cps[hi - 1].offset + cps[hi - 1].length;
  return text.substr(begin, end - begin);
}

}  // namespace mixdenoise
