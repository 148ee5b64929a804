// Copyright 2026 The Phenorag Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "phenorag/text.hpp"

#include <boost/regex.hpp>

#include <algorithm>
#include <cctype>

#include "phenorag/error.hpp"

namespace phenorag {
namespace {

bool IsSpace(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

}  // namespace

std::string Trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && IsSpace(s[b])) ++b;
  while (e > b && IsSpace(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string ToLowerAscii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::string ToUpperAscii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::toupper(c));
  });
  return out;
}

std::vector<TokenSpan> WhitespaceTokens(std::string_view text) {
  std::vector<TokenSpan> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsSpace(text[i])) ++i;
    if (i == text.size()) break;
    std::size_t start = i;
    while (i < text.size() && !IsSpace(text[i])) ++i;
    tokens.push_back({start, i});
  }
  return tokens;
}

std::size_t CountWhitespaceTokens(std::string_view text) {
  std::size_t n = 0;
  bool in_token = false;
  for (char c : text) {
    if (IsSpace(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++n;
    }
  }
  return n;
}

std::vector<std::size_t> CodepointOffsets(std::string_view text) {
  std::vector<std::size_t> offsets;
  offsets.reserve(text.size() + 1);
  for (std::size_t i = 0; i < text.size(); ++i) {
    if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
      offsets.push_back(i);
    }
  }
  offsets.push_back(text.size());
  return offsets;
}

struct Regex::Impl {
  boost::regex re;
};

Regex::Regex(std::string pattern, bool icase)
    : pattern_(std::move(pattern)), icase_(icase) {
  auto flags =
      boost::regex::perl | boost::regex::no_mod_s | boost::regex::no_mod_m;
  if (icase_) flags |= boost::regex::icase;
  try {
    auto impl = std::make_shared<Impl>();
    impl->re.assign(pattern_, flags);
    impl_ = std::move(impl);
  } catch (const boost::regex_error& e) {
    throw ConfigError("invalid regex '" + pattern_ + "': " + e.what());
  }
}

bool Regex::Search(std::string_view text) const {
  return boost::regex_search(text.begin(), text.end(), impl_->re);
}

std::optional<RegexMatch> Regex::Find(std::string_view text,
                                      std::size_t from) const {
  if (from > text.size()) return std::nullopt;
  boost::match_results<std::string_view::const_iterator> m;
  auto flags = boost::match_default;
  if (from > 0) flags |= boost::match_prev_avail;
  if (!boost::regex_search(text.begin() + from, text.end(), m, impl_->re,
                           flags)) {
    return std::nullopt;
  }
  RegexMatch out;
  out.position = static_cast<std::size_t>(m[0].first - text.begin());
  out.length = static_cast<std::size_t>(m[0].length());
  for (std::size_t g = 1; g < m.size(); ++g) {
    if (m[g].matched) {
      out.groups.emplace_back(std::string(m[g].first, m[g].second));
    } else {
      out.groups.emplace_back(std::nullopt);
    }
  }
  return out;
}

}  // namespace phenorag
