/* Copyright 2026 The Shelfread Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef SHELFREAD_UTF8_H_
#define SHELFREAD_UTF8_H_

#include <string>
#include <string_view>

namespace shelfread {
namespace utf8 {

// Invalid byte sequences decode to U+FFFD.
std::u32string Decode(std::string_view text);
std::string Encode(std::u32string_view text);
std::string Encode(char32_t code_point);

// Locale-independent case folding and classification backed by the C.UTF-8
// locale when the host provides it, ASCII rules otherwise.
char32_t ToLower(char32_t c);
bool IsAlnum(char32_t c);
bool IsSpace(char32_t c);

}  // namespace utf8
}  // namespace shelfread

#endif  // SHELFREAD_UTF8_H_
