#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace refcheck::unicode {

// Decodes UTF-8 into scalar values. Invalid sequences yield one U+FFFD per
// offending byte and never stall the decoder.
std::u32string decode_utf8(std::string_view s);

void append_utf8(std::string& out, char32_t cp);
std::string encode_utf8(const std::u32string& s);

// Simple (non-full) case folding covering ASCII, Latin-1, Latin Extended-A,
// Greek and Cyrillic. Everything else maps to itself.
char32_t fold_case(char32_t cp);

// True when fold_case changes the code point, i.e. an uppercase letter.
bool is_upper(char32_t cp);

// Letters and digits survive normalization. ASCII is exact; beyond ASCII,
// known punctuation/symbol/space blocks are rejected and the rest is kept so
// that non-Latin scripts are never thrown away.
bool is_word_char(char32_t cp);

bool is_ascii_alpha(char32_t cp);

// ASCII transliteration of common accented Latin letters ("é" -> "e",
// "ß" -> "ss"). Returns nullptr when there is no mapping.
const char* ascii_transliteration(char32_t cp);

}  // namespace refcheck::unicode
