#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace gecforge {

/// NFC-compose, trim, and collapse internal runs of ASCII whitespace to one
/// space. Idempotent. Throws DecodeError on malformed UTF-8.
std::string normalize_text(std::string_view raw);

/// Decodes UTF-8 into scalar values. Throws DecodeError with the byte offset
/// of the first malformed sequence (overlongs and surrogates included).
std::u32string decode_utf8(std::string_view bytes);

std::string encode_utf8(std::u32string_view scalars);
void append_utf8(std::string& out, char32_t scalar);

/// One string per Unicode scalar value.
std::vector<std::string> split_scalars(std::string_view text);

bool is_ascii_space(char c) noexcept;

/// Han ideographs, CJK punctuation, kana and fullwidth forms.
bool is_cjk_scalar(char32_t c) noexcept;

/// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

}  // namespace gecforge
