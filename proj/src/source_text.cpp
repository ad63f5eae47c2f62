#include "brics/source_text.hpp"

#include <algorithm>

#include "brics/error.hpp"

namespace brics {

namespace utf8 {

namespace {

// Decodes one scalar at `i`; returns the byte length or 0 when malformed.
std::size_t decode_one(std::string_view s, std::size_t i, char32_t& out) noexcept {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        out = b0;
        return 1;
    }
    std::size_t len = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
        min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
        min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
        min = 0x10000;
    } else {
        return 0;
    }
    if (i + len > s.size()) return 0;
    for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if (!is_continuation(b)) return 0;
        cp = (cp << 6) | (b & 0x3F);
    }
    if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
    out = cp;
    return len;
}

} // namespace

bool is_valid(std::string_view bytes) noexcept {
    char32_t cp = 0;
    for (std::size_t i = 0; i < bytes.size();) {
        const auto n = decode_one(bytes, i, cp);
        if (n == 0) return false;
        i += n;
    }
    return true;
}

std::u32string decode(std::string_view bytes) {
    std::u32string out;
    out.reserve(bytes.size());
    char32_t cp = 0;
    for (std::size_t i = 0; i < bytes.size();) {
        const auto n = decode_one(bytes, i, cp);
        if (n == 0) {
            throw Error(ErrorCode::encoding, "invalid UTF-8 at byte " + std::to_string(i));
        }
        out.push_back(cp);
        i += n;
    }
    return out;
}

void append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

} // namespace utf8

SourceText::SourceText(std::string text) : bytes_(std::move(text)) {
    chars_ = utf8::decode(bytes_);
    char_bytes_.reserve(chars_.size() + 1);
    std::size_t byte = 0;
    for (char32_t c : chars_) {
        char_bytes_.push_back(byte);
        byte += c < 0x80 ? 1 : c < 0x800 ? 2 : c < 0x10000 ? 3 : 4;
    }
    char_bytes_.push_back(byte);

    std::size_t start = 0;
    const std::size_t n = chars_.size();
    while (start < n) {
        std::size_t end = start;
        while (end < n && chars_[end] != U'\n') ++end;
        std::size_t content_end = end;
        if (end < n && content_end > start && chars_[content_end - 1] == U'\r') --content_end;
        Line line;
        line.first_char = start;
        line.length = content_end - start;
        line.byte_start = char_bytes_[start];
        line.byte_length = char_bytes_[content_end] - line.byte_start;
        lines_.push_back(line);
        start = end + 1;
    }
}

const SourceText::Line& SourceText::line(int one_based) const {
    if (one_based < 1 || one_based > line_count()) {
        throw Error(ErrorCode::range, "line " + std::to_string(one_based) + " outside document of " +
                                          std::to_string(line_count()) + " lines");
    }
    return lines_[static_cast<std::size_t>(one_based - 1)];
}

std::string_view SourceText::line_bytes(int one_based) const {
    const auto& l = line(one_based);
    return std::string_view(bytes_).substr(l.byte_start, l.byte_length);
}

std::vector<std::size_t> SourceText::line_starts() const {
    std::vector<std::size_t> out;
    out.reserve(lines_.size());
    for (const auto& l : lines_) out.push_back(l.byte_start);
    return out;
}

std::size_t SourceText::index_of(Position pos) const {
    const auto& l = line(pos.line);
    if (pos.col < 0 || static_cast<std::size_t>(pos.col) > l.length) {
        throw Error(ErrorCode::range, "column " + std::to_string(pos.col) + " outside line " +
                                          std::to_string(pos.line));
    }
    return l.first_char + static_cast<std::size_t>(pos.col);
}

Position SourceText::position_of(std::size_t char_index) const {
    auto it = std::upper_bound(lines_.begin(), lines_.end(), char_index,
                               [](std::size_t idx, const Line& l) { return idx < l.first_char; });
    if (it == lines_.begin()) return Position{1, 0};
    --it;
    const int line = static_cast<int>(it - lines_.begin()) + 1;
    return Position{line, static_cast<int>(char_index - it->first_char)};
}

Position SourceText::end_position() const {
    if (lines_.empty()) return Position{1, 0};
    return Position{line_count(), static_cast<int>(lines_.back().length)};
}

bool SourceText::contains(Position pos) const noexcept {
    if (pos.line < 1 || pos.line > line_count() || pos.col < 0) return false;
    return static_cast<std::size_t>(pos.col) <= lines_[static_cast<std::size_t>(pos.line - 1)].length;
}

} // namespace brics
