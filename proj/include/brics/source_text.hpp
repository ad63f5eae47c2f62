#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace brics {

/// A location in a document. Lines are 1-based, columns are 0-based and
/// counted in Unicode scalar values (a tab is one column).
struct Position {
    int line = 1;
    int col = 0;

    friend auto operator<=>(const Position&, const Position&) = default;
};

namespace utf8 {

/// Returns true when `bytes` is well-formed UTF-8 (no overlongs, no surrogates).
bool is_valid(std::string_view bytes) noexcept;

/// Decodes well-formed UTF-8. Throws Error(encoding) on malformed input.
std::u32string decode(std::string_view bytes);

void append(std::string& out, char32_t cp);

inline bool is_continuation(unsigned char b) noexcept { return (b & 0xC0) == 0x80; }

} // namespace utf8

/// Immutable view of a UTF-8 document with a line table.
///
/// A trailing newline terminates the last line rather than starting a new
/// empty one, so "a\n" has one line and "" has none. A '\r' immediately before
/// '\n' belongs to the line terminator.
class SourceText {
public:
    struct Line {
        std::size_t first_char = 0; // index into chars()
        std::size_t length = 0;     // characters, terminator excluded
        std::size_t byte_start = 0;
        std::size_t byte_length = 0; // terminator excluded
    };

    SourceText() = default;

    /// Throws Error(encoding) when `text` is not valid UTF-8.
    explicit SourceText(std::string text);

    const std::string& bytes() const noexcept { return bytes_; }
    const std::u32string& chars() const noexcept { return chars_; }
    std::size_t char_count() const noexcept { return chars_.size(); }

    int line_count() const noexcept { return static_cast<int>(lines_.size()); }
    const Line& line(int one_based) const;
    std::size_t line_length(int one_based) const { return line(one_based).length; }
    std::string_view line_bytes(int one_based) const;

    /// Byte offset where each line begins; strictly increasing, first is 0.
    std::vector<std::size_t> line_starts() const;

    /// Character index of a position; the position may sit one past the last
    /// character of its line.
    std::size_t index_of(Position pos) const;
    Position position_of(std::size_t char_index) const;
    std::size_t byte_offset(std::size_t char_index) const { return char_bytes_[char_index]; }

    /// Position just past the last character of the last line.
    Position end_position() const;

    bool contains(Position pos) const noexcept;

private:
    std::string bytes_;
    std::u32string chars_;
    std::vector<std::size_t> char_bytes_; // size chars_.size() + 1
    std::vector<Line> lines_;
};

} // namespace brics
