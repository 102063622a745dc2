#pragma once

// Segmentation of mixed word/math text and the three math tokenization
// strategies: whole expression as one token, operator-level tokens, and
// character level.

#include <string>
#include <string_view>
#include <vector>

#include "nlps/corpus.hpp"
#include "nlps/error.hpp"
#include "nlps/text.hpp"

namespace nlps {

struct Segment {
    enum class Kind { Word, MathRegion };

    Kind kind = Kind::Word;
    std::string content;
    // Source span, delimiters included for math regions. Everything between
    // consecutive spans is whitespace.
    std::size_t begin = 0;
    std::size_t end = 0;

    friend bool operator==(const Segment&, const Segment&) = default;
};

struct SegmentResult {
    std::vector<Segment> segments;
    std::vector<std::string> warnings;
};

namespace detail {

struct MathDelimiter {
    std::string_view open;
    std::string_view close;
};

inline constexpr MathDelimiter kMathDelimiters[] = {
    {"$$", "$$"}, {"$", "$"}, {"<math>", "</math>"}, {"\\(", "\\)"}, {"\\[", "\\]"},
};

inline bool is_word_byte(char c) {
    auto u = static_cast<unsigned char>(c);
    return u >= 0x80 || std::isalnum(u) || c == '\'' || c == '-' || c == '_';
}

// Closing delimiter position, skipping backslash escapes for '$'.
inline std::size_t find_close(std::string_view s, std::size_t from, std::string_view close) {
    if (close[0] != '$') return s.find(close, from);
    for (std::size_t j = from; j < s.size(); ++j) {
        if (s[j] == '\\') {
            ++j;
            continue;
        }
        if (s.compare(j, close.size(), close) == 0) return j;
    }
    return std::string_view::npos;
}

}  // namespace detail

// Math delimiters ($...$, $$...$$, <math>...</math>, \(...\), \[...\])
// define math regions; all other text splits into words on whitespace, with
// each punctuation character a word of its own. An unclosed region runs to
// the end of the text and produces a warning.
inline SegmentResult segment(std::string_view text) {
    SegmentResult out;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (text::is_space(c)) {
            ++i;
            continue;
        }
        const detail::MathDelimiter* delim = nullptr;
        if (!(c == '\\' && i + 1 < text.size() && text[i + 1] == '$')) {
            for (const auto& d : detail::kMathDelimiters) {
                if (text.compare(i, d.open.size(), d.open) == 0) {
                    delim = &d;
                    break;
                }
            }
        }
        if (delim) {
            std::size_t body = i + delim->open.size();
            std::size_t close = detail::find_close(text, body, delim->close);
            Segment s{Segment::Kind::MathRegion, {}, i, 0};
            if (close == std::string_view::npos) {
                out.warnings.push_back("unbalanced math delimiter '" + std::string(delim->open) + "' at byte " +
                                       std::to_string(i) + "; region closed at end of text");
                s.content = std::string(text.substr(body));
                s.end = text.size();
            } else {
                s.content = std::string(text.substr(body, close - body));
                s.end = close + delim->close.size();
            }
            i = s.end;
            out.segments.push_back(std::move(s));
            continue;
        }
        if (detail::is_word_byte(c)) {
            std::size_t j = i;
            while (j < text.size() && detail::is_word_byte(text[j])) ++j;
            out.segments.push_back({Segment::Kind::Word, std::string(text.substr(i, j - i)), i, j});
            i = j;
            continue;
        }
        // escaped dollar outside math is a two-byte word
        std::size_t w = (c == '\\' && i + 1 < text.size() && text[i + 1] == '$') ? 2 : 1;
        out.segments.push_back({Segment::Kind::Word, std::string(text.substr(i, w)), i, i + w});
        i += w;
    }
    return out;
}

enum class Strategy { ExpressionAsWord, TokenisedExpression, CharLevel };

inline constexpr Strategy kAllStrategies[] = {Strategy::ExpressionAsWord, Strategy::TokenisedExpression,
                                              Strategy::CharLevel};

// Command-line spelling of each strategy.
inline std::string_view to_string(Strategy s) noexcept {
    switch (s) {
        case Strategy::ExpressionAsWord: return "expr-word";
        case Strategy::TokenisedExpression: return "tokenised";
        case Strategy::CharLevel: return "char";
    }
    return "?";
}

inline Strategy strategy_from_string(std::string_view s) {
    for (Strategy st : kAllStrategies) {
        if (s == to_string(st)) return st;
    }
    throw ConfigError("unknown tokenization strategy '" + std::string(s) + "' (expected expr-word, tokenised or char)");
}

struct TokenizeOptions {
    // CharLevel only: keep math delimiter characters in the stream.
    bool keep_math_delimiters = true;
};

struct TokenStream {
    std::vector<std::string> tokens;
    Strategy strategy = Strategy::TokenisedExpression;
    EntryId source_id;
    std::vector<std::string> warnings;
};

// Operator-level split of a math region. Commands (backslash + letters, or
// backslash + one symbol) and every brace, operator, relation and
// punctuation mark are single tokens; alphanumeric runs stay together;
// whitespace separates.
inline std::vector<std::string> tokenize_math(std::string_view math) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < math.size()) {
        char c = math[i];
        auto u = static_cast<unsigned char>(c);
        if (text::is_space(c)) {
            ++i;
        } else if (c == '\\') {
            std::size_t j = i + 1;
            while (j < math.size() && std::isalpha(static_cast<unsigned char>(math[j]))) ++j;
            if (j == i + 1 && j < math.size()) j += text::utf8_width(static_cast<unsigned char>(math[j]));
            tokens.emplace_back(math.substr(i, j - i));
            i = j;
        } else if (std::isalnum(u)) {
            std::size_t j = i;
            while (j < math.size() && std::isalnum(static_cast<unsigned char>(math[j]))) ++j;
            tokens.emplace_back(math.substr(i, j - i));
            i = j;
        } else {
            // operators, relations, braces, punctuation and non-ASCII symbols
            std::size_t w = std::min(text::utf8_width(u), math.size() - i);
            tokens.emplace_back(math.substr(i, w));
            i += w;
        }
    }
    return tokens;
}

inline std::string collapse_whitespace(std::string_view s) {
    std::string out;
    bool space = false;
    for (char c : text::trim(s)) {
        if (text::is_space(c)) {
            space = true;
            continue;
        }
        if (space) out.push_back(' ');
        space = false;
        out.push_back(c);
    }
    return out;
}

inline TokenStream tokenize(std::string_view input, Strategy strategy, const TokenizeOptions& options = {},
                            EntryId source_id = {}) {
    TokenStream ts;
    ts.strategy = strategy;
    ts.source_id = std::move(source_id);
    SegmentResult seg = segment(input);
    ts.warnings = std::move(seg.warnings);

    if (strategy == Strategy::CharLevel) {
        // Delimiter bytes are the span bytes outside each region's content.
        std::vector<bool> is_delim(input.size(), false);
        if (!options.keep_math_delimiters) {
            for (const Segment& s : seg.segments) {
                if (s.kind != Segment::Kind::MathRegion) continue;
                std::size_t content_at = input.find(s.content, s.begin);
                if (s.content.empty()) content_at = s.begin + (s.end - s.begin) / 2;
                for (std::size_t b = s.begin; b < s.end; ++b)
                    is_delim[b] = b < content_at || b >= content_at + s.content.size();
            }
        }
        std::size_t offset = 0;
        for (std::string_view scalar : text::utf8_scalars(input)) {
            if (!is_delim[offset]) ts.tokens.emplace_back(scalar);
            offset += scalar.size();
        }
        return ts;
    }

    for (const Segment& s : seg.segments) {
        if (s.kind == Segment::Kind::Word) {
            ts.tokens.push_back(text::ascii_lower(s.content));
        } else if (strategy == Strategy::ExpressionAsWord) {
            std::string token = collapse_whitespace(s.content);
            if (!token.empty()) ts.tokens.push_back(std::move(token));
        } else {
            for (std::string& t : tokenize_math(s.content)) ts.tokens.push_back(std::move(t));
        }
    }
    return ts;
}

// One stream per entry statement, in corpus order.
inline std::vector<TokenStream> tokenize_corpus(const Corpus& corpus, Strategy strategy,
                                                const TokenizeOptions& options = {}) {
    std::vector<TokenStream> out;
    out.reserve(corpus.size());
    for (const Entry& e : corpus.entries()) out.push_back(tokenize(e.statement_text, strategy, options, e.id));
    return out;
}

}  // namespace nlps
