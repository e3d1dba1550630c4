#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace stylo {

// UTF-8 handling and Romanian-aware word normalization.
//
// The corpus mixes sources that encode s/t-comma-below either as precomposed
// cedilla letters (legacy Windows encodings), precomposed comma-below letters,
// or base letter + combining mark. Everything is normalized to the lowercase
// comma-below forms so that lexicon lookups behave identically regardless of
// the source site.

namespace utf8 {

inline constexpr char32_t kReplacement = 0xFFFD;

/// Decodes one code point starting at s[i]; advances i past it.
/// Malformed sequences yield U+FFFD and advance one byte.
inline char32_t decode_at(std::string_view s, std::size_t& i) {
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    const unsigned char b0 = byte(i);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return kReplacement;
    }
    if (i + static_cast<std::size_t>(len) > s.size()) {
        ++i;
        return kReplacement;
    }
    for (int k = 1; k < len; ++k) {
        const unsigned char bk = byte(i + static_cast<std::size_t>(k));
        if ((bk & 0xC0) != 0x80) {
            ++i;
            return kReplacement;
        }
        cp = (cp << 6) | (bk & 0x3F);
    }
    i += static_cast<std::size_t>(len);
    // reject overlong encodings and surrogates
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
        return kReplacement;
    }
    return cp;
}

inline std::u32string decode(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) out.push_back(decode_at(s, i));
    return out;
}

inline void append(std::string& out, char32_t cp) {
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

inline std::string encode(const std::u32string& cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) append(out, cp);
    return out;
}

} // namespace utf8

namespace text {

/// Letters recognized by the tokenizer: ASCII plus the Latin supplement and
/// extended blocks that cover Romanian (including archaic ȁ-style forms).
inline bool is_letter(char32_t cp) {
    if ((cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z')) return true;
    if (cp >= 0xC0 && cp <= 0x24F) return cp != 0xD7 && cp != 0xF7; // keep × ÷ out
    return false;
}

/// Combining marks the normalizer knows how to fold into base letters.
inline bool is_combining_mark(char32_t cp) { return cp >= 0x300 && cp <= 0x36F; }

inline bool is_hyphen(char32_t cp) { return cp == 0x2D || cp == 0x2010 || cp == 0x2011; }

inline bool is_apostrophe(char32_t cp) { return cp == 0x27 || cp == 0x2019; }

/// Lowercases the Latin ranges used above. Code points outside them pass
/// through unchanged.
inline char32_t fold_case(char32_t cp) {
    if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20; // Latin-1 capitals
    if (cp >= 0x100 && cp <= 0x137) return (cp % 2 == 0) ? cp + 1 : cp; // Ā.. pairs
    if (cp >= 0x139 && cp <= 0x148) return (cp % 2 == 1) ? cp + 1 : cp; // Ĺ.. pairs
    if (cp >= 0x14A && cp <= 0x177) return (cp % 2 == 0) ? cp + 1 : cp; // Ŋ.. pairs
    if (cp == 0x178) return 0xFF;                                       // Ÿ
    if (cp >= 0x179 && cp <= 0x17E) return (cp % 2 == 1) ? cp + 1 : cp; // Ź Ż Ž
    if (cp >= 0x200 && cp <= 0x21B) return (cp % 2 == 0) ? cp + 1 : cp; // ȁ.. and Ș Ț
    return cp;
}

/// Precomposes base letter + combining mark for the pairs Romanian needs;
/// cedilla and comma-below both map to the comma-below letter.
/// Returns 0 when the pair has no composition.
inline char32_t compose(char32_t base, char32_t mark) {
    switch (mark) {
        case 0x302: // circumflex
            if (base == U'a') return 0xE2;
            if (base == U'i') return 0xEE;
            break;
        case 0x306: // breve
            if (base == U'a') return 0x103;
            break;
        case 0x326: // comma below
        case 0x327: // cedilla
            if (base == U's') return 0x219;
            if (base == U't') return 0x21B;
            break;
        default:
            break;
    }
    return 0;
}

/// Maps the deprecated cedilla forms ş/ţ onto the comma-below forms ș/ț.
inline char32_t comma_below(char32_t cp) {
    if (cp == 0x15F) return 0x219;
    if (cp == 0x163) return 0x21B;
    return cp;
}

} // namespace text

/// Canonical token form: lowercase, composed, comma-below diacritics,
/// surrounding punctuation stripped. Idempotent. Empty result is allowed
/// (input made of punctuation only).
inline std::string normalize_word(std::string_view raw) {
    std::u32string cps = utf8::decode(raw);
    std::u32string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) {
        cp = text::comma_below(text::fold_case(cp));
        if (text::is_combining_mark(cp)) {
            if (!out.empty()) {
                if (const char32_t composed = text::compose(out.back(), cp)) {
                    out.back() = composed;
                    continue;
                }
            }
            continue; // combining mark we cannot attach: drop it
        }
        out.push_back(cp);
    }
    // strip leading/trailing non-letters (keeps internal hyphens/apostrophes)
    std::size_t b = 0;
    std::size_t e = out.size();
    while (b < e && !text::is_letter(out[b])) ++b;
    while (e > b && !text::is_letter(out[e - 1])) --e;
    return utf8::encode(out.substr(b, e - b));
}

/// Splits text into normalized tokens. A token is a maximal run of letters
/// (plus combining marks); a single hyphen or apostrophe joins two letter
/// runs into one token, so clitic forms like "și-a" stay whole. Digits and
/// punctuation never produce tokens.
inline std::vector<std::string> tokenize(std::string_view input) {
    std::u32string cps = utf8::decode(input);
    std::vector<std::string> tokens;
    std::u32string current;
    const auto flush = [&] {
        if (!current.empty()) {
            std::string norm = normalize_word(utf8::encode(current));
            if (!norm.empty()) tokens.push_back(std::move(norm));
            current.clear();
        }
    };
    for (std::size_t i = 0; i < cps.size(); ++i) {
        const char32_t cp = cps[i];
        if (text::is_letter(cp) || text::is_combining_mark(cp)) {
            current.push_back(cp);
        } else if ((text::is_hyphen(cp) || text::is_apostrophe(cp)) && !current.empty() &&
                   (text::is_letter(current.back()) || text::is_combining_mark(current.back())) &&
                   i + 1 < cps.size() && text::is_letter(cps[i + 1])) {
            current.push_back(cp);
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

} // namespace stylo
