#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "stylo/text.hpp"

namespace stylo {

enum class IposKind { Preposition, Adverb, Conjunction, Interjection };

inline std::string_view to_string(IposKind k) {
    switch (k) {
        case IposKind::Preposition: return "prepositions";
        case IposKind::Adverb: return "adverbs";
        case IposKind::Conjunction: return "conjunctions";
        case IposKind::Interjection: return "interjections";
    }
    return "?";
}

/// Ordered, normalized word list for one inflexible part of speech.
/// Word order follows file order, so a word's position is a stable feature
/// index. Immutable after load; safe to share across threads.
struct Lexicon {
    IposKind kind = IposKind::Preposition;
    std::vector<std::string> words;
    std::string source_path;

    std::size_t size() const { return words.size(); }
};

class LexiconError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Loads one word per line, UTF-8, LF or CRLF; '#' lines are comments.
/// Words are normalized; duplicate lines collapse to the first occurrence.
/// A line with internal whitespace is rejected (single-word IPoS only).
inline Lexicon load_lexicon(const std::filesystem::path& path, IposKind kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw LexiconError("cannot open lexicon file: " + path.string());
    }
    Lexicon lex;
    lex.kind = kind;
    lex.source_path = path.string();
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
            line.erase(0, 3); // UTF-8 BOM
        }
        // trim outer ASCII whitespace before the single-word check
        std::size_t b = line.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        std::size_t e = line.find_last_not_of(" \t");
        std::string entry = line.substr(b, e - b + 1);
        if (entry[0] == '#') continue;
        if (entry.find(' ') != std::string::npos || entry.find('\t') != std::string::npos) {
            throw LexiconError(path.string() + ":" + std::to_string(line_no) +
                               ": multi-word entry rejected: \"" + entry + "\"");
        }
        std::string word = normalize_word(entry);
        if (word.empty()) continue;
        if (seen.insert(word).second) {
            lex.words.push_back(std::move(word));
        }
    }
    return lex;
}

/// Writes one word per line; load_lexicon(save_lexicon(x)) == x.
inline void save_lexicon(const Lexicon& lex, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw LexiconError("cannot write lexicon file: " + path.string());
    }
    for (const auto& w : lex.words) out << w << '\n';
}

} // namespace stylo
