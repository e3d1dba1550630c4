#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "stylo/lexicon.hpp"
#include "stylo/text.hpp"

namespace stylo {

class CorpusError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One text: author label, normalized token stream and derived counts.
struct Document {
    int author_id = -1;
    std::string title;
    std::vector<std::string> tokens;
    std::size_t word_count = 0;
    std::size_t unique_word_count = 0;
};

inline Document make_document(int author_id, std::string title, std::string_view raw_text) {
    Document doc;
    doc.author_id = author_id;
    doc.title = std::move(title);
    doc.tokens = tokenize(raw_text);
    doc.word_count = doc.tokens.size();
    std::unordered_set<std::string_view> uniq;
    uniq.reserve(doc.tokens.size());
    for (const auto& t : doc.tokens) uniq.insert(t);
    doc.unique_word_count = uniq.size();
    return doc;
}

/// Loads `root/<author_id>_<author_slug>/<title>.txt`, UTF-8 plain text.
/// Documents come back sorted by (author_id, title) so downstream results
/// do not depend on directory iteration order.
inline std::vector<Document> load_corpus(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) {
        throw CorpusError("corpus root is not a directory: " + root.string());
    }
    std::vector<Document> docs;
    for (const auto& author_dir : fs::directory_iterator(root)) {
        if (!author_dir.is_directory()) continue;
        const std::string name = author_dir.path().filename().string();
        const auto underscore = name.find('_');
        if (underscore == std::string::npos) {
            throw CorpusError("author directory is not <id>_<slug>: " + name);
        }
        int author_id = -1;
        try {
            author_id = std::stoi(name.substr(0, underscore));
        } catch (const std::exception&) {
            throw CorpusError("author directory is not <id>_<slug>: " + name);
        }
        if (author_id < 0 || author_id > 9) {
            throw CorpusError("author id out of range 0-9: " + name);
        }
        for (const auto& file : fs::directory_iterator(author_dir.path())) {
            if (!file.is_regular_file() || file.path().extension() != ".txt") continue;
            std::ifstream in(file.path(), std::ios::binary);
            std::ostringstream buf;
            buf << in.rdbuf();
            docs.push_back(
                make_document(author_id, file.path().stem().string(), buf.str()));
        }
    }
    std::sort(docs.begin(), docs.end(), [](const Document& a, const Document& b) {
        return std::tie(a.author_id, a.title) < std::tie(b.author_id, b.title);
    });
    return docs;
}

namespace detail {

struct RunningStats {
    std::size_t n = 0;
    double sum = 0;
    double sum_sq = 0;

    void add(double x) {
        ++n;
        sum += x;
        sum_sq += x * x;
    }
    double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
    /// Sample (n-1) standard deviation; 0 by convention for n < 2.
    double stddev() const {
        if (n < 2) return 0.0;
        const double m = mean();
        const double var = (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
        return var > 0 ? std::sqrt(var) : 0.0;
    }
};

} // namespace detail

/// Per-author means and sample standard deviations of word count, unique
/// word count and their ratio.
struct AuthorStats {
    int author_id = -1;
    std::size_t n_docs = 0;          // documents included
    std::size_t n_excluded = 0;      // zero-token documents (ratio undefined)
    bool degenerate_stddev = false;  // single-document author
    double avg_words = 0, stddev_words = 0;
    double avg_unique = 0, stddev_unique = 0;
    double avg_ratio = 0, stddev_ratio = 0;
};

inline std::vector<AuthorStats> corpus_author_stats(std::span<const Document> corpus) {
    if (corpus.empty()) throw CorpusError("corpus_author_stats: empty corpus");
    std::map<int, std::array<detail::RunningStats, 3>> acc;
    std::map<int, std::size_t> excluded;
    for (const auto& doc : corpus) {
        if (doc.word_count == 0) {
            ++excluded[doc.author_id];
            acc.try_emplace(doc.author_id);
            continue;
        }
        auto& w = acc[doc.author_id];
        w[0].add(static_cast<double>(doc.word_count));
        w[1].add(static_cast<double>(doc.unique_word_count));
        w[2].add(static_cast<double>(doc.word_count) /
                 static_cast<double>(doc.unique_word_count));
    }
    std::vector<AuthorStats> out;
    for (const auto& [author, w] : acc) {
        AuthorStats s;
        s.author_id = author;
        s.n_docs = w[0].n;
        s.n_excluded = excluded.count(author) ? excluded[author] : 0;
        s.degenerate_stddev = w[0].n == 1;
        s.avg_words = w[0].mean();
        s.stddev_words = w[0].stddev();
        s.avg_unique = w[1].mean();
        s.stddev_unique = w[1].stddev();
        s.avg_ratio = w[2].mean();
        s.stddev_ratio = w[2].stddev();
        out.push_back(s);
    }
    return out;
}

/// Occurrence counts of one IPoS list over the whole corpus.
struct IposStats {
    IposKind kind = IposKind::Preposition;
    std::uint64_t occurrences = 0;
    double pct_of_total_words = 0; // relative to all corpus tokens
    std::size_t files_with_hit = 0;
    double avg_per_file = 0; // occurrences / total number of files
    std::size_t list_size = 0;
};

inline std::vector<IposStats> ipos_occurrence_stats(std::span<const Document> corpus,
                                                    std::span<const Lexicon> lexicons) {
    std::uint64_t total_words = 0;
    for (const auto& doc : corpus) total_words += doc.word_count;
    std::vector<IposStats> out;
    for (const auto& lex : lexicons) {
        std::unordered_set<std::string_view> words(lex.words.begin(), lex.words.end());
        IposStats st;
        st.kind = lex.kind;
        st.list_size = lex.words.size();
        for (const auto& doc : corpus) {
            std::uint64_t in_doc = 0;
            for (const auto& tok : doc.tokens) {
                if (words.count(tok)) ++in_doc;
            }
            st.occurrences += in_doc;
            if (in_doc > 0) ++st.files_with_hit;
        }
        st.pct_of_total_words =
            total_words ? 100.0 * static_cast<double>(st.occurrences) /
                              static_cast<double>(total_words)
                        : 0.0;
        st.avg_per_file = corpus.empty() ? 0.0
                                         : static_cast<double>(st.occurrences) /
                                               static_cast<double>(corpus.size());
        out.push_back(st);
    }
    return out;
}

/// The feature space: lexicon words attested in the reference corpus, in
/// category order then file order. Column index is the feature index.
struct FeatureSet {
    std::string name; // "P", "PA", "PAC" or "PC"
    std::vector<std::pair<IposKind, std::string>> columns;
    std::unordered_map<std::string, std::size_t> index; // word -> column

    std::size_t size() const { return columns.size(); }
};

/// Concatenates the lexicons in the given order and drops words that never
/// occur in the corpus. A word listed under two categories keeps only its
/// first column so document frequencies stay disjoint.
inline FeatureSet build_feature_set(std::span<const Document> corpus,
                                    std::span<const Lexicon> lexicons,
                                    std::string name) {
    std::unordered_map<std::string_view, std::uint64_t> counts;
    for (const auto& lex : lexicons) {
        for (const auto& w : lex.words) counts.try_emplace(w, 0);
    }
    for (const auto& doc : corpus) {
        for (const auto& tok : doc.tokens) {
            auto it = counts.find(tok);
            if (it != counts.end()) ++it->second;
        }
    }
    FeatureSet fs;
    fs.name = std::move(name);
    for (const auto& lex : lexicons) {
        for (const auto& w : lex.words) {
            if (counts.at(w) == 0) continue;
            if (fs.index.count(w)) continue;
            fs.index.emplace(w, fs.columns.size());
            fs.columns.emplace_back(lex.kind, w);
        }
    }
    if (fs.columns.empty()) {
        throw CorpusError("feature set \"" + fs.name + "\" is empty: no lexicon word occurs in the corpus");
    }
    return fs;
}

/// Occurrence-frequency vector: count of each feature word divided by the
/// document's total word count. Values lie in [0,1] and sum to at most 1.
inline std::vector<double> featurize(const Document& doc, const FeatureSet& fs) {
    if (doc.word_count == 0) {
        throw CorpusError("featurize: document \"" + doc.title + "\" has no words");
    }
    std::vector<double> v(fs.size(), 0.0);
    for (const auto& tok : doc.tokens) {
        auto it = fs.index.find(tok);
        if (it != fs.index.end()) v[it->second] += 1.0;
    }
    const double n = static_cast<double>(doc.word_count);
    for (auto& x : v) x /= n;
    return v;
}

} // namespace stylo
