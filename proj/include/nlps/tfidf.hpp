#pragma once

// Sparse TF-IDF document vectors.
//
// weight(t, d) = count(t, d) * (ln((1 + N) / (1 + df(t))) + 1), then each
// document vector is scaled to unit L2 norm.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nlps/corpus.hpp"
#include "nlps/error.hpp"
#include "nlps/tokenizer.hpp"

namespace nlps {

// (term index, weight), ascending by index
using SparseVector = std::vector<std::pair<std::uint32_t, double>>;

inline double dot(const SparseVector& a, const SparseVector& b) {
    double s = 0.0;
    auto i = a.begin(), j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (i->first < j->first) ++i;
        else if (j->first < i->first) ++j;
        else {
            s += i->second * j->second;
            ++i;
            ++j;
        }
    }
    return s;
}

inline double norm(const SparseVector& v) {
    double s = 0.0;
    for (const auto& [idx, w] : v) s += w * w;
    return std::sqrt(s);
}

class TfIdfModel {
public:
    using Vector = SparseVector;

    TfIdfModel() = default;

    // Assembles a model from its stored parts (used when loading from disk).
    TfIdfModel(Strategy strategy, std::vector<std::string> vocabulary, std::vector<std::uint32_t> document_frequencies,
               std::size_t corpus_size, std::vector<EntryId> doc_ids, std::vector<SparseVector> document_vectors)
        : strategy_(strategy),
          vocabulary_(std::move(vocabulary)),
          df_(std::move(document_frequencies)),
          corpus_size_(corpus_size),
          doc_ids_(std::move(doc_ids)),
          vectors_(std::move(document_vectors)) {
        if (df_.size() != vocabulary_.size() || doc_ids_.size() != vectors_.size())
            throw ConfigError("inconsistent TF-IDF model parts");
        for (std::size_t i = 0; i < vocabulary_.size(); ++i) term_index_.emplace(vocabulary_[i], static_cast<std::uint32_t>(i));
        for (std::size_t i = 0; i < doc_ids_.size(); ++i) doc_index_.emplace(doc_ids_[i], i);
    }

    Strategy strategy() const noexcept { return strategy_; }
    const std::vector<std::string>& vocabulary() const noexcept { return vocabulary_; }
    const std::vector<std::uint32_t>& document_frequencies() const noexcept { return df_; }
    std::size_t corpus_size() const noexcept { return corpus_size_; }
    const std::vector<EntryId>& doc_ids() const noexcept { return doc_ids_; }
    const std::vector<SparseVector>& document_vectors() const noexcept { return vectors_; }

    double idf(std::uint32_t term) const {
        return std::log((1.0 + static_cast<double>(corpus_size_)) / (1.0 + static_cast<double>(df_.at(term)))) + 1.0;
    }

    std::optional<std::uint32_t> term(std::string_view token) const {
        auto it = term_index_.find(token);
        if (it == term_index_.end()) return std::nullopt;
        return it->second;
    }

    // Weighted, L2-normalized vector; tokens outside the vocabulary are ignored.
    SparseVector transform(std::span<const std::string> tokens) const {
        std::map<std::uint32_t, std::size_t> counts;
        for (const std::string& t : tokens) {
            if (auto idx = term(t)) ++counts[*idx];
        }
        SparseVector v;
        v.reserve(counts.size());
        for (const auto& [idx, c] : counts) v.emplace_back(idx, static_cast<double>(c) * idf(idx));
        double n = norm(v);
        if (n > 0.0) {
            for (auto& [idx, w] : v) w /= n;
        }
        return v;
    }

    bool contains(std::string_view id) const { return doc_index_.find(id) != doc_index_.end(); }

    Vector vector_of(std::string_view id) const {
        auto it = doc_index_.find(id);
        if (it == doc_index_.end()) throw LookupError("document '" + std::string(id) + "' not in TF-IDF model");
        return vectors_[it->second];
    }

    Vector vector_for_text(std::string_view text) const { return transform(tokenize(text, strategy_).tokens); }

    static double cosine(const Vector& a, const Vector& b) {
        double na = norm(a), nb = norm(b);
        if (na == 0.0 || nb == 0.0) return 0.0;
        return dot(a, b) / (na * nb);
    }

    static bool is_zero(const Vector& v) { return norm(v) == 0.0; }

private:
    Strategy strategy_ = Strategy::TokenisedExpression;
    std::vector<std::string> vocabulary_;
    std::vector<std::uint32_t> df_;
    std::size_t corpus_size_ = 0;
    std::vector<EntryId> doc_ids_;
    std::vector<SparseVector> vectors_;
    std::map<std::string, std::uint32_t, std::less<>> term_index_;
    std::map<EntryId, std::size_t, std::less<>> doc_index_;
};

// Fits over documents keyed by TokenStream::source_id. Input order does
// not matter: documents and vocabulary are sorted.
inline TfIdfModel fit_tfidf(std::vector<TokenStream> streams) {
    if (streams.empty()) throw ConfigError("cannot fit TF-IDF on an empty corpus");
    bool any_tokens = std::any_of(streams.begin(), streams.end(), [](const TokenStream& s) { return !s.tokens.empty(); });
    if (!any_tokens) throw ConfigError("cannot fit TF-IDF: every document is empty");
    for (const TokenStream& s : streams) {
        if (s.strategy != streams.front().strategy) throw ConfigError("token streams mix tokenization strategies");
    }
    std::stable_sort(streams.begin(), streams.end(),
                     [](const TokenStream& a, const TokenStream& b) { return a.source_id < b.source_id; });

    std::map<std::string, std::uint32_t> df_by_token;
    for (const TokenStream& s : streams) {
        std::vector<std::string> uniq = s.tokens;
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        for (std::string& t : uniq) ++df_by_token[std::move(t)];
    }
    std::vector<std::string> vocab;
    std::vector<std::uint32_t> df;
    vocab.reserve(df_by_token.size());
    for (auto& [t, n] : df_by_token) {
        vocab.push_back(t);
        df.push_back(n);
    }
    std::vector<EntryId> ids;
    for (const TokenStream& s : streams) ids.push_back(s.source_id);

    TfIdfModel shell(streams.front().strategy, vocab, df, streams.size(), ids,
                     std::vector<SparseVector>(streams.size()));
    std::vector<SparseVector> vectors;
    vectors.reserve(streams.size());
    for (const TokenStream& s : streams) vectors.push_back(shell.transform(s.tokens));
    return TfIdfModel(streams.front().strategy, std::move(vocab), std::move(df), streams.size(), std::move(ids),
                      std::move(vectors));
}

}  // namespace nlps
