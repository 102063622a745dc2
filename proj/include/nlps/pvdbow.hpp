#pragma once

// Distributed bag-of-words paragraph vectors trained with negative sampling.
//
// Each document vector d is trained to predict every in-vocabulary token w
// of its document against `negative` noise tokens drawn from the unigram
// distribution raised to `ns_exponent`:
//
//   loss = -log sigmoid(d . u_w) - sum_n log sigmoid(-d . u_n)
//
// where u are the output weights. Single-threaded training is
// bit-deterministic for a given seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nlps/corpus.hpp"
#include "nlps/error.hpp"
#include "nlps/tokenizer.hpp"

namespace nlps {

struct PvDbowParams {
    std::size_t dim = 100;
    std::size_t epochs = 20;
    std::size_t negative = 5;
    double alpha = 0.025;
    double min_alpha = 0.0001;
    std::size_t min_count = 2;
    double ns_exponent = 0.75;
    std::uint64_t seed = 1;
    std::size_t infer_epochs = 0;  // 0: same as epochs

    friend bool operator==(const PvDbowParams&, const PvDbowParams&) = default;
};

// Row-major dense matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    std::vector<double>& data() noexcept { return data_; }
    const std::vector<double>& data() const noexcept { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

// log(sigmoid(x)) without overflow.
inline double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

namespace detail {

// For output rows u_0 (positive) and u_1.. (negatives) fills
// coef[i] = sigmoid(d . u_i) - label_i, the derivative of the loss with
// respect to d . u_i, and returns the loss.
inline double ns_coefficients(std::span<const double> doc, std::span<const std::span<const double>> outputs,
                              std::vector<double>& coef) {
    coef.resize(outputs.size());
    double loss = 0.0;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        double score = dot(doc, outputs[i]);
        if (i == 0) {
            loss -= log_sigmoid(score);
            coef[i] = sigmoid(score) - 1.0;
        } else {
            loss -= log_sigmoid(-score);
            coef[i] = sigmoid(score);
        }
    }
    return loss;
}

}  // namespace detail

inline double negative_sampling_loss(std::span<const double> doc, std::span<const double> positive,
                                     std::span<const std::span<const double>> negatives) {
    std::vector<std::span<const double>> outputs{positive};
    outputs.insert(outputs.end(), negatives.begin(), negatives.end());
    std::vector<double> coef;
    return detail::ns_coefficients(doc, outputs, coef);
}

struct NegativeSamplingGradient {
    double loss = 0.0;
    std::vector<double> doc;
    std::vector<double> positive;
    std::vector<std::vector<double>> negatives;
};

inline NegativeSamplingGradient negative_sampling_gradient(std::span<const double> doc, std::span<const double> positive,
                                                           std::span<const std::span<const double>> negatives) {
    std::vector<std::span<const double>> outputs{positive};
    outputs.insert(outputs.end(), negatives.begin(), negatives.end());
    std::vector<double> coef;
    NegativeSamplingGradient g;
    g.loss = detail::ns_coefficients(doc, outputs, coef);
    g.doc.assign(doc.size(), 0.0);
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        std::vector<double> gu(doc.size());
        for (std::size_t k = 0; k < doc.size(); ++k) {
            g.doc[k] += coef[i] * outputs[i][k];
            gu[k] = coef[i] * doc[k];
        }
        if (i == 0) g.positive = std::move(gu);
        else g.negatives.push_back(std::move(gu));
    }
    return g;
}

class PvDbowModel {
public:
    using Vector = std::vector<double>;

    PvDbowModel() = default;
    PvDbowModel(Strategy strategy, PvDbowParams params, std::vector<std::string> vocabulary,
                std::vector<std::uint64_t> counts, std::vector<EntryId> doc_ids, Matrix doc_vectors, Matrix output_weights,
                std::vector<double> epoch_loss)
        : strategy_(strategy),
          params_(params),
          vocabulary_(std::move(vocabulary)),
          counts_(std::move(counts)),
          doc_ids_(std::move(doc_ids)),
          docs_(std::move(doc_vectors)),
          out_(std::move(output_weights)),
          epoch_loss_(std::move(epoch_loss)) {
        if (counts_.size() != vocabulary_.size() || docs_.rows() != doc_ids_.size() || out_.rows() != vocabulary_.size() ||
            docs_.cols() != params_.dim || out_.cols() != params_.dim)
            throw ConfigError("inconsistent PV-DBOW model parts");
        for (std::size_t i = 0; i < vocabulary_.size(); ++i) term_index_.emplace(vocabulary_[i], i);
        for (std::size_t i = 0; i < doc_ids_.size(); ++i) doc_index_.emplace(doc_ids_[i], i);
        build_noise_table();
    }

    Strategy strategy() const noexcept { return strategy_; }
    const PvDbowParams& params() const noexcept { return params_; }
    std::size_t dim() const noexcept { return params_.dim; }
    const std::vector<std::string>& vocabulary() const noexcept { return vocabulary_; }
    const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
    const std::vector<EntryId>& doc_ids() const noexcept { return doc_ids_; }
    const Matrix& document_vectors() const noexcept { return docs_; }
    const Matrix& word_output_weights() const noexcept { return out_; }
    const std::vector<double>& epoch_loss() const noexcept { return epoch_loss_; }

    bool contains(std::string_view id) const { return doc_index_.find(id) != doc_index_.end(); }

    Vector vector_of(std::string_view id) const {
        auto it = doc_index_.find(id);
        if (it == doc_index_.end()) throw LookupError("document '" + std::string(id) + "' not in PV-DBOW model");
        auto r = docs_.row(it->second);
        return Vector(r.begin(), r.end());
    }

    std::vector<std::size_t> term_ids(std::span<const std::string> tokens) const {
        std::vector<std::size_t> ids;
        for (const std::string& t : tokens) {
            if (auto it = term_index_.find(t); it != term_index_.end()) ids.push_back(it->second);
        }
        return ids;
    }

    // Trains a fresh document vector against frozen output weights.
    Vector infer(std::span<const std::string> tokens) const {
        std::vector<std::size_t> ids = term_ids(tokens);
        std::mt19937_64 rng(params_.seed);
        Vector doc(params_.dim);
        for (double& x : doc) x = (uniform01(rng) - 0.5) / static_cast<double>(params_.dim);
        if (ids.empty()) return doc;
        std::size_t epochs = params_.infer_epochs ? params_.infer_epochs : params_.epochs;
        const double total = static_cast<double>(epochs * ids.size());
        std::size_t done = 0;
        std::vector<double> coef, grad(params_.dim);
        std::vector<std::span<const double>> outputs;
        for (std::size_t ep = 0; ep < epochs; ++ep) {
            for (std::size_t w : ids) {
                double lr = learning_rate(static_cast<double>(done++) / total);
                outputs.assign(1, out_.row(w));
                for (std::size_t n = 0; n < params_.negative; ++n) {
                    std::size_t neg = sample_noise(rng);
                    if (neg != w) outputs.push_back(out_.row(neg));
                }
                detail::ns_coefficients(doc, outputs, coef);
                std::fill(grad.begin(), grad.end(), 0.0);
                for (std::size_t i = 0; i < outputs.size(); ++i)
                    for (std::size_t k = 0; k < doc.size(); ++k) grad[k] += coef[i] * outputs[i][k];
                for (std::size_t k = 0; k < doc.size(); ++k) doc[k] -= lr * grad[k];
            }
        }
        return doc;
    }

    Vector vector_for_text(std::string_view text) const { return infer(tokenize(text, strategy_).tokens); }

    static double cosine(const Vector& a, const Vector& b) {
        double na = std::sqrt(dot(a, a)), nb = std::sqrt(dot(b, b));
        if (na == 0.0 || nb == 0.0) return 0.0;
        return dot(a, b) / (na * nb);
    }

    static bool is_zero(const Vector& v) { return dot(v, v) == 0.0; }

    double learning_rate(double progress) const {
        return std::max(params_.min_alpha, params_.alpha - (params_.alpha - params_.min_alpha) * progress);
    }

    std::size_t sample_noise(std::mt19937_64& rng) const {
        double u = uniform01(rng) * noise_cdf_.back();
        auto it = std::upper_bound(noise_cdf_.begin(), noise_cdf_.end(), u);
        return std::min<std::size_t>(static_cast<std::size_t>(it - noise_cdf_.begin()), noise_cdf_.size() - 1);
    }

private:
    friend PvDbowModel train_pvdbow(const std::vector<TokenStream>&, const PvDbowParams&);

    void build_noise_table() {
        noise_cdf_.clear();
        double acc = 0.0;
        for (std::uint64_t c : counts_) {
            acc += std::pow(static_cast<double>(c), params_.ns_exponent);
            noise_cdf_.push_back(acc);
        }
        if (noise_cdf_.empty()) noise_cdf_.push_back(1.0);
    }

    Strategy strategy_ = Strategy::TokenisedExpression;
    PvDbowParams params_;
    std::vector<std::string> vocabulary_;
    std::vector<std::uint64_t> counts_;
    std::vector<EntryId> doc_ids_;
    Matrix docs_;
    Matrix out_;
    std::vector<double> epoch_loss_;
    std::vector<double> noise_cdf_;
    std::map<std::string, std::size_t, std::less<>> term_index_;
    std::map<EntryId, std::size_t, std::less<>> doc_index_;
};

// Documents are processed in id order. The learning rate decays linearly
// from alpha to min_alpha over all training tokens. Output weights start
// at zero and document vectors uniformly in [-0.5/dim, 0.5/dim).
inline PvDbowModel train_pvdbow(const std::vector<TokenStream>& input, const PvDbowParams& params) {
    if (params.dim == 0) throw ConfigError("embedding dimension must be positive");
    if (params.epochs == 0) throw ConfigError("epochs must be positive");
    if (input.empty()) throw ConfigError("cannot train PV-DBOW on an empty corpus");
    for (const TokenStream& s : input) {
        if (s.strategy != input.front().strategy) throw ConfigError("token streams mix tokenization strategies");
    }
    std::vector<const TokenStream*> streams;
    for (const TokenStream& s : input) streams.push_back(&s);
    std::stable_sort(streams.begin(), streams.end(),
                     [](const TokenStream* a, const TokenStream* b) { return a->source_id < b->source_id; });

    std::map<std::string, std::uint64_t> freq;
    for (const TokenStream* s : streams)
        for (const std::string& t : s->tokens) ++freq[t];
    std::vector<std::pair<std::string, std::uint64_t>> kept;
    for (auto& [t, c] : freq) {
        if (c >= params.min_count) kept.emplace_back(t, c);
    }
    std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<std::string> vocab;
    std::vector<std::uint64_t> counts;
    for (auto& [t, c] : kept) {
        vocab.push_back(t);
        counts.push_back(c);
    }

    std::vector<EntryId> ids;
    for (const TokenStream* s : streams) ids.push_back(s->source_id);
    const std::size_t dim = params.dim;
    std::mt19937_64 rng(params.seed);
    Matrix docs(ids.size(), dim);
    for (double& x : docs.data()) x = (uniform01(rng) - 0.5) / static_cast<double>(dim);
    Matrix out(vocab.size(), dim);

    PvDbowModel model(streams.empty() ? Strategy::TokenisedExpression : streams.front()->strategy, params, vocab, counts,
                      ids, std::move(docs), std::move(out), {});
    if (vocab.empty()) return model;

    std::vector<std::vector<std::size_t>> doc_terms;
    std::size_t total_tokens = 0;
    for (const TokenStream* s : streams) {
        doc_terms.push_back(model.term_ids(s->tokens));
        total_tokens += doc_terms.back().size();
    }
    const double total = static_cast<double>(params.epochs * std::max<std::size_t>(total_tokens, 1));
    std::size_t done = 0;
    std::vector<double> coef, grad(dim);
    std::vector<std::size_t> rows;
    std::vector<std::span<const double>> outputs;
    for (std::size_t ep = 0; ep < params.epochs; ++ep) {
        double loss_sum = 0.0;
        std::size_t steps = 0;
        for (std::size_t d = 0; d < doc_terms.size(); ++d) {
            std::span<double> doc = model.docs_.row(d);
            for (std::size_t w : doc_terms[d]) {
                double lr = model.learning_rate(static_cast<double>(done++) / total);
                rows.assign(1, w);
                for (std::size_t n = 0; n < params.negative; ++n) {
                    std::size_t neg = model.sample_noise(rng);
                    if (neg != w) rows.push_back(neg);
                }
                outputs.clear();
                for (std::size_t r : rows) outputs.push_back(model.out_.row(r));
                loss_sum += detail::ns_coefficients(doc, outputs, coef);
                ++steps;
                // gradient at the current point, then a single SGD step
                std::fill(grad.begin(), grad.end(), 0.0);
                for (std::size_t i = 0; i < rows.size(); ++i)
                    for (std::size_t k = 0; k < dim; ++k) grad[k] += coef[i] * outputs[i][k];
                for (std::size_t i = 0; i < rows.size(); ++i) {
                    std::span<double> u = model.out_.row(rows[i]);
                    for (std::size_t k = 0; k < dim; ++k) u[k] -= lr * coef[i] * doc[k];
                }
                for (std::size_t k = 0; k < dim; ++k) doc[k] -= lr * grad[k];
            }
        }
        model.epoch_loss_.push_back(steps ? loss_sum / static_cast<double>(steps) : 0.0);
    }
    return model;
}

}  // namespace nlps
