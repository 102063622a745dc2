#pragma once

// Model files.
//
//   bytes 0..7   "NLPSMODL"
//   u32          format version
//   u64          header length H
//   H bytes      JSON header: method, strategy, hyperparameters, doc_ids,
//                vocabulary, training record
//   payload      little-endian binary; layout depends on method
//
// TF-IDF payload: for each document, u32 nnz then nnz x (u32 term, f64 weight).
// PV-DBOW payload: document vectors then output weights, row-major f64.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nlps/corpus_io.hpp"
#include "nlps/error.hpp"
#include "nlps/pvdbow.hpp"
#include "nlps/tfidf.hpp"
#include "nlps/tokenizer.hpp"

namespace nlps {

inline constexpr std::string_view kModelMagic = "NLPSMODL";
inline constexpr std::uint32_t kModelFormatVersion = 1;

using RetrievalModel = std::variant<TfIdfModel, PvDbowModel>;

inline std::string_view method_name(const RetrievalModel& m) {
    return std::holds_alternative<TfIdfModel>(m) ? "tfidf" : "pvdbow";
}

inline Strategy model_strategy(const RetrievalModel& m) {
    return std::visit([](const auto& x) { return x.strategy(); }, m);
}

namespace detail {

class ByteWriter {
public:
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
    void raw(std::string_view s) { buf_.append(s); }
    const std::string& bytes() const noexcept { return buf_; }

private:
    void put(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    std::string buf_;
};

class ByteReader {
public:
    explicit ByteReader(std::string_view data) : data_(data) {}

    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    std::uint64_t u64() { return get(8); }
    double f64() { return std::bit_cast<double>(get(8)); }
    std::string_view raw(std::size_t n) {
        need(n);
        auto s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::size_t position() const noexcept { return pos_; }
    bool at_end() const noexcept { return pos_ == data_.size(); }

private:
    void need(std::size_t n) const {
        if (data_.size() - pos_ < n) throw ParseError("model file truncated", pos_);
    }
    std::uint64_t get(int n) {
        need(static_cast<std::size_t>(n));
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
        pos_ += static_cast<std::size_t>(n);
        return v;
    }

    std::string_view data_;
    std::size_t pos_ = 0;
};

inline json params_to_json(const PvDbowParams& p) {
    return {{"dim", p.dim},
            {"epochs", p.epochs},
            {"negative", p.negative},
            {"alpha", p.alpha},
            {"min_alpha", p.min_alpha},
            {"min_count", p.min_count},
            {"ns_exponent", p.ns_exponent},
            {"seed", p.seed},
            {"infer_epochs", p.infer_epochs}};
}

inline PvDbowParams params_from_json(const json& j) {
    PvDbowParams p;
    p.dim = j.at("dim").get<std::size_t>();
    p.epochs = j.at("epochs").get<std::size_t>();
    p.negative = j.at("negative").get<std::size_t>();
    p.alpha = j.at("alpha").get<double>();
    p.min_alpha = j.at("min_alpha").get<double>();
    p.min_count = j.at("min_count").get<std::size_t>();
    p.ns_exponent = j.at("ns_exponent").get<double>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.infer_epochs = j.at("infer_epochs").get<std::size_t>();
    return p;
}

}  // namespace detail

inline std::string serialize_model(const RetrievalModel& model) {
    json header;
    detail::ByteWriter payload;
    if (const auto* m = std::get_if<TfIdfModel>(&model)) {
        header = {{"method", "tfidf"},
                  {"strategy", to_string(m->strategy())},
                  {"hyperparameters", {{"tf", "raw"}, {"idf", "ln((1+N)/(1+df))+1"}, {"norm", "l2"}}},
                  {"corpus_size", m->corpus_size()},
                  {"doc_ids", m->doc_ids()},
                  {"vocabulary", m->vocabulary()},
                  {"document_frequencies", m->document_frequencies()}};
        for (const SparseVector& v : m->document_vectors()) {
            payload.u32(static_cast<std::uint32_t>(v.size()));
            for (const auto& [idx, w] : v) {
                payload.u32(idx);
                payload.f64(w);
            }
        }
    } else {
        const auto& p = std::get<PvDbowModel>(model);
        header = {{"method", "pvdbow"},
                  {"strategy", to_string(p.strategy())},
                  {"hyperparameters", detail::params_to_json(p.params())},
                  {"doc_ids", p.doc_ids()},
                  {"vocabulary", p.vocabulary()},
                  {"counts", p.counts()},
                  {"training_loss", p.epoch_loss()}};
        for (double x : p.document_vectors().data()) payload.f64(x);
        for (double x : p.word_output_weights().data()) payload.f64(x);
    }
    std::string h = header.dump();
    detail::ByteWriter out;
    out.raw(kModelMagic);
    out.u32(kModelFormatVersion);
    out.u64(h.size());
    out.raw(h);
    out.raw(payload.bytes());
    return out.bytes();
}

inline RetrievalModel deserialize_model(std::string_view bytes) {
    detail::ByteReader in(bytes);
    if (in.raw(kModelMagic.size()) != kModelMagic) throw ParseError("not a model file (bad magic)", 0);
    if (std::uint32_t v = in.u32(); v != kModelFormatVersion)
        throw ParseError("unsupported model format version " + std::to_string(v), 8);
    std::uint64_t hlen = in.u64();
    std::size_t header_at = in.position();
    json header;
    try {
        header = json::parse(in.raw(static_cast<std::size_t>(hlen)));
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad model header: ") + e.what(), header_at);
    }
    try {
        Strategy strategy = strategy_from_string(header.at("strategy").get<std::string>());
        auto ids = header.at("doc_ids").get<std::vector<EntryId>>();
        auto vocab = header.at("vocabulary").get<std::vector<std::string>>();
        std::string method = header.at("method").get<std::string>();
        RetrievalModel result;
        if (method == "tfidf") {
            std::vector<SparseVector> vectors(ids.size());
            for (SparseVector& v : vectors) {
                std::uint32_t nnz = in.u32();
                for (std::uint32_t i = 0; i < nnz; ++i) {
                    std::uint32_t idx = in.u32();
                    if (idx >= vocab.size()) throw ParseError("term index out of range", in.position());
                    v.emplace_back(idx, in.f64());
                }
            }
            result = TfIdfModel(strategy, std::move(vocab), header.at("document_frequencies").get<std::vector<std::uint32_t>>(),
                                header.at("corpus_size").get<std::size_t>(), std::move(ids), std::move(vectors));
        } else if (method == "pvdbow") {
            PvDbowParams params = detail::params_from_json(header.at("hyperparameters"));
            Matrix docs(ids.size(), params.dim), out(vocab.size(), params.dim);
            for (double& x : docs.data()) x = in.f64();
            for (double& x : out.data()) x = in.f64();
            result = PvDbowModel(strategy, params, std::move(vocab), header.at("counts").get<std::vector<std::uint64_t>>(),
                                 std::move(ids), std::move(docs), std::move(out),
                                 header.at("training_loss").get<std::vector<double>>());
        } else {
            throw ParseError("unknown model method '" + method + "'", header_at);
        }
        if (!in.at_end()) throw ParseError("trailing bytes after model payload", in.position());
        return result;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad model header: ") + e.what(), header_at);
    }
}

inline void save_model(const RetrievalModel& model, const std::filesystem::path& path) {
    write_file(path, serialize_model(model));
}

inline RetrievalModel load_model(const std::filesystem::path& path) { return deserialize_model(read_file(path)); }

}  // namespace nlps
