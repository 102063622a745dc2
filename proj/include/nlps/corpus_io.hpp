#pragma once

// JSON persistence for corpora: one UTF-8 file per entry kind, each an
// array of entry objects.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "nlps/corpus.hpp"
#include "nlps/error.hpp"

namespace nlps {

using json = nlohmann::json;

inline std::string_view corpus_file_name(EntryKind k) noexcept {
    switch (k) {
        case EntryKind::Definition: return "definitions.json";
        case EntryKind::Lemma: return "lemmas.json";
        case EntryKind::Theorem: return "theorems.json";
        case EntryKind::Corollary: return "corollaries.json";
    }
    return "";
}

inline json to_json(const Entry& e) {
    json j;
    j["id"] = e.id;
    j["kind"] = std::string(to_string(e.kind));
    j["title"] = e.title;
    j["statement_text"] = e.statement_text;
    j["categories"] = e.categories;
    j["supporting_definitions"] = e.supporting_definitions;
    json proofs = json::array();
    for (const Proof& p : e.proofs) {
        proofs.push_back({{"proof_text", p.proof_text}, {"supporting_propositions", p.supporting_propositions}});
    }
    j["proofs"] = std::move(proofs);
    j["derived_from"] = e.derived_from ? json(*e.derived_from) : json(nullptr);
    if (e.definiens) {
        json pairs = json::array();
        for (const auto& [expr, text] : *e.definiens) pairs.push_back(json::array({expr, text}));
        j["definiens"] = std::move(pairs);
    }
    return j;
}

inline Entry entry_from_json(const json& j) {
    try {
        Entry e;
        e.id = j.at("id").get<std::string>();
        e.kind = kind_from_string(j.at("kind").get<std::string>());
        e.title = j.value("title", std::string{});
        e.statement_text = j.value("statement_text", std::string{});
        if (j.contains("categories")) e.categories = j["categories"].get<std::set<std::string>>();
        if (j.contains("supporting_definitions"))
            e.supporting_definitions = j["supporting_definitions"].get<IdSet>();
        if (j.contains("proofs")) {
            for (const json& p : j["proofs"]) {
                Proof proof;
                proof.proof_text = p.value("proof_text", std::string{});
                if (p.contains("supporting_propositions"))
                    proof.supporting_propositions = p["supporting_propositions"].get<IdSet>();
                e.proofs.push_back(std::move(proof));
            }
        }
        if (j.contains("derived_from") && !j["derived_from"].is_null())
            e.derived_from = j["derived_from"].get<std::string>();
        if (j.contains("definiens") && !j["definiens"].is_null()) {
            std::vector<DefiniensPair> pairs;
            for (const json& p : j["definiens"]) pairs.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
            e.definiens = std::move(pairs);
        }
        return e;
    } catch (const json::exception& ex) {
        throw ConfigError(std::string("malformed entry object: ") + ex.what());
    }
}

inline json to_json(const ValidationReport& r) {
    json issues = json::array();
    for (const ValidationIssue& i : r.issues) {
        json item{{"kind", std::string(to_string(i.kind))}, {"entry", i.entry}};
        if (!i.target.empty()) item["target"] = i.target;
        issues.push_back(std::move(item));
    }
    return json{{"valid", r.valid()}, {"issues", std::move(issues)}};
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline json read_json_file(const std::filesystem::path& path) {
    std::string text = read_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& ex) {
        throw ParseError("invalid JSON in '" + path.string() + "': " + ex.what(), ex.byte);
    }
}

inline void write_json_file(const std::filesystem::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

// Writes the four per-kind files. Entries keep corpus (id) order.
inline void save_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (EntryKind k : kAllKinds) {
        json arr = json::array();
        for (const Entry& e : corpus.entries()) {
            if (e.kind == k) arr.push_back(to_json(e));
        }
        write_json_file(dir / corpus_file_name(k), arr);
    }
}

// Reads whichever per-kind files exist; a directory with none of them is an error.
inline std::vector<Entry> load_entries(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw IoError("corpus directory '" + dir.string() + "' not found");
    std::vector<Entry> entries;
    bool any = false;
    for (EntryKind k : kAllKinds) {
        auto path = dir / corpus_file_name(k);
        if (!std::filesystem::exists(path)) continue;
        any = true;
        json arr = read_json_file(path);
        if (!arr.is_array()) throw ConfigError("'" + path.string() + "' is not a JSON array");
        for (const json& j : arr) entries.push_back(entry_from_json(j));
    }
    if (!any) throw IoError("no corpus files found in '" + dir.string() + "'");
    return entries;
}

inline Corpus load_corpus(const std::filesystem::path& dir) { return Corpus(load_entries(dir)); }

}  // namespace nlps
