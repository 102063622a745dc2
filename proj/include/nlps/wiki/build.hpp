#pragma once

// End-to-end corpus construction from raw pages:
// classify -> exclude maintenance-tagged pages -> clean -> split sections
// -> extract supporting facts -> harmonize categories -> repair -> Corpus.

#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nlps/corpus.hpp"
#include "nlps/corpus_io.hpp"
#include "nlps/parallel.hpp"
#include "nlps/wiki/categories.hpp"
#include "nlps/wiki/classify.hpp"
#include "nlps/wiki/clean.hpp"
#include "nlps/wiki/pages.hpp"
#include "nlps/wiki/sections.hpp"

namespace nlps::wiki {

struct LinkTarget {
    EntryId id;
    PageKind kind;
};

// Maps a canonical link target to a corpus candidate, or nullopt when the
// target is missing or excluded.
using LinkResolver = std::function<std::optional<LinkTarget>(const std::string& target)>;

struct SupportingFacts {
    IdSet definitions;
    std::vector<IdSet> propositions_per_proof;
};

// Statement links to definitions become supporting definitions; proof links
// to non-definitions become that proof's supporting propositions. Satellite
// sections are ignored.
inline SupportingFacts extract_supporting_facts(const std::vector<PageSection>& sections, const LinkResolver& resolve) {
    SupportingFacts facts;
    for (const PageSection& s : sections) {
        if (s.role.kind == SectionRole::Kind::Proof && facts.propositions_per_proof.size() <= s.role.proof_index)
            facts.propositions_per_proof.resize(s.role.proof_index + 1);
    }
    for (const PageSection& s : sections) {
        if (s.role.kind == SectionRole::Kind::Satellite) continue;
        for (const LinkAnnotation& link : s.links) {
            auto target = resolve(link.target);
            if (!target || target->kind == PageKind::Excluded) continue;
            if (s.role.kind == SectionRole::Kind::Statement) {
                if (target->kind == PageKind::Definition) facts.definitions.insert(target->id);
            } else if (target->kind != PageKind::Definition) {
                facts.propositions_per_proof[s.role.proof_index].insert(target->id);
            }
        }
    }
    return facts;
}

inline std::set<std::string> default_exclude_tags() { return {"wip", "refactor", "delete", "rewrite", "under construction"}; }

// One template name per line; blank lines and '#' comments ignored.
inline std::set<std::string> load_exclude_tags(const std::filesystem::path& path) {
    std::set<std::string> tags;
    const std::string data = read_file(path);
    for (std::string_view line : text::split_lines(data)) {
        line = text::trim(line.substr(0, line.find('#')));
        if (!line.empty()) tags.insert(text::ascii_lower(text::normalize_title(line)));
    }
    return tags;
}

struct BuildOptions {
    CategoryRules category_rules = default_category_rules();
    std::size_t min_count = 100;
    std::set<std::string> exclude_tags = default_exclude_tags();
    unsigned workers = 1;
};

struct BuildReport {
    struct PageNote {
        std::string page;
        std::string kind;
        std::string detail;
    };

    std::size_t pages_total = 0;
    std::vector<PageNote> exclusions;        // kind = reason
    std::vector<PageNote> warnings;          // kind = warning kind
    std::vector<PageNote> unresolved_links;  // detail = target
    std::vector<PageNote> dropped_links;     // kind = reason, detail = target
    std::vector<PageNote> redirects;         // kind = from, detail = to
    std::vector<PageNote> failures;          // detail = error
    CategoryAssignment categories;
};

inline json to_json(const BuildReport& r, const Corpus& corpus) {
    auto notes = [](const std::vector<BuildReport::PageNote>& v, const char* kind_key, const char* detail_key) {
        json arr = json::array();
        for (const auto& n : v) {
            json item{{"page", n.page}};
            if (kind_key) item[kind_key] = n.kind;
            if (detail_key) item[detail_key] = n.detail;
            arr.push_back(std::move(item));
        }
        return arr;
    };
    json by_kind = json::object();
    for (const auto& [k, n] : corpus.counts_by_kind()) by_kind[std::string(to_string(k))] = n;
    return json{
        {"pages_total", r.pages_total},
        {"entries_total", corpus.size()},
        {"entries_by_kind", by_kind},
        {"exclusions", notes(r.exclusions, "reason", nullptr)},
        {"warnings", notes(r.warnings, "kind", "detail")},
        {"unresolved_links", notes(r.unresolved_links, nullptr, "target")},
        {"dropped_links", notes(r.dropped_links, "reason", "target")},
        {"redirects_followed", notes(r.redirects, "from", "to")},
        {"failures", notes(r.failures, nullptr, "error")},
        {"categories",
         {{"kept", r.categories.kept}, {"dropped", r.categories.dropped}, {"unrecognized", r.categories.unrecognized}}},
    };
}

struct BuildResult {
    Corpus corpus;
    BuildReport report;
};

namespace detail {

struct PageWork {
    Classification cls;
    std::string excluded_reason;
    std::string failure;
    CleanText clean;
    std::vector<PageSection> sections;
};

inline PageWork process_page(const RawPage& page, const PageIndex& index, const BuildOptions& options,
                             const CleanOptions& clean_options) {
    PageWork w;
    w.cls = classify_page(page);
    if (w.cls.kind == PageKind::Excluded) {
        w.excluded_reason = w.cls.reason;
        return w;
    }
    for (const std::string& name : template_names(page.wikitext)) {
        if (options.exclude_tags.count(name)) {
            w.excluded_reason = "maintenance-tag:" + name;
            return w;
        }
    }
    try {
        w.clean = clean_wikitext(page, index, clean_options);
        w.sections = split_sections(w.clean);
    } catch (const std::exception& ex) {
        w.failure = ex.what();
    }
    return w;
}

}  // namespace detail

inline BuildResult build_corpus(const std::vector<RawPage>& input_pages, const BuildOptions& options = {}) {
    check_rules(options.category_rules);
    std::vector<RawPage> pages = input_pages;
    std::stable_sort(pages.begin(), pages.end(), by_title);

    BuildResult result;
    BuildReport& report = result.report;
    report.pages_total = pages.size();
    PageIndex index(pages);
    CleanOptions clean_options;
    clean_options.drop_templates = options.exclude_tags;

    // per-page work is pure; everything after this is a sequential merge
    std::vector<detail::PageWork> work(pages.size());
    parallel_for(pages.size(), options.workers,
                 [&](std::size_t i) { work[i] = detail::process_page(pages[i], index, options, clean_options); });

    std::map<std::string, LinkTarget> candidates;  // canonical title -> target
    std::map<EntryId, std::string> id_owner;
    for (std::size_t i = 0; i < pages.size(); ++i) {
        detail::PageWork& w = work[i];
        if (!w.excluded_reason.empty()) {
            report.exclusions.push_back({pages[i].title, w.excluded_reason, {}});
            continue;
        }
        if (!w.failure.empty()) {
            report.failures.push_back({pages[i].title, {}, w.failure});
            continue;
        }
        EntryId id = text::entry_id_from_title(canonical_title(pages[i].title));
        if (auto [it, fresh] = id_owner.emplace(id, pages[i].title); !fresh) {
            w.excluded_reason = "duplicate-id:" + id;
            report.exclusions.push_back({pages[i].title, w.excluded_reason, {}});
            continue;
        }
        candidates[canonical_title(pages[i].title)] = {id, w.cls.kind};
    }

    std::vector<Entry> entries;
    std::vector<std::vector<std::string>> raw_categories;
    for (std::size_t i = 0; i < pages.size(); ++i) {
        const detail::PageWork& w = work[i];
        if (!w.excluded_reason.empty() || !w.failure.empty()) continue;
        const RawPage& page = pages[i];
        for (const CleanWarning& warn : w.clean.warnings)
            report.warnings.push_back({page.title, std::string(to_string(warn.kind)), warn.detail});

        LinkResolver resolve = [&](const std::string& target) -> std::optional<LinkTarget> {
            PageIndex::Resolved r = index.resolve(target);
            if (!r.page) {
                report.unresolved_links.push_back({page.title, {}, target});
                return std::nullopt;
            }
            std::string canonical = canonical_title(r.page->title);
            if (r.redirected_from) report.redirects.push_back({page.title, *r.redirected_from, canonical});
            auto it = candidates.find(canonical);
            if (it == candidates.end()) {
                report.dropped_links.push_back({page.title, "excluded-target", target});
                return std::nullopt;
            }
            return it->second;
        };

        Entry e;
        e.id = candidates.at(canonical_title(page.title)).id;
        e.kind = *entry_kind(w.cls.kind);
        e.title = canonical_title(page.title);
        std::string statement;
        for (const PageSection& s : w.sections) {
            if (s.role.kind != SectionRole::Kind::Statement || s.body.empty()) continue;
            if (!statement.empty()) statement += "\n\n";
            statement += s.body;
        }
        e.statement_text = std::move(statement);
        SupportingFacts facts = extract_supporting_facts(w.sections, resolve);
        e.supporting_definitions = std::move(facts.definitions);
        if (e.kind != EntryKind::Definition) {
            for (const PageSection& s : w.sections) {
                if (s.role.kind != SectionRole::Kind::Proof) continue;
                e.proofs.push_back({s.body, facts.propositions_per_proof[s.role.proof_index]});
            }
        } else if (!facts.propositions_per_proof.empty()) {
            report.warnings.push_back({page.title, "definition-proof-ignored", {}});
        }
        if (w.cls.derived_from) {
            auto it = candidates.find(canonical_title(*w.cls.derived_from));
            if (it != candidates.end()) e.derived_from = it->second.id;
            else report.warnings.push_back({page.title, "missing-parent", *w.cls.derived_from});
        }
        raw_categories.push_back(w.clean.categories);
        entries.push_back(std::move(e));
    }

    report.categories = harmonize_categories(raw_categories, options.category_rules, options.min_count);
    for (std::size_t i = 0; i < entries.size(); ++i) entries[i].categories = report.categories.per_entry[i];

    // Repair until stable: corollaries need a theorem parent, lemma parents
    // must exist, no self links, no links to removed entries.
    for (bool changed = true; changed;) {
        changed = false;
        std::map<EntryId, EntryKind> kinds;
        for (const Entry& e : entries) kinds[e.id] = e.kind;
        std::vector<Entry> kept;
        for (Entry& e : entries) {
            if (e.kind == EntryKind::Corollary) {
                auto parent = e.derived_from ? kinds.find(*e.derived_from) : kinds.end();
                if (parent == kinds.end() || parent->second != EntryKind::Theorem || *e.derived_from == e.id) {
                    report.exclusions.push_back({e.title, "corollary-without-theorem", {}});
                    changed = true;
                    continue;
                }
            } else if (e.kind == EntryKind::Lemma && e.derived_from &&
                       (!kinds.count(*e.derived_from) || *e.derived_from == e.id)) {
                e.derived_from.reset();
            }
            kept.push_back(std::move(e));
        }
        entries = std::move(kept);
        std::set<EntryId> live;
        for (const Entry& e : entries) live.insert(e.id);
        auto prune = [&](const Entry& e, IdSet& ids) {
            for (auto it = ids.begin(); it != ids.end();) {
                if (*it == e.id || !live.count(*it)) {
                    report.dropped_links.push_back({e.title, *it == e.id ? "self-link" : "removed-target", *it});
                    it = ids.erase(it);
                } else {
                    ++it;
                }
            }
        };
        for (Entry& e : entries) {
            prune(e, e.supporting_definitions);
            for (Proof& p : e.proofs) prune(e, p.supporting_propositions);
        }
    }

    result.corpus = Corpus(std::move(entries));
    return result;
}

}  // namespace nlps::wiki
