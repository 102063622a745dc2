#pragma once

#include <optional>
#include <regex>
#include <string>
#include <string_view>

#include "nlps/corpus.hpp"
#include "nlps/text.hpp"
#include "nlps/wiki/pages.hpp"

namespace nlps::wiki {

enum class PageKind { Definition, Theorem, Lemma, Corollary, Excluded };

inline std::string_view to_string(PageKind k) noexcept {
    switch (k) {
        case PageKind::Definition: return "definition";
        case PageKind::Theorem: return "theorem";
        case PageKind::Lemma: return "lemma";
        case PageKind::Corollary: return "corollary";
        case PageKind::Excluded: return "excluded";
    }
    return "?";
}

inline std::optional<EntryKind> entry_kind(PageKind k) noexcept {
    switch (k) {
        case PageKind::Definition: return EntryKind::Definition;
        case PageKind::Theorem: return EntryKind::Theorem;
        case PageKind::Lemma: return EntryKind::Lemma;
        case PageKind::Corollary: return EntryKind::Corollary;
        case PageKind::Excluded: return std::nullopt;
    }
    return std::nullopt;
}

struct Classification {
    PageKind kind = PageKind::Excluded;
    std::optional<std::string> derived_from;  // parent page title for subpage lemmas/corollaries
    std::string reason;                       // why a page was excluded
};

// Rule table, applied in order:
//   redirect pages                          -> Excluded
//   namespace Definition                    -> Definition
//   any other non-main namespace            -> Excluded
//   ".../Proof N" subpages                  -> Excluded (proof bodies live on the parent)
//   ".../Corollary[ N]" subpages            -> Corollary, derived from the parent
//   ".../Lemma[ N]" subpages                -> Lemma, derived from the parent
//   main namespace with a proposition or
//   proof heading, or a {{qed}} marker      -> Theorem
//   anything else                           -> Excluded
inline Classification classify_page(const RawPage& page) {
    if (redirect_target(page.wikitext)) return {PageKind::Excluded, std::nullopt, "redirect"};
    std::string ns = page.namespace_.empty() ? namespace_of(page.title) : text::normalize_title(page.namespace_);
    if (text::iequals(ns, "Definition")) return {PageKind::Definition, std::nullopt, {}};
    if (!ns.empty()) return {PageKind::Excluded, std::nullopt, "namespace:" + ns};

    std::string title = canonical_title(page.title);
    auto slash = title.rfind('/');
    if (slash != std::string::npos) {
        std::string parent = title.substr(0, slash);
        std::string_view leaf = std::string_view(title).substr(slash + 1);
        static const std::regex numbered(R"(^(Proof|Corollary|Lemma)(\s+\d+)?$)", std::regex::icase);
        std::match_results<std::string_view::const_iterator> m;
        if (std::regex_match(leaf.begin(), leaf.end(), m, numbered)) {
            std::string head = text::ascii_lower(m[1].str());
            if (head == "proof") return {PageKind::Excluded, std::nullopt, "proof-subpage"};
            if (head == "corollary") return {PageKind::Corollary, parent, {}};
            return {PageKind::Lemma, parent, {}};
        }
    }

    static const std::regex structure(R"((^|\n)\s*=+\s*(Theorem|Proof|Lemma|Corollary|Proposition)\b)",
                                      std::regex::icase);
    static const std::regex qed(R"(\{\{\s*qed)", std::regex::icase);
    if (std::regex_search(page.wikitext, structure) || std::regex_search(page.wikitext, qed))
        return {PageKind::Theorem, std::nullopt, {}};
    return {PageKind::Excluded, std::nullopt, "no-proposition-structure"};
}

}  // namespace nlps::wiki
