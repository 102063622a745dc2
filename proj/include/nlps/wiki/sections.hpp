#pragma once

// Heading-based sectioning of cleaned page text.

#include <regex>
#include <string>
#include <utility>
#include <vector>

#include "nlps/text.hpp"
#include "nlps/wiki/clean.hpp"

namespace nlps::wiki {

struct SectionRole {
    enum class Kind { Statement, Proof, Satellite };

    Kind kind = Kind::Statement;
    std::size_t proof_index = 0;  // meaningful for Proof only

    static SectionRole statement() { return {Kind::Statement, 0}; }
    static SectionRole proof(std::size_t i) { return {Kind::Proof, i}; }
    static SectionRole satellite() { return {Kind::Satellite, 0}; }

    friend bool operator==(const SectionRole&, const SectionRole&) = default;
};

struct PageSection {
    std::string heading;
    std::string body;
    SectionRole role;
    std::vector<LinkAnnotation> links;  // offsets relative to body
};

enum class HeadingClass { Statement, Proof, Satellite, Unknown };

// Heading table. Statement: Theorem, Lemma, Corollary, Definition,
// Proposition, Statement, Axiom (optionally numbered). Proof: anything that
// starts with "Proof". Satellite: commentary headings such as Historical
// Note, Also see, Sources.
inline HeadingClass classify_heading(std::string_view heading) {
    std::string h = text::ascii_lower(text::trim(heading));
    static const std::regex proof(R"(^proofs?\b.*)");
    static const std::regex statement(R"(^(theorem|lemma|corollary|definition|proposition|statement|axiom)(\s+\S.*)?$)");
    static const std::regex satellite(
        R"(^(historical notes?|also see|see also|sources?|linguistic notes?|also known as|also defined as|notes?|examples?|comments?|warning|motivation|technical notes?|source of name|illustration|applications?|generalizations?|special cases?|results?|external links?|references?)$)");
    if (std::regex_match(h, proof)) return HeadingClass::Proof;
    if (std::regex_match(h, statement)) return HeadingClass::Statement;
    if (std::regex_match(h, satellite)) return HeadingClass::Satellite;
    return HeadingClass::Unknown;
}

namespace detail {

struct RawSection {
    int level = 0;  // 0 = text before the first heading
    std::string heading;
    SectionRole::Kind kind = SectionRole::Kind::Statement;
    std::vector<std::pair<std::size_t, std::size_t>> pieces;  // byte ranges of body text
};

inline PageSection materialize(const RawSection& raw, const CleanText& clean) {
    PageSection out;
    out.heading = raw.heading;
    out.role.kind = raw.kind;
    std::string body;
    std::vector<LinkAnnotation> links;
    for (auto [b, e] : raw.pieces) {
        for (const LinkAnnotation& l : clean.links) {
            if (l.offset >= b && l.offset < e) {
                LinkAnnotation rel = l;
                rel.offset = body.size() + (l.offset - b);
                links.push_back(std::move(rel));
            }
        }
        body.append(clean.text, b, e - b);
    }
    std::string_view trimmed = text::trim(body);
    std::size_t lead = trimmed.empty() ? 0 : static_cast<std::size_t>(trimmed.data() - body.data());
    out.body = std::string(trimmed);
    for (LinkAnnotation& l : links) {
        if (l.offset < lead || l.offset >= lead + out.body.size()) continue;
        l.offset -= lead;
        out.links.push_back(std::move(l));
    }
    return out;
}

}  // namespace detail

// Splits on "== Heading ==" lines. Level-2 headings pick a role from the
// heading table (unknown ones are satellites). Deeper headings start a new
// section only for proofs and known satellites; otherwise their text folds
// into the enclosing section. Proof sections are numbered from 0 in page
// order; an empty proof heading directly followed by deeper proof headings
// is a container and is dropped.
inline std::vector<PageSection> split_sections(const CleanText& clean) {
    static const std::regex heading_re(R"(^(=+)\s*(.*?)\s*(=+)\s*$)");
    using detail::RawSection;
    using Kind = SectionRole::Kind;

    std::vector<RawSection> raw(1);
    bool any_heading = false;
    std::size_t pos = 0;
    const std::string& t = clean.text;
    while (pos <= t.size()) {
        std::size_t nl = t.find('\n', pos);
        std::size_t line_end = nl == std::string::npos ? t.size() : nl;
        std::size_t next = nl == std::string::npos ? t.size() + 1 : nl + 1;
        std::string line = t.substr(pos, line_end - pos);
        std::smatch m;
        if (std::regex_match(line, m, heading_re) && !m[2].str().empty()) {
            int level = static_cast<int>(std::min(m[1].length(), m[3].length()));
            std::string heading = m[2].str();
            HeadingClass cls = classify_heading(heading);
            bool starts_section = level <= 2 || cls == HeadingClass::Proof || cls == HeadingClass::Satellite;
            if (starts_section) {
                any_heading = true;
                RawSection s;
                s.level = level;
                s.heading = heading;
                s.kind = cls == HeadingClass::Proof       ? Kind::Proof
                         : cls == HeadingClass::Statement ? Kind::Statement
                                                          : Kind::Satellite;
                raw.push_back(std::move(s));
            }
            pos = next;
            continue;
        }
        raw.back().pieces.emplace_back(pos, std::min(next, t.size()));
        pos = next;
    }

    std::vector<PageSection> built;
    built.reserve(raw.size());
    std::vector<int> levels;
    for (const RawSection& r : raw) {
        built.push_back(detail::materialize(r, clean));
        levels.push_back(r.level);
    }
    if (!any_heading) {
        built.resize(1);
        built[0].role = SectionRole::statement();
        return built;
    }

    std::vector<PageSection> out;
    bool has_statement = false;
    for (std::size_t i = 1; i < built.size(); ++i) has_statement |= built[i].role.kind == Kind::Statement;
    if (!built[0].body.empty()) {
        built[0].role = has_statement ? SectionRole::satellite() : SectionRole::statement();
        out.push_back(std::move(built[0]));
    }
    std::size_t proof_counter = 0;
    for (std::size_t i = 1; i < built.size(); ++i) {
        PageSection& s = built[i];
        if (s.role.kind == Kind::Proof) {
            bool container = s.body.empty() && i + 1 < built.size() && built[i + 1].role.kind == Kind::Proof &&
                             levels[i + 1] > levels[i];
            if (container) continue;
            s.role.proof_index = proof_counter++;
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace nlps::wiki
