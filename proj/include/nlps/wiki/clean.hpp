#pragma once

// Wikitext cleaning for ProofWiki-style markup.
//
// Produces plain text with math regions copied verbatim, internal links kept
// as (target, anchor, offset) annotations, category tags collected, and
// passage transclusions replaced by the referenced passage. Templates that
// are not recognised are kept verbatim and reported.

#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "nlps/error.hpp"
#include "nlps/text.hpp"
#include "nlps/wiki/pages.hpp"

namespace nlps::wiki {

struct LinkAnnotation {
    std::string target;   // canonical page title, fragment removed
    std::string anchor;   // visible text in the cleaned output
    std::size_t offset = 0;  // byte offset of the anchor in CleanText::text

    friend bool operator==(const LinkAnnotation&, const LinkAnnotation&) = default;
};

enum class CleanWarningKind { UnresolvedReference, UnknownTemplate, UnknownTag, UnbalancedMarkup };

inline std::string_view to_string(CleanWarningKind k) noexcept {
    switch (k) {
        case CleanWarningKind::UnresolvedReference: return "unresolved-reference";
        case CleanWarningKind::UnknownTemplate: return "unknown-template";
        case CleanWarningKind::UnknownTag: return "unknown-tag";
        case CleanWarningKind::UnbalancedMarkup: return "unbalanced-markup";
    }
    return "?";
}

struct CleanWarning {
    CleanWarningKind kind;
    std::string detail;

    friend bool operator==(const CleanWarning&, const CleanWarning&) = default;
};

struct CleanText {
    std::string text;
    std::vector<LinkAnnotation> links;
    std::vector<std::string> categories;  // raw names without the "Category:" prefix
    std::vector<CleanWarning> warnings;
};

struct CleanOptions {
    // Extra template names (compared case-insensitively) to drop silently,
    // e.g. the maintenance-tag blocklist.
    std::set<std::string> drop_templates;
};

// Templates with no textual content worth keeping.
inline const std::set<std::string>& silent_templates() {
    static const std::set<std::string> names = {
        "begin-eqn",  "end-eqn",      "begin-axiom",  "end-axiom",     "qed",         "explain",
        "link",       "proofread",    "tidy",         "missinglinks",  "improve",     "questionable",
        "mistake",    "citation needed", "namedfor",  "bookreference", "sourcereference", "sources",
        "mathworld",  "planetmath",   "wikipedia",    "wip",           "refactor",    "delete",
        "rewrite",    "under construction", "stub",   "help",          "notthm",      "expand",
        "transclude", "finish",       "disambiguation", "also see",    "proof wanted", "axiom",
        "langle",     "rangle",       "author",       "citation",      "proofwiki",   "harvnb",
    };
    return names;
}

namespace detail {

inline std::string template_key(std::string_view name) { return text::ascii_lower(text::normalize_title(name)); }

// Index just past the "}}" closing the template whose body starts at `i`
// (just after "{{"). Single braces are balanced separately so LaTeX groups
// inside parameters do not terminate the template early.
inline std::optional<std::size_t> match_template_end(std::string_view s, std::size_t i) {
    std::vector<char> stack{'T'};
    while (i < s.size()) {
        if (s[i] == '{') {
            if (i + 1 < s.size() && s[i + 1] == '{') {
                stack.push_back('T');
                i += 2;
            } else {
                stack.push_back('B');
                ++i;
            }
        } else if (s[i] == '}') {
            if (stack.back() == 'B') {
                stack.pop_back();
                ++i;
            } else if (i + 1 < s.size() && s[i + 1] == '}') {
                stack.pop_back();
                i += 2;
                if (stack.empty()) return i;
            } else {
                ++i;  // stray brace
            }
        } else {
            ++i;
        }
    }
    return std::nullopt;
}

inline std::optional<std::size_t> match_link_end(std::string_view s, std::size_t i) {
    int depth = 1;
    while (i + 1 < s.size()) {
        if (s[i] == '[' && s[i + 1] == '[') {
            ++depth;
            i += 2;
        } else if (s[i] == ']' && s[i + 1] == ']') {
            if (--depth == 0) return i + 2;
            i += 2;
        } else if (s[i] == '\n' && i + 1 < s.size() && s[i + 1] == '\n') {
            return std::nullopt;  // links never span paragraphs
        } else {
            ++i;
        }
    }
    return std::nullopt;
}

// Splits on '|' outside nested templates, links and brace groups.
inline std::vector<std::string_view> split_top_level(std::string_view s) {
    std::vector<std::string_view> parts;
    int tmpl = 0, link = 0, brace = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        char n = i + 1 < s.size() ? s[i + 1] : '\0';
        if (c == '{' && n == '{') {
            ++tmpl;
            ++i;
        } else if (c == '}' && n == '}' && tmpl > 0 && brace == 0) {
            --tmpl;
            ++i;
        } else if (c == '[' && n == '[') {
            ++link;
            ++i;
        } else if (c == ']' && n == ']' && link > 0) {
            --link;
            ++i;
        } else if (c == '{') {
            ++brace;
        } else if (c == '}' && brace > 0) {
            --brace;
        } else if (c == '|' && tmpl == 0 && link == 0 && brace == 0) {
            parts.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    parts.push_back(s.substr(start));
    return parts;
}

struct TemplateCall {
    std::string name;
    std::vector<std::string_view> positional;
    std::vector<std::pair<std::string, std::string_view>> named;

    std::optional<std::string_view> arg(std::string_view key) const {
        for (const auto& [k, v] : named) {
            if (k == key) return v;
        }
        return std::nullopt;
    }
};

inline TemplateCall parse_template(std::string_view body) {
    auto parts = split_top_level(body);
    TemplateCall call;
    call.name = std::string(text::trim(parts[0]));
    for (std::size_t i = 1; i < parts.size(); ++i) {
        std::string_view p = parts[i];
        auto eq = p.find('=');
        if (eq != std::string_view::npos) {
            std::string_view key = text::trim(p.substr(0, eq));
            bool ident = !key.empty();
            for (char c : key) ident = ident && (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-');
            if (ident) {
                call.named.emplace_back(std::string(key), text::trim(p.substr(eq + 1)));
                continue;
            }
        }
        call.positional.push_back(p);
    }
    return call;
}

inline std::string regex_escape(std::string_view s) {
    static const std::string special = R"(\^$.|?*+()[]{}/)";
    std::string out;
    for (char c : s) {
        if (special.find(c) != std::string::npos) out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

}  // namespace detail

// Named passage of a page's wikitext. The unnamed passage is the content of
// <onlyinclude> blocks, or the whole page minus <noinclude> blocks when none
// exist. Named passages are delimited by <section begin=NAME/> and
// <section end=NAME/>.
inline std::optional<std::string> find_passage(std::string_view wikitext, std::string_view name) {
    std::string src(wikitext);
    if (name.empty()) {
        static const std::regex only(R"(<onlyinclude>([\s\S]*?)</onlyinclude>)", std::regex::icase);
        std::string joined;
        bool any = false;
        for (auto it = std::sregex_iterator(src.begin(), src.end(), only); it != std::sregex_iterator(); ++it) {
            joined += (*it)[1].str();
            any = true;
        }
        if (any) return joined;
        static const std::regex noinc(R"(<noinclude>[\s\S]*?</noinclude>)", std::regex::icase);
        return std::regex_replace(src, noinc, "");
    }
    std::string n = detail::regex_escape(std::string(text::trim(name)));
    std::regex begin(R"(<section\s+begin\s*=\s*["']?)" + n + R"(["']?\s*/?>)", std::regex::icase);
    std::regex end(R"(<section\s+end\s*=\s*["']?)" + n + R"(["']?\s*/?>)", std::regex::icase);
    std::smatch mb;
    if (!std::regex_search(src, mb, begin)) return std::nullopt;
    std::size_t from = static_cast<std::size_t>(mb.position(0) + mb.length(0));
    std::string rest = src.substr(from);
    std::smatch me;
    if (!std::regex_search(rest, me, end)) return std::nullopt;
    return rest.substr(0, static_cast<std::size_t>(me.position(0)));
}

namespace detail {

class Cleaner {
public:
    Cleaner(const PageIndex& index, const CleanOptions& options, CleanText& out)
        : index_(index), options_(options), out_(out) {}

    void run(std::string_view page_title, std::string_view src) {
        if (!page_title.empty()) stack_.push_back(canonical_title(page_title));
        process(src, /*top_level=*/true);
    }

private:
    static bool is_tag_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

    static const std::set<std::string>& stripped_tags() {
        static const std::set<std::string> tags = {
            "section", "onlyinclude", "noinclude", "sup",  "sub",   "span",  "div",        "center",
            "big",     "small",       "u",         "s",    "i",     "b",     "em",         "strong",
            "code",    "tt",          "font",      "p",    "blockquote", "poem", "references", "pre",
        };
        return tags;
    }

    void warn(CleanWarningKind kind, std::string detail) { out_.warnings.push_back({kind, std::move(detail)}); }

    void process(std::string_view s, bool top_level) {
        std::size_t i = 0;
        while (i < s.size()) {
            char c = s[i];
            bool line_start = top_level && (i == 0 || s[i - 1] == '\n');
            if (line_start && (c == '*' || c == '#' || c == ':' || c == ';')) {
                while (i < s.size() && (s[i] == '*' || s[i] == '#' || s[i] == ':' || s[i] == ';')) ++i;
                while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
                continue;
            }
            if (c == '\\' && i + 1 < s.size() && s[i + 1] == '$') {
                out_.text.append("\\$");
                i += 2;
            } else if (c == '$') {
                i = copy_math(s, i);
            } else if (c == '<') {
                i = handle_angle(s, i);
            } else if (c == '[' && i + 1 < s.size() && s[i + 1] == '[') {
                i = handle_link(s, i);
            } else if (c == '[') {
                i = handle_external_link(s, i);
            } else if (c == '{' && i + 1 < s.size() && s[i + 1] == '{') {
                i = handle_template(s, i);
            } else if (c == '\'' && i + 1 < s.size() && s[i + 1] == '\'') {
                while (i < s.size() && s[i] == '\'') ++i;
            } else if (c == '_' && s.compare(i, 2, "__") == 0) {
                i = handle_magic_word(s, i);
            } else {
                out_.text.push_back(c);
                ++i;
            }
        }
    }

    std::size_t copy_math(std::string_view s, std::size_t i) {
        bool display = s.compare(i, 2, "$$") == 0;
        std::size_t open = display ? 2 : 1;
        std::size_t j = i + open;
        while (j < s.size()) {
            if (s[j] == '\\' && j + 1 < s.size()) {
                j += 2;
                continue;
            }
            if (s[j] == '$') break;
            ++j;
        }
        if (j >= s.size() || (display && s.compare(j, 2, "$$") != 0)) {
            warn(CleanWarningKind::UnbalancedMarkup, "unclosed math delimiter");
            out_.text.push_back('$');
            return i + 1;
        }
        std::size_t end = j + open;
        out_.text.append(s.substr(i, end - i));
        return end;
    }

    std::size_t handle_magic_word(std::string_view s, std::size_t i) {
        std::size_t j = i + 2;
        while (j < s.size() && s[j] >= 'A' && s[j] <= 'Z') ++j;
        if (j > i + 2 && s.compare(j, 2, "__") == 0) return j + 2;
        out_.text.append("__");
        return i + 2;
    }

    std::size_t handle_angle(std::string_view s, std::size_t i) {
        if (s.compare(i, 4, "<!--") == 0) {
            auto end = s.find("-->", i + 4);
            return end == std::string_view::npos ? s.size() : end + 3;
        }
        auto gt = s.find('>', i);
        auto nl = s.find('\n', i);
        std::size_t name_start = i + 1 + (i + 1 < s.size() && s[i + 1] == '/' ? 1 : 0);
        if (gt == std::string_view::npos || (nl != std::string_view::npos && nl < gt) || name_start >= s.size() ||
            !std::isalpha(static_cast<unsigned char>(s[name_start]))) {
            out_.text.push_back('<');
            return i + 1;
        }
        std::size_t name_end = name_start;
        while (name_end < gt && is_tag_name_char(s[name_end])) ++name_end;
        std::string name = text::ascii_lower(s.substr(name_start, name_end - name_start));
        bool closing = s[i + 1] == '/';
        bool self_closing = s[gt - 1] == '/';

        auto skip_to_close = [&](std::string_view close_tag) -> std::size_t {
            std::string lower = text::ascii_lower(s.substr(gt + 1));
            auto pos = lower.find(close_tag);
            return pos == std::string::npos ? s.size() : gt + 1 + pos + close_tag.size();
        };

        if (name == "math" && !closing) {
            std::size_t end = skip_to_close("</math>");
            out_.text.append(s.substr(i, end - i));
            return end;
        }
        if (name == "ref" && !closing) return self_closing ? gt + 1 : skip_to_close("</ref>");
        if (name == "includeonly" && !closing) return skip_to_close("</includeonly>");
        if (name == "nowiki" && !closing && !self_closing) {
            std::string lower = text::ascii_lower(s.substr(gt + 1));
            auto pos = lower.find("</nowiki>");
            std::size_t content_end = pos == std::string::npos ? s.size() : gt + 1 + pos;
            out_.text.append(s.substr(gt + 1, content_end - gt - 1));
            return pos == std::string::npos ? s.size() : content_end + 9;
        }
        if (name == "br") {
            out_.text.push_back('\n');
            return gt + 1;
        }
        if (name == "ref" || name == "includeonly" || name == "nowiki" || name == "math" ||
            stripped_tags().count(name)) {
            return gt + 1;
        }
        warn(CleanWarningKind::UnknownTag, std::string(s.substr(i, gt + 1 - i)));
        out_.text.append(s.substr(i, gt + 1 - i));
        return gt + 1;
    }

    void add_link(std::string_view raw_target, std::size_t offset) {
        std::string_view t = text::trim(raw_target);
        t = t.substr(0, t.find('#'));
        if (text::trim(t).empty()) return;
        out_.links.push_back({canonical_title(t), out_.text.substr(offset), offset});
    }

    std::size_t handle_link(std::string_view s, std::size_t i) {
        auto end = detail::match_link_end(s, i + 2);
        if (!end) {
            warn(CleanWarningKind::UnbalancedMarkup, "unclosed link");
            out_.text.append("[[");
            return i + 2;
        }
        std::string_view body = s.substr(i + 2, *end - i - 4);
        auto bar = body.find('|');
        std::string_view target = text::trim(body.substr(0, bar));
        std::string_view anchor = bar == std::string_view::npos ? target : body.substr(bar + 1);
        if (bar != std::string_view::npos && text::trim(anchor).empty()) anchor = target;

        std::string_view ns_probe = target;
        bool leading_colon = !ns_probe.empty() && ns_probe[0] == ':';
        if (leading_colon) ns_probe.remove_prefix(1);
        std::string ns = namespace_of(ns_probe);
        if (!leading_colon && ns == "Category") {
            if (collect_categories_) {
                std::string cat(text::trim(split_namespace(text::normalize_title(ns_probe)).second));
                out_.categories.push_back(text::normalize_title(cat));
            }
            return *end;
        }
        if (!leading_colon && (ns == "File" || ns == "Image" || text::istarts_with(ns_probe, "media:"))) return *end;

        std::size_t offset = out_.text.size();
        process(anchor, /*top_level=*/false);
        if (!leading_colon && !target.empty() && target[0] != '#') add_link(ns_probe, offset);
        return *end;
    }

    std::size_t handle_external_link(std::string_view s, std::size_t i) {
        std::string_view rest = s.substr(i + 1);
        bool url = text::istarts_with(rest, "http://") || text::istarts_with(rest, "https://") ||
                   text::istarts_with(rest, "ftp://") || rest.substr(0, 2) == "//";
        auto close = s.find(']', i);
        auto nl = s.find('\n', i);
        if (!url || close == std::string_view::npos || (nl != std::string_view::npos && nl < close)) {
            out_.text.push_back('[');
            return i + 1;
        }
        std::string_view body = s.substr(i + 1, close - i - 1);
        auto sp = body.find(' ');
        process(sp == std::string_view::npos ? body : text::trim(body.substr(sp + 1)), false);
        return close + 1;
    }

    void transclude(const std::string& title, std::string_view passage_name, std::string_view whole_call) {
        PageIndex::Resolved r = index_.resolve(title);
        std::optional<std::string> passage;
        if (r.page) passage = find_passage(r.page->wikitext, passage_name);
        if (!passage) {
            warn(CleanWarningKind::UnresolvedReference, std::string(whole_call));
            return;
        }
        std::string key = canonical_title(r.page->title);
        for (const std::string& open : stack_) {
            if (open == key) {
                std::vector<std::string> chain(std::find(stack_.begin(), stack_.end(), key), stack_.end());
                chain.push_back(key);
                throw CycleError(std::move(chain));
            }
        }
        stack_.push_back(key);
        bool saved = collect_categories_;
        collect_categories_ = false;
        process(*passage, true);
        collect_categories_ = saved;
        stack_.pop_back();
    }

    void render_eqn(const TemplateCall& call) {
        std::string math;
        for (std::string_view key : {"l", "o", "r"}) {
            if (auto v = call.arg(key); v && !v->empty()) {
                if (!math.empty()) math.push_back(' ');
                math.append(*v);
            }
        }
        if (!math.empty()) {
            if (!out_.text.empty() && !text::is_space(out_.text.back())) out_.text.push_back(' ');
            out_.text.append("$" + math + "$");
        }
        if (auto c = call.arg("c"); c && !c->empty()) {
            out_.text.push_back(' ');
            process(*c, false);
        }
    }

    std::size_t handle_template(std::string_view s, std::size_t i) {
        auto end = detail::match_template_end(s, i + 2);
        if (!end) {
            warn(CleanWarningKind::UnbalancedMarkup, "unclosed template");
            out_.text.append("{{");
            return i + 2;
        }
        std::string_view whole = s.substr(i, *end - i);
        std::string_view body = s.substr(i + 2, *end - i - 4);
        TemplateCall call = detail::parse_template(body);
        std::string key = detail::template_key(call.name);

        if (!call.name.empty() && call.name[0] == ':') {
            std::string_view name = call.positional.empty() ? std::string_view{} : text::trim(call.positional[0]);
            transclude(canonical_title(std::string_view(call.name).substr(1)), name, whole);
        } else if (text::istarts_with(call.name, "#lst:")) {
            std::string_view name = call.positional.empty() ? std::string_view{} : text::trim(call.positional[0]);
            transclude(canonical_title(std::string_view(call.name).substr(5)), name, whole);
        } else if (key == "!") {
            out_.text.push_back('|');
        } else if (key == "eqn") {
            render_eqn(call);
        } else if (key == "defof" && !call.positional.empty()) {
            std::string_view target = text::trim(call.positional[0]);
            std::size_t offset = out_.text.size();
            if (call.positional.size() > 1) {
                process(call.positional[1], false);
            } else {
                out_.text.append("definition of ");
                process(target, false);
            }
            add_link("Definition:" + std::string(target), offset);
        } else if (silent_templates().count(key) || options_.drop_templates.count(key)) {
            // dropped
        } else if (!index_.find("Template:" + call.name) && index_.find(call.name) && !call.positional.empty()) {
            transclude(canonical_title(call.name), text::trim(call.positional[0]), whole);
        } else {
            warn(CleanWarningKind::UnknownTemplate, std::string(whole));
            out_.text.append(whole);
        }
        return *end;
    }

    const PageIndex& index_;
    const CleanOptions& options_;
    CleanText& out_;
    std::vector<std::string> stack_;
    bool collect_categories_ = true;
};

}  // namespace detail

inline CleanText clean_wikitext(std::string_view wikitext, const PageIndex& index, std::string_view page_title = {},
                                const CleanOptions& options = {}) {
    CleanText out;
    detail::Cleaner(index, options, out).run(page_title, wikitext);
    return out;
}

inline CleanText clean_wikitext(const RawPage& page, const PageIndex& index, const CleanOptions& options = {}) {
    return clean_wikitext(page.wikitext, index, page.title, options);
}

// Names of all templates invoked anywhere in the wikitext, nested ones
// included, normalized to lower case.
inline std::vector<std::string> template_names(std::string_view wikitext) {
    std::vector<std::string> names;
    for (std::size_t i = wikitext.find("{{"); i != std::string_view::npos; i = wikitext.find("{{", i + 2)) {
        std::size_t j = i + 2;
        while (j < wikitext.size() && wikitext[j] != '|' && wikitext[j] != '}' && wikitext[j] != '{') ++j;
        std::string_view name = text::trim(wikitext.substr(i + 2, j - i - 2));
        if (!name.empty()) names.push_back(detail::template_key(name));
    }
    return names;
}

}  // namespace nlps::wiki
