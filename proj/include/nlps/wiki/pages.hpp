#pragma once

// Raw page loading from a MediaWiki XML export or a directory of .wiki
// files, plus a title index used to resolve links and transclusions.

#include <algorithm>
#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlps/corpus_io.hpp"
#include "nlps/error.hpp"
#include "nlps/text.hpp"

namespace nlps::wiki {

struct RawPage {
    std::string title;      // full title including any namespace prefix
    std::string wikitext;
    std::string namespace_;  // "" for the main namespace

    friend bool operator==(const RawPage&, const RawPage&) = default;
};

inline constexpr std::array<std::string_view, 28> kKnownNamespaces = {
    "Talk",          "User",          "User talk",      "ProofWiki",      "ProofWiki talk", "File",
    "File talk",     "MediaWiki",     "MediaWiki talk", "Template",       "Template talk",  "Help",
    "Help talk",     "Category",      "Category talk",  "Definition",     "Definition talk", "Axiom",
    "Axiom talk",    "Mathematician", "Mathematician talk", "Book",       "Book talk",      "Symbols",
    "Symbols talk",  "Special",       "Image",          "Module",
};

// Splits "Ns:Rest" when Ns is a known namespace (case-insensitive).
inline std::pair<std::string, std::string> split_namespace(std::string_view title) {
    auto colon = title.find(':');
    if (colon != std::string_view::npos) {
        std::string prefix = text::normalize_title(title.substr(0, colon));
        for (std::string_view ns : kKnownNamespaces) {
            if (text::iequals(prefix, ns)) return {std::string(ns), std::string(title.substr(colon + 1))};
        }
    }
    return {"", std::string(title)};
}

// Canonical title: namespace spelled canonically, both parts normalized.
inline std::string canonical_title(std::string_view raw) {
    auto [ns, rest] = split_namespace(text::normalize_title(raw));
    std::string body = text::normalize_title(rest);
    return ns.empty() ? body : ns + ":" + body;
}

inline std::string namespace_of(std::string_view title) { return split_namespace(text::normalize_title(title)).first; }

namespace detail {

inline std::string decode_entities(std::string_view s, std::size_t base_offset) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '&') {
            out.push_back(s[i]);
            continue;
        }
        auto semi = s.find(';', i);
        if (semi == std::string_view::npos || semi - i > 12)
            throw ParseError("unterminated character reference", base_offset + i);
        std::string_view name = s.substr(i + 1, semi - i - 1);
        if (name == "lt") out.push_back('<');
        else if (name == "gt") out.push_back('>');
        else if (name == "amp") out.push_back('&');
        else if (name == "quot") out.push_back('"');
        else if (name == "apos") out.push_back('\'');
        else if (!name.empty() && name[0] == '#') {
            unsigned long cp = 0;
            try {
                cp = (name.size() > 1 && (name[1] == 'x' || name[1] == 'X'))
                         ? std::stoul(std::string(name.substr(2)), nullptr, 16)
                         : std::stoul(std::string(name.substr(1)), nullptr, 10);
            } catch (const std::exception&) {
                throw ParseError("bad numeric character reference", base_offset + i);
            }
            if (cp < 0x80) {
                out.push_back(static_cast<char>(cp));
            } else if (cp < 0x800) {
                out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
                out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
            } else if (cp < 0x10000) {
                out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
                out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
                out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
            } else if (cp < 0x110000) {
                out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
                out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
                out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
                out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
            } else {
                throw ParseError("character reference out of range", base_offset + i);
            }
        } else {
            throw ParseError("unknown entity '&" + std::string(name) + ";'", base_offset + i);
        }
        i = semi;
    }
    return out;
}

struct XmlTag {
    std::string name;
    std::map<std::string, std::string> attrs;
    bool closing = false;
    bool self_closing = false;
};

inline XmlTag parse_tag(std::string_view body, std::size_t offset) {
    // body is the text between '<' and '>'
    XmlTag tag;
    std::size_t i = 0;
    if (!body.empty() && body[0] == '/') {
        tag.closing = true;
        ++i;
    }
    if (!body.empty() && body.back() == '/') {
        tag.self_closing = true;
        body.remove_suffix(1);
    }
    std::size_t start = i;
    while (i < body.size() && !text::is_space(body[i])) ++i;
    tag.name = std::string(body.substr(start, i - start));
    if (tag.name.empty()) throw ParseError("empty tag name", offset);
    while (i < body.size()) {
        while (i < body.size() && text::is_space(body[i])) ++i;
        if (i >= body.size()) break;
        std::size_t eq = body.find('=', i);
        if (eq == std::string_view::npos) throw ParseError("malformed attribute", offset + i);
        std::string key(text::trim(body.substr(i, eq - i)));
        i = eq + 1;
        while (i < body.size() && text::is_space(body[i])) ++i;
        if (i >= body.size() || (body[i] != '"' && body[i] != '\'')) throw ParseError("unquoted attribute", offset + i);
        char q = body[i];
        std::size_t close = body.find(q, i + 1);
        if (close == std::string_view::npos) throw ParseError("unterminated attribute value", offset + i);
        tag.attrs[key] = decode_entities(body.substr(i + 1, close - i - 1), offset + i + 1);
        i = close + 1;
    }
    return tag;
}

}  // namespace detail

// Streaming scan of a MediaWiki export. Only <page> title/ns/text matter;
// the last revision's text wins. Tag nesting is checked.
inline std::vector<RawPage> parse_mediawiki_xml(std::string_view xml) {
    std::vector<RawPage> pages;
    std::map<std::string, std::string> ns_names;  // key -> name
    std::vector<std::string> stack;
    std::string text_buf;
    std::optional<std::size_t> text_start;  // offset of the current element's content
    std::string ns_key;
    RawPage current;
    std::string current_ns_num;

    std::size_t i = 0;
    auto capture = [&](std::size_t upto) {
        if (text_start) text_buf += detail::decode_entities(xml.substr(i, upto - i), i);
    };

    while (i < xml.size()) {
        std::size_t lt = xml.find('<', i);
        if (lt == std::string_view::npos) {
            if (!text::trim(xml.substr(i)).empty() && stack.empty())
                throw ParseError("text after document element", i);
            capture(xml.size());
            i = xml.size();
            break;
        }
        capture(lt);
        i = lt;
        if (xml.compare(i, 4, "<!--") == 0) {
            auto end = xml.find("-->", i + 4);
            if (end == std::string_view::npos) throw ParseError("unterminated comment", i);
            i = end + 3;
            continue;
        }
        if (xml.compare(i, 9, "<![CDATA[") == 0) {
            auto end = xml.find("]]>", i + 9);
            if (end == std::string_view::npos) throw ParseError("unterminated CDATA section", i);
            if (text_start) text_buf.append(xml.substr(i + 9, end - i - 9));
            i = end + 3;
            continue;
        }
        if (xml.compare(i, 2, "<?") == 0 || xml.compare(i, 2, "<!") == 0) {
            auto end = xml.find('>', i);
            if (end == std::string_view::npos) throw ParseError("unterminated declaration", i);
            i = end + 1;
            continue;
        }
        auto gt = xml.find('>', i);
        if (gt == std::string_view::npos) throw ParseError("unterminated tag", i);
        detail::XmlTag tag = detail::parse_tag(xml.substr(i + 1, gt - i - 1), i);
        std::size_t tag_offset = i;
        i = gt + 1;

        if (tag.closing) {
            if (stack.empty() || stack.back() != tag.name)
                throw ParseError("mismatched closing tag </" + tag.name + ">", tag_offset);
            stack.pop_back();
            const std::string& parent = stack.empty() ? std::string() : stack.back();
            if (tag.name == "title" && parent == "page") current.title = text_buf;
            else if (tag.name == "ns" && parent == "page") current_ns_num = std::string(text::trim(text_buf));
            else if (tag.name == "text" && parent == "revision") current.wikitext = text_buf;
            else if (tag.name == "namespace" && parent == "namespaces") ns_names[ns_key] = text_buf;
            else if (tag.name == "page") {
                if (current.title.empty()) throw ParseError("<page> without <title>", tag_offset);
                auto it = ns_names.find(current_ns_num);
                if (it != ns_names.end()) current.namespace_ = it->second;
                else if (current_ns_num == "0") current.namespace_.clear();
                else current.namespace_ = namespace_of(current.title);
                pages.push_back(std::move(current));
                current = RawPage{};
                current_ns_num.clear();
            }
            text_start.reset();
            text_buf.clear();
            continue;
        }

        if (tag.name == "page") current = RawPage{};
        if (tag.name == "namespace") ns_key = tag.attrs.count("key") ? tag.attrs["key"] : "";
        if (tag.self_closing) {
            if (tag.name == "namespace" && !stack.empty() && stack.back() == "namespaces") ns_names[ns_key] = "";
            continue;
        }
        stack.push_back(tag.name);
        text_buf.clear();
        bool wanted = tag.name == "title" || tag.name == "ns" || tag.name == "text" || tag.name == "namespace";
        text_start = wanted ? std::optional<std::size_t>(i) : std::nullopt;
    }
    if (!stack.empty()) throw ParseError("unexpected end of document inside <" + stack.back() + ">", xml.size());
    return pages;
}

inline bool by_title(const RawPage& a, const RawPage& b) { return a.title < b.title; }

// Loads pages from an XML export file or a directory of percent-encoded
// "<title>.wiki" files. Result is sorted by title.
inline std::vector<RawPage> load_pages(const std::filesystem::path& source) {
    namespace fs = std::filesystem;
    std::vector<RawPage> pages;
    std::error_code ec;
    if (fs::is_directory(source, ec)) {
        for (const auto& item : fs::directory_iterator(source)) {
            if (!item.is_regular_file() || item.path().extension() != ".wiki") continue;
            RawPage p;
            p.title = canonical_title(text::percent_decode(item.path().stem().string()));
            p.wikitext = read_file(item.path());
            p.namespace_ = namespace_of(p.title);
            pages.push_back(std::move(p));
        }
    } else if (fs::is_regular_file(source, ec)) {
        pages = parse_mediawiki_xml(read_file(source));
    } else {
        throw IoError("page source '" + source.string() + "' is not readable");
    }
    std::stable_sort(pages.begin(), pages.end(), by_title);
    return pages;
}

// Redirect target of a "#REDIRECT [[Target]]" page.
inline std::optional<std::string> redirect_target(std::string_view wikitext) {
    std::string_view t = text::trim(wikitext);
    if (!text::istarts_with(t, "#redirect")) return std::nullopt;
    auto open = t.find("[[");
    auto close = t.find("]]", open == std::string_view::npos ? 0 : open);
    if (open == std::string_view::npos || close == std::string_view::npos) return std::nullopt;
    std::string_view target = t.substr(open + 2, close - open - 2);
    target = target.substr(0, target.find('|'));
    target = target.substr(0, target.find('#'));
    return canonical_title(target);
}

// Title lookup over a page collection. Pages are referenced, not copied;
// the collection must outlive the index.
class PageIndex {
public:
    PageIndex() = default;
    explicit PageIndex(const std::vector<RawPage>& pages) {
        for (const RawPage& p : pages) by_title_.emplace(canonical_title(p.title), &p);
    }

    const RawPage* find(std::string_view title) const {
        auto it = by_title_.find(canonical_title(title));
        return it == by_title_.end() ? nullptr : it->second;
    }

    struct Resolved {
        const RawPage* page = nullptr;
        std::optional<std::string> redirected_from;
    };

    // Follows at most one redirect.
    Resolved resolve(std::string_view title) const {
        Resolved r;
        r.page = find(title);
        if (r.page) {
            if (auto target = redirect_target(r.page->wikitext)) {
                r.redirected_from = canonical_title(title);
                r.page = find(*target);
            }
        }
        return r;
    }

    std::size_t size() const noexcept { return by_title_.size(); }

private:
    std::map<std::string, const RawPage*, std::less<>> by_title_;
};

}  // namespace nlps::wiki
