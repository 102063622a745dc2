#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlps {

// Bad configuration: flags, rule files, empty corpora, mismatched models.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unknown entry id, page title or candidate.
class LookupError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input. `offset` is a byte offset into the offending source.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

// Transclusion loop. `pages` lists the chain, first page repeated at the end.
class CycleError : public std::runtime_error {
public:
    explicit CycleError(std::vector<std::string> pages)
        : std::runtime_error(describe(pages)), pages_(std::move(pages)) {}

    const std::vector<std::string>& pages() const noexcept { return pages_; }

private:
    static std::string describe(const std::vector<std::string>& pages) {
        std::string s = "cyclic transclusion: ";
        for (std::size_t i = 0; i < pages.size(); ++i) {
            if (i) s += " -> ";
            s += pages[i];
        }
        return s;
    }

    std::vector<std::string> pages_;
};

}  // namespace nlps
