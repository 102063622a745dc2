#pragma once

// Category harmonization: raw wiki categories are merged into a fixed set
// of branch names and branches with too few member entries are dropped.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nlps/corpus_io.hpp"
#include "nlps/error.hpp"
#include "nlps/text.hpp"

namespace nlps::wiki {

inline const std::vector<std::string>& default_harmonized_categories() {
    static const std::vector<std::string> names = {
        "Analysis",        "Set Theory",       "Number Theory",     "Abstract Algebra",    "Topology",
        "Algebra",         "Relation Theory",  "Mapping Theory",    "Real Analysis",       "Geometry",
        "Metric Spaces",   "Linear Algebra",   "Complex Analysis",  "Applied Mathematics", "Order Theory",
        "Numbers",         "Physics",          "Group Theory",      "Ring Theory",         "Euclidean Geometry",
        "Class Theory",    "Discrete Mathematics", "Plane Geometry", "Units of Measurement",
    };
    return names;
}

struct CategoryRules {
    std::set<std::string> harmonized;
    std::map<std::string, std::string> merge;  // raw name -> harmonized name

    // Harmonized name for a raw category such as "Category:Real Analysis/Sequences".
    // Tries an explicit rule, then the name itself, then its parent path.
    // Definition categories ("Definitions/Number Theory") resolve like their
    // subject.
    std::optional<std::string> resolve(std::string_view raw) const {
        std::string name = text::normalize_title(raw);
        if (text::istarts_with(name, "category:")) name = text::normalize_title(std::string_view(name).substr(9));
        if (text::istarts_with(name, "definitions/")) name = text::normalize_title(std::string_view(name).substr(12));
        while (!name.empty()) {
            if (auto it = merge.find(name); it != merge.end()) return it->second;
            if (harmonized.count(name)) return name;
            auto slash = name.rfind('/');
            if (slash == std::string::npos) break;
            name = std::string(text::trim(std::string_view(name).substr(0, slash)));
        }
        return std::nullopt;
    }
};

inline void check_rules(const CategoryRules& rules) {
    for (const auto& [raw, target] : rules.merge) {
        if (!rules.harmonized.count(target))
            throw ConfigError("merge rule '" + raw + "' targets unknown harmonized category '" + target + "'");
    }
}

// Rule file: {"categories": [names...], "merge": {"raw": "harmonized", ...}}.
// "categories" defaults to the built-in 24 names when omitted.
inline CategoryRules category_rules_from_json(const json& j) {
    CategoryRules rules;
    try {
        if (j.contains("categories")) {
            for (const auto& n : j.at("categories")) rules.harmonized.insert(text::normalize_title(n.get<std::string>()));
        } else {
            rules.harmonized.insert(default_harmonized_categories().begin(), default_harmonized_categories().end());
        }
        if (j.contains("merge")) {
            for (const auto& [raw, target] : j.at("merge").items())
                rules.merge[text::normalize_title(raw)] = text::normalize_title(target.get<std::string>());
        }
    } catch (const json::exception& ex) {
        throw ConfigError(std::string("malformed category rules: ") + ex.what());
    }
    check_rules(rules);
    return rules;
}

inline CategoryRules load_category_rules(const std::filesystem::path& path) {
    return category_rules_from_json(read_json_file(path));
}

// Default merges: sub-branch names commonly used on ProofWiki folded into
// the 24 harmonized branches.
inline CategoryRules default_category_rules() {
    static const json defaults = json::parse(R"({
      "merge": {
        "Calculus": "Analysis",
        "Differential Calculus": "Analysis",
        "Integral Calculus": "Analysis",
        "Functional Analysis": "Analysis",
        "Sequences": "Real Analysis",
        "Series": "Real Analysis",
        "Real Functions": "Real Analysis",
        "Continuity": "Real Analysis",
        "Elementary Number Theory": "Number Theory",
        "Prime Numbers": "Number Theory",
        "Divisibility": "Number Theory",
        "Modulo Arithmetic": "Number Theory",
        "Field Theory": "Abstract Algebra",
        "Module Theory": "Abstract Algebra",
        "Semigroups": "Abstract Algebra",
        "Polynomial Theory": "Algebra",
        "Elementary Algebra": "Algebra",
        "Vector Spaces": "Linear Algebra",
        "Matrix Algebra": "Linear Algebra",
        "Triangles": "Euclidean Geometry",
        "Circles": "Euclidean Geometry",
        "Analytic Geometry": "Geometry",
        "Mechanics": "Physics",
        "Mappings": "Mapping Theory",
        "Relations": "Relation Theory",
        "Equivalence Relations": "Relation Theory",
        "Orderings": "Order Theory",
        "Lattice Theory": "Order Theory",
        "Sets": "Set Theory",
        "Axiomatic Set Theory": "Set Theory",
        "Classes": "Class Theory",
        "Real Numbers": "Numbers",
        "Complex Numbers": "Numbers",
        "Integers": "Numbers",
        "Natural Numbers": "Numbers",
        "Rational Numbers": "Numbers",
        "Combinatorics": "Discrete Mathematics",
        "Graph Theory": "Discrete Mathematics",
        "Complex Functions": "Complex Analysis",
        "Topological Spaces": "Topology",
        "Metric Space Topology": "Metric Spaces",
        "Units of Length": "Units of Measurement"
      }
    })");
    return category_rules_from_json(defaults);
}

struct CategoryAssignment {
    std::vector<std::set<std::string>> per_entry;  // parallel to the input
    std::map<std::string, std::size_t> kept;       // harmonized name -> member count
    std::map<std::string, std::size_t> dropped;    // below min_count
    std::set<std::string> unrecognized;            // raw names with no rule
};

// Maps each entry's raw categories through `rules`, then drops harmonized
// categories with fewer than `min_count` member entries.
inline CategoryAssignment harmonize_categories(const std::vector<std::vector<std::string>>& raw_per_entry,
                                               const CategoryRules& rules, std::size_t min_count = 100) {
    check_rules(rules);
    CategoryAssignment out;
    out.per_entry.resize(raw_per_entry.size());
    std::map<std::string, std::size_t> counts;
    for (std::size_t i = 0; i < raw_per_entry.size(); ++i) {
        for (const std::string& raw : raw_per_entry[i]) {
            if (auto h = rules.resolve(raw)) out.per_entry[i].insert(*h);
            else out.unrecognized.insert(raw);
        }
        for (const std::string& h : out.per_entry[i]) ++counts[h];
    }
    for (const auto& [name, n] : counts) (n >= min_count ? out.kept : out.dropped)[name] = n;
    for (auto& cats : out.per_entry) {
        for (auto it = cats.begin(); it != cats.end();) {
            it = out.dropped.count(*it) ? cats.erase(it) : std::next(it);
        }
    }
    return out;
}

}  // namespace nlps::wiki
