#pragma once

// Structured corpus of mathematical entries: definitions, theorems, lemmas
// and corollaries together with their premise links.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nlps/error.hpp"

namespace nlps {

using EntryId = std::string;
using IdSet = std::set<EntryId>;

enum class EntryKind { Definition, Lemma, Theorem, Corollary };

inline constexpr EntryKind kAllKinds[] = {EntryKind::Definition, EntryKind::Lemma, EntryKind::Theorem,
                                          EntryKind::Corollary};

inline std::string_view to_string(EntryKind k) noexcept {
    switch (k) {
        case EntryKind::Definition: return "definition";
        case EntryKind::Lemma: return "lemma";
        case EntryKind::Theorem: return "theorem";
        case EntryKind::Corollary: return "corollary";
    }
    return "?";
}

inline EntryKind kind_from_string(std::string_view s) {
    for (EntryKind k : kAllKinds) {
        if (s == to_string(k)) return k;
    }
    throw ConfigError("unknown entry kind '" + std::string(s) + "'");
}

struct Proof {
    std::string proof_text;
    IdSet supporting_propositions;

    friend bool operator==(const Proof&, const Proof&) = default;
};

// (definiendum expression, definiens text)
using DefiniensPair = std::pair<std::string, std::string>;

struct Entry {
    EntryId id;
    EntryKind kind = EntryKind::Theorem;
    std::string title;
    std::string statement_text;
    std::set<std::string> categories;
    IdSet supporting_definitions;
    std::vector<Proof> proofs;
    std::optional<EntryId> derived_from;
    // Carried for completeness of the data model; nothing in this toolkit fills it.
    std::optional<std::vector<DefiniensPair>> definiens;

    friend bool operator==(const Entry&, const Entry&) = default;
};

// Which proofs contribute supporting propositions to a premise set.
class ProofScope {
public:
    static ProofScope all() noexcept { return ProofScope{}; }
    static ProofScope only(std::size_t index) noexcept { return ProofScope{index}; }

    bool is_all() const noexcept { return !index_; }
    std::size_t index() const { return index_.value(); }

private:
    ProofScope() = default;
    explicit ProofScope(std::size_t i) : index_(i) {}
    std::optional<std::size_t> index_;
};

// Supporting definitions united with the supporting propositions of the
// proofs selected by `scope`. Never contains the entry itself.
inline IdSet premise_set(const Entry& entry, ProofScope scope = ProofScope::all()) {
    IdSet out = entry.supporting_definitions;
    if (scope.is_all()) {
        for (const Proof& p : entry.proofs) out.insert(p.supporting_propositions.begin(), p.supporting_propositions.end());
    } else {
        if (scope.index() >= entry.proofs.size()) {
            throw std::out_of_range("proof index " + std::to_string(scope.index()) + " out of range for '" + entry.id +
                                    "' (" + std::to_string(entry.proofs.size()) + " proofs)");
        }
        const auto& props = entry.proofs[scope.index()].supporting_propositions;
        out.insert(props.begin(), props.end());
    }
    out.erase(entry.id);
    return out;
}

// Immutable, id-sorted collection of entries.
class Corpus {
public:
    Corpus() = default;

    // Duplicate ids keep the first occurrence in input order.
    explicit Corpus(std::vector<Entry> entries) {
        std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.id < b.id; });
        entries.erase(std::unique(entries.begin(), entries.end(),
                                  [](const Entry& a, const Entry& b) { return a.id == b.id; }),
                      entries.end());
        entries_ = std::move(entries);
        for (std::size_t i = 0; i < entries_.size(); ++i) index_.emplace(entries_[i].id, i);
    }

    const std::vector<Entry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    bool contains(std::string_view id) const { return index_.find(id) != index_.end(); }

    const Entry* find(std::string_view id) const {
        auto it = index_.find(id);
        return it == index_.end() ? nullptr : &entries_[it->second];
    }

    const Entry& at(std::string_view id) const {
        if (const Entry* e = find(id)) return *e;
        throw LookupError("unknown entry id '" + std::string(id) + "'");
    }

    std::size_t position(std::string_view id) const {
        auto it = index_.find(id);
        if (it == index_.end()) throw LookupError("unknown entry id '" + std::string(id) + "'");
        return it->second;
    }

    std::map<EntryKind, std::size_t> counts_by_kind() const {
        std::map<EntryKind, std::size_t> counts;
        for (EntryKind k : kAllKinds) counts[k] = 0;
        for (const Entry& e : entries_) ++counts[e.kind];
        return counts;
    }

    friend bool operator==(const Corpus& a, const Corpus& b) { return a.entries_ == b.entries_; }

private:
    std::vector<Entry> entries_;
    std::map<EntryId, std::size_t, std::less<>> index_;
};

enum class IssueKind {
    DanglingId,
    SelfReference,
    MissingDerivation,
    DerivationNotTheorem,
    UnexpectedDerivation,
    DefinitionHasProofs,
    SupportingDefinitionNotDefinition,
    SupportingPropositionIsDefinition,
    DuplicateId,
};

inline std::string_view to_string(IssueKind k) noexcept {
    switch (k) {
        case IssueKind::DanglingId: return "dangling-id";
        case IssueKind::SelfReference: return "self-reference";
        case IssueKind::MissingDerivation: return "missing-derivation";
        case IssueKind::DerivationNotTheorem: return "derivation-not-theorem";
        case IssueKind::UnexpectedDerivation: return "unexpected-derivation";
        case IssueKind::DefinitionHasProofs: return "definition-has-proofs";
        case IssueKind::SupportingDefinitionNotDefinition: return "supporting-definition-not-definition";
        case IssueKind::SupportingPropositionIsDefinition: return "supporting-proposition-is-definition";
        case IssueKind::DuplicateId: return "duplicate-id";
    }
    return "?";
}

struct ValidationIssue {
    IssueKind kind;
    EntryId entry;
    EntryId target;  // empty when the issue has no second party

    friend bool operator==(const ValidationIssue&, const ValidationIssue&) = default;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    bool valid() const noexcept { return issues.empty(); }
    bool contains(IssueKind kind, std::string_view entry, std::string_view target = {}) const {
        return std::any_of(issues.begin(), issues.end(), [&](const ValidationIssue& i) {
            return i.kind == kind && i.entry == entry && (target.empty() || i.target == target);
        });
    }
};

// Checks every entry invariant. Accepts a raw entry list so duplicate ids
// can be reported before a Corpus collapses them.
inline ValidationReport validate_corpus(const std::vector<Entry>& entries) {
    ValidationReport report;
    std::map<std::string_view, const Entry*> by_id;
    for (const Entry& e : entries) {
        if (!by_id.emplace(e.id, &e).second) report.issues.push_back({IssueKind::DuplicateId, e.id, {}});
    }
    auto lookup = [&](const EntryId& id) -> const Entry* {
        auto it = by_id.find(id);
        return it == by_id.end() ? nullptr : it->second;
    };

    for (const Entry& e : entries) {
        for (const EntryId& d : e.supporting_definitions) {
            if (d == e.id) {
                report.issues.push_back({IssueKind::SelfReference, e.id, d});
            } else if (const Entry* t = lookup(d); !t) {
                report.issues.push_back({IssueKind::DanglingId, e.id, d});
            } else if (t->kind != EntryKind::Definition) {
                report.issues.push_back({IssueKind::SupportingDefinitionNotDefinition, e.id, d});
            }
        }
        for (const Proof& p : e.proofs) {
            for (const EntryId& s : p.supporting_propositions) {
                if (s == e.id) {
                    report.issues.push_back({IssueKind::SelfReference, e.id, s});
                } else if (const Entry* t = lookup(s); !t) {
                    report.issues.push_back({IssueKind::DanglingId, e.id, s});
                } else if (t->kind == EntryKind::Definition) {
                    report.issues.push_back({IssueKind::SupportingPropositionIsDefinition, e.id, s});
                }
            }
        }
        switch (e.kind) {
            case EntryKind::Definition:
                if (!e.proofs.empty()) report.issues.push_back({IssueKind::DefinitionHasProofs, e.id, {}});
                if (e.derived_from) report.issues.push_back({IssueKind::UnexpectedDerivation, e.id, *e.derived_from});
                break;
            case EntryKind::Theorem:
                if (e.derived_from) report.issues.push_back({IssueKind::UnexpectedDerivation, e.id, *e.derived_from});
                break;
            case EntryKind::Corollary:
                if (!e.derived_from) {
                    report.issues.push_back({IssueKind::MissingDerivation, e.id, {}});
                    break;
                }
                [[fallthrough]];
            case EntryKind::Lemma:
                if (e.derived_from) {
                    const Entry* parent = lookup(*e.derived_from);
                    if (!parent) {
                        report.issues.push_back({IssueKind::DanglingId, e.id, *e.derived_from});
                    } else if (*e.derived_from == e.id) {
                        report.issues.push_back({IssueKind::SelfReference, e.id, e.id});
                    } else if (e.kind == EntryKind::Corollary && parent->kind != EntryKind::Theorem) {
                        report.issues.push_back({IssueKind::DerivationNotTheorem, e.id, *e.derived_from});
                    }
                }
                break;
        }
    }
    return report;
}

inline ValidationReport validate_corpus(const Corpus& corpus) { return validate_corpus(corpus.entries()); }

}  // namespace nlps
