#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace biblink {

/// One author as ingested. Either the corpus pre-splits names (last_name /
/// first_name) or provides a single full_name string that we split ourselves.
struct AuthorName {
    std::optional<std::string> full_name;
    std::optional<std::string> last_name;
    std::optional<std::string> first_name;

    bool operator==(const AuthorName&) const = default;
};

/// Where a document appeared: serial/book identifiers plus the known title
/// variants of the source (full and abbreviated forms).
struct SourceDescriptor {
    std::vector<std::string> issns;
    std::vector<std::string> isbns;
    std::vector<std::string> title_variants;

    bool operator==(const SourceDescriptor&) const = default;
};

/// One bibliographic document exactly as ingested. Numbering fields (year,
/// volume, pages, ...) are kept as raw strings; normalization is a separate
/// pass so it can be re-run with different rules.
///
/// reference_count is distinct from references: some sources know how long a
/// reference list is without exposing resolved targets, and others expose
/// only the references they managed to link. Absent reference_count means
/// "reference list not available".
struct DocumentRecord {
    std::string record_id;
    std::optional<std::string> doi;
    std::vector<AuthorName> authors;
    std::optional<std::string> title;
    SourceDescriptor source;
    std::optional<std::string> publication_year;
    std::optional<std::string> volume;
    std::optional<std::string> issue;
    std::optional<std::string> begin_page;
    std::optional<std::string> end_page;
    std::optional<std::string> article_number;
    std::optional<std::string> document_type;
    std::optional<std::string> language;
    std::vector<std::string> discipline_labels;
    std::optional<std::uint64_t> reference_count;
    std::vector<std::string> references;

    bool operator==(const DocumentRecord&) const = default;
};

/// A directed citation link inside one corpus. Self-links are malformed but
/// real dumps contain them; they are ingested and reported, never fatal.
struct CitationLink {
    std::string citing;
    std::string cited;

    friend bool operator==(const CitationLink& x, const CitationLink& y) {
        return x.citing == y.citing && x.cited == y.cited;
    }
    friend bool operator<(const CitationLink& x, const CitationLink& y) {
        if (x.citing != y.citing) return x.citing < y.citing;
        return x.cited < y.cited;
    }
};

/// A set of documents from one database. Records keep their ingestion order;
/// the id index points at the first occurrence so duplicate ids survive long
/// enough for validate_corpus to report them.
class Corpus {
public:
    Corpus() = default;
    explicit Corpus(std::string corpus_id) : corpus_id_(std::move(corpus_id)) {}

    void add(DocumentRecord rec) {
        index_.emplace(rec.record_id, records_.size());
        records_.push_back(std::move(rec));
    }

    const DocumentRecord* find(std::string_view id) const {
        auto it = index_.find(std::string(id));
        return it == index_.end() ? nullptr : &records_[it->second];
    }

    const std::string& corpus_id() const { return corpus_id_; }
    void set_corpus_id(std::string id) { corpus_id_ = std::move(id); }
    const std::vector<DocumentRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    bool operator==(const Corpus& other) const {
        return corpus_id_ == other.corpus_id_ && records_ == other.records_;
    }

private:
    std::string corpus_id_;
    std::vector<DocumentRecord> records_;
    std::unordered_map<std::string, std::size_t> index_;
};

enum class IssueKind {
    duplicate_id,
    empty_record_id,
    dangling_reference,
    reference_count_below_links,
    self_citation,
    author_unnamed,
};

inline const char* to_string(IssueKind kind) {
    switch (kind) {
        case IssueKind::duplicate_id: return "duplicate-id";
        case IssueKind::empty_record_id: return "empty-record-id";
        case IssueKind::dangling_reference: return "dangling-reference";
        case IssueKind::reference_count_below_links: return "reference-count-below-links";
        case IssueKind::self_citation: return "self-citation";
        case IssueKind::author_unnamed: return "author-unnamed";
    }
    return "unknown";
}

struct ValidationIssue {
    IssueKind kind;
    std::string record_id;
    std::string detail;

    bool operator==(const ValidationIssue&) const = default;
};

/// Checks corpus invariants without mutating anything. All problems come back
/// as issues, in a deterministic order (records in ingestion order, checks in
/// a fixed sequence per record); an empty result means the corpus is clean.
inline std::vector<ValidationIssue> validate_corpus(const Corpus& corpus) {
    std::vector<ValidationIssue> issues;
    std::unordered_set<std::string_view> seen;
    std::unordered_set<std::string_view> all_ids;
    for (const auto& rec : corpus.records()) all_ids.insert(rec.record_id);

    for (const auto& rec : corpus.records()) {
        if (rec.record_id.empty())
            issues.push_back({IssueKind::empty_record_id, "", "record with empty record_id"});
        else if (!seen.insert(rec.record_id).second)
            issues.push_back({IssueKind::duplicate_id, rec.record_id,
                              "record_id occurs more than once"});

        for (std::size_t i = 0; i < rec.authors.size(); ++i) {
            const auto& au = rec.authors[i];
            if (!au.full_name && !au.last_name)
                issues.push_back({IssueKind::author_unnamed, rec.record_id,
                                  "author #" + std::to_string(i + 1) +
                                      " has neither full_name nor last_name"});
        }

        for (const auto& ref : rec.references) {
            if (ref == rec.record_id)
                issues.push_back({IssueKind::self_citation, rec.record_id,
                                  "document cites itself"});
            else if (!all_ids.count(ref))
                issues.push_back({IssueKind::dangling_reference, rec.record_id,
                                  "reference to unknown record_id \"" + ref + "\""});
        }

        if (rec.reference_count && *rec.reference_count < rec.references.size())
            issues.push_back({IssueKind::reference_count_below_links, rec.record_id,
                              "reference_count " + std::to_string(*rec.reference_count) +
                                  " < " + std::to_string(rec.references.size()) +
                                  " linked references"});
    }
    return issues;
}

}  // namespace biblink
