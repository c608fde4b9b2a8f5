#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "biblink/matcher.hpp"
#include "biblink/model.hpp"
#include "biblink/normalize.hpp"

namespace biblink {

enum class Perspective { a, b };

inline const char* to_string(Perspective p) { return p == Perspective::a ? "a" : "b"; }

struct OverlapSummary {
    std::size_t total_a = 0;
    std::size_t total_b = 0;
    std::size_t overlap = 0;
};

inline OverlapSummary overlap_summary(const MatchSet& ms, const Corpus& a, const Corpus& b) {
    return {a.size(), b.size(), ms.pairs.size()};
}

/// Per-year counts for both corpora. A matched pair is attributed to the year
/// of the record on each side separately, so the two overlap columns can
/// disagree per row while summing to the same grand total.
struct YearRow {
    std::string year;  // normalized digits, or "unknown"
    std::size_t total_a = 0;
    std::size_t total_b = 0;
    std::size_t overlap_a = 0;
    std::size_t overlap_b = 0;
};

struct CoverageRow {
    std::string key;
    double total = 0.0;
    double overlap = 0.0;
};

/// One breakdown table from the point of view of one corpus: rows keyed by
/// that corpus's native labels (or bins), counting all of its documents and
/// the matched subset.
struct CoverageTable {
    std::string dimension;
    Perspective perspective = Perspective::a;
    std::vector<CoverageRow> rows;
};

/// Upper bin edges for count breakdowns; edges {0, 10, 50} produce the
/// buckets "0", "1-10", "11-50", ">50" (half-open (lo, hi]).
struct CountBins {
    std::vector<std::uint64_t> edges{0, 10, 50};
};

namespace detail {

inline std::unordered_set<std::string_view> matched_ids(const MatchSet& ms, Perspective side) {
    std::unordered_set<std::string_view> ids;
    ids.reserve(ms.pairs.size());
    for (const auto& p : ms.pairs) ids.insert(side == Perspective::a ? p.id_a : p.id_b);
    return ids;
}

inline std::string year_key(const DocumentRecord& rec) {
    auto y = normalize_numeric(rec.publication_year);
    return y ? *y : std::string("unknown");
}

// Label of bucket i for edges {e0, e1, ...}: bucket 0 is [0, e0], bucket i is
// (e_{i-1}, e_i], and bucket edges.size() is the open top bucket.
inline std::string bin_label_at(std::size_t i, const CountBins& bins) {
    if (i >= bins.edges.size())
        return ">" + std::to_string(bins.edges.empty() ? 0 : bins.edges.back());
    std::uint64_t hi = bins.edges[i];
    std::uint64_t lo = i == 0 ? 0 : bins.edges[i - 1] + 1;
    return lo >= hi ? std::to_string(hi) : std::to_string(lo) + "-" + std::to_string(hi);
}

inline std::string bin_label(std::uint64_t value, const CountBins& bins) {
    std::size_t i = 0;
    while (i < bins.edges.size() && value > bins.edges[i]) ++i;
    return bin_label_at(i, bins);
}

inline std::vector<std::string> bin_labels_in_order(const CountBins& bins) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i <= bins.edges.size(); ++i) labels.push_back(bin_label_at(i, bins));
    return labels;
}

inline const Corpus& pick(const Corpus& a, const Corpus& b, Perspective p) {
    return p == Perspective::a ? a : b;
}

// Unique (citing, cited) in-degree over one corpus's reference lists.
inline std::unordered_map<std::string_view, std::uint64_t> citation_indegree(
    const Corpus& corpus) {
    std::unordered_map<std::string_view, std::uint64_t> indegree;
    std::set<std::pair<std::string_view, std::string_view>> seen;
    for (const auto& rec : corpus.records())
        for (const auto& ref : rec.references)
            if (seen.emplace(rec.record_id, ref).second) ++indegree[ref];
    return indegree;
}

}  // namespace detail

inline std::vector<YearRow> breakdown_by_year(const MatchSet& ms, const Corpus& a,
                                              const Corpus& b) {
    std::map<std::string, YearRow> rows;
    auto matched_a = detail::matched_ids(ms, Perspective::a);
    auto matched_b = detail::matched_ids(ms, Perspective::b);

    for (const auto& rec : a.records()) {
        YearRow& row = rows[detail::year_key(rec)];
        ++row.total_a;
        if (matched_a.count(rec.record_id)) ++row.overlap_a;
    }
    for (const auto& rec : b.records()) {
        YearRow& row = rows[detail::year_key(rec)];
        ++row.total_b;
        if (matched_b.count(rec.record_id)) ++row.overlap_b;
    }
    rows.try_emplace("unknown");

    std::vector<YearRow> out;
    out.reserve(rows.size());
    for (auto& [year, row] : rows) {
        if (year == "unknown") continue;
        row.year = year;
        out.push_back(std::move(row));
    }
    YearRow unknown = rows.at("unknown");
    unknown.year = "unknown";
    out.push_back(std::move(unknown));
    return out;
}

/// Breakdown keyed on the perspective corpus's native document_type labels;
/// records without a type land in "unknown".
inline CoverageTable breakdown_by_doctype(const MatchSet& ms, const Corpus& a, const Corpus& b,
                                          Perspective perspective) {
    const Corpus& corpus = detail::pick(a, b, perspective);
    auto matched = detail::matched_ids(ms, perspective);

    std::map<std::string, CoverageRow> rows;
    rows.try_emplace("unknown");
    for (const auto& rec : corpus.records()) {
        std::string key = rec.document_type ? *rec.document_type : std::string("unknown");
        CoverageRow& row = rows[key];
        row.total += 1;
        if (matched.count(rec.record_id)) row.overlap += 1;
    }

    CoverageTable table{"document_type", perspective, {}};
    for (auto& [key, row] : rows) {
        row.key = key;
        table.rows.push_back(std::move(row));
    }
    return table;
}

/// Fractional counting over discipline labels: a document with k labels
/// contributes 1/k to each of them; unlabeled documents carry full weight in
/// "unclassified". Column sums stay equal to the corpus size and the global
/// overlap.
inline CoverageTable breakdown_by_discipline(const MatchSet& ms, const Corpus& a,
                                             const Corpus& b, Perspective perspective) {
    const Corpus& corpus = detail::pick(a, b, perspective);
    auto matched = detail::matched_ids(ms, perspective);

    std::map<std::string, CoverageRow> rows;
    rows.try_emplace("unclassified");
    for (const auto& rec : corpus.records()) {
        bool is_matched = matched.count(rec.record_id) != 0;
        if (rec.discipline_labels.empty()) {
            CoverageRow& row = rows["unclassified"];
            row.total += 1.0;
            if (is_matched) row.overlap += 1.0;
            continue;
        }
        double weight = 1.0 / static_cast<double>(rec.discipline_labels.size());
        for (const auto& label : rec.discipline_labels) {
            CoverageRow& row = rows[label];
            row.total += weight;
            if (is_matched) row.overlap += weight;
        }
    }

    CoverageTable table{"discipline", perspective, {}};
    for (auto& [key, row] : rows) {
        row.key = key;
        table.rows.push_back(std::move(row));
    }
    return table;
}

/// Buckets the perspective corpus by reference_count; records whose reference
/// list is not available fall into "unavailable".
inline CoverageTable breakdown_by_reference_count(const MatchSet& ms, const Corpus& a,
                                                  const Corpus& b, Perspective perspective,
                                                  const CountBins& bins = {}) {
    const Corpus& corpus = detail::pick(a, b, perspective);
    auto matched = detail::matched_ids(ms, perspective);

    std::map<std::string, CoverageRow> rows;
    for (const auto& label : detail::bin_labels_in_order(bins)) rows.try_emplace(label);
    rows.try_emplace("unavailable");
    for (const auto& rec : corpus.records()) {
        std::string key = rec.reference_count ? detail::bin_label(*rec.reference_count, bins)
                                              : std::string("unavailable");
        CoverageRow& row = rows[key];
        row.total += 1;
        if (matched.count(rec.record_id)) row.overlap += 1;
    }

    CoverageTable table{"reference_count", perspective, {}};
    for (const auto& label : detail::bin_labels_in_order(bins)) {
        CoverageRow row = rows.at(label);
        row.key = label;
        table.rows.push_back(std::move(row));
    }
    CoverageRow unavailable = rows.at("unavailable");
    unavailable.key = "unavailable";
    table.rows.push_back(std::move(unavailable));
    return table;
}

/// Buckets the perspective corpus by citation count, computed as in-degree
/// over its own reference lists so the table is self-consistent with the
/// ingested link data. Default bins: 0, 1-5, 6-25, >25.
inline CoverageTable breakdown_by_citation_count(const MatchSet& ms, const Corpus& a,
                                                 const Corpus& b, Perspective perspective,
                                                 const CountBins& bins = {{0, 5, 25}}) {
    const Corpus& corpus = detail::pick(a, b, perspective);
    auto matched = detail::matched_ids(ms, perspective);
    auto indegree = detail::citation_indegree(corpus);

    std::map<std::string, CoverageRow> rows;
    for (const auto& label : detail::bin_labels_in_order(bins)) rows.try_emplace(label);
    for (const auto& rec : corpus.records()) {
        auto it = indegree.find(rec.record_id);
        std::uint64_t cites = it == indegree.end() ? 0 : it->second;
        CoverageRow& row = rows[detail::bin_label(cites, bins)];
        row.total += 1;
        if (matched.count(rec.record_id)) row.overlap += 1;
    }

    CoverageTable table{"citation_count", perspective, {}};
    for (const auto& label : detail::bin_labels_in_order(bins)) {
        CoverageRow row = rows.at(label);
        row.key = label;
        table.rows.push_back(std::move(row));
    }
    return table;
}

struct LanguageRollupRow {
    std::string group;  // "english", "non-english", "unknown"
    std::size_t total = 0;
    std::size_t overlap = 0;
    double overlap_rate = 0.0;  // overlap / total, 0 when total is 0
};

struct LanguageBreakdown {
    CoverageTable per_language;
    std::vector<LanguageRollupRow> rollup;
};

namespace detail {

inline bool is_english_label(const std::string& folded) {
    return folded == "en" || folded == "eng" || folded == "english";
}

}  // namespace detail

/// Per-language counts plus an English / non-English / unknown rollup with
/// overlap rates. Language labels are compared after ASCII folding, so "EN",
/// "en" and "English" all count as English.
inline LanguageBreakdown breakdown_by_language(const MatchSet& ms, const Corpus& a,
                                               const Corpus& b, Perspective perspective) {
    const Corpus& corpus = detail::pick(a, b, perspective);
    auto matched = detail::matched_ids(ms, perspective);

    std::map<std::string, CoverageRow> rows;
    rows.try_emplace("unknown");
    std::map<std::string, LanguageRollupRow> groups;
    for (const char* g : {"english", "non-english", "unknown"}) groups[g].group = g;

    for (const auto& rec : corpus.records()) {
        std::string key = rec.language ? *rec.language : std::string("unknown");
        bool is_matched = matched.count(rec.record_id) != 0;
        CoverageRow& row = rows[key];
        row.total += 1;
        if (is_matched) row.overlap += 1;

        std::string group = "unknown";
        if (rec.language) {
            std::string folded = fold_ascii(*rec.language);
            group = detail::is_english_label(folded) ? "english" : "non-english";
        }
        LanguageRollupRow& roll = groups[group];
        ++roll.total;
        if (is_matched) ++roll.overlap;
    }

    LanguageBreakdown out;
    out.per_language = CoverageTable{"language", perspective, {}};
    for (auto& [key, row] : rows) {
        row.key = key;
        out.per_language.rows.push_back(std::move(row));
    }
    for (const char* g : {"english", "non-english", "unknown"}) {
        LanguageRollupRow roll = groups[g];
        roll.overlap_rate =
            roll.total == 0 ? 0.0
                            : static_cast<double>(roll.overlap) / static_cast<double>(roll.total);
        out.rollup.push_back(std::move(roll));
    }
    return out;
}

}  // namespace biblink
