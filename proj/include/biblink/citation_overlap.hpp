#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "biblink/coverage.hpp"
#include "biblink/matcher.hpp"
#include "biblink/model.hpp"
#include "biblink/random.hpp"

namespace biblink {

enum class DiffCause {
    missing_reference_list_in_other,
    unexplained,
};

inline const char* to_string(DiffCause cause) {
    switch (cause) {
        case DiffCause::missing_reference_list_in_other: return "missing_reference_list_in_other";
        case DiffCause::unexplained: return "unexplained";
    }
    return "unknown";
}

/// A one-sided citation link with its classified cause. The sub-distinction
/// between a reference list that is absent entirely and one that is present
/// but empty is kept because sources genuinely differ on which they produce.
struct ClassifiedLink {
    CitationLink link;
    DiffCause cause = DiffCause::unexplained;
    bool reference_count_is_zero = false;  // only meaningful for missing_reference_list

    friend bool operator<(const ClassifiedLink& x, const ClassifiedLink& y) {
        return x.link < y.link;
    }
};

/// The classified symmetric difference of citation links between two corpora,
/// restricted to links whose citing and cited documents are covered by both.
struct LinkDiff {
    std::size_t co_covered_a = 0;
    std::size_t co_covered_b = 0;
    std::size_t shared = 0;
    std::size_t only_a = 0;
    std::size_t only_b = 0;
    std::size_t only_a_missing_reference_list = 0;
    std::size_t only_a_missing_reference_list_zero = 0;
    std::size_t only_a_unexplained = 0;
    std::size_t only_b_missing_reference_list = 0;
    std::size_t only_b_missing_reference_list_zero = 0;
    std::size_t only_b_unexplained = 0;
    std::vector<ClassifiedLink> only_a_links;  // canonical order
    std::vector<ClassifiedLink> only_b_links;

    double pct_only_a() const {
        return co_covered_a == 0 ? 0.0 : 100.0 * static_cast<double>(only_a) / co_covered_a;
    }
    double pct_only_b() const {
        return co_covered_b == 0 ? 0.0 : 100.0 * static_cast<double>(only_b) / co_covered_b;
    }
};

/// All distinct citation links of a corpus, derived from reference lists.
inline std::vector<CitationLink> corpus_links(const Corpus& corpus) {
    std::set<CitationLink> links;
    for (const auto& rec : corpus.records())
        for (const auto& ref : rec.references) links.insert({rec.record_id, ref});
    return {links.begin(), links.end()};
}

/// The subset of one corpus's links whose citing and cited documents both
/// have a match in the other corpus.
inline std::vector<CitationLink> co_covered_links(const Corpus& corpus, const MatchSet& ms,
                                                  Perspective side) {
    std::unordered_set<std::string_view> matched;
    for (const auto& p : ms.pairs) matched.insert(side == Perspective::a ? p.id_a : p.id_b);

    std::vector<CitationLink> out;
    for (auto& link : corpus_links(corpus))
        if (matched.count(link.citing) && matched.count(link.cited)) out.push_back(std::move(link));
    return out;
}

namespace detail {

inline DiffCause classify_one_sided(const Corpus& other, const std::string& citing_in_other,
                                    bool* count_is_zero) {
    const DocumentRecord* rec = other.find(citing_in_other);
    if (rec && rec->reference_count && *rec->reference_count > 0) return DiffCause::unexplained;
    *count_is_zero = rec && rec->reference_count && *rec->reference_count == 0;
    return DiffCause::missing_reference_list_in_other;
}

}  // namespace detail

/// Maps each side's co-covered links through the match mapping and classifies
/// whatever fails to appear on the other side. A one-sided link is blamed on
/// a missing reference list when the mapped citing document has no (or zero)
/// reference_count in the other corpus; everything else stays unexplained.
inline LinkDiff diff_links(const Corpus& a, const Corpus& b, const MatchSet& ms) {
    std::unordered_map<std::string_view, const std::string*> a_to_b, b_to_a;
    for (const auto& p : ms.pairs) {
        a_to_b.emplace(p.id_a, &p.id_b);
        b_to_a.emplace(p.id_b, &p.id_a);
    }

    auto co_a = co_covered_links(a, ms, Perspective::a);
    auto co_b = co_covered_links(b, ms, Perspective::b);
    std::set<CitationLink> set_b(co_b.begin(), co_b.end());

    LinkDiff diff;
    diff.co_covered_a = co_a.size();
    diff.co_covered_b = co_b.size();

    std::size_t shared_from_a = 0;
    for (const auto& link : co_a) {
        CitationLink mapped{*a_to_b.at(link.citing), *a_to_b.at(link.cited)};
        if (set_b.count(mapped)) {
            ++shared_from_a;
            continue;
        }
        ClassifiedLink cl{link, DiffCause::unexplained, false};
        cl.cause = detail::classify_one_sided(b, mapped.citing, &cl.reference_count_is_zero);
        if (cl.cause == DiffCause::missing_reference_list_in_other) {
            ++diff.only_a_missing_reference_list;
            if (cl.reference_count_is_zero) ++diff.only_a_missing_reference_list_zero;
        } else {
            ++diff.only_a_unexplained;
        }
        diff.only_a_links.push_back(std::move(cl));
    }

    std::set<CitationLink> set_a(co_a.begin(), co_a.end());
    std::size_t shared_from_b = 0;
    for (const auto& link : co_b) {
        CitationLink mapped{*b_to_a.at(link.citing), *b_to_a.at(link.cited)};
        if (set_a.count(mapped)) {
            ++shared_from_b;
            continue;
        }
        ClassifiedLink cl{link, DiffCause::unexplained, false};
        cl.cause = detail::classify_one_sided(a, mapped.citing, &cl.reference_count_is_zero);
        if (cl.cause == DiffCause::missing_reference_list_in_other) {
            ++diff.only_b_missing_reference_list;
            if (cl.reference_count_is_zero) ++diff.only_b_missing_reference_list_zero;
        } else {
            ++diff.only_b_unexplained;
        }
        diff.only_b_links.push_back(std::move(cl));
    }

    // The match mapping is a bijection over co-covered endpoints, so the two
    // shared counts cannot disagree.
    diff.shared = shared_from_a;
    diff.only_a = diff.only_a_links.size();
    diff.only_b = diff.only_b_links.size();
    std::sort(diff.only_a_links.begin(), diff.only_a_links.end());
    std::sort(diff.only_b_links.begin(), diff.only_b_links.end());
    return diff;
}

/// Seeded uniform sample of one-sided links, in canonical order. Asking for
/// more than the population yields the whole population (truncated flags it).
inline std::vector<ClassifiedLink> sample_links(const std::vector<ClassifiedLink>& population,
                                                std::size_t n, std::uint64_t seed,
                                                bool* truncated = nullptr) {
    if (truncated) *truncated = n > population.size();
    std::vector<ClassifiedLink> out;
    for (std::size_t i : sample_indices(population.size(), n, seed))
        out.push_back(population[i]);
    return out;
}

}  // namespace biblink
