#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "biblink/normalize.hpp"

namespace biblink {

/// Matching-score configuration. The defaults are the standard ones:
/// S = 15*m_doi + 7*m_first_author + 14*m_title + 5*m_source + 14*m_other,
/// match iff S strictly exceeds 30.
///
/// legacy_first_author reproduces a known bug of an earlier implementation of
/// m_first_author (the 0.8 coefficient missing from the distance term, result
/// clamped at 0); keep it off unless replicating that implementation's output.
struct ScoreWeights {
    double doi = 15.0;
    double first_author = 7.0;
    double title = 14.0;
    double source = 5.0;
    double other = 14.0;
    double threshold = 30.0;
    bool legacy_first_author = false;
};

struct ScoreBreakdown {
    double m_doi = 0.0;
    double m_first_author = 0.0;
    double m_title = 0.0;
    double m_source = 0.0;
    double m_other = 0.0;
    double total = 0.0;
};

/// Levenshtein distance: minimum single-character insertions, deletions and
/// substitutions transforming a into b. Two-row DP with common prefix/suffix
/// trimming, so comparing equal or near-equal strings is cheap.
inline std::size_t levenshtein(std::string_view a, std::string_view b) {
    while (!a.empty() && !b.empty() && a.front() == b.front()) {
        a.remove_prefix(1);
        b.remove_prefix(1);
    }
    while (!a.empty() && !b.empty() && a.back() == b.back()) {
        a.remove_suffix(1);
        b.remove_suffix(1);
    }
    if (a.empty()) return b.size();
    if (b.empty()) return a.size();
    if (a.size() < b.size()) std::swap(a, b);

    std::vector<std::size_t> row(b.size() + 1);
    std::iota(row.begin(), row.end(), std::size_t{0});
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i + 1;
        for (std::size_t j = 0; j < b.size(); ++j) {
            std::size_t up = row[j + 1];
            row[j + 1] = a[i] == b[j]
                             ? diag
                             : 1 + std::min({diag, up, row[j]});
            diag = up;
        }
    }
    return row[b.size()];
}

namespace detail {

// Equality indicator: 1 iff both values are present and identical.
inline double eq(const std::optional<std::string>& a, const std::optional<std::string>& b) {
    return a && b && *a == *b ? 1.0 : 0.0;
}

inline bool lists_intersect(const std::vector<std::string>& a,
                            const std::vector<std::string>& b) {
    for (const auto& x : a)
        for (const auto& y : b)
            if (x == y) return true;
    return false;
}

}  // namespace detail

/// 1 iff both records carry a DOI and the normalized DOIs are identical.
inline double m_doi(const NormalizedRecord& a, const NormalizedRecord& b) {
    return detail::eq(a.doi_norm, b.doi_norm);
}

/// First-author similarity from last-name edit distance plus a first-initial
/// bonus: 0.8 - 0.8*D(l_a,l_b)/max(L) + 0.2*E(f_a,f_b). 0 when either last
/// name is missing.
inline double m_first_author(const NormalizedRecord& a, const NormalizedRecord& b,
                             bool legacy_first_author = false) {
    if (!a.first_author_last || !b.first_author_last) return 0.0;
    const std::string& la = *a.first_author_last;
    const std::string& lb = *b.first_author_last;
    double ratio = static_cast<double>(levenshtein(la, lb)) /
                   static_cast<double>(std::max(la.size(), lb.size()));
    double initial = a.first_author_initial && b.first_author_initial &&
                             *a.first_author_initial == *b.first_author_initial
                         ? 1.0
                         : 0.0;
    double value = legacy_first_author ? 0.8 - ratio + 0.2 * initial
                                    : 0.8 - 0.8 * ratio + 0.2 * initial;
    return std::max(value, 0.0);
}

/// Title similarity 1 - D(t_a,t_b)/max(L); 0 when either title is missing.
inline double m_title(const NormalizedRecord& a, const NormalizedRecord& b) {
    if (!a.title_norm || !b.title_norm) return 0.0;
    const std::string& ta = *a.title_norm;
    const std::string& tb = *b.title_norm;
    return 1.0 - static_cast<double>(levenshtein(ta, tb)) /
                     static_cast<double>(std::max(ta.size(), tb.size()));
}

/// Source similarity: 1 on any shared ISSN or ISBN; otherwise the best value
/// of 1 - [D(s_a,s_b) - |L(s_a)-L(s_b)|] / min(L) over all title-variant
/// pairs, which is 1 exactly when one variant contains the other. 0 when no
/// identifiers intersect and either side has no title variant.
inline double m_source(const NormalizedRecord& a, const NormalizedRecord& b) {
    if (detail::lists_intersect(a.issns_norm, b.issns_norm) ||
        detail::lists_intersect(a.isbns_norm, b.isbns_norm))
        return 1.0;
    if (a.source_title_variants_norm.empty() || b.source_title_variants_norm.empty())
        return 0.0;
    double best = 0.0;
    for (const auto& va : a.source_title_variants_norm) {
        for (const auto& vb : b.source_title_variants_norm) {
            auto len_a = va.size(), len_b = vb.size();
            double excess = static_cast<double>(levenshtein(va, vb)) -
                            static_cast<double>(len_a > len_b ? len_a - len_b : len_b - len_a);
            double value = 1.0 - excess / static_cast<double>(std::min(len_a, len_b));
            best = std::max(best, value);
        }
    }
    return best;
}

/// Numeric-attribute agreement: 0.1*E(year) + 0.2*E(volume) + 0.1*E(issue) +
/// 0.3*max(E(begin_page), E(article_number)) + 0.3*E(end_page). The article
/// number stands in for the begin page, so electronic-only articles can still
/// collect the begin-page term.
inline double m_other(const NormalizedRecord& a, const NormalizedRecord& b) {
    double begin_or_article = std::max(detail::eq(a.begin_page_num, b.begin_page_num),
                                       detail::eq(a.article_number_num, b.article_number_num));
    return 0.1 * detail::eq(a.year_num, b.year_num) +
           0.2 * detail::eq(a.volume_num, b.volume_num) +
           0.1 * detail::eq(a.issue_num, b.issue_num) +
           0.3 * begin_or_article +
           0.3 * detail::eq(a.end_page_num, b.end_page_num);
}

/// All five components plus the weighted total. Deterministic: fixed
/// evaluation order, no state.
inline ScoreBreakdown matching_score(const NormalizedRecord& a, const NormalizedRecord& b,
                                     const ScoreWeights& w = {}) {
    ScoreBreakdown s;
    s.m_doi = m_doi(a, b);
    s.m_first_author = m_first_author(a, b, w.legacy_first_author);
    s.m_title = m_title(a, b);
    s.m_source = m_source(a, b);
    s.m_other = m_other(a, b);
    s.total = w.doi * s.m_doi + w.first_author * s.m_first_author + w.title * s.m_title +
              w.source * s.m_source + w.other * s.m_other;
    return s;
}

}  // namespace biblink
