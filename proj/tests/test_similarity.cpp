#include <doctest.h>

#include <cmath>

#include "biblink/similarity.hpp"
#include "biblink/random.hpp"
#include "support/oracle.hpp"

using namespace biblink;

namespace {

NormalizedRecord nr(const std::string& id) {
    NormalizedRecord n;
    n.record_id = id;
    return n;
}

std::string random_lower(SampleRng& rng, std::size_t max_len, std::size_t min_len = 0) {
    std::size_t len = min_len + rng.bounded(max_len - min_len + 1);
    std::string s;
    for (std::size_t i = 0; i < len; ++i)
        s.push_back(static_cast<char>('a' + rng.bounded(6)));  // small alphabet forces overlaps
    return s;
}

}  // namespace

TEST_CASE("levenshtein basics") {
    CHECK(levenshtein("", "abc") == 3);
    CHECK(levenshtein("abc", "") == 3);
    CHECK(levenshtein("abc", "abc") == 0);
    CHECK(levenshtein("kitten", "sitting") == 3);
    CHECK(levenshtein("kitten", "sitting") == oracle::lev_matrix("kitten", "sitting"));
}

TEST_CASE("levenshtein agrees with the full-matrix oracle and its bounds") {
    SampleRng rng(11);
    for (int iter = 0; iter < 400; ++iter) {
        std::string a = random_lower(rng, 12);
        std::string b = random_lower(rng, 12);
        std::string c = random_lower(rng, 12);
        std::size_t d_ab = levenshtein(a, b);
        CHECK(d_ab == oracle::lev_matrix(a, b));
        CHECK(d_ab == levenshtein(b, a));
        std::size_t diff = a.size() > b.size() ? a.size() - b.size() : b.size() - a.size();
        CHECK(d_ab >= diff);
        CHECK(d_ab <= std::max(a.size(), b.size()));
        CHECK(levenshtein(a, c) <= d_ab + levenshtein(b, c));  // triangle inequality
    }
}

TEST_CASE("m_doi is an exact-equality indicator") {
    NormalizedRecord a = nr("A"), b = nr("B");
    a.doi_norm = "10.1/x";
    b.doi_norm = "10.1/x";
    CHECK(m_doi(a, b) == 1.0);
    b.doi_norm.reset();
    CHECK(m_doi(a, b) == 0.0);
    b.doi_norm = "10.1/y";
    CHECK(m_doi(a, b) == 0.0);
}

TEST_CASE("m_first_author follows the weighted name-distance formula") {
    NormalizedRecord a = nr("A"), b = nr("B");
    a.first_author_last = "smith";
    a.first_author_initial = 'j';
    b.first_author_last = "smith";
    b.first_author_initial = 'j';
    CHECK(m_first_author(a, b) == doctest::Approx(1.0).epsilon(1e-12));

    b.first_author_last = "smyth";
    CHECK(m_first_author(a, b) == doctest::Approx(0.84).epsilon(1e-12));

    b.first_author_last = "smith";
    b.first_author_initial = 'k';
    CHECK(m_first_author(a, b) == doctest::Approx(0.8).epsilon(1e-12));

    b.first_author_last.reset();
    CHECK(m_first_author(a, b) == 0.0);
}

TEST_CASE("m_first_author legacy mode reproduces the earlier variant") {
    NormalizedRecord a = nr("A"), b = nr("B");
    a.first_author_last = "smith";
    a.first_author_initial = 'j';
    b.first_author_last = "smyth";
    b.first_author_initial = 'j';
    // 0.8 - 1/5 + 0.2 instead of 0.8 - 0.8/5 + 0.2
    CHECK(m_first_author(a, b, true) == doctest::Approx(0.8).epsilon(1e-12));

    a.first_author_last = "ab";
    b.first_author_last = "xy";
    a.first_author_initial.reset();
    b.first_author_initial.reset();
    CHECK(m_first_author(a, b, true) == 0.0);  // clamped, would be -0.2
}

TEST_CASE("m_title follows the normalized-distance formula") {
    NormalizedRecord a = nr("A"), b = nr("B");
    a.title_norm = "graph theory";
    b.title_norm = "graph theory";
    CHECK(m_title(a, b) == 1.0);
    b.title_norm = "group theory";
    CHECK(m_title(a, b) == doctest::Approx(0.75).epsilon(1e-12));
    b.title_norm.reset();
    CHECK(m_title(a, b) == 0.0);
}

TEST_CASE("m_source identifier short-circuit and containment") {
    NormalizedRecord a = nr("A"), b = nr("B");
    a.issns_norm = {"15232867"};
    b.issns_norm = {"15232867"};
    a.source_title_variants_norm = {"completely different"};
    b.source_title_variants_norm = {"unrelated words"};
    CHECK(m_source(a, b) == 1.0);

    a.issns_norm.clear();
    b.issns_norm.clear();
    a.source_title_variants_norm = {"j inf sci"};
    b.source_title_variants_norm = {"x j inf sci y"};
    CHECK(m_source(a, b) == doctest::Approx(1.0).epsilon(1e-12));

    a.source_title_variants_norm = {"nature"};
    b.source_title_variants_norm = {"science"};
    double d = static_cast<double>(oracle::lev_matrix("nature", "science"));
    double expected = 1.0 - (d - 1.0) / 6.0;
    CHECK(m_source(a, b) == doctest::Approx(expected).epsilon(1e-12));

    b.source_title_variants_norm.clear();
    CHECK(m_source(a, b) == 0.0);
}

TEST_CASE("m_source takes the best variant pair") {
    NormalizedRecord a = nr("A"), b = nr("B");
    a.source_title_variants_norm = {"journal of things", "j things"};
    b.source_title_variants_norm = {"the journal of things series"};
    CHECK(m_source(a, b) == 1.0);  // full variant is contained in b's variant
}

TEST_CASE("m_other weights the numeric attributes") {
    NormalizedRecord a = nr("A"), b = nr("B");
    a.year_num = b.year_num = std::string("2012");
    a.volume_num = b.volume_num = std::string("7");
    a.issue_num = b.issue_num = std::string("3");
    a.begin_page_num = b.begin_page_num = std::string("101");
    a.end_page_num = b.end_page_num = std::string("110");
    CHECK(m_other(a, b) == doctest::Approx(1.0).epsilon(1e-12));

    NormalizedRecord c = nr("C"), d = nr("D");
    c.year_num = d.year_num = std::string("2012");
    CHECK(m_other(c, d) == doctest::Approx(0.1).epsilon(1e-12));

    // Begin pages differ but article numbers agree: the 0.3 term stays.
    b.begin_page_num = "999";
    a.article_number_num = b.article_number_num = std::string("104562");
    CHECK(m_other(a, b) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("matching_score on forced-arithmetic examples") {
    NormalizedRecord a = nr("A"), b = nr("B");
    a.doi_norm = b.doi_norm = std::string("10.1/x");
    a.first_author_last = b.first_author_last = std::string("fletcher");
    a.first_author_initial = b.first_author_initial = 'r';
    a.title_norm = b.title_norm = std::string("a title");
    a.issns_norm = b.issns_norm = {"15232867"};
    a.source_title_variants_norm = b.source_title_variants_norm = {"some journal"};
    a.year_num = b.year_num = std::string("2012");
    a.volume_num = b.volume_num = std::string("7");
    a.issue_num = b.issue_num = std::string("3");
    a.begin_page_num = b.begin_page_num = std::string("101");
    a.end_page_num = b.end_page_num = std::string("110");

    ScoreBreakdown full = matching_score(a, b);
    CHECK(full.total == 55.0);  // exact: every component is exactly 1

    NormalizedRecord a2 = a, b2 = b;
    a2.doi_norm.reset();
    b2.doi_norm.reset();
    CHECK(matching_score(a2, b2).total == doctest::Approx(40.0).epsilon(1e-12));
    CHECK(matching_score(a2, b2).total > 30.0);

    NormalizedRecord a3 = nr("A3"), b3 = nr("B3");
    a3.doi_norm = b3.doi_norm = std::string("10.1/x");
    a3.year_num = b3.year_num = std::string("2012");
    ScoreBreakdown sparse = matching_score(a3, b3);
    CHECK(sparse.total == doctest::Approx(16.4).epsilon(1e-12));
    CHECK(sparse.total < 30.0);
}

TEST_CASE("properties: components bounded, symmetric, total consistent") {
    SampleRng rng(13);
    ScoreWeights w;
    for (int iter = 0; iter < 300; ++iter) {
        NormalizedRecord a = nr("A"), b = nr("B");
        auto maybe = [&](std::optional<std::string>& field, std::size_t max_len,
                         std::size_t min_len = 1) {
            if (rng.bounded(4) != 0) field = random_lower(rng, max_len, min_len);
        };
        maybe(a.doi_norm, 8);
        maybe(b.doi_norm, 8);
        maybe(a.first_author_last, 9);
        maybe(b.first_author_last, 9);
        maybe(a.title_norm, 14);
        maybe(b.title_norm, 14);
        if (rng.bounded(3) == 0) a.issns_norm.push_back(random_lower(rng, 4, 1));
        if (rng.bounded(3) == 0) b.issns_norm.push_back(random_lower(rng, 4, 1));
        for (unsigned k = 0, n = static_cast<unsigned>(rng.bounded(3)); k < n; ++k)
            a.source_title_variants_norm.push_back(random_lower(rng, 10, 1));
        for (unsigned k = 0, n = static_cast<unsigned>(rng.bounded(3)); k < n; ++k)
            b.source_title_variants_norm.push_back(random_lower(rng, 10, 1));
        maybe(a.year_num, 4);
        maybe(b.year_num, 4);
        maybe(a.begin_page_num, 3);
        maybe(b.begin_page_num, 3);

        ScoreBreakdown s = matching_score(a, b, w);
        for (double comp :
             {s.m_doi, s.m_first_author, s.m_title, s.m_source, s.m_other}) {
            CHECK(comp >= 0.0);
            CHECK(comp <= 1.0);
        }
        double recomputed = w.doi * s.m_doi + w.first_author * s.m_first_author +
                            w.title * s.m_title + w.source * s.m_source + w.other * s.m_other;
        CHECK(s.total == doctest::Approx(recomputed).epsilon(1e-12));

        CHECK(m_title(a, b) == m_title(b, a));
        CHECK(m_first_author(a, b) == m_first_author(b, a));
        CHECK(m_source(a, b) == m_source(b, a));

        oracle::Score ref = oracle::score(a, b, w);
        CHECK(s.m_doi == doctest::Approx(ref.m_doi).epsilon(1e-12));
        CHECK(s.m_first_author == doctest::Approx(ref.m_first_author).epsilon(1e-12));
        CHECK(s.m_title == doctest::Approx(ref.m_title).epsilon(1e-12));
        CHECK(s.m_source == doctest::Approx(ref.m_source).epsilon(1e-12));
        CHECK(s.m_other == doctest::Approx(ref.m_other).epsilon(1e-12));
        CHECK(s.total == doctest::Approx(ref.total).epsilon(1e-12));
    }
}

TEST_CASE("total is monotonically non-decreasing in each component") {
    NormalizedRecord a = nr("A"), b = nr("B");
    a.title_norm = "completely different words";
    b.title_norm = "another unrelated phrase";
    a.first_author_last = "smith";
    b.first_author_last = "jones";
    double before = matching_score(a, b).total;

    b.title_norm = a.title_norm;  // improve the title component only
    double after = matching_score(a, b).total;
    CHECK(after >= before);

    b.first_author_last = a.first_author_last;  // improve first author too
    CHECK(matching_score(a, b).total >= after);
}
