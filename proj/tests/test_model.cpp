#include <doctest.h>

#include "biblink/model.hpp"

using namespace biblink;

namespace {

DocumentRecord rec(std::string id) {
    DocumentRecord r;
    r.record_id = std::move(id);
    return r;
}

}  // namespace

TEST_CASE("validate_corpus flags duplicate record ids") {
    Corpus c("test");
    c.add(rec("X1"));
    c.add(rec("X1"));
    auto issues = validate_corpus(c);
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].kind == IssueKind::duplicate_id);
    CHECK(issues[0].record_id == "X1");
}

TEST_CASE("validate_corpus flags dangling references") {
    Corpus c("test");
    DocumentRecord a = rec("A");
    a.references = {"Z"};
    c.add(std::move(a));
    auto issues = validate_corpus(c);
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].kind == IssueKind::dangling_reference);
    CHECK(issues[0].record_id == "A");
}

TEST_CASE("validate_corpus accepts a well-formed corpus") {
    Corpus c("test");
    DocumentRecord a = rec("A"), b = rec("B"), d = rec("C");
    a.references = {"B", "C"};
    a.reference_count = 2;
    c.add(std::move(a));
    c.add(std::move(b));
    c.add(std::move(d));
    CHECK(validate_corpus(c).empty());
}

TEST_CASE("validate_corpus flags reference_count below linked references") {
    Corpus c("test");
    DocumentRecord a = rec("A");
    a.references = {"B", "C"};
    a.reference_count = 1;
    c.add(std::move(a));
    c.add(rec("B"));
    c.add(rec("C"));
    auto issues = validate_corpus(c);
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].kind == IssueKind::reference_count_below_links);
}

TEST_CASE("self-citations are reported, not fatal") {
    Corpus c("test");
    DocumentRecord a = rec("A");
    a.references = {"A"};
    c.add(std::move(a));
    auto issues = validate_corpus(c);
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].kind == IssueKind::self_citation);
}

TEST_CASE("authors without any name are reported") {
    Corpus c("test");
    DocumentRecord a = rec("A");
    AuthorName nameless;
    nameless.first_name = "John";
    a.authors.push_back(nameless);
    c.add(std::move(a));
    auto issues = validate_corpus(c);
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].kind == IssueKind::author_unnamed);
}

TEST_CASE("validate_corpus is pure: identical issue lists on repeated calls") {
    Corpus c("test");
    DocumentRecord a = rec("A");
    a.references = {"A", "Z"};
    a.reference_count = 1;
    c.add(std::move(a));
    c.add(rec("A"));
    auto first = validate_corpus(c);
    auto second = validate_corpus(c);
    CHECK(first == second);
    CHECK(first.size() == 4);  // self-citation, dangling, count-below, duplicate
}

TEST_CASE("corpus lookup finds the first occurrence of an id") {
    Corpus c("test");
    DocumentRecord a = rec("A");
    a.title = "first";
    DocumentRecord dup = rec("A");
    dup.title = "second";
    c.add(std::move(a));
    c.add(std::move(dup));
    REQUIRE(c.find("A") != nullptr);
    CHECK(*c.find("A")->title == "first");
    CHECK(c.find("missing") == nullptr);
}
