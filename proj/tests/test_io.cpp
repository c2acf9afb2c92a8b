#include <algorithm>
#include <fstream>
#include <functional>

#include "doctest.h"
#include "gskq/io.hpp"
#include "test_util.hpp"

using namespace gskq;
using gskq::test::unique_path;

namespace {

std::filesystem::path write_lines(const std::string& tag,
                                  const std::string& content) {
    const auto path = unique_path(tag, ".tsv");
    std::ofstream out(path);
    out << content;
    return path;
}

bool throws_mentioning(const std::function<void()>& fn,
                       const std::string& needle) {
    try {
        fn();
    } catch (const std::exception& e) {
        return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("fixture dataset loads with interned keywords and bounding box") {
    const Dataset d = gskq::test::fixture_dataset();
    REQUIRE(d.objects.size() == 7);
    CHECK(d.vocabulary.size() == 7);
    CHECK(d.bounding_box.lo.x == 0.0);
    CHECK(d.bounding_box.lo.y == 0.0);
    CHECK(d.bounding_box.hi.x == 6.0);
    CHECK(d.bounding_box.hi.y == 8.0);
    CHECK(d.bounding_box.diagonal() == 10.0);

    const SpatioTextualObject& o6 = d.objects[5];
    CHECK(o6.id == 6);
    CHECK(o6.location.x == 1.0);
    REQUIRE(o6.keywords.size() == 3);
    KeywordSet expected{*d.vocabulary.find("t1"), *d.vocabulary.find("t3"),
                        *d.vocabulary.find("t4")};
    sort_unique(expected);
    CHECK(o6.keywords == expected);
}

TEST_CASE("dataset round-trips through save and load") {
    const Dataset d = gskq::test::fixture_dataset();
    const auto path = unique_path("roundtrip", ".tsv");
    save_dataset(d, path);
    const Dataset back = load_dataset(path);
    REQUIRE(back.objects.size() == d.objects.size());
    for (size_t i = 0; i < d.objects.size(); ++i) {
        CHECK(back.objects[i].id == d.objects[i].id);
        CHECK(back.objects[i].location.x == d.objects[i].location.x);
        CHECK(back.objects[i].location.y == d.objects[i].location.y);
        // Compare as token sets; interning order may renumber ids.
        std::vector<std::string> got, want;
        for (KeywordId kw : back.objects[i].keywords)
            got.push_back(back.vocabulary.token(kw));
        for (KeywordId kw : d.objects[i].keywords)
            want.push_back(d.vocabulary.token(kw));
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        CHECK(got == want);
    }
}

TEST_CASE("dataset loader reports malformed lines by number") {
    CHECK(throws_mentioning(
        [&] { load_dataset(write_lines("badfield", "1\t2.0\t3.0\n")); },
        ":1: expected 4"));
    CHECK(throws_mentioning(
        [&] { load_dataset(write_lines("badnum", "1\tx\t3.0\ta\n")); },
        "bad x coordinate"));
    CHECK(throws_mentioning(
        [&] {
            load_dataset(
                write_lines("dupid", "1\t0\t0\ta\n# note\n1\t1\t1\tb\n"));
        },
        ":3: duplicate object id"));
    CHECK(throws_mentioning(
        [&] { load_dataset(write_lines("nokw", "1\t0\t0\t\n")); },
        "empty keyword list"));
    CHECK(throws_mentioning(
        [&] { load_dataset(write_lines("emptykw", "1\t0\t0\ta,,b\n")); },
        "empty keyword in list"));
    CHECK(throws_mentioning(
        [&] { load_dataset(write_lines("empty", "# only a comment\n")); },
        "no objects"));
    CHECK(throws_mentioning(
        [&] { load_dataset("/nonexistent/nowhere.tsv"); }, "cannot open"));
}

TEST_CASE("crlf dataset lines parse cleanly") {
    const Dataset d =
        load_dataset(write_lines("crlf", "1\t0\t0\ta,b\r\n2\t1\t1\tb\r\n"));
    REQUIRE(d.objects.size() == 2);
    CHECK(d.vocabulary.size() == 2);
    CHECK(d.objects[1].keywords.size() == 1);
}

TEST_CASE("duplicate keywords within one object collapse") {
    const Dataset d = load_dataset(write_lines("dupkw", "1\t0\t0\ta,b,a\n"));
    CHECK(d.objects[0].keywords.size() == 2);
}

TEST_CASE("query group loads against a vocabulary") {
    const Dataset d = gskq::test::fixture_dataset();
    const QueryGroup g = gskq::test::fixture_group(d.vocabulary);
    REQUIRE(g.size() == 5);
    CHECK(g.members[0].location.x == doctest::Approx(1.804650));
    CHECK(g.members[1].keywords ==
          KeywordSet{*d.vocabulary.find("t4")});
    for (const QueryPoint& q : g.members) CHECK(q.priority == 1.0);
}

TEST_CASE("query group with priorities round-trips") {
    const Dataset d = gskq::test::fixture_dataset();
    const auto path = write_lines(
        "prio", "1.0\t2.0\tt1,t2\t2.5\n3.0\t4.0\tt4\t0.5\n");
    const QueryGroup g = load_query_group(path, d.vocabulary);
    REQUIRE(g.size() == 2);
    CHECK(g.members[0].priority == 2.5);
    CHECK(g.members[1].priority == 0.5);

    const auto out = unique_path("prio-out", ".tsv");
    save_query_group(g, d.vocabulary, out);
    const QueryGroup back = load_query_group(out, d.vocabulary);
    REQUIRE(back.size() == 2);
    CHECK(back.members[0].priority == 2.5);
    CHECK(back.members[0].keywords == g.members[0].keywords);
}

TEST_CASE("query group loader rejects bad input") {
    const Dataset d = gskq::test::fixture_dataset();
    CHECK(throws_mentioning(
        [&] {
            load_query_group(write_lines("unknown", "0\t0\tmystery\n"),
                             d.vocabulary);
        },
        "unknown keyword 'mystery'"));
    CHECK(throws_mentioning(
        [&] {
            load_query_group(write_lines("badprio", "0\t0\tt1\t-1\n"),
                             d.vocabulary);
        },
        "priority must be positive"));
    CHECK(throws_mentioning(
        [&] {
            load_query_group(write_lines("short", "0\t0\n"), d.vocabulary);
        },
        "expected 3 or 4"));
    CHECK(throws_mentioning(
        [&] { load_query_group(write_lines("none", "\n"), d.vocabulary); },
        "no query points"));
}

TEST_CASE("weights load aligned to the vocabulary") {
    const Dataset d = gskq::test::fixture_dataset();
    const auto path = write_lines("weights", "t1\t2.5\nt4\t4.0\n");
    const std::vector<double> w = load_weights(path, d.vocabulary);
    REQUIRE(w.size() == d.vocabulary.size());
    CHECK(w[*d.vocabulary.find("t1")] == 2.5);
    CHECK(w[*d.vocabulary.find("t4")] == 4.0);
    CHECK(w[*d.vocabulary.find("t2")] == 1.0);
    CHECK(max_weight(w) == 4.0);
    CHECK(max_weight({}) == 1.0);
    CHECK(max_weight({0.25, 0.5}) == 1.0);  // never below the default

    CHECK(throws_mentioning(
        [&] {
            load_weights(write_lines("badw", "t1\t0\n"), d.vocabulary);
        },
        "weight must be positive"));
    CHECK(throws_mentioning(
        [&] {
            load_weights(write_lines("unkw", "zzz\t1\n"), d.vocabulary);
        },
        "unknown keyword"));
}

TEST_CASE("vocabulary interning is first-seen and stable") {
    Vocabulary v;
    CHECK(v.intern("alpha") == 0);
    CHECK(v.intern("beta") == 1);
    CHECK(v.intern("alpha") == 0);
    CHECK(v.size() == 2);
    CHECK(v.token(1) == "beta");
    CHECK(v.find("beta") == KeywordId{1});
    CHECK(!v.find("gamma").has_value());
}

}  // TEST_SUITE
