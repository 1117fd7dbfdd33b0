#include "doctest.h"

#include <stdexcept>

#include "nblp/lexicon.hpp"
#include "test_util.hpp"

using namespace nblp;

TEST_CASE("entries parse with roots, categories and classes") {
  Lexicon lex = testutil::lexicon();
  auto does = lex.analyze_root("does");
  REQUIRE(does.size() == 1);
  CHECK(does[0].root == "do");
  CHECK(does[0].major_cat == MajorCat::Verb);

  auto are = lex.analyze_root("are");
  CHECK(are[0].root == "be");

  CHECK(lex.sem_class_of("boston") == "*place");
  CHECK(lex.sem_class_of("flight") == "flight");
  CHECK(lex.sem_class_of("unheard") == "unheard");
}

TEST_CASE("ambiguous surfaces keep every analysis") {
  Lexicon lex = testutil::lexicon();
  auto list = lex.analyze_root("list");
  REQUIRE(list.size() == 2);
  CHECK(list[0].major_cat == MajorCat::Verb);
  CHECK(list[1].major_cat == MajorCat::Noun);
}

TEST_CASE("unknown inflections resolve through suffix stripping") {
  Lexicon lex = testutil::lexicon();
  SUBCASE("plural -s") {
    auto a = lex.analyze_root("flights");
    REQUIRE(a.size() == 1);
    CHECK(a[0].root == "flight");
    CHECK(a[0].major_cat == MajorCat::Noun);
  }
  SUBCASE("other suffixes") {
    CHECK(lex.analyze_root("fares")[0].root == "fare");
    CHECK(lex.analyze_root("serving")[0].root == "serve");
    // "serving" strips -ing only after -s and -es fail
    CHECK(lex.analyze_root("listed")[0].root == "list");
  }
  SUBCASE("unknown words analyze as themselves") {
    auto a = lex.analyze_root("zzz");
    REQUIRE(a.size() == 1);
    CHECK(a[0].root == "zzz");
    CHECK(a[0].major_cat == MajorCat::Other);
  }
  SUBCASE("case folds before lookup") {
    CHECK(lex.analyze_root("Boston")[0].root == "boston");
    CHECK(lex.analyze_root("FLIGHTS")[0].root == "flight");
  }
}

TEST_CASE("number, marker and common-word predicates") {
  Lexicon lex = testutil::lexicon();
  CHECK(lex.is_number("four"));
  CHECK(lex.is_number("oh"));
  CHECK_FALSE(lex.is_number("boston"));
  CHECK(lex.is_repair_marker("no"));
  CHECK(lex.is_repair_marker("sorry"));
  CHECK_FALSE(lex.is_repair_marker("maybe"));
  CHECK(lex.is_common_skippable("from"));
  CHECK(lex.is_common_skippable("to"));
  CHECK_FALSE(lex.is_common_skippable("boston"));
}

TEST_CASE("directives override the default marker and common sets") {
  Lexicon lex = Lexicon::parse(
      "@markers oops\n"
      "@skippable uh um\n"
      "oops\toops\tmarker\n");
  CHECK(lex.is_repair_marker("oops"));
  CHECK_FALSE(lex.is_repair_marker("no"));
  CHECK(lex.is_common_skippable("uh"));
  CHECK_FALSE(lex.is_common_skippable("from"));
}

TEST_CASE("marker set may never become empty") {
  CHECK_THROWS_AS(Lexicon::parse("@markers\n"), std::runtime_error);
}

TEST_CASE("malformed lines are rejected with the line number") {
  CHECK_THROWS_AS(Lexicon::parse("flight\tflight\n"), std::runtime_error);
  CHECK_THROWS_AS(Lexicon::parse("flight\tflight\tnada\n"),
                  std::runtime_error);
  CHECK_THROWS_AS(Lexicon::parse("@bogus x\n"), std::runtime_error);
  try {
    Lexicon::parse("ok\tok\tother\nbad line\n");
    FAIL("expected parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
}

TEST_CASE("serialize round-trips through parse") {
  Lexicon lex = testutil::lexicon();
  std::string text = lex.serialize();
  Lexicon again = Lexicon::parse(text);
  CHECK(again.serialize() == text);
  CHECK(again.analyze_root("does")[0].root == "do");
  CHECK(again.is_repair_marker("sorry"));
}
