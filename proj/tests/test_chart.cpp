#include "doctest.h"

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nblp/chart_parser.hpp"
#include "nblp/lexicon.hpp"

using namespace nblp;

namespace {

const Lexicon& domain_lexicon() {
  static Lexicon lex = Lexicon::load_file(NBLP_DATA_DIR "/lexicon.txt");
  return lex;
}

const Grammar& domain_grammar() {
  static Grammar g = Grammar::load_file(NBLP_DATA_DIR "/grammar.txt");
  return g;
}

std::vector<ParseTree> parse(const std::string& sentence,
                             const Grammar& g = domain_grammar()) {
  return parse_chart(g, domain_lexicon(), split_words(sentence));
}

std::set<std::string> signatures(const std::vector<ParseTree>& trees) {
  std::set<std::string> out;
  for (const auto& t : trees) out.insert(derivation_signature(t));
  return out;
}

std::optional<ParseTree> try_build(const Rule& r,
                                   const std::vector<const ParseTree*>& combo,
                                   int& counter) {
  Rule inst = instantiate(r, counter);
  Env env;
  for (size_t d = 0; d < combo.size(); ++d)
    if (!unify_into(inst.daughters[d].features, combo[d]->features, env))
      return std::nullopt;
  ParseTree t;
  t.category = r.mother.category;
  t.rule_id = r.id;
  t.features = substitute(inst.mother.features, env);
  for (const ParseTree* d : combo) t.daughters.push_back(*d);
  return t;
}

// Exhaustive top-down enumerator, written independently of the chart so the
// two can cross-check each other. Exponential, fine for short inputs. Unary
// chains are depth-bounded; the grammar has no unary cycles, so any bound
// above the longest chain is exact.
void derive(const Grammar& g, const Lexicon& lex,
            const std::vector<std::string>& words, const std::string& cat,
            int i, int j, int unary_depth, int& counter,
            std::vector<ParseTree>& out);

void assign_spans(const Grammar& g, const Lexicon& lex,
                  const std::vector<std::string>& words, const Rule& r,
                  size_t d, int pos, int j,
                  std::vector<std::vector<ParseTree>>& parts, int& counter,
                  std::vector<ParseTree>& out) {
  const int remaining = static_cast<int>(r.daughters.size() - d);
  if (remaining == 0) {
    if (pos != j) return;
    std::vector<const ParseTree*> combo(parts.size());
    std::vector<size_t> idx(parts.size(), 0);
    while (true) {
      for (size_t k = 0; k < parts.size(); ++k) combo[k] = &parts[k][idx[k]];
      if (auto t = try_build(r, combo, counter)) out.push_back(*t);
      size_t k = parts.size();
      while (true) {
        if (k == 0) return;
        --k;
        if (++idx[k] < parts[k].size()) break;
        idx[k] = 0;
      }
    }
  }
  for (int q = pos + 1; q <= j - (remaining - 1); ++q) {
    std::vector<ParseTree> sub;
    derive(g, lex, words, r.daughters[d].category, pos, q, 0, counter, sub);
    if (sub.empty()) continue;
    parts.push_back(std::move(sub));
    assign_spans(g, lex, words, r, d + 1, q, j, parts, counter, out);
    parts.pop_back();
  }
}

void derive(const Grammar& g, const Lexicon& lex,
            const std::vector<std::string>& words, const std::string& cat,
            int i, int j, int unary_depth, int& counter,
            std::vector<ParseTree>& out) {
  if (Grammar::is_terminal(cat)) {
    if (j - i != 1) return;
    for (const auto& e : lexical_edges(g, lex, words[i])) {
      if (e.category != cat) continue;
      ParseTree leaf;
      leaf.category = e.category;
      leaf.features = e.features;
      leaf.word = e.word;
      leaf.root = e.root;
      out.push_back(leaf);
    }
    return;
  }
  for (const Rule& r : g.rules) {
    if (r.mother.category != cat) continue;
    if (r.daughters.size() == 1) {
      if (unary_depth > 4) continue;
      std::vector<ParseTree> sub;
      derive(g, lex, words, r.daughters[0].category, i, j, unary_depth + 1,
             counter, sub);
      for (const auto& child : sub) {
        std::vector<const ParseTree*> combo{&child};
        if (auto t = try_build(r, combo, counter)) out.push_back(*t);
      }
    } else {
      if (j - i < static_cast<int>(r.daughters.size())) continue;
      std::vector<std::vector<ParseTree>> parts;
      assign_spans(g, lex, words, r, 0, i, j, parts, counter, out);
    }
  }
}

std::set<std::string> brute_signatures(const std::string& sentence,
                                       const Grammar& g = domain_grammar()) {
  auto words = split_words(sentence);
  std::vector<ParseTree> out;
  int counter = 0;
  derive(g, domain_lexicon(), words, g.start, 0,
         static_cast<int>(words.size()), 0, counter, out);
  return signatures(out);
}

} // namespace

TEST_CASE("two word declarative has exactly one analysis") {
  auto trees = parse("boston flies");
  REQUIRE(trees.size() == 1);
  CHECK(derivation_signature(trees[0]) ==
        "(s_decl (np_pn pn:boston) (vp_v verb:flies))");
  CHECK(trees[0].category == "S");
  CHECK(validate_tree(domain_grammar(), domain_lexicon(), trees[0]));
}

TEST_CASE("attachment ambiguity yields exactly two analyses") {
  auto trees = parse("show the flights to boston");
  REQUIRE(trees.size() == 2);
  CHECK(signatures(trees) ==
        std::set<std::string>{
            "(s_imp (vp_v_np verb:show (np_np_pp (np_det_nbar det:the "
            "(nbar_n noun:flights)) (pp prep:to (np_pn pn:boston)))))",
            "(s_imp (vp_vp_pp (vp_v_np verb:show (np_det_nbar det:the "
            "(nbar_n noun:flights))) (pp prep:to (np_pn pn:boston))))"});
}

TEST_CASE("word salad is out of coverage") {
  CHECK(parse("flights flights flights").empty());
  CHECK(parse("blorp flies").empty());
  CHECK(parse("denver to boston").empty());
  CHECK(parse_chart(domain_grammar(), domain_lexicon(), {}).empty());
}

TEST_CASE("yes no question with agreement") {
  auto trees = parse("does the flight serve breakfast");
  REQUIRE(trees.size() == 1);
  CHECK(derivation_signature(trees[0]) ==
        "(s_yn verb:does (np_det_nbar det:the (nbar_n noun:flight)) "
        "(vp_v_np verb:serve (np_bare (nbar_n noun:breakfast))))");
  // Plural auxiliary against a singular subject must not go through.
  CHECK(parse("do the flight serve breakfast").empty());
  CHECK_FALSE(parse("do these flights serve breakfast").empty());
}

TEST_CASE("copula sentences leave the predicate number free") {
  auto sg = parse("what is the first flight to boston");
  CHECK(sg.size() == 1);
  // A number clash between copula and predicate still parses; scoring deals
  // with it later.
  auto pl = parse("what is the first flights to boston");
  REQUIRE(pl.size() == 1);
  CHECK(derivation_signature(pl[0]) ==
        "(s_wh_cop (np_wh det:what) verb:is (np_np_pp (np_det_nbar det:the "
        "(nbar_adj other:first (nbar_n noun:flights))) (pp prep:to "
        "(np_pn pn:boston))))");
  // The bare wh word carries no number, so the copula is free there too.
  CHECK(parse("what are the first flight to boston").size() == 1);
}

TEST_CASE("infinitive complements and prepositional chains") {
  auto trees = parse("i want a flight with no stops");
  REQUIRE(trees.size() == 2); // attach the modifier to the verb or the noun
  for (const auto& t : trees)
    CHECK(validate_tree(domain_grammar(), domain_lexicon(), t));

  auto longer = parse("i want to go from boston to denver");
  CHECK(longer.size() >= 2);
  for (const auto& t : longer)
    CHECK(validate_tree(domain_grammar(), domain_lexicon(), t));
}

TEST_CASE("every chart analysis validates") {
  for (const char* s :
       {"list the flights from boston to denver", "please list the flights",
        "could i have more details", "are these flights nonstop flights",
        "show me the fares", "the flight serves dinner"}) {
    auto trees = parse(s);
    INFO("sentence: ", s);
    CHECK_FALSE(trees.empty());
    for (const auto& t : trees) {
      CHECK(validate_tree(domain_grammar(), domain_lexicon(), t));
      CHECK(tree_yield(t) == split_words(s));
    }
  }
}

TEST_CASE("chart matches exhaustive enumeration on short inputs") {
  for (const char* s :
       {"boston flies", "show the flights to boston",
        "flights flights flights", "does the flight serve breakfast",
        "list flights from boston", "i want a flight", "what is the fare",
        "are these flights nonstop flights", "go to boston",
        "please list the flights", "denver to boston",
        "the flight serves dinner", "could i have more details",
        "what flights fly from boston"}) {
    INFO("sentence: ", s);
    CHECK(signatures(parse(s)) == brute_signatures(s));
  }
}

TEST_CASE("analyses are independent of rule order") {
  Grammar reversed = domain_grammar();
  std::reverse(reversed.rules.begin(), reversed.rules.end());
  reversed.reindex();
  for (const char* s :
       {"boston flies", "show the flights to boston",
        "does the flight serve breakfast", "i want a flight with no stops",
        "list the flights from boston to denver"}) {
    INFO("sentence: ", s);
    CHECK(signatures(parse(s)) == signatures(parse(s, reversed)));
  }
}

TEST_CASE("parse output order is deterministic") {
  auto a = parse("i want to go from boston to denver");
  auto b = parse("i want to go from boston to denver");
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i)
    CHECK(derivation_signature(a[i]) == derivation_signature(b[i]));
  // Sorted by signature.
  for (size_t i = 1; i < a.size(); ++i)
    CHECK(derivation_signature(a[i - 1]) <= derivation_signature(a[i]));
}

TEST_CASE("longer utterances stay tractable") {
  auto trees = parse("i want a flight from boston to denver on tuesday");
  CHECK(trees.size() >= 3);
  for (const auto& t : trees)
    CHECK(validate_tree(domain_grammar(), domain_lexicon(), t));
}
