#include "doctest.h"

#include <set>
#include <stdexcept>

#include "nblp/chart_parser.hpp"
#include "nblp/corpus_gen.hpp"
#include "nblp/pipeline.hpp"

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

GrammarBundle general_bundle() {
  GrammarBundle b;
  b.general = domain_grammar();
  b.lexicon = domain_lexicon();
  return b;
}

// A model whose vectors line up with what build_vector produces for the
// default analysis pipeline: empty object tables for each kind plus the
// two structural flags, with all weight on the speech value.
PreferenceModel speech_only_model() {
  PreferenceModel m;
  m.combine = "average";
  for (const char* kind :
       {"triple", "rule", "ngram-1", "ngram-2", "ngram-3", "ngram-4"}) {
    ObjectScoreTable t;
    t.kind = kind;
    m.tables[kind] = t;
    m.scaling.weights[kind] = 0.0;
  }
  m.scaling.weights["speech"] = 1.0;
  m.scaling.weights["flag:num_mismatch"] = 0.0;
  m.scaling.weights["flag:det_noun_mismatch"] = 0.0;
  return m;
}

Utterance utt(const std::string& id,
              const std::vector<std::pair<std::string, double>>& hyps,
              const std::string& ref = "", bool repair = false) {
  Utterance u;
  u.id = id;
  int rank = 0;
  for (const auto& [words, score] : hyps) {
    Hypothesis h;
    h.words = split_words(words);
    h.acoustic_score = score;
    h.rank = ++rank;
    u.nbest.push_back(std::move(h));
  }
  if (!ref.empty()) {
    u.reference = split_words(ref);
    u.has_reference = true;
    u.actual_repair = repair;
  }
  return u;
}

} // namespace

TEST_CASE("config text round trips and rejects unknown keys") {
  Config d;
  CHECK(d.repair_enabled);
  CHECK(d.nbest_n == 5);
  CHECK(d.fallback_general);

  Config c = parse_config_text("# comment\n"
                               "nbest_n = 10\n"
                               "repair_penalty = 7.5\n"
                               "fallback_general = false  # trailing\n"
                               "combine = sum\n");
  CHECK(c.nbest_n == 10);
  CHECK(c.repair_penalty == 7.5);
  CHECK_FALSE(c.fallback_general);
  CHECK(c.combine == "sum");
  CHECK(c.repair_span_cap == 8); // untouched keys keep defaults

  Config back = parse_config_text(serialize_config(c));
  CHECK(serialize_config(back) == serialize_config(c));

  CHECK_THROWS_AS(parse_config_text("bogus_key = 1\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_config_text("nbest_n = soon\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_config_text("nbest_n\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_config_text("combine = mean\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_config_text("nbest_n = 0\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_config_text("max_ngram = 9\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_config_text("alpha = 0\n"), std::runtime_error);
}

TEST_CASE("n-best text parses grouped, truncated, validated") {
  const std::string text = "u1\t1\t-100.5\tshow the flights\n"
                           "u2\t1\t-90\tboston flies\n"
                           "u1\t2\t-104\tshow the flight\n"
                           "u1\t3\t-110\tshow a flight\n";
  auto utts = parse_nbest_text(text, 5);
  REQUIRE(utts.size() == 2);
  CHECK(utts[0].id == "u1");
  REQUIRE(utts[0].nbest.size() == 3);
  CHECK(utts[0].nbest[0].rank == 1);
  CHECK(utts[0].nbest[0].acoustic_score == -100.5);
  CHECK(utts[0].nbest[1].words ==
        std::vector<std::string>{"show", "the", "flight"});
  CHECK(utts[1].id == "u2");
  REQUIRE(utts[1].nbest.size() == 1);

  // The list size cap drops deeper hypotheses.
  auto capped = parse_nbest_text(text, 2);
  CHECK(capped[0].nbest.size() == 2);

  // Serialization reproduces the grouped, rank-ordered form.
  auto again = parse_nbest_text(serialize_nbest(utts), 5);
  CHECK(serialize_nbest(again) == serialize_nbest(utts));

  CHECK_THROWS_AS(parse_nbest_text("u1\t1\t-100\n", 5), std::runtime_error);
  CHECK_THROWS_AS(parse_nbest_text("u1\t0\t-100\thi there\n", 5),
                  std::runtime_error);
  CHECK_THROWS_AS(parse_nbest_text("u1\t1\t-100\t\n", 5), std::runtime_error);
  CHECK_THROWS_AS(
      parse_nbest_text("u1\t1\t-100\ta b\nu1\t1\t-99\tc d\n", 5),
      std::runtime_error);
  CHECK_THROWS_AS(parse_nbest_text("u1\t9\t-100\ta b\n", 5),
                  std::runtime_error); // only hypothesis is beyond the cap
}

TEST_CASE("references attach by id with optional repair flag") {
  auto utts = parse_nbest_text("u1\t1\t-1\ta b\nu2\t1\t-1\tc d\n", 5);
  attach_references(utts, "u2\tshow the flights\trepair=1\n"
                          "unknown\tignored words\n"
                          "u1\tboston flies\n");
  CHECK(utts[0].has_reference);
  CHECK(utts[0].reference == std::vector<std::string>{"boston", "flies"});
  CHECK_FALSE(utts[0].actual_repair);
  CHECK(utts[1].actual_repair);

  std::string round = serialize_references(utts);
  CHECK(round == "u1\tboston flies\nu2\tshow the flights\trepair=1\n");

  auto utts2 = parse_nbest_text("u1\t1\t-1\ta b\n", 5);
  CHECK_THROWS_AS(attach_references(utts2, "u1\tx y\nu1\tx z\n"),
                  std::runtime_error);
  CHECK_THROWS_AS(attach_references(utts2, "u1\tx y\tbogus=1\n"),
                  std::runtime_error);
  CHECK_THROWS_AS(attach_references(utts2, "u1\n"), std::runtime_error);
}

TEST_CASE("selection falls through to the first parsable hypothesis") {
  GrammarBundle b = general_bundle();
  PreferenceModel m = speech_only_model();
  Config cfg;

  Utterance u = utt("t1", {{"flights the show", -100.0},
                           {"show the flights", -104.0}});
  SelectionResult r = run_utterance(u, b, m, cfg);
  REQUIRE(r.found);
  CHECK(r.breakdown.size() == 1);
  CHECK(r.breakdown[r.chosen].rank == 2);
  CHECK(r.breakdown[r.chosen].words == "show the flights");
  CHECK_FALSE(r.breakdown[r.chosen].repaired);

  // An ambiguous winner contributes one candidate per analysis.
  Utterance amb = utt("t1b", {{"show the flights to boston", -100.0}});
  SelectionResult ra = run_utterance(amb, b, m, cfg);
  CHECK(ra.breakdown.size() == 2);
}

TEST_CASE("repaired variant rescues an unparsable verbatim hypothesis") {
  GrammarBundle b = general_bundle();
  PreferenceModel m = speech_only_model();
  Config cfg;

  Utterance u = utt("t2", {{"list list flights", -100.0}});
  SelectionResult r = run_utterance(u, b, m, cfg);
  REQUIRE(r.found);
  CHECK(r.breakdown[r.chosen].repaired);
  CHECK(r.breakdown[r.chosen].words == "list flights");
  CHECK(r.hyps.size() == 2); // original plus repaired variant
  CHECK(r.hyps[0].analyses.empty());

  // With repair disabled the utterance has no analysis at all.
  Config off = cfg;
  off.repair_enabled = false;
  SelectionResult r2 = run_utterance(u, b, m, off);
  CHECK_FALSE(r2.found);
  CHECK(r2.to_text() == "utterance t2\noutcome no-analysis-found\n");
}

TEST_CASE("repair stage is inert when nothing is detected") {
  GrammarBundle b = general_bundle();
  PreferenceModel m = speech_only_model();
  Config on;
  Config off;
  off.repair_enabled = false;

  Utterance u = utt("t3", {{"show the flights to boston", -100.0},
                           {"show the flight to boston", -103.0}});
  CHECK(run_utterance(u, b, m, on).to_text() ==
        run_utterance(u, b, m, off).to_text());
}

TEST_CASE("selection output is deterministic") {
  GrammarBundle b = general_bundle();
  PreferenceModel m = speech_only_model();
  Config cfg;
  Utterance u = utt("t4", {{"show the flights to boston", -100.0},
                           {"list list flights", -105.0}});
  std::string a = run_utterance(u, b, m, cfg).to_text();
  std::string c = run_utterance(u, b, m, cfg).to_text();
  CHECK(a == c);
  CHECK(a.find("outcome selected") != std::string::npos);
  CHECK(a.find("candidate 0 *") != std::string::npos);
}

TEST_CASE("unknown words leave no analysis") {
  GrammarBundle b = general_bundle();
  PreferenceModel m = speech_only_model();
  Config cfg;
  Utterance u = utt("t5", {{"show the zorgs", -100.0}});
  SelectionResult r = run_utterance(u, b, m, cfg);
  CHECK_FALSE(r.found);
}

TEST_CASE("evaluation counts the four outcomes on a clean corpus") {
  GrammarBundle b = general_bundle();
  PreferenceModel m = speech_only_model();
  Config cfg;
  std::vector<Utterance> corpus = {
      utt("e1", {{"show the flights", -100}, {"show the flight", -104}},
          "show the flights"),
      utt("e2", {{"the flight leaves", -99}, {"the flights leave", -102}},
          "the flight leaves"),
      utt("e3", {{"boston flies", -98}, {"boston fly", -101}},
          "boston flies"),
  };
  EvalReport rep = evaluate(corpus, b, m, cfg);
  CHECK(rep.total == 3);
  CHECK(rep.combined_correct == 3);
  CHECK(rep.speech_only_correct == 3);
  CHECK(rep.first_parsable_correct == 3);
  CHECK(rep.oracle_present == 3);
  CHECK(rep.no_analysis == 0);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 2; ++c) CHECK(rep.matrix[r][c] == 0);

  std::string text = rep.to_text();
  CHECK(text.find("combined          3 (100.0%)") != std::string::npos);
  std::string record = rep.to_record();
  CHECK(record.substr(0, 5) == "eval\t");

  std::vector<Utterance> bad = {utt("e4", {{"boston flies", -1}})};
  CHECK_THROWS_AS(evaluate(bad, b, m, cfg), std::runtime_error);
}

TEST_CASE("repair outcome matrix separates actual repairs from false alarms") {
  GrammarBundle b = general_bundle();
  PreferenceModel m = speech_only_model();
  Config cfg;

  // Unparsable verbatim hypothesis whose repaired variant is the reference:
  // the selector must pick the repaired variant (right repair).
  Utterance actual = utt("m1", {{"show the show the flights", -100}},
                         "show the flights", true);
  EvalReport r1 = evaluate({actual}, b, m, cfg);
  CHECK(r1.combined_correct == 1);
  CHECK(r1.matrix[1][0] == 1);
  CHECK(r1.matrix[1][1] == 0);

  // Same selection, but the transcription says the speech was fluent.
  Utterance alarm = utt("m2", {{"show the show the flights", -100}},
                        "show the flights", false);
  EvalReport r2 = evaluate({alarm}, b, m, cfg);
  CHECK(r2.matrix[1][1] == 1);
  CHECK(r2.matrix[1][0] == 0);

  // Detector fires on a parsable sentence (noun-noun compound repeats the
  // root); the original out-scores the penalized repaired variant, so the
  // non-repair row is hit.
  Utterance keep = utt("m3", {{"show the flight flight", -100}},
                       "show the flight flight", false);
  EvalReport r3 = evaluate({keep}, b, m, cfg);
  CHECK(r3.combined_correct == 1);
  CHECK(r3.matrix[3][1] == 1);
  long fired = 0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 2; ++c) fired += r3.matrix[r][c];
  CHECK(fired == 1);
}

TEST_CASE("training labels candidates by the reference and is reproducible") {
  GrammarBundle b = general_bundle();
  Config cfg;
  // The scaling fit needs at least as many candidate analyses as there are
  // score functions, so the corpus carries several parsable hypotheses.
  std::vector<Utterance> corpus = {
      utt("tr1",
          {{"show the flight", -100},
           {"show the flights", -104},
           {"show a flight", -108}},
          "show the flights"),
      utt("tr2",
          {{"the flight leaves", -99},
           {"the flights leave", -102},
           {"the fares leave", -105}},
          "the flight leaves"),
      utt("tr3",
          {{"list the fare", -98}, {"list the fares", -101},
           {"list a fare", -104}},
          "list the fares"),
      utt("tr4",
          {{"show the flights to boston", -100},
           {"show the flight to boston", -103}},
          "show the flights to boston"),
      utt("tr5", {{"boston flies", -95}, {"denver flies", -99}},
          "boston flies"),
  };
  TrainResult tr = train_pipeline(corpus, b, cfg);
  CHECK(tr.utterances == 5);
  CHECK(tr.with_gold == 5);
  CHECK(tr.phase1_points >= 12);
  CHECK(tr.model.tables.size() == 6);
  CHECK(tr.model.tables.count("triple") == 1);
  CHECK(tr.model.scaling.phase == 2);
  REQUIRE(tr.model.scaling.objectives.size() >= 2);
  for (std::size_t i = 1; i < tr.model.scaling.objectives.size(); ++i)
    CHECK(tr.model.scaling.objectives[i] >=
          tr.model.scaling.objectives[i - 1]);
  CHECK(tr.log.find("phase1") != std::string::npos);

  TrainResult tr2 = train_pipeline(corpus, b, cfg);
  CHECK(serialize_model(tr.model) == serialize_model(tr2.model));

  // The trained model can only help: the reference is still reachable.
  EvalReport rep = evaluate(corpus, b, tr.model, cfg);
  CHECK(rep.oracle_present == 5);
  CHECK(rep.combined_correct >= rep.no_analysis); // smoke: report is coherent

  // A corpus where every candidate matches the reference has no bad class.
  std::vector<Utterance> allgood = {
      utt("tg", {{"boston flies", -90}}, "boston flies")};
  CHECK_THROWS_AS(train_pipeline(allgood, b, cfg), std::runtime_error);
}

TEST_CASE("reference-only scoring counts gold objects and nothing else") {
  GrammarBundle b = general_bundle();
  Config cfg;
  std::vector<Utterance> corpus = {
      utt("s1",
          {{"show the flight", -100},
           {"show the flights", -104},
           {"show a flight", -108}},
          "show the flights"),
      utt("s2",
          {{"the flight leaves", -99},
           {"the flights leave", -102},
           {"the fares leave", -105}},
          "the flight leaves"),
      utt("s3",
          {{"show the flights to boston", -100},
           {"show the flight to boston", -103}},
          "show the flights to boston"),
  };
  TrainResult tr = train_pipeline(corpus, b, cfg, true);
  bool any = false;
  for (const auto& [kind, table] : tr.model.tables)
    for (const auto& [obj, e] : table.entries) {
      CHECK(e.bad == 0);
      CHECK(e.good > 0);
      any = true;
    }
  CHECK(any);
  TrainResult tr2 = train_pipeline(corpus, b, cfg, true);
  CHECK(serialize_model(tr.model) == serialize_model(tr2.model));

  std::vector<Utterance> unparsable = {
      utt("s3", {{"show the flights", -100}}, "zorg zorg")};
  CHECK_THROWS_AS(train_pipeline(unparsable, b, cfg, true),
                  std::runtime_error);
}

TEST_CASE("grammar specialization over a treebank reports coverage") {
  const Grammar& g = domain_grammar();
  const Lexicon& lex = domain_lexicon();
  std::vector<ParseTree> treebank;
  for (const char* s :
       {"show the flights", "list the fares", "show the fares",
        "boston flies", "the flight leaves"}) {
    auto trees = parse_chart(g, lex, split_words(s));
    REQUIRE_FALSE(trees.empty());
    treebank.push_back(trees.front());
  }
  Config cfg;
  Grammar sg;
  LRTable table;
  SpecializeReport rep = specialize_corpus(g, lex, treebank, cfg, sg, table);
  CHECK(rep.treebank_trees == 5);
  CHECK(rep.general_rules == static_cast<int>(g.rules.size()));
  CHECK(rep.specialized_rules > 0);
  CHECK(rep.covered == 5);
  CHECK(rep.lr_states > 0);
  CHECK(rep.mean_lr_parses <= rep.mean_chart_parses);
  CHECK(rep.to_text().find("treebank coverage  5/5") != std::string::npos);

  // The serialized artifacts reload into a working backbone parser.
  Grammar sg2 = Grammar::parse(sg.serialize());
  LRTable table2 = compile_lr(sg2);
  auto back = parse_lr(sg2, table2, lex, split_words("show the flights"));
  CHECK_FALSE(back.empty());
  std::string ts = table.serialize();
  CHECK(ts.substr(0, 11) == "lr-table 1\n");
  CHECK(ts.find("states " + std::to_string(rep.lr_states)) !=
        std::string::npos);
  CHECK(ts.find("accept") != std::string::npos);

  // A higher cutoff keeps only structures seen often enough.
  Config strict = cfg;
  strict.freq_threshold = 2;
  Grammar sg3;
  LRTable t3;
  SpecializeReport rep3 = specialize_corpus(g, lex, treebank, strict, sg3, t3);
  CHECK(rep3.specialized_rules < rep.specialized_rules);

  CHECK_THROWS_AS(specialize_corpus(g, lex, {}, cfg, sg, table),
                  std::runtime_error);
}

TEST_CASE("sampled sentences are distinct, grammatical, reproducible") {
  const Grammar& g = domain_grammar();
  const Lexicon& lex = domain_lexicon();
  auto sents = sample_sentences(g, lex, 20, 5, 10);
  REQUIRE(sents.size() == 20);
  std::set<std::string> seen;
  for (const auto& s : sents) {
    CHECK(s.size() >= 2);
    CHECK(s.size() <= 10);
    std::string key;
    for (const auto& w : s) { key += w; key += ' '; }
    CHECK(seen.insert(key).second);
    CHECK_FALSE(parse_chart(g, lex, s).empty());
  }
  auto again = sample_sentences(g, lex, 20, 5, 10);
  CHECK(again == sents);
  auto other = sample_sentences(g, lex, 20, 6, 10);
  CHECK(other != sents);

  auto bank = sample_treebank(g, lex, sents);
  CHECK(bank.size() == 20);
  for (std::size_t i = 0; i < bank.size(); ++i)
    CHECK(tree_yield(bank[i]) == sents[i]);
}

TEST_CASE("generated corpora are reproducible and keep the reference reachable") {
  const Grammar& g = domain_grammar();
  const Lexicon& lex = domain_lexicon();
  GenOptions opt;
  opt.utterances = 15;
  opt.nbest = 4;
  opt.seed = 11;
  opt.repair_rate = 0.0;
  opt.absent_rate = 0.0;
  auto corpus = generate_corpus(g, lex, opt);
  REQUIRE(corpus.size() == 15);
  auto corpus2 = generate_corpus(g, lex, opt);
  CHECK(serialize_nbest(corpus) == serialize_nbest(corpus2));
  CHECK(serialize_references(corpus) == serialize_references(corpus2));

  for (const auto& u : corpus) {
    REQUIRE(u.nbest.size() == 4);
    CHECK(u.has_reference);
    CHECK_FALSE(u.actual_repair);
    for (std::size_t i = 0; i < u.nbest.size(); ++i) {
      CHECK(u.nbest[i].rank == static_cast<int>(i) + 1);
      if (i) CHECK(u.nbest[i].acoustic_score < u.nbest[i - 1].acoustic_score);
      // Corruptions never change the word count.
      CHECK(u.nbest[i].words.size() == u.reference.size());
    }
    bool verbatim = false;
    for (const auto& h : u.nbest)
      if (h.words == u.reference) verbatim = true;
    CHECK(verbatim);
    // Without injected repetitions a repaired variant is strictly shorter
    // than the reference, so a detected repair can never reproduce it.
    for (const auto& h : expand_hypotheses(u.nbest, 10.0, lex))
      if (h.repaired) {
        CHECK(h.words.size() < u.reference.size());
        CHECK(h.words != u.reference);
      }
  }
}

TEST_CASE("injected repetitions are recoverable by the repair stage") {
  const Grammar& g = domain_grammar();
  const Lexicon& lex = domain_lexicon();
  GenOptions opt;
  opt.utterances = 12;
  opt.nbest = 3;
  opt.seed = 23;
  opt.repair_rate = 1.0;
  opt.absent_rate = 0.0;
  auto corpus = generate_corpus(g, lex, opt);
  int injected = 0;
  for (const auto& u : corpus) {
    if (!u.actual_repair) continue; // detection-noisy sentences are skipped
    ++injected;
    bool recovered = false;
    for (const auto& h : expand_hypotheses(u.nbest, 10.0, lex))
      if (h.words == u.reference) recovered = true;
    CHECK(recovered);
  }
  CHECK(injected >= 1);
}
