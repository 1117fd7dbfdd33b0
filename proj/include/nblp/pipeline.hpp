#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "nblp/analysis.hpp"
#include "nblp/preference.hpp"
#include "nblp/repair.hpp"
#include "nblp/specialize.hpp"

namespace nblp {

// Every tunable in one place; loaded from a "key = value" text file with
// CLI overrides applied on top. Unknown keys are rejected.
struct Config {
  bool repair_enabled = true;
  double repair_penalty = 10.0;
  int repair_min_score = 1;
  int repair_span_cap = 8;
  int nbest_n = 5;
  int freq_threshold = 1;
  bool fallback_general = true;
  double alpha = 0.5;
  std::string combine = "average";
  int max_ngram = 4;
  double ridge_lambda = 1e-9;
  int max_sweeps = 20;
  double step_delta = 0.05;
  double word_weight = 0.5;
  double bracket_weight = 0.5;
};

// Keys present in the text override the matching fields of base; the
// evaluation command passes a base with the larger default list size.
Config parse_config_text(const std::string& text, Config base = Config{});
Config load_config(const std::string& path, Config base = Config{});
std::string serialize_config(const Config& c);

struct Utterance {
  std::string id;
  std::vector<Hypothesis> nbest;      // rank ascending, at most the configured N
  std::vector<std::string> reference; // gold transcription of the intended words
  bool has_reference = false;
  bool actual_repair = false;         // gold: the speech contained a disfluency
};

// One hypothesis per line: id<TAB>rank<TAB>acoustic<TAB>words. Lines group
// by id in order of first appearance; ranks are unique per utterance and
// read in ascending order; hypotheses beyond max_n are dropped.
std::vector<Utterance> parse_nbest_text(const std::string& text, int max_n);
std::string serialize_nbest(const std::vector<Utterance>& utts);

// One reference per line: id<TAB>words[<TAB>key=value]... Known key:
// repair (0|1). References for unknown ids are ignored; duplicates are an
// error.
void attach_references(std::vector<Utterance>& utts,
                       const std::string& refs_text);
std::string serialize_references(const std::vector<Utterance>& utts);

struct GrammarBundle {
  Grammar general;
  Lexicon lexicon;
  Grammar specialized; // empty unless has_specialized
  LRTable table;       // recompiled from the specialized grammar on load
  bool has_specialized = false;
};

// Pass an empty specialized_path to run on the general grammar alone.
GrammarBundle load_bundle(const std::string& grammar_path,
                          const std::string& lexicon_path,
                          const std::string& specialized_path);

struct AnalyzedHypothesis {
  Hypothesis hyp;
  double speech = 0.0;            // normalized speech-function value
  bool from_fallback = false;     // analyses came from the general chart
  std::vector<Analysis> analyses; // general-grammar analyses
};

// Repair expansion, parsing (specialized first, chart fallback when
// configured), and feature extraction for one utterance. Order: originals
// in rank order, then repaired variants.
std::vector<AnalyzedHypothesis> analyze_utterance(const Utterance& utt,
                                                  const GrammarBundle& bundle,
                                                  const Config& cfg);

struct CandidateScore {
  std::size_t hyp_index = 0; // into the analyzed-hypothesis list
  int rank = 0;              // source rank; 0 for repaired variants
  bool repaired = false;
  std::string words;
  std::string signature; // derivation signature of the analysis
  PreferenceVector vec;
  double total = 0.0;
};

struct SelectionResult {
  std::string utt_id;
  bool found = false;    // false: no hypothesis got an analysis
  std::size_t chosen = 0; // into breakdown, valid when found
  std::vector<CandidateScore> breakdown;
  std::vector<AnalyzedHypothesis> hyps;

  std::string to_text() const;
};

SelectionResult run_utterance(const Utterance& utt, const GrammarBundle& bundle,
                              const PreferenceModel& model, const Config& cfg);

struct EvalReport {
  int total = 0;
  int combined_correct = 0;
  int speech_only_correct = 0;
  int first_parsable_correct = 0;
  int oracle_present = 0; // reference somewhere in the expanded list
  int no_analysis = 0;
  // Utterances where the repair detector fired, by what the selector did.
  // Rows: no analysis / right repair / wrong repair / non-repair chosen.
  // Columns: utterance really contained a repair / false alarm.
  long matrix[4][2] = {};

  std::string to_text() const;
  std::string to_record() const; // one tab-separated machine-readable line
};

EvalReport evaluate(const std::vector<Utterance>& corpus,
                    const GrammarBundle& bundle, const PreferenceModel& model,
                    const Config& cfg);

struct TrainResult {
  PreferenceModel model;
  int utterances = 0;
  int with_gold = 0;     // utterances whose reference words got an analysis
  int phase1_points = 0;
  std::string log;       // objective trajectory and table sizes
};

// Object tables from good (= matches the reference transcription) versus
// bad analyses of all expanded hypotheses, then the two scaling phases.
// With slt0_scoring the tables instead count only reference-parse objects
// (frequency-style scoring, no use of the N-best lists).
TrainResult train_pipeline(const std::vector<Utterance>& corpus,
                           const GrammarBundle& bundle, const Config& cfg,
                           bool slt0_scoring = false);

struct SpecializeReport {
  int treebank_trees = 0;
  int general_rules = 0;
  int specialized_rules = 0;
  int lr_states = 0;
  int lr_conflicts = 0;
  int covered = 0;             // treebank sentences the backbone parser recovers
  double mean_lr_parses = 0.0; // ambiguity over the treebank sentences
  double mean_chart_parses = 0.0;

  std::string to_text() const;
};

// Builds the specialized grammar and table and measures treebank coverage.
// Writes nothing; callers persist sg_out.serialize() / table_out.serialize().
SpecializeReport specialize_corpus(const Grammar& general, const Lexicon& lex,
                                   const std::vector<ParseTree>& treebank,
                                   const Config& cfg, Grammar& sg_out,
                                   LRTable& table_out);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace nblp
