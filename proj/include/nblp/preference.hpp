#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nblp/analysis.hpp"
#include "nblp/repair.hpp"

namespace nblp {

// Smoothed good/bad counts for one kind of analysis object ("triple", "rule",
// or "ngram-1".."ngram-4"). score = log((good + alpha) / (good + bad + 2*alpha));
// an object absent from the table scores log(1/2) regardless of alpha.
struct ObjectScoreTable {
  struct Entry {
    long long good = 0;
    long long bad = 0;
    double score = 0.0;
  };

  std::string kind;
  double alpha = 0.5;
  std::map<std::string, Entry> entries;

  // Rederives every stored score from its counts.
  void recompute();
  double score_of(const std::string& object) const;
};

enum class CombineMode { Sum, Average };

// "sum" or "average"; anything else throws.
CombineMode combine_mode_from(const std::string& name);
const char* to_string(CombineMode mode);

// Score for a bag of same-kind objects. Empty bag: 0 under Sum, log(1/2)
// under Average. Multiplicity counts; the caller is responsible for handing
// in objects of the table's kind.
double combining_score(const std::multiset<std::string>& objects,
                       const ObjectScoreTable& table, CombineMode mode);

// One analysis reduced to per-function scores, keyed by function name.
using PreferenceVector = std::map<std::string, double>;

struct ScalingFactors {
  std::map<std::string, double> weights;
  int phase = 0;                  // 0 untrained, 1 linear fit, 2 hill climb
  int sweeps = 0;                 // hill-climb sweeps executed
  std::vector<double> objectives; // phase 1: final residual; phase 2: top-1
                                  // count before training then after each sweep
};

// Weighted sum over matching key sets; a key mismatch is a caller bug.
double total_score(const PreferenceVector& v, const ScalingFactors& w);

// Accumulates good/bad occurrence counts per object. Requires at least one
// example of each label; multiplicity within a bag counts.
ObjectScoreTable train_object_scores(
    const std::string& kind,
    const std::vector<std::pair<std::multiset<std::string>, bool>>& labeled,
    double alpha = 0.5);

// Acoustic score for recognizer hypotheses; repaired variants get the list
// minimum less the penalty instead.
double speech_function(const Hypothesis& h, double list_min_acoustic,
                       double penalty);

// Subtracts the maximum so the best hypothesis of an utterance scores 0 and
// the rest are comparable across utterances.
std::vector<double> normalize_speech_scores(std::vector<double> scores);

// The flag names of the default registry, sorted.
std::vector<std::string> default_flag_names();

// Full per-function score vector for one analysis. Keys: "speech", one per
// table kind, and "flag:<name>" for each structural flag name. An n-gram
// order missing from the analysis counts as an empty bag.
PreferenceVector build_vector(const Analysis& a, double speech_score,
                              const std::map<std::string, ObjectScoreTable>& tables,
                              CombineMode mode,
                              const std::vector<std::string>& flag_names =
                                  default_flag_names());

// 1 - edit_distance / max(len); both empty -> 1.
double word_similarity(const std::vector<std::string>& a,
                       const std::vector<std::string>& b);

// Harmonic mean of precision and recall over the trees' labeled constituent
// spans (see tree_brackets). Two leaf-only trees compare equal (1); 0 when
// exactly one side has no internal spans.
double bracket_f1(const ParseTree& candidate, const ParseTree& reference);

// Blend of word similarity and bracket F1; 1 exactly when the word strings
// match and the span multisets match.
double similarity(const Analysis& candidate, const Analysis& reference,
                  double word_weight = 0.5, double bracket_weight = 0.5);

// Least-squares fit of weights to per-analysis target values over matching
// key sets. Needs at least as many points as functions; on a rank-deficient
// normal system falls back to ridge regularization with the given lambda, or
// throws when lambda <= 0. objectives holds the final residual.
ScalingFactors train_scaling_phase1(
    const std::vector<std::pair<PreferenceVector, double>>& data,
    double ridge_lambda = 1e-9);

struct Phase2Options {
  int max_sweeps = 20;
  double step_delta = 0.05;
};

// One training sentence: all candidate vectors, one marked correct.
struct RankingExample {
  std::vector<PreferenceVector> candidates;
  std::size_t correct = 0;
};

// Coordinate hill climbing on the count of examples whose correct candidate
// is the strict top scorer. Per coordinate the trial values are w*2, w*0.5,
// w+delta, w-delta in that order; a trial is kept only when the count
// strictly increases, ties going to the smaller weight change and then to
// the earlier trial. Stops after a sweep with no accepted step or at
// max_sweeps. Never returns a worse objective than it started with.
ScalingFactors train_scaling_phase2(const ScalingFactors& w0,
                                    const std::vector<RankingExample>& data,
                                    const Phase2Options& opt = {});

// Count of examples whose correct candidate strictly outscores every other.
int ranking_objective(const std::vector<RankingExample>& data,
                      const ScalingFactors& w);

struct SelectionInput {
  PreferenceVector vec;
  bool repaired = false;
  double acoustic = 0.0;
};

// Index of the highest-scoring candidate. Equal totals break toward
// unrepaired hypotheses, then the better acoustic score, then input order.
std::size_t select_best(const std::vector<SelectionInput>& candidates,
                        const ScalingFactors& w);

// Everything the scorer needs at run time, in one diff-friendly text file.
struct PreferenceModel {
  std::string combine = "average";
  std::map<std::string, ObjectScoreTable> tables; // keyed by kind
  ScalingFactors scaling;
};

std::string serialize_model(const PreferenceModel& m);
PreferenceModel parse_model(const std::string& text);

} // namespace nblp
