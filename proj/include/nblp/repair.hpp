#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nblp/lexicon.hpp"

namespace nblp {

struct Span {
  int start = 0; // inclusive
  int end = 0;   // exclusive

  int length() const { return end - start; }
  bool operator==(const Span& o) const {
    return start == o.start && end == o.end;
  }
};

struct RepairCandidate {
  Span reparandum;   // material deleted when the repair is applied
  Span repair;       // replacement material, kept
  int score = 0;     // alignment + intervening match score
  int deleted_words = 0;

  bool overlaps(const RepairCandidate& o) const {
    return reparandum.start < o.repair.end && o.reparandum.start < repair.end;
  }
};

struct Hypothesis {
  std::vector<std::string> words;
  double acoustic_score = 0.0;
  int rank = 0;           // recognizer rank, 1 = best; 0 for repaired variants
  bool repaired = false;
  int from_rank = 0;      // source hypothesis rank when repaired
  std::vector<RepairCandidate> applied;
};

struct RepairOptions {
  int span_cap = 8;    // maximum tokens in either repetition sequence
  int min_score = 1;   // candidates below this total are dropped
};

struct CandidateRegion {
  Span seq1;
  Span seq2;
};

enum class MatchDirection { Forward, Backward };

struct Alignment {
  int score = 0;
  std::vector<std::pair<int, int>> matches; // index pairs into seq1/seq2
};

struct InterveningMatch {
  int score = 0;
  int continuation_used = 0; // continuation tokens consumed at the optimum
};

// Index pairs (i, j), i < j, where words[i] and words[j] share a root and
// neither is a number.
std::set<std::pair<int, int>> repeated_root_pairs(
    const std::vector<std::string>& words, const Lexicon& lex);

// Combine root pairs into candidate (seq1, seq2) regions. Regions whose two
// sequences are each a single common skippable word with intervening material
// between them are discarded.
std::vector<CandidateRegion> candidate_regions(
    const std::set<std::pair<int, int>>& pairs,
    const std::vector<std::string>& words, const Lexicon& lex,
    const RepairOptions& opts = {});

// Left-to-right match of two sequences: +2 per shared-root pair, -1 per
// skipped word in either sequence. Monotone; ties resolved toward leftmost
// matches.
Alignment align_sequences(const std::vector<std::string>& seq1,
                          const std::vector<std::string>& seq2,
                          const Lexicon& lex);

// Consume all intervening material against a continuation context. Skips
// cost -1 except a forward-direction skip of a repair marker, which scores
// +1. Words align, at no cost, only when they share a major category. For
// Backward the continuation must be given outward from the gap (reversed
// sentence order).
InterveningMatch match_intervening(MatchDirection direction,
                                   const std::vector<std::string>& intervening,
                                   const std::vector<std::string>& continuation,
                                   const Lexicon& lex);

// Full detection: best-scoring non-overlapping candidates, position order.
std::vector<RepairCandidate> detect_repairs(
    const std::vector<std::string>& words, const Lexicon& lex,
    const RepairOptions& opts = {});

// Delete the reparanda of non-overlapping candidates.
std::vector<std::string> apply_candidates(
    const std::vector<std::string>& words,
    const std::vector<RepairCandidate>& candidates);

// Append one corrected variant per hypothesis with detected repairs. Originals
// are kept unchanged and come first; every repaired variant gets the list
// minimum acoustic score less the penalty.
std::vector<Hypothesis> expand_hypotheses(const std::vector<Hypothesis>& nbest,
                                          double penalty, const Lexicon& lex,
                                          const RepairOptions& opts = {});

} // namespace nblp
