#include "nblp/repair.hpp"

#include <algorithm>
#include <limits>
#include <tuple>

namespace nblp {

namespace {

constexpr int kNegInf = std::numeric_limits<int>::min() / 4;

std::set<std::string> root_set(const Lexicon& lex, const std::string& word) {
  std::set<std::string> out;
  for (const auto& a : lex.analyze_root(word)) out.insert(a.root);
  return out;
}

std::set<MajorCat> cat_set(const Lexicon& lex, const std::string& word) {
  std::set<MajorCat> out;
  for (const auto& a : lex.analyze_root(word)) out.insert(a.major_cat);
  return out;
}

bool intersects(const std::set<std::string>& a, const std::set<std::string>& b) {
  for (const auto& x : a)
    if (b.count(x)) return true;
  return false;
}

bool shares_root(const Lexicon& lex, const std::string& a,
                 const std::string& b) {
  return intersects(root_set(lex, a), root_set(lex, b));
}

bool shares_cat(const Lexicon& lex, const std::string& a,
                const std::string& b) {
  auto ca = cat_set(lex, a);
  for (auto c : cat_set(lex, b))
    if (ca.count(c)) return true;
  return false;
}

std::vector<std::string> slice(const std::vector<std::string>& words,
                               const Span& s) {
  return {words.begin() + s.start, words.begin() + s.end};
}

} // namespace

std::set<std::pair<int, int>> repeated_root_pairs(
    const std::vector<std::string>& words, const Lexicon& lex) {
  std::set<std::pair<int, int>> pairs;
  const int n = static_cast<int>(words.size());
  for (int i = 0; i < n; ++i) {
    if (lex.is_number(words[i])) continue;
    for (int j = i + 1; j < n; ++j) {
      if (lex.is_number(words[j])) continue;
      if (shares_root(lex, words[i], words[j])) pairs.insert({i, j});
    }
  }
  return pairs;
}

std::vector<CandidateRegion> candidate_regions(
    const std::set<std::pair<int, int>>& pairs,
    const std::vector<std::string>& words, const Lexicon& lex,
    const RepairOptions& opts) {
  std::set<std::tuple<int, int, int, int>> seen;
  for (const auto& start : pairs) {
    for (const auto& end : pairs) {
      const int i1 = start.first, j1 = start.second;
      const int i2 = end.first, j2 = end.second;
      if (i2 < i1 || j2 < j1) continue;
      if (i2 >= j1) continue; // sequences must not overlap
      if (i2 + 1 - i1 > opts.span_cap || j2 + 1 - j1 > opts.span_cap) continue;
      // A lone common word repeated at a distance is no evidence of a repair.
      if (i1 == i2 && j1 == j2 && i2 + 1 < j1 &&
          lex.is_common_skippable(words[i1]) &&
          lex.is_common_skippable(words[j1]))
        continue;
      seen.insert({i1, i2 + 1, j1, j2 + 1});
    }
  }
  std::vector<CandidateRegion> out;
  for (const auto& [a, b, c, d] : seen)
    out.push_back({Span{a, b}, Span{c, d}});
  return out;
}

Alignment align_sequences(const std::vector<std::string>& seq1,
                          const std::vector<std::string>& seq2,
                          const Lexicon& lex) {
  const int n1 = static_cast<int>(seq1.size());
  const int n2 = static_cast<int>(seq2.size());
  std::vector<std::vector<int>> dp(n1 + 1, std::vector<int>(n2 + 1, 0));
  for (int i = 0; i <= n1; ++i) dp[i][n2] = -(n1 - i);
  for (int j = 0; j <= n2; ++j) dp[n1][j] = -(n2 - j);
  for (int i = n1 - 1; i >= 0; --i) {
    for (int j = n2 - 1; j >= 0; --j) {
      int best = std::max(dp[i + 1][j], dp[i][j + 1]) - 1;
      if (shares_root(lex, seq1[i], seq2[j]))
        best = std::max(best, dp[i + 1][j + 1] + 2);
      dp[i][j] = best;
    }
  }
  Alignment out;
  out.score = dp[0][0];
  int i = 0, j = 0;
  while (i < n1 && j < n2) {
    if (shares_root(lex, seq1[i], seq2[j]) &&
        dp[i][j] == dp[i + 1][j + 1] + 2) {
      out.matches.push_back({i, j});
      ++i, ++j;
    } else if (dp[i][j] == dp[i + 1][j] - 1) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

InterveningMatch match_intervening(MatchDirection direction,
                                   const std::vector<std::string>& intervening,
                                   const std::vector<std::string>& continuation,
                                   const Lexicon& lex) {
  std::vector<std::string> iv = intervening;
  if (direction == MatchDirection::Backward)
    std::reverse(iv.begin(), iv.end());
  const int ni = static_cast<int>(iv.size());
  const int nc = static_cast<int>(continuation.size());
  const bool forward = direction == MatchDirection::Forward;

  auto skip_cost = [&](const std::string& w) {
    return forward && lex.is_repair_marker(w) ? 1 : -1;
  };

  // dp[i][j]: all of iv[i:] consumed against continuation[j:]; leftover
  // continuation is free.
  std::vector<std::vector<int>> dp(ni + 1, std::vector<int>(nc + 1, kNegInf));
  for (int j = 0; j <= nc; ++j) dp[ni][j] = 0;
  for (int i = ni - 1; i >= 0; --i) {
    for (int j = nc; j >= 0; --j) {
      int best = dp[i + 1][j] + skip_cost(iv[i]);
      if (j < nc) {
        best = std::max(best, dp[i][j + 1] - 1);
        if (shares_cat(lex, iv[i], continuation[j]))
          best = std::max(best, dp[i + 1][j + 1]);
      }
      dp[i][j] = best;
    }
  }

  InterveningMatch out;
  out.score = dp[0][0];
  int i = 0, j = 0;
  while (i < ni) {
    if (j < nc && shares_cat(lex, iv[i], continuation[j]) &&
        dp[i][j] == dp[i + 1][j + 1]) {
      ++i, ++j;
    } else if (dp[i][j] == dp[i + 1][j] + skip_cost(iv[i])) {
      ++i;
    } else {
      ++j;
    }
  }
  out.continuation_used = j;
  return out;
}

std::vector<RepairCandidate> detect_repairs(
    const std::vector<std::string>& words, const Lexicon& lex,
    const RepairOptions& opts) {
  const int n = static_cast<int>(words.size());
  auto pairs = repeated_root_pairs(words, lex);
  auto regions = candidate_regions(pairs, words, lex, opts);

  std::vector<RepairCandidate> scored;
  for (const auto& r : regions) {
    Alignment al = align_sequences(slice(words, r.seq1), slice(words, r.seq2),
                                   lex);
    RepairCandidate c;
    if (r.seq1.end == r.seq2.start) {
      c.reparandum = r.seq1;
      c.repair = r.seq2;
      c.score = al.score;
    } else {
      Span iv{r.seq1.end, r.seq2.start};
      std::vector<std::string> after(words.begin() + r.seq2.end,
                                     words.begin() + n);
      std::vector<std::string> before(words.begin(),
                                      words.begin() + r.seq1.start);
      std::reverse(before.begin(), before.end());
      InterveningMatch fwd = match_intervening(MatchDirection::Forward,
                                               slice(words, iv), after, lex);
      InterveningMatch bwd = match_intervening(MatchDirection::Backward,
                                               slice(words, iv), before, lex);
      if (fwd.score >= bwd.score) {
        // Intervening material reads as a restart fragment: delete it.
        c.reparandum = Span{r.seq1.start, r.seq2.start};
        c.repair = r.seq2;
        c.score = al.score + fwd.score;
      } else {
        c.reparandum = r.seq1;
        c.repair = Span{r.seq1.end, r.seq2.end};
        c.score = al.score + bwd.score;
      }
    }
    c.deleted_words = c.reparandum.length();
    if (c.score >= opts.min_score) scored.push_back(c);
  }

  std::sort(scored.begin(), scored.end(),
            [](const RepairCandidate& a, const RepairCandidate& b) {
              if (a.score != b.score) return a.score > b.score;
              if (a.deleted_words != b.deleted_words)
                return a.deleted_words < b.deleted_words;
              if (a.reparandum.start != b.reparandum.start)
                return a.reparandum.start < b.reparandum.start;
              if (a.repair.start != b.repair.start)
                return a.repair.start < b.repair.start;
              return a.repair.end < b.repair.end;
            });

  std::vector<RepairCandidate> accepted;
  for (const auto& c : scored) {
    bool clash = false;
    for (const auto& a : accepted)
      if (c.overlaps(a)) {
        clash = true;
        break;
      }
    if (!clash) accepted.push_back(c);
  }
  std::sort(accepted.begin(), accepted.end(),
            [](const RepairCandidate& a, const RepairCandidate& b) {
              return a.reparandum.start < b.reparandum.start;
            });
  return accepted;
}

std::vector<std::string> apply_candidates(
    const std::vector<std::string>& words,
    const std::vector<RepairCandidate>& candidates) {
  std::vector<RepairCandidate> by_pos = candidates;
  std::sort(by_pos.begin(), by_pos.end(),
            [](const RepairCandidate& a, const RepairCandidate& b) {
              return a.reparandum.start > b.reparandum.start;
            });
  std::vector<std::string> out = words;
  for (const auto& c : by_pos)
    out.erase(out.begin() + c.reparandum.start,
              out.begin() + c.reparandum.end);
  return out;
}

std::vector<Hypothesis> expand_hypotheses(const std::vector<Hypothesis>& nbest,
                                          double penalty, const Lexicon& lex,
                                          const RepairOptions& opts) {
  std::vector<Hypothesis> out = nbest;
  if (nbest.empty()) return out;
  double floor = nbest.front().acoustic_score;
  for (const auto& h : nbest)
    floor = std::min(floor, h.acoustic_score);
  for (const auto& h : nbest) {
    auto cands = detect_repairs(h.words, lex, opts);
    if (cands.empty()) continue;
    Hypothesis rep;
    rep.words = apply_candidates(h.words, cands);
    rep.acoustic_score = floor - penalty;
    rep.rank = 0;
    rep.repaired = true;
    rep.from_rank = h.rank;
    rep.applied = cands;
    out.push_back(rep);
  }
  return out;
}

} // namespace nblp
