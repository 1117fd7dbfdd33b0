#include "nblp/corpus_gen.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

#include "nblp/chart_parser.hpp"
#include "nblp/repair.hpp"

namespace nblp {

namespace {

// All random draws go through these two helpers so generated corpora are
// reproducible bit for bit from the seed alone.
int pick(std::mt19937& rng, int n) { return static_cast<int>(rng() % n); }
double u01(std::mt19937& rng) { return rng() / 4294967296.0; }

struct Sampler {
  const Grammar& g;
  const Lexicon& lex;
  int max_words;
  std::map<std::string, std::vector<const Rule*>> by_cat;
  std::map<std::string, std::vector<std::string>> pools;

  Sampler(const Grammar& gr, const Lexicon& lx, int mw)
      : g(gr), lex(lx), max_words(mw) {
    for (const auto& r : g.rules) by_cat[r.mother.category].push_back(&r);

    // Candidate surfaces: everything in the lexicon plus regular plural
    // and third-singular forms the morphology recovers. Roots that already
    // list an inflected surface (has, goes, flies) keep only those.
    std::set<std::string> universe;
    std::map<std::string, std::set<std::string>> by_root;
    for (int m = 0; m < 8; ++m)
      for (const auto& s : lex.surfaces_with_cat(static_cast<MajorCat>(m)))
        if (const auto* entries = lex.entries_for(s))
          for (const auto& e : *entries) by_root[e.root].insert(s);
    for (int m = 0; m < 8; ++m) {
      auto cat = static_cast<MajorCat>(m);
      for (const auto& s : lex.surfaces_with_cat(cat)) {
        universe.insert(s);
        if (cat != MajorCat::Noun && cat != MajorCat::Verb) continue;
        if (s.ends_with("s") || s.ends_with("y")) continue;
        bool regular = true;
        if (const auto* entries = lex.entries_for(s))
          for (const auto& e : *entries)
            if (by_root[e.root].size() > 1) regular = false;
        if (regular) universe.insert(s + "s");
      }
    }
    for (const auto& w : universe)
      for (const auto& e : lexical_edges(g, lex, w))
        pools[e.category].push_back(w);
    for (auto& [cat, pool] : pools) {
      std::sort(pool.begin(), pool.end());
      pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    }
  }

  bool expand(const std::string& cat, int depth, std::mt19937& rng,
              std::vector<std::string>& out) const {
    if (depth > 10 || static_cast<int>(out.size()) >= max_words) return false;
    if (Grammar::is_terminal(cat)) {
      auto it = pools.find(cat);
      if (it == pools.end() || it->second.empty()) return false;
      out.push_back(it->second[pick(rng, it->second.size())]);
      return true;
    }
    auto it = by_cat.find(cat);
    if (it == by_cat.end() || it->second.empty()) return false;
    const Rule* r = it->second[pick(rng, it->second.size())];
    for (const auto& d : r->daughters)
      if (!expand(d.category, depth + 1, rng, out)) return false;
    return true;
  }

  // One grammatical sentence, or empty on failure.
  std::vector<std::string> sample_one(std::mt19937& rng) const {
    for (int attempt = 0; attempt < 200; ++attempt) {
      std::vector<std::string> words;
      if (!expand(g.start, 0, rng, words)) continue;
      if (words.size() < 2 || static_cast<int>(words.size()) > max_words)
        continue;
      if (parse_chart(g, lex, words).empty()) continue;
      return words;
    }
    return {};
  }
};

// Word confusions a recognizer plausibly makes: number on nouns and verbs,
// agreement on copulas and auxiliaries, determiners, prepositions, and
// same-class content words. Every entry swaps one word for one word.
const std::map<std::string, std::vector<std::string>>& confusions() {
  static const std::map<std::string, std::vector<std::string>> kMap = {
      {"flight", {"flights"}},   {"flights", {"flight"}},
      {"fare", {"fares"}},       {"fares", {"fare"}},
      {"meal", {"meals"}},       {"meals", {"meal"}},
      {"stop", {"stops"}},       {"stops", {"stop"}},
      {"ticket", {"tickets"}},   {"tickets", {"ticket"}},
      {"plane", {"planes"}},     {"planes", {"plane"}},
      {"airline", {"airlines"}}, {"airlines", {"airline"}},
      {"trip", {"trips"}},       {"trips", {"trip"}},
      {"type", {"types"}},       {"types", {"type"}},
      {"detail", {"details"}},   {"details", {"detail"}},
      {"is", {"are"}},           {"are", {"is"}},
      {"was", {"is"}},           {"does", {"do"}},
      {"do", {"does"}},          {"has", {"have"}},
      {"have", {"has"}},
      {"leave", {"leaves"}},     {"leaves", {"leave"}},
      {"serve", {"serves"}},     {"serves", {"serve"}},
      {"arrive", {"arrives"}},   {"arrives", {"arrive"}},
      {"depart", {"departs"}},   {"departs", {"depart"}},
      {"want", {"wants"}},       {"wants", {"want"}},
      {"show", {"shows"}},       {"shows", {"show"}},
      {"list", {"lists"}},       {"lists", {"list"}},
      {"book", {"books"}},       {"books", {"book"}},
      {"go", {"goes"}},          {"goes", {"go"}},
      {"fly", {"flies"}},        {"flies", {"fly"}},
      {"a", {"the"}},            {"the", {"a", "this"}},
      {"an", {"a"}},             {"this", {"these"}},
      {"these", {"those"}},      {"those", {"these"}},
      {"any", {"each"}},         {"each", {"any"}},
      {"to", {"from"}},          {"from", {"to"}},
      {"on", {"in"}},            {"in", {"on"}},
      {"at", {"for"}},           {"for", {"at"}},
      {"after", {"before"}},     {"before", {"after"}},
      {"boston", {"denver", "chicago"}},
      {"denver", {"boston", "dallas"}},
      {"oakland", {"atlanta"}},  {"atlanta", {"oakland"}},
      {"dallas", {"denver"}},    {"chicago", {"boston"}},
      {"philadelphia", {"pittsburgh"}},
      {"pittsburgh", {"philadelphia"}},
      {"baltimore", {"boston"}},
      {"monday", {"tuesday"}},   {"tuesday", {"monday", "wednesday"}},
      {"wednesday", {"thursday"}},
      {"thursday", {"friday"}},  {"friday", {"monday"}},
      {"delta", {"united"}},     {"united", {"continental"}},
      {"continental", {"delta"}},
      {"one", {"two"}},          {"two", {"one", "three"}},
      {"three", {"four"}},       {"four", {"five"}},
      {"five", {"six"}},         {"six", {"seven"}},
      {"seven", {"eight"}},      {"eight", {"nine"}},
      {"nine", {"ten"}},         {"ten", {"one"}},
      {"i", {"me"}},             {"me", {"i"}},
      {"what", {"which"}},       {"which", {"what"}},
  };
  return kMap;
}

// One to two word substitutions, never changing the word count and always
// producing a different string.
std::vector<std::string> corrupt(const std::vector<std::string>& spoken,
                                 std::mt19937& rng) {
  const auto& conf = confusions();
  std::vector<int> subst;
  for (std::size_t i = 0; i < spoken.size(); ++i)
    if (conf.count(spoken[i])) subst.push_back(static_cast<int>(i));
  if (!subst.empty()) {
    std::vector<std::string> out = spoken;
    int changes = std::min<int>(1 + pick(rng, 2), subst.size());
    for (int c = 0; c < changes; ++c) {
      int si = pick(rng, subst.size());
      int wi = subst[si];
      subst.erase(subst.begin() + si);
      const auto& alts = conf.at(out[wi]);
      out[wi] = alts[pick(rng, alts.size())];
    }
    if (out != spoken) return out;
  }
  // No confusable word (or substitutions cancelled): swap the first pair of
  // distinct adjacent words.
  std::vector<std::string> out = spoken;
  for (std::size_t i = 0; i + 1 < out.size(); ++i)
    if (out[i] != out[i + 1]) {
      std::swap(out[i], out[i + 1]);
      return out;
    }
  throw std::logic_error("cannot corrupt hypothesis: all words identical");
}

// Insert a repeated phrase (optionally set off by a repair marker) so that
// deleting the first copy restores the fluent sentence.
std::vector<std::string> inject_repetition(const std::vector<std::string>& s,
                                           const Lexicon& lex,
                                           std::mt19937& rng) {
  int n = static_cast<int>(s.size());
  int j = 1, len = 1;
  for (int attempt = 0; attempt < 20; ++attempt) {
    j = 1 + pick(rng, n);
    len = 1 + pick(rng, std::min(3, j));
    if (len >= 2 || !lex.is_common_skippable(s[j - 1])) break;
    if (attempt == 19) len = std::min(2, j);
  }
  std::vector<std::string> out(s.begin(), s.begin() + j);
  if (len >= 2 && u01(rng) < 0.5) {
    // A marker word already in the sentence would add a repeated-root pair
    // of its own and make the deletion ambiguous.
    std::vector<std::string> markers;
    for (const auto& m : lex.repair_markers())
      if (std::find(s.begin(), s.end(), m) == s.end()) markers.push_back(m);
    if (!markers.empty()) out.push_back(markers[pick(rng, markers.size())]);
  }
  out.insert(out.end(), s.begin() + (j - len), s.begin() + j);
  out.insert(out.end(), s.begin() + j, s.end());
  return out;
}

} // namespace

std::vector<std::vector<std::string>> sample_sentences(const Grammar& g,
                                                       const Lexicon& lex,
                                                       int count,
                                                       std::uint32_t seed,
                                                       int max_words) {
  Sampler sampler(g, lex, max_words);
  std::mt19937 rng(seed);
  std::vector<std::vector<std::string>> out;
  std::set<std::string> seen;
  int failures = 0;
  while (static_cast<int>(out.size()) < count) {
    auto words = sampler.sample_one(rng);
    std::string key;
    for (const auto& w : words) { key += w; key += ' '; }
    if (!words.empty() && seen.insert(key).second) {
      out.push_back(std::move(words));
      failures = 0;
    } else if (++failures > 500) {
      throw std::runtime_error("sentence sampling stalled; grammar too small "
                               "for the requested corpus");
    }
  }
  return out;
}

std::vector<ParseTree> sample_treebank(
    const Grammar& g, const Lexicon& lex,
    const std::vector<std::vector<std::string>>& sentences) {
  std::vector<ParseTree> out;
  for (const auto& s : sentences) {
    auto trees = parse_chart(g, lex, s);
    if (trees.empty())
      throw std::runtime_error("treebank sentence does not parse");
    out.push_back(std::move(trees.front()));
  }
  return out;
}

std::vector<Utterance> generate_corpus(const Grammar& g, const Lexicon& lex,
                                       const GenOptions& opt) {
  if (opt.utterances < 1 || opt.nbest < 1)
    throw std::runtime_error("corpus generation needs positive sizes");
  auto sentences =
      sample_sentences(g, lex, opt.utterances, opt.seed, opt.max_words);
  std::mt19937 rng(opt.seed + 0x9e3779b9u); // separate stream from sampling
  std::vector<Utterance> corpus;
  for (int ui = 0; ui < opt.utterances; ++ui) {
    const auto& ref = sentences[ui];
    Utterance u;
    char id[32];
    std::snprintf(id, sizeof(id), "synth-%04d", ui + 1);
    u.id = id;
    u.reference = ref;
    u.has_reference = true;
    // Inject only into sentences the detector finds quiet; otherwise the
    // injected repetition and a preexisting repeated pair could both be
    // deleted, and the fluent sentence would no longer be recoverable.
    u.actual_repair = u01(rng) < opt.repair_rate &&
                      detect_repairs(ref, lex).empty();
    std::vector<std::string> spoken =
        u.actual_repair ? inject_repetition(ref, lex, rng) : ref;
    bool absent = u01(rng) < opt.absent_rate;
    int correct_rank = 0;
    if (!absent) {
      double r = u01(rng);
      if (r < 0.45) correct_rank = 1;
      else if (r < 0.70) correct_rank = 2;
      else if (r < 0.85) correct_rank = 3;
      else correct_rank = 1 + pick(rng, opt.nbest);
    }
    std::set<std::string> used;
    for (int rank = 1; rank <= opt.nbest; ++rank) {
      Hypothesis h;
      h.rank = rank;
      h.acoustic_score = -100.0 - 3.0 * (rank - 1) - 1.5 * u01(rng);
      if (rank == correct_rank) {
        h.words = spoken;
      } else {
        // corrupt() always returns a different string; retry a few times
        // for distinctness within the list, keeping duplicates if unlucky.
        h.words = corrupt(spoken, rng);
        for (int tries = 0; tries < 10; ++tries) {
          std::string key;
          for (const auto& w : h.words) { key += w; key += ' '; }
          if (!used.count(key)) break;
          h.words = corrupt(spoken, rng);
        }
      }
      std::string key;
      for (const auto& w : h.words) { key += w; key += ' '; }
      used.insert(key);
      u.nbest.push_back(std::move(h));
    }
    corpus.push_back(std::move(u));
  }
  return corpus;
}

} // namespace nblp
