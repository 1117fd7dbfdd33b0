#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nblp/grammar.hpp"
#include "nblp/lexicon.hpp"
#include "nblp/pipeline.hpp"

namespace nblp {

// Synthetic speech-recognition corpora: sentences sampled from the grammar,
// degraded into n-best lists by rule-based word confusions, with optional
// injected repetition disfluencies.
struct GenOptions {
  int utterances = 200;
  int nbest = 10;
  std::uint32_t seed = 1;
  int max_words = 12;
  double absent_rate = 0.15;  // reference missing from the list entirely
  double repair_rate = 0.3;   // reference spoken with a disfluency
};

// Grammatical sentences accepted by the chart parser, distinct as strings.
std::vector<std::vector<std::string>> sample_sentences(const Grammar& g,
                                                       const Lexicon& lex,
                                                       int count,
                                                       std::uint32_t seed,
                                                       int max_words);

// First chart parse of each sentence.
std::vector<ParseTree> sample_treebank(
    const Grammar& g, const Lexicon& lex,
    const std::vector<std::vector<std::string>>& sentences);

std::vector<Utterance> generate_corpus(const Grammar& g, const Lexicon& lex,
                                       const GenOptions& opt);

} // namespace nblp
