#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "nblp/grammar.hpp"
#include "nblp/parse_tree.hpp"

namespace nblp {

// Everything the preference functions score about one analysis: semantic
// head-relation triples, the rules used, structural pattern counts, and the
// word N-grams of the yield.
struct Analysis {
  ParseTree tree;
  std::multiset<std::string> triples; // "(head1,rel,head2)"
  std::multiset<std::string> rules_used;
  std::map<std::string, int> structural;
  std::map<int, std::multiset<std::string>> ngrams; // n -> grams, n = 1..max
};

// The leaf reached by following head daughters; nullptr for stubs.
const ParseTree* head_leaf(const Grammar& g, const ParseTree& t);

// One triple per annotated head-dependent edge. Heads are class-abstracted
// lexical roots; the relation is the argument slot number, or for modifier
// attachments the relating word (a preposition or conjunction).
std::multiset<std::string> extract_triples(const Grammar& g, const Lexicon& lex,
                                           const ParseTree& t);

// Counts of unlikely constructions, keyed by flag name. The registry is
// extensible; the default registry provides:
//   num_mismatch      clauses headed by "be" whose determinable numbers
//                     (copula, subject, predicate nominal) disagree
//   det_noun_mismatch noun phrases whose determiner number contradicts the
//                     head noun's
using FlagCounter = std::function<int(const Grammar&, const ParseTree&)>;
const std::map<std::string, FlagCounter>& default_flag_registry();

std::map<std::string, int> structural_flags(
    const Grammar& g, const ParseTree& t,
    const std::map<std::string, FlagCounter>& registry);
std::map<std::string, int> structural_flags(const Grammar& g,
                                            const ParseTree& t);

// Sliding window over the words padded with one <s> and one </s> marker;
// grams are space-joined. 1 <= n <= 4.
std::multiset<std::string> word_ngrams(const std::vector<std::string>& words,
                                       int n);

std::multiset<std::string> collect_rules_used(const ParseTree& t);

Analysis analyze(const Grammar& g, const Lexicon& lex, const ParseTree& t,
                 int max_ngram = 4);

// Line record: id, rank, bracketed tree, triples, flags. Tab-separated.
std::string serialize_record(const std::string& utt_id, int rank,
                             const Analysis& a);

struct AnalysisRecord {
  std::string utt_id;
  int rank = 0;
  ParseTree tree; // skeleton only; features are not stored in records
  std::multiset<std::string> triples;
  std::map<std::string, int> structural;
};

AnalysisRecord parse_record(const std::string& line);

} // namespace nblp
