#pragma once

#include <map>
#include <string>
#include <vector>

#include "nblp/chart_parser.hpp"
#include "nblp/grammar.hpp"

namespace nblp {

// A chunk-rooted fragment of an analysis tree. Internal nodes strictly
// inside the fragment have non-chunk categories; daughters that start a new
// chunk appear as stubs labeled with that chunk's backbone category.
struct Chunk {
  std::string label; // backbone category; "NNP" for non-recursive NPs
  ParseTree subtree;
};

// Cut at every chunk-category node, parent fragment first, children in
// left-to-right order. NP fragments whose frontier has no NP, NNP, or PP
// stub get the refined label NNP; stubs always carry the refined label.
// Throws when the tree's root category is not a chunk root.
std::vector<Chunk> cut_tree(const Grammar& g, const ParseTree& tree);

// Compose the fragment's rules into one rule by unification. The mother is
// the chunk root with its composed features; the daughters are the frontier
// items with theirs; provenance lists the collapsed rule ids in derivation
// order. Variables are canonically renamed. The caller assigns id and count.
// A unification failure means the fragment never came from a valid tree and
// throws logic_error.
Rule collapse_chunk(const Grammar& g, const Chunk& chunk);

struct SpecializeOptions {
  // Keep only rules observed at least this often (1 keeps everything).
  int freq_threshold = 1;
};

// Collapse every chunk of every tree, deduplicate up to variable renaming,
// aggregate counts, then apply the frequency threshold (dropping any rule
// left referencing a nonterminal with no rules). Output rules are sorted by
// their canonical form, so the result is independent of treebank order.
// Structurally invalid trees are rejected with their index in the message.
Grammar specialize_grammar(const Grammar& g,
                           const std::vector<ParseTree>& treebank,
                           const SpecializeOptions& opt = {});

struct LRAction {
  enum class Kind { Shift, Reduce, Accept };
  Kind kind = Kind::Shift;
  int target = 0; // shift: next state; reduce: rule index; accept: unused

  bool operator==(const LRAction& o) const {
    return kind == o.kind && target == o.target;
  }
  bool operator<(const LRAction& o) const {
    if (kind != o.kind) return kind < o.kind;
    return target < o.target;
  }
};

// SLR(1) table over the context-free backbone of a specialized grammar.
// Conflicts are kept as multi-action entries; the parser follows them all.
class LRTable {
public:
  static constexpr const char* kEnd = "$";

  int num_states() const { return num_states_; }
  // nullptr when the entry is empty.
  const std::vector<LRAction>* actions(int state,
                                       const std::string& terminal) const;
  // -1 when there is no transition.
  int goto_state(int state, const std::string& nonterminal) const;
  // Number of (state, terminal) entries holding more than one action.
  int conflict_entries() const;
  // Deterministic text dump of the automaton, for inspection artifacts.
  std::string serialize() const;

private:
  friend LRTable compile_lr(const Grammar& sg);
  int num_states_ = 0;
  std::map<std::pair<int, std::string>, std::vector<LRAction>> actions_;
  std::map<std::pair<int, std::string>, int> gotos_;
};

LRTable compile_lr(const Grammar& sg);

// Generalized LR over parallel stacks: shift forks on lexical alternatives,
// conflict entries fork the stack set, and reduces re-check the rule's
// feature constraints, pruning stacks that fail. Returns every accepted
// analysis, sorted by derivation signature. Empty = out of coverage.
std::vector<ParseTree> parse_lr(const Grammar& sg, const LRTable& table,
                                const Lexicon& lex,
                                const std::vector<std::string>& words);

// Replay a specialized analysis into the general-grammar tree it stands
// for, consuming each rule's provenance in preorder. Frontier leaves keep
// their word, root, and features. Throws logic_error when the provenance
// does not reconstruct a well-formed derivation.
ParseTree expand_tree(const Grammar& general, const Grammar& specialized,
                      const ParseTree& t);

} // namespace nblp
