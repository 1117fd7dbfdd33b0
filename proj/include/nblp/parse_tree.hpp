#pragma once

#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "nblp/feature_structure.hpp"

namespace nblp {

// One node of an analysis tree. Internal nodes carry the rule id; leaves
// carry the surface word and its lexical root; stubs stand for chunk
// nonterminals in cut subtrees.
struct ParseTree {
  std::string category;
  FeatureStructure features;
  std::string rule_id;
  std::vector<ParseTree> daughters;
  std::string word;
  std::string root;
  bool stub = false;

  bool is_leaf() const { return !word.empty(); }
  bool is_internal() const { return !rule_id.empty(); }
};

// Bracketed text: internal `(ruleid d1 d2 ...)`, leaf `cat:word`, stub
// `label*`. Features are not serialized; they are re-derived on load.
std::string serialize_tree(const ParseTree& t);
ParseTree parse_tree_text(const std::string& text);

// The serialized shape doubles as a canonical derivation signature.
inline std::string derivation_signature(const ParseTree& t) {
  return serialize_tree(t);
}

// Skeleton plus the feature structure at every node, with variables renamed
// canonically so the key is independent of how instances were numbered. Two
// analyses differing only in features stay distinct under this key.
std::string featured_signature(const ParseTree& t);

std::vector<std::string> tree_yield(const ParseTree& t);
int leaf_count(const ParseTree& t);

// Labeled constituent spans (category, start, end) of internal nodes.
std::multiset<std::tuple<std::string, int, int>> tree_brackets(
    const ParseTree& t);

// One tree per non-empty line.
std::vector<ParseTree> parse_treebank_text(const std::string& text);
std::vector<ParseTree> load_treebank(const std::string& path);
std::string serialize_treebank(const std::vector<ParseTree>& trees);

} // namespace nblp
