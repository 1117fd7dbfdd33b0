#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nblp/feature_structure.hpp"
#include "nblp/lexicon.hpp"
#include "nblp/parse_tree.hpp"

namespace nblp {

struct CatSpec {
  std::string category;
  FeatureStructure features;

  bool operator==(const CatSpec& o) const {
    return category == o.category && features == o.features;
  }
};

struct Rule {
  std::string id;
  CatSpec mother;
  std::vector<CatSpec> daughters;
  int head_daughter = 1;                // 1-based
  int rel_daughter = 0;                 // 0 = none; supplies the relation word
  std::map<int, std::string> arg_slots; // 1-based daughter -> slot ("2", "rel")
  // populated only in specialized grammars
  int count = 0;
  std::vector<std::string> provenance;
};

struct LexEdge {
  std::string category; // terminal category name
  std::string root;
  std::string word;
  FeatureStructure features;

  bool operator==(const LexEdge& o) const {
    return category == o.category && root == o.root && word == o.word &&
           features == o.features;
  }
};

// Rule set plus chunk markup and per-surface lexical feature overrides.
class Grammar {
public:
  std::vector<Rule> rules;
  std::set<std::string> chunk_roots;
  std::string start;
  // (terminal category, surface) -> alternative feature sets
  std::map<std::pair<std::string, std::string>, std::vector<FeatureStructure>>
      lexfeats;

  static Grammar parse(const std::string& text);
  static Grammar load_file(const std::string& path);
  std::string serialize() const;

  const Rule* rule_by_id(const std::string& id) const;
  static bool is_terminal(const std::string& category);
  std::set<std::string> nonterminals() const;

  // Consistency checks; throws on violation. Called by parse.
  void validate() const;
  void reindex();

private:
  std::map<std::string, size_t> by_id_;
};

// A rule instance with variables renamed apart from every other instance.
Rule instantiate(const Rule& r, int& counter);

// All terminal edges for a word: lexicon analyses crossed with either the
// grammar's per-surface feature overrides or category defaults (noun number
// and verb form are read off the morphology).
std::vector<LexEdge> lexical_edges(const Grammar& g, const Lexicon& lex,
                                   const std::string& word);

// Fill in resolved features bottom-up for a bare rule/leaf skeleton; all
// consistent resolutions, deterministic order. Empty result = invalid tree.
std::vector<ParseTree> resolve_tree(const Grammar& g, const Lexicon& lex,
                                    const ParseTree& skeleton,
                                    size_t limit = 16);

// True when every node re-validates against its rule by unification.
bool validate_tree(const Grammar& g, const Lexicon& lex, const ParseTree& t);

} // namespace nblp
