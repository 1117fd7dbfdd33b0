#include "nblp/chart_parser.hpp"

#include <algorithm>
#include <set>

namespace nblp {

namespace {

struct Cell {
  std::vector<ParseTree> trees;
  std::set<std::string> signatures;

  // Keyed on skeleton plus canonicalized features so edges differing only
  // in features (e.g. two lexical variants of one word) stay distinct.
  bool add(ParseTree t) {
    std::string sig = featured_signature(t);
    if (!signatures.insert(sig).second) return false;
    trees.push_back(std::move(t));
    return true;
  }
};

class Chart {
public:
  Chart(const Grammar& g, const Lexicon& lex,
        const std::vector<std::string>& words)
      : g_(g), n_(static_cast<int>(words.size())),
        cells_(static_cast<size_t>(n_ + 1) * (n_ + 1)) {
    for (int i = 0; i < n_; ++i) {
      for (const auto& e : lexical_edges(g, lex, words[i])) {
        ParseTree leaf;
        leaf.category = e.category;
        leaf.features = e.features;
        leaf.word = e.word;
        leaf.root = e.root;
        cell(i, i + 1).add(std::move(leaf));
      }
    }
  }

  std::vector<ParseTree> run() {
    for (int len = 1; len <= n_; ++len) {
      for (int i = 0; i + len <= n_; ++i) {
        int j = i + len;
        if (len > 1) apply_phrasal(i, j);
        close_unary(i, j);
      }
    }
    std::vector<ParseTree> out;
    for (const auto& t : cell(0, n_).trees)
      if (t.category == g_.start) out.push_back(t);
    std::sort(out.begin(), out.end(),
              [](const ParseTree& a, const ParseTree& b) {
                std::string sa = derivation_signature(a);
                std::string sb = derivation_signature(b);
                if (sa != sb) return sa < sb;
                return featured_signature(a) < featured_signature(b);
              });
    return out;
  }

private:
  Cell& cell(int i, int j) { return cells_[i * (n_ + 1) + j]; }

  void try_rule(const Rule& r, const std::vector<const ParseTree*>& combo,
                Cell& target) {
    Rule inst = instantiate(r, counter_);
    Env env;
    for (size_t d = 0; d < combo.size(); ++d)
      if (!unify_into(inst.daughters[d].features, combo[d]->features, env))
        return;
    ParseTree t;
    t.category = r.mother.category;
    t.rule_id = r.id;
    t.features = substitute(inst.mother.features, env);
    for (const ParseTree* d : combo) t.daughters.push_back(*d);
    target.add(std::move(t));
  }

  // All ways to lay the rule's daughters over [i, j), one adjacent span each.
  void match_daughters(const Rule& r, size_t d, int pos, int j,
                       std::vector<const ParseTree*>& combo, Cell& target) {
    const int remaining = static_cast<int>(r.daughters.size() - d);
    if (remaining == 0) {
      if (pos == j) try_rule(r, combo, target);
      return;
    }
    for (int q = pos + 1; q <= j - (remaining - 1); ++q) {
      for (const ParseTree& t : cell(pos, q).trees) {
        if (t.category != r.daughters[d].category) continue;
        combo.push_back(&t);
        match_daughters(r, d + 1, q, j, combo, target);
        combo.pop_back();
      }
    }
  }

  void apply_phrasal(int i, int j) {
    for (const Rule& r : g_.rules) {
      if (r.daughters.size() < 2) continue;
      std::vector<const ParseTree*> combo;
      match_daughters(r, 0, i, j, combo, cell(i, j));
    }
  }

  void close_unary(int i, int j) {
    Cell& c = cell(i, j);
    bool changed = true;
    while (changed) {
      changed = false;
      for (const Rule& r : g_.rules) {
        if (r.daughters.size() != 1) continue;
        // snapshot: additions re-enter on the next sweep
        const size_t count = c.trees.size();
        for (size_t k = 0; k < count; ++k) {
          if (c.trees[k].category != r.daughters[0].category) continue;
          Rule inst = instantiate(r, counter_);
          Env env;
          if (!unify_into(inst.daughters[0].features, c.trees[k].features,
                          env))
            continue;
          ParseTree t;
          t.category = r.mother.category;
          t.rule_id = r.id;
          t.features = substitute(inst.mother.features, env);
          t.daughters.push_back(c.trees[k]);
          if (c.add(std::move(t))) changed = true;
        }
      }
    }
  }

  const Grammar& g_;
  int n_;
  std::vector<Cell> cells_;
  int counter_ = 0;
};

} // namespace

std::vector<ParseTree> parse_chart(const Grammar& g, const Lexicon& lex,
                                   const std::vector<std::string>& words) {
  if (words.empty()) return {};
  Chart chart(g, lex, words);
  return chart.run();
}

} // namespace nblp
