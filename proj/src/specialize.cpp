#include "nblp/specialize.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace nblp {

namespace {

// Backbone category names for the noun-phrase refinement.
constexpr const char* kNP = "NP";
constexpr const char* kNonRecursiveNP = "NNP";

const Rule& rule_of(const Grammar& g, const ParseTree& t) {
  const Rule* r = g.rule_by_id(t.rule_id);
  if (!r)
    throw std::runtime_error("unknown rule id '" + t.rule_id + "'");
  if (r->daughters.size() != t.daughters.size())
    throw std::runtime_error("arity mismatch at rule '" + t.rule_id + "'");
  return *r;
}

std::string cut_node(const Grammar& g, const ParseTree& node,
                     std::vector<Chunk>& out);

// Copy the fragment below `node`, turning chunk-rooted daughters into stubs
// labeled with the child chunk's refined category.
ParseTree copy_fragment(const Grammar& g, const ParseTree& node,
                        std::vector<Chunk>& out, bool& has_np_or_pp_stub) {
  const Rule& r = rule_of(g, node);
  ParseTree frag;
  frag.rule_id = node.rule_id;
  frag.category = r.mother.category;
  for (size_t i = 0; i < node.daughters.size(); ++i) {
    const ParseTree& d = node.daughters[i];
    if (d.is_leaf()) {
      if (!Grammar::is_terminal(d.category) ||
          d.category != r.daughters[i].category)
        throw std::runtime_error("leaf category mismatch under rule '" +
                                 node.rule_id + "'");
      frag.daughters.push_back(d);
      continue;
    }
    if (!d.is_internal())
      throw std::runtime_error("unexpected stub under rule '" + node.rule_id +
                               "'");
    const Rule& dr = rule_of(g, d);
    if (dr.mother.category != r.daughters[i].category)
      throw std::runtime_error("daughter category mismatch under rule '" +
                               node.rule_id + "'");
    if (g.chunk_roots.count(dr.mother.category)) {
      std::string label = cut_node(g, d, out);
      if (label == kNP || label == kNonRecursiveNP || label == "PP")
        has_np_or_pp_stub = true;
      ParseTree stub;
      stub.category = label;
      stub.stub = true;
      frag.daughters.push_back(std::move(stub));
    } else {
      frag.daughters.push_back(copy_fragment(g, d, out, has_np_or_pp_stub));
    }
  }
  return frag;
}

// Emits this chunk before its children and returns its refined label.
std::string cut_node(const Grammar& g, const ParseTree& node,
                     std::vector<Chunk>& out) {
  const std::string cat = rule_of(g, node).mother.category;
  size_t idx = out.size();
  out.push_back({});
  bool has_np_or_pp_stub = false;
  ParseTree frag = copy_fragment(g, node, out, has_np_or_pp_stub);
  std::string label = (cat == kNP && !has_np_or_pp_stub) ? kNonRecursiveNP
                                                         : cat;
  out[idx].label = label;
  out[idx].subtree = std::move(frag);
  return label;
}

} // namespace

std::vector<Chunk> cut_tree(const Grammar& g, const ParseTree& tree) {
  if (!tree.is_internal())
    throw std::runtime_error("tree root is not a chunk-rooted analysis");
  const std::string cat = rule_of(g, tree).mother.category;
  if (!g.chunk_roots.count(cat))
    throw std::runtime_error("tree root category '" + cat +
                             "' is not a chunk root");
  std::vector<Chunk> out;
  cut_node(g, tree, out);
  return out;
}

Rule collapse_chunk(const Grammar& g, const Chunk& chunk) {
  int counter = 0;
  Env env;
  std::vector<CatSpec> frontier;
  std::vector<std::string> prov;

  std::function<CatSpec(const ParseTree&)> compose =
      [&](const ParseTree& node) -> CatSpec {
    const Rule* r = g.rule_by_id(node.rule_id);
    if (!r || r->daughters.size() != node.daughters.size())
      throw std::logic_error("chunk does not match grammar rule '" +
                             node.rule_id + "'");
    Rule inst = instantiate(*r, counter);
    prov.push_back(r->id);
    for (size_t i = 0; i < node.daughters.size(); ++i) {
      const ParseTree& d = node.daughters[i];
      if (d.stub) {
        frontier.push_back({d.category, inst.daughters[i].features});
      } else if (d.is_leaf()) {
        frontier.push_back(
            {inst.daughters[i].category, inst.daughters[i].features});
      } else {
        CatSpec child = compose(d);
        if (child.category != inst.daughters[i].category ||
            !unify_into(inst.daughters[i].features, child.features, env))
          throw std::logic_error("chunk composition failed inside rule '" +
                                 node.rule_id + "'");
      }
    }
    return {inst.mother.category, inst.mother.features};
  };

  CatSpec mother = compose(chunk.subtree);

  Rule out;
  out.mother = {chunk.label, substitute(mother.features, env)};
  for (const auto& f : frontier)
    out.daughters.push_back({f.category, substitute(f.features, env)});
  out.provenance = std::move(prov);
  out.count = 1;

  std::vector<FeatureStructure*> fss{&out.mother.features};
  for (auto& d : out.daughters) fss.push_back(&d.features);
  canonicalize_variables(fss);
  return out;
}

namespace {

// Canonical rule core: dedup key over mother and daughters, after variable
// canonicalization. Provenance and count stay out of the key.
std::string rule_core(const Rule& r) {
  std::string out = r.mother.category + r.mother.features.serialize() + " ->";
  for (const auto& d : r.daughters) {
    out += ' ';
    out += d.category + d.features.serialize();
  }
  return out;
}

} // namespace

Grammar specialize_grammar(const Grammar& g,
                           const std::vector<ParseTree>& treebank,
                           const SpecializeOptions& opt) {
  if (treebank.empty())
    throw std::runtime_error("specialize: empty treebank");

  std::map<std::string, Rule> agg;
  for (size_t ti = 0; ti < treebank.size(); ++ti) {
    std::vector<Chunk> chunks;
    try {
      chunks = cut_tree(g, treebank[ti]);
    } catch (const std::exception& e) {
      throw std::runtime_error("treebank tree " + std::to_string(ti) + ": " +
                               e.what());
    }
    for (const Chunk& c : chunks) {
      Rule r = collapse_chunk(g, c);
      std::string key = rule_core(r);
      auto it = agg.find(key);
      if (it == agg.end()) {
        agg.emplace(std::move(key), std::move(r));
      } else {
        it->second.count += 1;
        // Same pattern reachable through different derivations: keep the
        // lexicographically smallest provenance so output is order-free.
        if (r.provenance < it->second.provenance)
          it->second.provenance = r.provenance;
      }
    }
  }

  std::vector<Rule> kept;
  for (auto& [key, r] : agg)
    if (r.count >= opt.freq_threshold) kept.push_back(std::move(r));

  // Thresholding can orphan rules that reference a category whose own rules
  // were all dropped; prune those to a fixpoint.
  while (true) {
    std::set<std::string> mothers;
    for (const auto& r : kept) mothers.insert(r.mother.category);
    std::vector<Rule> next;
    for (auto& r : kept) {
      bool ok = true;
      for (const auto& d : r.daughters)
        if (!Grammar::is_terminal(d.category) && !mothers.count(d.category))
          ok = false;
      if (ok) next.push_back(std::move(r));
    }
    if (next.size() == kept.size()) {
      kept = std::move(next);
      break;
    }
    kept = std::move(next);
  }

  Grammar sg;
  sg.start = g.start;
  sg.chunk_roots = g.chunk_roots;
  sg.lexfeats = g.lexfeats;
  for (const auto& r : kept) {
    if (r.mother.category == kNonRecursiveNP)
      sg.chunk_roots.insert(kNonRecursiveNP);
    for (const auto& d : r.daughters)
      if (d.category == kNonRecursiveNP)
        sg.chunk_roots.insert(kNonRecursiveNP);
  }
  sg.rules = std::move(kept); // map order = sorted by canonical core
  for (size_t i = 0; i < sg.rules.size(); ++i)
    sg.rules[i].id = "sp" + std::to_string(i + 1);
  sg.reindex();
  sg.validate();
  return sg;
}

const std::vector<LRAction>* LRTable::actions(
    int state, const std::string& terminal) const {
  auto it = actions_.find({state, terminal});
  return it == actions_.end() ? nullptr : &it->second;
}

int LRTable::goto_state(int state, const std::string& nonterminal) const {
  auto it = gotos_.find({state, nonterminal});
  return it == gotos_.end() ? -1 : it->second;
}

int LRTable::conflict_entries() const {
  int n = 0;
  for (const auto& [key, acts] : actions_)
    if (acts.size() > 1) ++n;
  return n;
}

std::string LRTable::serialize() const {
  std::ostringstream out;
  out << "lr-table 1\n";
  out << "states " << num_states_ << "\n";
  out << "conflicts " << conflict_entries() << "\n";
  for (const auto& [key, acts] : actions_)
    for (const auto& a : acts) {
      out << "a " << key.first << " " << key.second << " ";
      switch (a.kind) {
      case LRAction::Kind::Shift: out << "shift " << a.target; break;
      case LRAction::Kind::Reduce: out << "reduce " << a.target; break;
      case LRAction::Kind::Accept: out << "accept"; break;
      }
      out << "\n";
    }
  for (const auto& [key, state] : gotos_)
    out << "g " << key.first << " " << key.second << " " << state << "\n";
  out << "end\n";
  return out.str();
}

namespace {

struct Item {
  int prod;
  int dot;
  bool operator<(const Item& o) const {
    if (prod != o.prod) return prod < o.prod;
    return dot < o.dot;
  }
};

using ItemSet = std::set<Item>;

} // namespace

LRTable compile_lr(const Grammar& sg) {
  if (sg.rules.empty())
    throw std::runtime_error("compile_lr: grammar has no rules");
  const int m = static_cast<int>(sg.rules.size());
  const int aug = m; // augmented production: S' -> start

  auto prod_len = [&](int p) {
    return p == aug ? 1 : static_cast<int>(sg.rules[p].daughters.size());
  };
  auto prod_sym = [&](int p, int k) -> const std::string& {
    return p == aug ? sg.start : sg.rules[p].daughters[k].category;
  };
  auto prod_lhs = [&](int p) -> const std::string& {
    static const std::string kAug = "S'";
    return p == aug ? kAug : sg.rules[p].mother.category;
  };

  std::map<std::string, std::vector<int>> prods_by_lhs;
  for (int p = 0; p < m; ++p)
    prods_by_lhs[sg.rules[p].mother.category].push_back(p);

  auto closure = [&](ItemSet items) {
    std::deque<Item> work(items.begin(), items.end());
    while (!work.empty()) {
      Item it = work.front();
      work.pop_front();
      if (it.dot >= prod_len(it.prod)) continue;
      const std::string& sym = prod_sym(it.prod, it.dot);
      if (Grammar::is_terminal(sym)) continue;
      auto pit = prods_by_lhs.find(sym);
      if (pit == prods_by_lhs.end()) continue;
      for (int q : pit->second) {
        Item ni{q, 0};
        if (items.insert(ni).second) work.push_back(ni);
      }
    }
    return items;
  };

  // First sets; no epsilon productions exist, so only the leading symbol
  // of each production contributes.
  std::map<std::string, std::set<std::string>> first;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int p = 0; p < m; ++p) {
      const std::string& lhs = prod_lhs(p);
      const std::string& lead = prod_sym(p, 0);
      std::set<std::string>& dst = first[lhs];
      size_t before = dst.size();
      if (Grammar::is_terminal(lead)) {
        dst.insert(lead);
      } else {
        const auto& src = first[lead];
        dst.insert(src.begin(), src.end());
      }
      changed = changed || dst.size() != before;
    }
  }
  auto first_of = [&](const std::string& sym) -> std::set<std::string> {
    if (Grammar::is_terminal(sym)) return {sym};
    return first[sym];
  };

  std::map<std::string, std::set<std::string>> follow;
  follow[sg.start].insert(LRTable::kEnd);
  changed = true;
  while (changed) {
    changed = false;
    for (int p = 0; p < m; ++p) {
      const std::string& lhs = prod_lhs(p);
      for (int k = 0; k < prod_len(p); ++k) {
        const std::string& sym = prod_sym(p, k);
        if (Grammar::is_terminal(sym)) continue;
        std::set<std::string>& dst = follow[sym];
        size_t before = dst.size();
        if (k + 1 < prod_len(p)) {
          auto f = first_of(prod_sym(p, k + 1));
          dst.insert(f.begin(), f.end());
        } else {
          const auto& f = follow[lhs];
          dst.insert(f.begin(), f.end());
        }
        changed = changed || dst.size() != before;
      }
    }
  }

  std::vector<ItemSet> states{closure({Item{aug, 0}})};
  std::map<ItemSet, int> index{{states[0], 0}};
  LRTable table;

  for (size_t s = 0; s < states.size(); ++s) {
    // Group items by the symbol after the dot; map order keeps state
    // numbering deterministic.
    std::map<std::string, ItemSet> moves;
    for (const Item& it : states[s]) {
      if (it.dot < prod_len(it.prod))
        moves[prod_sym(it.prod, it.dot)].insert({it.prod, it.dot + 1});
    }
    for (auto& [sym, nucleus] : moves) {
      ItemSet next = closure(nucleus);
      auto [nit, fresh] = index.emplace(next, static_cast<int>(states.size()));
      if (fresh) states.push_back(next);
      int target = nit->second;
      if (Grammar::is_terminal(sym))
        table.actions_[{static_cast<int>(s), sym}].push_back(
            {LRAction::Kind::Shift, target});
      else
        table.gotos_[{static_cast<int>(s), sym}] = target;
    }
    for (const Item& it : states[s]) {
      if (it.dot < prod_len(it.prod)) continue;
      if (it.prod == aug) {
        table.actions_[{static_cast<int>(s), LRTable::kEnd}].push_back(
            {LRAction::Kind::Accept, 0});
        continue;
      }
      for (const std::string& t : follow[prod_lhs(it.prod)])
        table.actions_[{static_cast<int>(s), t}].push_back(
            {LRAction::Kind::Reduce, it.prod});
    }
  }

  for (auto& [key, acts] : table.actions_) {
    std::sort(acts.begin(), acts.end());
    acts.erase(std::unique(acts.begin(), acts.end()), acts.end());
  }
  table.num_states_ = static_cast<int>(states.size());
  return table;
}

namespace {

struct GStack {
  std::vector<int> states;
  std::vector<ParseTree> nodes;

  std::string key() const {
    std::string out;
    for (int s : states) {
      out += std::to_string(s);
      out += ';';
    }
    for (const auto& n : nodes) {
      out += featured_signature(n);
      out += '|';
    }
    return out;
  }
};

} // namespace

std::vector<ParseTree> parse_lr(const Grammar& sg, const LRTable& table,
                                const Lexicon& lex,
                                const std::vector<std::string>& words) {
  if (words.empty()) return {};

  std::vector<ParseTree> accepted;
  int counter = 0;
  std::vector<GStack> stacks{GStack{{0}, {}}};

  for (size_t i = 0; i <= words.size(); ++i) {
    const bool at_end = i == words.size();
    std::vector<LexEdge> edges;
    std::set<std::string> lookahead;
    if (at_end) {
      lookahead.insert(LRTable::kEnd);
    } else {
      edges = lexical_edges(sg, lex, words[i]);
      for (const auto& e : edges) lookahead.insert(e.category);
    }

    // Close the stack set under reductions licensed by the lookahead.
    std::deque<GStack> work(stacks.begin(), stacks.end());
    std::set<std::string> seen;
    std::vector<GStack> ready;
    while (!work.empty()) {
      GStack s = std::move(work.front());
      work.pop_front();
      if (!seen.insert(s.key()).second) continue;
      for (const std::string& la : lookahead) {
        const auto* acts = table.actions(s.states.back(), la);
        if (!acts) continue;
        for (const LRAction& a : *acts) {
          if (a.kind == LRAction::Kind::Accept) {
            if (at_end && s.nodes.size() == 1)
              accepted.push_back(s.nodes.front());
            continue;
          }
          if (a.kind != LRAction::Kind::Reduce) continue;
          const Rule& r = sg.rules[a.target];
          const size_t n = r.daughters.size();
          if (s.nodes.size() < n) continue;
          Rule inst = instantiate(r, counter);
          Env env;
          bool ok = true;
          for (size_t k = 0; k < n && ok; ++k)
            ok = unify_into(inst.daughters[k].features,
                            s.nodes[s.nodes.size() - n + k].features, env);
          if (!ok) continue; // feature clash prunes this reduction
          GStack ns;
          ns.states.assign(s.states.begin(), s.states.end() - n);
          ns.nodes.assign(s.nodes.begin(), s.nodes.end() - n);
          int gs = table.goto_state(ns.states.back(), r.mother.category);
          if (gs < 0) continue;
          ParseTree t;
          t.category = r.mother.category;
          t.rule_id = r.id;
          t.features = substitute(inst.mother.features, env);
          t.daughters.assign(s.nodes.end() - n, s.nodes.end());
          ns.nodes.push_back(std::move(t));
          ns.states.push_back(gs);
          work.push_back(std::move(ns));
        }
      }
      ready.push_back(std::move(s));
    }
    if (at_end) break;

    std::vector<GStack> next;
    std::set<std::string> next_seen;
    for (const GStack& s : ready) {
      for (const auto& e : edges) {
        const auto* acts = table.actions(s.states.back(), e.category);
        if (!acts) continue;
        for (const LRAction& a : *acts) {
          if (a.kind != LRAction::Kind::Shift) continue;
          GStack ns = s;
          ParseTree leaf;
          leaf.category = e.category;
          leaf.features = e.features;
          leaf.word = e.word;
          leaf.root = e.root;
          ns.nodes.push_back(std::move(leaf));
          ns.states.push_back(a.target);
          if (next_seen.insert(ns.key()).second)
            next.push_back(std::move(ns));
        }
      }
    }
    stacks = std::move(next);
    if (stacks.empty()) return {};
  }

  std::set<std::string> dedup;
  std::vector<ParseTree> out;
  for (auto& t : accepted)
    if (dedup.insert(featured_signature(t)).second) out.push_back(std::move(t));
  std::sort(out.begin(), out.end(), [](const ParseTree& a, const ParseTree& b) {
    std::string sa = derivation_signature(a);
    std::string sb = derivation_signature(b);
    if (sa != sb) return sa < sb;
    return featured_signature(a) < featured_signature(b);
  });
  return out;
}

ParseTree expand_tree(const Grammar& general, const Grammar& specialized,
                      const ParseTree& t) {
  if (t.stub || t.is_leaf()) return t;
  const Rule* sr = specialized.rule_by_id(t.rule_id);
  if (!sr)
    throw std::logic_error("expand: unknown specialized rule '" + t.rule_id +
                           "'");
  size_t qi = 0; // provenance cursor
  size_t fi = 0; // frontier cursor
  int counter = 0;

  std::function<ParseTree()> replay = [&]() -> ParseTree {
    if (qi >= sr->provenance.size())
      throw std::logic_error("expand: provenance exhausted in '" + sr->id +
                             "'");
    const std::string& rid = sr->provenance[qi++];
    const Rule* r = general.rule_by_id(rid);
    if (!r)
      throw std::logic_error("expand: provenance names unknown rule '" + rid +
                             "'");
    ParseTree node;
    node.rule_id = r->id;
    node.category = r->mother.category;
    for (const CatSpec& d : r->daughters) {
      if (general.chunk_roots.count(d.category)) {
        if (fi >= t.daughters.size())
          throw std::logic_error("expand: frontier exhausted in '" + sr->id +
                                 "'");
        const ParseTree& item = t.daughters[fi++];
        std::string cat =
            item.category == kNonRecursiveNP ? kNP : item.category;
        if (cat != d.category)
          throw std::logic_error("expand: chunk category mismatch in '" +
                                 sr->id + "'");
        node.daughters.push_back(expand_tree(general, specialized, item));
      } else if (Grammar::is_terminal(d.category)) {
        if (fi >= t.daughters.size() || !t.daughters[fi].is_leaf() ||
            t.daughters[fi].category != d.category)
          throw std::logic_error("expand: terminal mismatch in '" + sr->id +
                                 "'");
        node.daughters.push_back(t.daughters[fi++]);
      } else {
        node.daughters.push_back(replay());
      }
    }
    // Recompute the node's features the same way the chart parser builds
    // them, so expansions compare equal to general-grammar parses.
    Rule inst = instantiate(*r, counter);
    Env env;
    for (size_t k = 0; k < node.daughters.size(); ++k)
      if (!unify_into(inst.daughters[k].features, node.daughters[k].features,
                      env))
        throw std::logic_error("expand: feature clash replaying rule '" + rid +
                               "'");
    node.features = substitute(inst.mother.features, env);
    return node;
  };

  ParseTree out = replay();
  if (qi != sr->provenance.size() || fi != t.daughters.size())
    throw std::logic_error("expand: leftover provenance or frontier in '" +
                           sr->id + "'");
  return out;
}

} // namespace nblp
