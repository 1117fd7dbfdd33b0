#include "nblp/grammar.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nblp {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

CatSpec parse_catspec(const std::string& text) {
  CatSpec out;
  size_t br = text.find('[');
  if (br == std::string::npos) {
    out.category = text;
  } else {
    out.category = text.substr(0, br);
    out.features = FeatureStructure::parse(text.substr(br));
  }
  if (out.category.empty())
    throw std::runtime_error("empty category in '" + text + "'");
  return out;
}

bool all_digits(const std::string& s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](char c) { return isdigit(c); });
}

Rule parse_rule_line(const std::string& line) {
  Rule r;
  auto clauses = split_on(line, ';');
  const std::string& core = clauses[0];
  size_t colon = core.find(':');
  if (colon == std::string::npos)
    throw std::runtime_error("rule line missing 'id:' prefix");
  r.id = trim(core.substr(0, colon));
  if (r.id.empty()) throw std::runtime_error("empty rule id");
  size_t arrow = core.find("->", colon);
  if (arrow == std::string::npos)
    throw std::runtime_error("rule line missing '->'");
  r.mother = parse_catspec(trim(core.substr(colon + 1, arrow - colon - 1)));
  std::istringstream din(core.substr(arrow + 2));
  std::string tok;
  while (din >> tok) r.daughters.push_back(parse_catspec(tok));
  if (r.daughters.empty())
    throw std::runtime_error("rule '" + r.id + "' has no daughters");

  for (size_t ci = 1; ci < clauses.size(); ++ci) {
    std::string clause = trim(clauses[ci]);
    if (clause.empty()) continue;
    if (clause.rfind("head=", 0) == 0) {
      r.head_daughter = std::stoi(clause.substr(5));
    } else if (clause.rfind("rel=", 0) == 0) {
      r.rel_daughter = std::stoi(clause.substr(4));
    } else if (clause.rfind("count=", 0) == 0) {
      r.count = std::stoi(clause.substr(6));
    } else if (clause.rfind("args={", 0) == 0) {
      if (clause.back() != '}')
        throw std::runtime_error("rule '" + r.id + "': malformed args clause");
      std::string body = clause.substr(6, clause.size() - 7);
      if (!trim(body).empty()) {
        for (const auto& item : split_on(body, ',')) {
          auto kv = split_on(trim(item), ':');
          if (kv.size() != 2 || !all_digits(trim(kv[0])))
            throw std::runtime_error("rule '" + r.id +
                                     "': malformed args item '" + item + "'");
          r.arg_slots[std::stoi(trim(kv[0]))] = trim(kv[1]);
        }
      }
    } else if (clause.rfind("prov=[", 0) == 0) {
      if (clause.back() != ']')
        throw std::runtime_error("rule '" + r.id + "': malformed prov clause");
      std::string body = clause.substr(6, clause.size() - 7);
      if (!trim(body).empty())
        for (const auto& item : split_on(body, ','))
          r.provenance.push_back(trim(item));
    } else {
      throw std::runtime_error("rule '" + r.id + "': unknown clause '" +
                               clause + "'");
    }
  }
  return r;
}

} // namespace

Grammar Grammar::parse(const std::string& text) {
  Grammar g;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    try {
      if (t[0] == '@') {
        std::istringstream din(t);
        std::string directive;
        din >> directive;
        if (directive == "@start") {
          din >> g.start;
          if (g.start.empty()) throw std::runtime_error("@start needs a category");
        } else if (directive == "@chunk") {
          std::string cat;
          din >> cat;
          if (cat.empty()) throw std::runtime_error("@chunk needs a category");
          g.chunk_roots.insert(cat);
        } else if (directive == "@lexfeat") {
          std::string cat, surface, fs;
          din >> cat >> surface >> fs;
          if (fs.empty())
            throw std::runtime_error("@lexfeat needs cat, surface, features");
          if (!is_terminal(cat))
            throw std::runtime_error("@lexfeat category '" + cat +
                                     "' is not a terminal");
          g.lexfeats[{cat, lowercase(surface)}].push_back(
              FeatureStructure::parse(fs));
        } else {
          throw std::runtime_error("unknown directive " + directive);
        }
      } else {
        g.rules.push_back(parse_rule_line(t));
      }
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("grammar line " + std::to_string(lineno) +
                               ": " + e.what());
    }
  }
  if (g.start.empty()) throw std::runtime_error("grammar: missing @start");
  g.chunk_roots.insert(g.start);
  g.reindex();
  g.validate();
  return g;
}

Grammar Grammar::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grammar file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string Grammar::serialize() const {
  std::ostringstream out;
  out << "@start " << start << '\n';
  for (const auto& c : chunk_roots) out << "@chunk " << c << '\n';
  for (const auto& [key, fss] : lexfeats)
    for (const auto& fs : fss)
      out << "@lexfeat " << key.first << ' ' << key.second << ' '
          << fs.serialize() << '\n';
  for (const auto& r : rules) {
    out << r.id << ": " << r.mother.category;
    if (!r.mother.features.empty()) out << r.mother.features.serialize();
    out << " ->";
    for (const auto& d : r.daughters) {
      out << ' ' << d.category;
      if (!d.features.empty()) out << d.features.serialize();
    }
    out << " ; head=" << r.head_daughter;
    if (r.rel_daughter > 0) out << " ; rel=" << r.rel_daughter;
    if (!r.arg_slots.empty()) {
      out << " ; args={";
      bool first = true;
      for (const auto& [pos, slot] : r.arg_slots) {
        if (!first) out << ',';
        first = false;
        out << pos << ':' << slot;
      }
      out << '}';
    }
    if (r.count > 0) out << " ; count=" << r.count;
    if (!r.provenance.empty()) {
      out << " ; prov=[";
      for (size_t i = 0; i < r.provenance.size(); ++i) {
        if (i) out << ',';
        out << r.provenance[i];
      }
      out << ']';
    }
    out << '\n';
  }
  return out.str();
}

const Rule* Grammar::rule_by_id(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &rules[it->second];
}

bool Grammar::is_terminal(const std::string& category) {
  MajorCat cat;
  return major_cat_from_string(category, cat);
}

std::set<std::string> Grammar::nonterminals() const {
  std::set<std::string> out;
  for (const auto& r : rules) out.insert(r.mother.category);
  return out;
}

void Grammar::reindex() {
  by_id_.clear();
  for (size_t i = 0; i < rules.size(); ++i) {
    if (!by_id_.emplace(rules[i].id, i).second)
      throw std::runtime_error("duplicate rule id '" + rules[i].id + "'");
  }
}

void Grammar::validate() const {
  std::set<std::string> nts = nonterminals();
  for (const auto& r : rules) {
    if (is_terminal(r.mother.category))
      throw std::runtime_error("rule '" + r.id +
                               "': mother is a terminal category");
    int n = static_cast<int>(r.daughters.size());
    if (r.head_daughter < 1 || r.head_daughter > n)
      throw std::runtime_error("rule '" + r.id + "': head out of range");
    if (r.rel_daughter < 0 || r.rel_daughter > n)
      throw std::runtime_error("rule '" + r.id + "': rel out of range");
    for (const auto& [pos, slot] : r.arg_slots) {
      if (pos < 1 || pos > n)
        throw std::runtime_error("rule '" + r.id + "': args position " +
                                 std::to_string(pos) + " out of range");
      if (slot != "rel" && !all_digits(slot))
        throw std::runtime_error("rule '" + r.id + "': bad args slot '" +
                                 slot + "'");
    }
    for (const auto& d : r.daughters) {
      if (!is_terminal(d.category) && !nts.count(d.category))
        throw std::runtime_error("rule '" + r.id + "': daughter category '" +
                                 d.category + "' has no rules");
    }
  }
  if (!start.empty() && !nonterminals().count(start) && !rules.empty())
    throw std::runtime_error("start category '" + start + "' has no rules");
}

Rule instantiate(const Rule& r, int& counter) {
  std::map<std::string, std::string> mapping;
  Rule out = r;
  out.mother.features =
      rename_variables(r.mother.features, mapping, "_", counter);
  for (size_t i = 0; i < r.daughters.size(); ++i)
    out.daughters[i].features =
        rename_variables(r.daughters[i].features, mapping, "_", counter);
  return out;
}

namespace {

std::vector<FeatureStructure> default_edge_features(MajorCat cat,
                                                    const std::string& surface,
                                                    const std::string& root) {
  auto atom = [](const char* f, const char* v) {
    FeatureStructure fs;
    fs.set(f, FeatureValue::atom(v));
    return fs;
  };
  switch (cat) {
  case MajorCat::Noun:
    return {atom("num", surface == root ? "sg" : "pl")};
  case MajorCat::Verb: {
    if (surface == root) {
      FeatureStructure fin = atom("form", "fin");
      fin.set("num", FeatureValue::atom("pl"));
      return {atom("form", "base"), fin};
    }
    FeatureStructure fs = atom("form", "fin");
    fs.set("num", FeatureValue::atom("sg"));
    return {fs};
  }
  case MajorCat::ProperName: {
    FeatureStructure fs = atom("num", "sg");
    fs.set("wh", FeatureValue::atom("n"));
    return {fs};
  }
  case MajorCat::Det:
    return {atom("wh", "n")};
  case MajorCat::Prep:
    return {atom("inf", "n")};
  default:
    return {FeatureStructure{}};
  }
}

} // namespace

std::vector<LexEdge> lexical_edges(const Grammar& g, const Lexicon& lex,
                                   const std::string& word) {
  const std::string surface = lowercase(word);
  std::vector<LexEdge> out;
  for (const auto& a : lex.analyze_root(surface)) {
    const std::string cat_name = to_string(a.major_cat);
    std::vector<FeatureStructure> fss;
    auto it = g.lexfeats.find({cat_name, surface});
    if (it != g.lexfeats.end())
      fss = it->second;
    else
      fss = default_edge_features(a.major_cat, surface, a.root);
    for (const auto& fs : fss) {
      LexEdge e{cat_name, a.root, surface, fs};
      if (std::find(out.begin(), out.end(), e) == out.end())
        out.push_back(e);
    }
  }
  return out;
}

namespace {

void resolve_node(const Grammar& g, const Lexicon& lex, const ParseTree& node,
                  int& counter, size_t limit, std::vector<ParseTree>& out) {
  if (node.stub) {
    out.push_back(node);
    return;
  }
  if (node.is_leaf()) {
    for (const auto& e : lexical_edges(g, lex, node.word)) {
      if (e.category != node.category) continue;
      ParseTree t;
      t.category = e.category;
      t.features = e.features;
      t.word = e.word;
      t.root = e.root;
      out.push_back(t);
      if (out.size() >= limit) return;
    }
    return;
  }
  const Rule* r = g.rule_by_id(node.rule_id);
  if (!r || r->daughters.size() != node.daughters.size()) return;

  std::vector<std::vector<ParseTree>> dvars(node.daughters.size());
  for (size_t i = 0; i < node.daughters.size(); ++i) {
    resolve_node(g, lex, node.daughters[i], counter, limit, dvars[i]);
    if (dvars[i].empty()) return;
  }

  std::vector<size_t> idx(node.daughters.size(), 0);
  while (true) {
    Rule inst = instantiate(*r, counter);
    Env env;
    bool ok = true;
    for (size_t i = 0; i < idx.size() && ok; ++i) {
      const ParseTree& d = dvars[i][idx[i]];
      if (!d.stub && inst.daughters[i].category != d.category) ok = false;
      if (ok) ok = unify_into(inst.daughters[i].features, d.features, env);
    }
    if (ok) {
      ParseTree t;
      t.category = r->mother.category;
      t.rule_id = r->id;
      t.features = substitute(inst.mother.features, env);
      for (size_t i = 0; i < idx.size(); ++i)
        t.daughters.push_back(dvars[i][idx[i]]);
      out.push_back(std::move(t));
      if (out.size() >= limit) return;
    }
    size_t k = idx.size();
    while (k > 0) {
      --k;
      if (++idx[k] < dvars[k].size()) break;
      idx[k] = 0;
      if (k == 0) return;
    }
  }
}

} // namespace

std::vector<ParseTree> resolve_tree(const Grammar& g, const Lexicon& lex,
                                    const ParseTree& skeleton, size_t limit) {
  std::vector<ParseTree> out;
  int counter = 0;
  resolve_node(g, lex, skeleton, counter, limit, out);
  return out;
}

bool validate_tree(const Grammar& g, const Lexicon& lex, const ParseTree& t) {
  if (t.stub) return true;
  if (t.is_leaf()) {
    for (const auto& e : lexical_edges(g, lex, t.word)) {
      if (e.category != t.category) continue;
      if (!t.root.empty() && e.root != t.root) continue;
      if (unify(e.features, t.features)) return true;
    }
    return false;
  }
  if (!t.is_internal()) return false;
  const Rule* r = g.rule_by_id(t.rule_id);
  if (!r || r->daughters.size() != t.daughters.size()) return false;
  if (r->mother.category != t.category) return false;
  int counter = 0;
  Rule inst = instantiate(*r, counter);
  Env env;
  for (size_t i = 0; i < t.daughters.size(); ++i) {
    if (inst.daughters[i].category != t.daughters[i].category) return false;
    if (!unify_into(inst.daughters[i].features, t.daughters[i].features, env))
      return false;
  }
  if (!unify_into(inst.mother.features, t.features, env)) return false;
  for (const auto& d : t.daughters)
    if (!validate_tree(g, lex, d)) return false;
  return true;
}

} // namespace nblp
