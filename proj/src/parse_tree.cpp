#include "nblp/parse_tree.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nblp {

namespace {

void serialize_node(const ParseTree& t, std::ostream& out) {
  if (t.stub) {
    out << t.category << '*';
    return;
  }
  if (t.is_leaf()) {
    out << t.category << ':' << t.word;
    return;
  }
  out << '(' << t.rule_id;
  for (const auto& d : t.daughters) {
    out << ' ';
    serialize_node(d, out);
  }
  out << ')';
}

void skip_spaces(const std::string& s, size_t& pos) {
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
}

std::string read_atom(const std::string& s, size_t& pos) {
  size_t start = pos;
  while (pos < s.size() && s[pos] != ' ' && s[pos] != '\t' && s[pos] != '(' &&
         s[pos] != ')')
    ++pos;
  if (pos == start)
    throw std::runtime_error("tree syntax: empty atom in '" + s + "'");
  return s.substr(start, pos - start);
}

ParseTree parse_node(const std::string& s, size_t& pos) {
  skip_spaces(s, pos);
  if (pos >= s.size())
    throw std::runtime_error("tree syntax: unexpected end in '" + s + "'");
  if (s[pos] != '(') {
    std::string atom = read_atom(s, pos);
    ParseTree t;
    if (!atom.empty() && atom.back() == '*') {
      t.category = atom.substr(0, atom.size() - 1);
      t.stub = true;
      return t;
    }
    size_t colon = atom.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == atom.size())
      throw std::runtime_error("tree syntax: leaf must be cat:word, got '" +
                               atom + "'");
    t.category = atom.substr(0, colon);
    t.word = atom.substr(colon + 1);
    return t;
  }
  ++pos; // '('
  skip_spaces(s, pos);
  ParseTree t;
  t.rule_id = read_atom(s, pos);
  while (true) {
    skip_spaces(s, pos);
    if (pos >= s.size())
      throw std::runtime_error("tree syntax: missing ')' in '" + s + "'");
    if (s[pos] == ')') {
      ++pos;
      break;
    }
    t.daughters.push_back(parse_node(s, pos));
  }
  if (t.daughters.empty())
    throw std::runtime_error("tree syntax: rule node without daughters in '" +
                             s + "'");
  return t;
}

void collect_brackets(const ParseTree& t, int start,
                      std::multiset<std::tuple<std::string, int, int>>& out) {
  if (!t.is_internal()) return;
  int len = leaf_count(t);
  out.insert({t.category, start, start + len});
  int pos = start;
  for (const auto& d : t.daughters) {
    collect_brackets(d, pos, out);
    pos += leaf_count(d);
  }
}

} // namespace

std::string serialize_tree(const ParseTree& t) {
  std::ostringstream out;
  serialize_node(t, out);
  return out.str();
}

namespace {

void collect_feature_sets(ParseTree& t, std::vector<FeatureStructure*>& out) {
  out.push_back(&t.features);
  for (ParseTree& d : t.daughters) collect_feature_sets(d, out);
}

void serialize_with_features(const ParseTree& t, std::string& out) {
  if (t.stub) {
    out += t.category;
    out += t.features.serialize();
    out += '*';
    return;
  }
  if (t.is_leaf()) {
    out += t.category;
    out += t.features.serialize();
    out += ':';
    out += t.word;
    return;
  }
  out += '(';
  out += t.rule_id;
  out += t.features.serialize();
  for (const ParseTree& d : t.daughters) {
    out += ' ';
    serialize_with_features(d, out);
  }
  out += ')';
}

} // namespace

std::string featured_signature(const ParseTree& t) {
  ParseTree copy = t;
  std::vector<FeatureStructure*> fss;
  collect_feature_sets(copy, fss);
  canonicalize_variables(fss);
  std::string out;
  serialize_with_features(copy, out);
  return out;
}

ParseTree parse_tree_text(const std::string& text) {
  size_t pos = 0;
  ParseTree t = parse_node(text, pos);
  skip_spaces(text, pos);
  if (pos != text.size())
    throw std::runtime_error("tree syntax: trailing input in '" + text + "'");
  return t;
}

std::vector<std::string> tree_yield(const ParseTree& t) {
  if (t.is_leaf()) return {t.word};
  if (t.stub) return {};
  std::vector<std::string> out;
  for (const auto& d : t.daughters) {
    auto sub = tree_yield(d);
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

int leaf_count(const ParseTree& t) {
  if (t.is_leaf()) return 1;
  int n = 0;
  for (const auto& d : t.daughters) n += leaf_count(d);
  return n;
}

std::multiset<std::tuple<std::string, int, int>> tree_brackets(
    const ParseTree& t) {
  std::multiset<std::tuple<std::string, int, int>> out;
  collect_brackets(t, 0, out);
  return out;
}

std::vector<ParseTree> parse_treebank_text(const std::string& text) {
  std::vector<ParseTree> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    try {
      out.push_back(parse_tree_text(line));
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("treebank line " + std::to_string(lineno) +
                               ": " + e.what());
    }
  }
  return out;
}

std::vector<ParseTree> load_treebank(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open treebank file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_treebank_text(buf.str());
}

std::string serialize_treebank(const std::vector<ParseTree>& trees) {
  std::ostringstream out;
  for (const auto& t : trees) out << serialize_tree(t) << '\n';
  return out.str();
}

} // namespace nblp
