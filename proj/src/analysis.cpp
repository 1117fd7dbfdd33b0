#include "nblp/analysis.hpp"

#include <sstream>
#include <stdexcept>

namespace nblp {

namespace {

const Rule* rule_for(const Grammar& g, const ParseTree& t) {
  const Rule* r = g.rule_by_id(t.rule_id);
  if (!r || r->daughters.size() != t.daughters.size())
    throw std::runtime_error("analysis: tree does not match grammar rule '" +
                             t.rule_id + "'");
  return r;
}

// The word that names a modifier relation: a phrase delegates to its rule's
// rel daughter (e.g. the preposition under a PP); a leaf names itself.
const ParseTree* rel_leaf(const Grammar& g, const ParseTree& t) {
  if (t.is_leaf()) return &t;
  if (!t.is_internal()) return nullptr;
  const Rule* r = rule_for(g, t);
  if (r->rel_daughter > 0) return rel_leaf(g, t.daughters[r->rel_daughter - 1]);
  return head_leaf(g, t);
}

void collect_triples(const Grammar& g, const Lexicon& lex, const ParseTree& t,
                     std::multiset<std::string>& out) {
  if (!t.is_internal()) return;
  const Rule* r = rule_for(g, t);
  for (const auto& [pos, slot] : r->arg_slots) {
    const ParseTree& dep = t.daughters[pos - 1];
    const ParseTree* h1 = head_leaf(g, t);
    const ParseTree* h2 = head_leaf(g, dep);
    if (!h1 || !h2) continue;
    std::string rel = slot;
    if (slot == "rel") {
      // The relating word sits on this rule's own rel daughter when it has
      // one (coordination); otherwise inside the dependent (PP attachment).
      const ParseTree* rl = r->rel_daughter > 0
                                ? rel_leaf(g, t.daughters[r->rel_daughter - 1])
                                : rel_leaf(g, dep);
      if (!rl) continue;
      rel = rl->root;
    }
    out.insert("(" + lex.sem_class_of(h1->root) + "," + rel + "," +
               lex.sem_class_of(h2->root) + ")");
  }
  for (const auto& d : t.daughters) collect_triples(g, lex, d, out);
}

// Numbers that can disagree in a clause headed by "be": the copula's own,
// and those of the nominal daughters of the clause node.
int count_num_mismatches(const Grammar& g, const ParseTree& t) {
  if (!t.is_internal()) return 0;
  int n = 0;
  const ParseTree* head = head_leaf(g, t);
  if (head && head->category == "verb" && head->root == "be") {
    std::set<std::string> nums;
    std::string vn = head->features.atom_of("num");
    if (!vn.empty()) nums.insert(vn);
    const Rule* r = rule_for(g, t);
    for (size_t i = 0; i < t.daughters.size(); ++i) {
      if (Grammar::is_terminal(r->daughters[i].category)) continue;
      std::string dn = t.daughters[i].features.atom_of("num");
      if (!dn.empty()) nums.insert(dn);
    }
    if (nums.size() > 1) n = 1;
  }
  for (const auto& d : t.daughters) n += count_num_mismatches(g, d);
  return n;
}

int count_det_noun_mismatches(const Grammar& g, const ParseTree& t) {
  if (!t.is_internal()) return 0;
  int n = 0;
  const Rule* r = rule_for(g, t);
  const ParseTree* head = head_leaf(g, t);
  if (head && head->category == "noun") {
    std::string hn = head->features.atom_of("num");
    for (size_t i = 0; i < t.daughters.size(); ++i) {
      if (r->daughters[i].category != "det" || !t.daughters[i].is_leaf())
        continue;
      std::string dn = t.daughters[i].features.atom_of("num");
      if (!hn.empty() && !dn.empty() && hn != dn) ++n;
    }
  }
  for (const auto& d : t.daughters) n += count_det_noun_mismatches(g, d);
  return n;
}

} // namespace

const ParseTree* head_leaf(const Grammar& g, const ParseTree& t) {
  if (t.is_leaf()) return &t;
  if (!t.is_internal()) return nullptr;
  const Rule* r = rule_for(g, t);
  return head_leaf(g, t.daughters[r->head_daughter - 1]);
}

std::multiset<std::string> extract_triples(const Grammar& g, const Lexicon& lex,
                                           const ParseTree& t) {
  std::multiset<std::string> out;
  collect_triples(g, lex, t, out);
  return out;
}

const std::map<std::string, FlagCounter>& default_flag_registry() {
  static const std::map<std::string, FlagCounter> registry{
      {"num_mismatch", count_num_mismatches},
      {"det_noun_mismatch", count_det_noun_mismatches},
  };
  return registry;
}

std::map<std::string, int> structural_flags(
    const Grammar& g, const ParseTree& t,
    const std::map<std::string, FlagCounter>& registry) {
  std::map<std::string, int> out;
  for (const auto& [name, fn] : registry) out[name] = fn(g, t);
  return out;
}

std::map<std::string, int> structural_flags(const Grammar& g,
                                            const ParseTree& t) {
  return structural_flags(g, t, default_flag_registry());
}

std::multiset<std::string> word_ngrams(const std::vector<std::string>& words,
                                       int n) {
  if (n < 1 || n > 4) throw std::runtime_error("word_ngrams: n out of range");
  std::vector<std::string> padded;
  padded.reserve(words.size() + 2);
  padded.push_back("<s>");
  padded.insert(padded.end(), words.begin(), words.end());
  padded.push_back("</s>");
  std::multiset<std::string> out;
  for (size_t i = 0; i + n <= padded.size(); ++i) {
    std::string gram = padded[i];
    for (size_t k = 1; k < static_cast<size_t>(n); ++k)
      gram += " " + padded[i + k];
    out.insert(std::move(gram));
  }
  return out;
}

std::multiset<std::string> collect_rules_used(const ParseTree& t) {
  std::multiset<std::string> out;
  if (t.is_internal()) {
    out.insert(t.rule_id);
    for (const auto& d : t.daughters)
      for (const auto& id : collect_rules_used(d)) out.insert(id);
  }
  return out;
}

Analysis analyze(const Grammar& g, const Lexicon& lex, const ParseTree& t,
                 int max_ngram) {
  Analysis a;
  a.tree = t;
  a.triples = extract_triples(g, lex, t);
  a.rules_used = collect_rules_used(t);
  a.structural = structural_flags(g, t);
  std::vector<std::string> words = tree_yield(t);
  for (int n = 1; n <= max_ngram; ++n) a.ngrams[n] = word_ngrams(words, n);
  return a;
}

std::string serialize_record(const std::string& utt_id, int rank,
                             const Analysis& a) {
  std::string out = utt_id + "\t" + std::to_string(rank) + "\t" +
                    serialize_tree(a.tree) + "\t";
  bool first = true;
  for (const auto& tr : a.triples) {
    if (!first) out += ' ';
    out += tr;
    first = false;
  }
  out += '\t';
  first = true;
  for (const auto& [name, count] : a.structural) {
    if (!first) out += ',';
    out += name + "=" + std::to_string(count);
    first = false;
  }
  return out;
}

AnalysisRecord parse_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == '\t') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  if (fields.size() != 5)
    throw std::runtime_error("analysis record: expected 5 fields, got " +
                             std::to_string(fields.size()));
  AnalysisRecord rec;
  rec.utt_id = fields[0];
  try {
    size_t used = 0;
    rec.rank = std::stoi(fields[1], &used);
    if (used != fields[1].size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw std::runtime_error("analysis record: bad rank '" + fields[1] + "'");
  }
  rec.tree = parse_tree_text(fields[2]);
  std::istringstream triples(fields[3]);
  std::string tok;
  while (triples >> tok) rec.triples.insert(tok);
  if (!fields[4].empty()) {
    std::istringstream flags(fields[4]);
    std::string item;
    while (std::getline(flags, item, ',')) {
      size_t eq = item.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("analysis record: bad flag '" + item + "'");
      try {
        size_t used = 0;
        int v = std::stoi(item.substr(eq + 1), &used);
        if (used != item.size() - eq - 1) throw std::invalid_argument("t");
        rec.structural[item.substr(0, eq)] = v;
      } catch (const std::exception&) {
        throw std::runtime_error("analysis record: bad flag '" + item + "'");
      }
    }
  }
  return rec;
}

} // namespace nblp
