#include "nblp/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nblp {

namespace {

const struct {
  MajorCat cat;
  const char* name;
} kCatNames[] = {
    {MajorCat::Verb, "verb"},     {MajorCat::Noun, "noun"},
    {MajorCat::Det, "det"},       {MajorCat::Prep, "prep"},
    {MajorCat::ProperName, "pn"}, {MajorCat::Number, "number"},
    {MajorCat::Marker, "marker"}, {MajorCat::Other, "other"},
};

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == '\t') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

} // namespace

const char* to_string(MajorCat cat) {
  for (const auto& cn : kCatNames)
    if (cn.cat == cat) return cn.name;
  return "other";
}

bool major_cat_from_string(const std::string& s, MajorCat& out) {
  for (const auto& cn : kCatNames) {
    if (s == cn.name) {
      out = cn.cat;
      return true;
    }
  }
  // long-form aliases used in hand-written files
  if (s == "propername") {
    out = MajorCat::ProperName;
    return true;
  }
  return false;
}

std::string lowercase(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<std::string> split_words(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string w;
  while (in >> w) out.push_back(lowercase(w));
  return out;
}

Lexicon::Lexicon()
    : markers_{"sorry", "no"},
      skippable_{"a", "and", "from", "in", "of", "or", "to"} {}

void Lexicon::add_entry(const LexEntry& e) {
  if (e.surface.empty() || e.root.empty())
    throw std::runtime_error("lexicon: empty surface or root");
  LexEntry entry = e;
  entry.surface = lowercase(entry.surface);
  entry.root = lowercase(entry.root);
  auto& list = entries_[entry.surface];
  if (std::find(list.begin(), list.end(), entry) == list.end())
    list.push_back(entry);
  if (!entry.sem_class.empty()) class_by_root_[entry.root] = entry.sem_class;
}

void Lexicon::set_markers(const std::set<std::string>& markers) {
  if (markers.empty())
    throw std::runtime_error("lexicon: repair marker set must be non-empty");
  markers_ = markers;
}

void Lexicon::set_skippable(const std::set<std::string>& words) {
  skippable_ = words;
}

Lexicon Lexicon::parse(const std::string& text) {
  Lexicon lex;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (line[0] == '@') {
      std::istringstream hin(line);
      std::string directive;
      hin >> directive;
      std::set<std::string> words;
      std::string w;
      while (hin >> w) words.insert(lowercase(w));
      if (directive == "@markers")
        lex.set_markers(words);
      else if (directive == "@skippable")
        lex.set_skippable(words);
      else
        throw std::runtime_error("lexicon line " + std::to_string(lineno) +
                                 ": unknown directive " + directive);
      continue;
    }
    auto fields = split_tabs(line);
    if (fields.size() < 3 || fields.size() > 4)
      throw std::runtime_error("lexicon line " + std::to_string(lineno) +
                               ": expected 3 or 4 tab-separated fields");
    LexEntry e;
    e.surface = fields[0];
    e.root = fields[1];
    if (!major_cat_from_string(fields[2], e.major_cat))
      throw std::runtime_error("lexicon line " + std::to_string(lineno) +
                               ": unknown category " + fields[2]);
    if (fields.size() == 4) e.sem_class = fields[3];
    lex.add_entry(e);
  }
  return lex;
}

Lexicon Lexicon::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open lexicon file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string Lexicon::serialize() const {
  std::ostringstream out;
  out << "@markers";
  for (const auto& m : markers_) out << ' ' << m;
  out << '\n';
  out << "@skippable";
  for (const auto& s : skippable_) out << ' ' << s;
  out << '\n';
  for (const auto& [surface, list] : entries_) {
    for (const auto& e : list) {
      out << e.surface << '\t' << e.root << '\t' << to_string(e.major_cat);
      if (!e.sem_class.empty()) out << '\t' << e.sem_class;
      out << '\n';
    }
  }
  return out.str();
}

std::vector<RootAnalysis> Lexicon::analyze_root(const std::string& word) const {
  const std::string w = lowercase(word);
  if (w.empty()) throw std::runtime_error("analyze_root: empty word");
  auto it = entries_.find(w);
  if (it != entries_.end()) {
    std::vector<RootAnalysis> out;
    for (const auto& e : it->second) out.push_back({e.root, e.major_cat});
    return out;
  }
  // suffix fallback: strip and reuse the base form's analyses when known;
  // a dropped stem-final e is restored ("serving" -> "serve")
  static const char* kSuffixes[] = {"es", "s", "ing", "ed"};
  for (const char* suf : kSuffixes) {
    const size_t n = std::strlen(suf);
    if (w.size() <= n || w.compare(w.size() - n, n, suf) != 0) continue;
    const std::string stem = w.substr(0, w.size() - n);
    for (const std::string& cand : {stem, stem + "e"}) {
      auto base = entries_.find(cand);
      if (base != entries_.end()) {
        std::vector<RootAnalysis> out;
        for (const auto& e : base->second) out.push_back({e.root, e.major_cat});
        return out;
      }
    }
  }
  return {{w, MajorCat::Other}};
}

bool Lexicon::is_number(const std::string& word) const {
  for (const auto& a : analyze_root(word))
    if (a.major_cat == MajorCat::Number) return true;
  return false;
}

bool Lexicon::is_repair_marker(const std::string& word) const {
  return markers_.count(lowercase(word)) > 0;
}

bool Lexicon::is_common_skippable(const std::string& word) const {
  return skippable_.count(lowercase(word)) > 0;
}

std::string Lexicon::sem_class_of(const std::string& root) const {
  auto it = class_by_root_.find(lowercase(root));
  return it == class_by_root_.end() ? lowercase(root) : it->second;
}

bool Lexicon::has_entry(const std::string& surface) const {
  return entries_.count(lowercase(surface)) > 0;
}

const std::vector<LexEntry>* Lexicon::entries_for(
    const std::string& surface) const {
  auto it = entries_.find(lowercase(surface));
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::string> Lexicon::surfaces_with_cat(MajorCat cat) const {
  std::vector<std::string> out;
  for (const auto& [surface, list] : entries_)
    for (const auto& e : list)
      if (e.major_cat == cat) {
        out.push_back(surface);
        break;
      }
  return out;
}

} // namespace nblp
