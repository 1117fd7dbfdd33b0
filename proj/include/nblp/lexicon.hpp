#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace nblp {

// Major category tags form a closed set; words outside it degrade to Other.
enum class MajorCat {
  Verb,
  Noun,
  Det,
  Prep,
  ProperName,
  Number,
  Marker,
  Other,
};

const char* to_string(MajorCat cat);
bool major_cat_from_string(const std::string& s, MajorCat& out);

struct LexEntry {
  std::string surface;   // lowercase token
  std::string root;      // lowercase root form
  MajorCat major_cat = MajorCat::Other;
  std::string sem_class; // e.g. "*place"; empty when unclassed

  bool operator==(const LexEntry& o) const {
    return surface == o.surface && root == o.root && major_cat == o.major_cat &&
           sem_class == o.sem_class;
  }
};

struct RootAnalysis {
  std::string root;
  MajorCat major_cat = MajorCat::Other;
};

/// Word-level knowledge: roots, major categories, repair markers, the
/// common-word skip set, and semantic classes. Immutable after load.
class Lexicon {
public:
  Lexicon();

  static Lexicon load_file(const std::string& path);
  static Lexicon parse(const std::string& text);
  std::string serialize() const;

  void add_entry(const LexEntry& e);
  void set_markers(const std::set<std::string>& markers);
  void set_skippable(const std::set<std::string>& words);

  // All lexical analyses of a token; unknown words come back as themselves
  // with category Other. Unknown inflected forms are resolved through a
  // suffix stripper (-s, -es, -ing, -ed) when the stripped form is known.
  std::vector<RootAnalysis> analyze_root(const std::string& word) const;

  bool is_number(const std::string& word) const;
  bool is_repair_marker(const std::string& word) const;
  bool is_common_skippable(const std::string& word) const;

  // Class tag for a root, or the root itself when unclassed.
  std::string sem_class_of(const std::string& root) const;

  bool has_entry(const std::string& surface) const;
  const std::vector<LexEntry>* entries_for(const std::string& surface) const;
  std::vector<std::string> surfaces_with_cat(MajorCat cat) const;

  const std::set<std::string>& repair_markers() const { return markers_; }
  const std::set<std::string>& common_skippable() const { return skippable_; }

private:
  std::map<std::string, std::vector<LexEntry>> entries_;
  std::map<std::string, std::string> class_by_root_;
  std::set<std::string> markers_;
  std::set<std::string> skippable_;
};

std::string lowercase(const std::string& s);
std::vector<std::string> split_words(const std::string& line);

} // namespace nblp
