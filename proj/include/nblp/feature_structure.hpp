#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nblp {

class FeatureStructure;

// One feature value: an atom, a variable, or a nested structure. Variables
// are spelled with a leading uppercase letter or underscore.
class FeatureValue {
public:
  enum class Kind { Atom, Var, Struct };

  FeatureValue() = default;
  static FeatureValue atom(std::string v);
  static FeatureValue var(std::string name);
  static FeatureValue nested(FeatureStructure fs);

  Kind kind() const { return kind_; }
  const std::string& text() const { return text_; } // atom value or var name
  const FeatureStructure& fs() const;

  bool operator==(const FeatureValue& o) const;

private:
  Kind kind_ = Kind::Atom;
  std::string text_;
  std::vector<FeatureStructure> fs_; // empty, or one nested structure
};

// Open-world feature map: absent features are unconstrained.
class FeatureStructure {
public:
  std::map<std::string, FeatureValue> feats;

  bool empty() const { return feats.empty(); }
  void set(const std::string& f, FeatureValue v);
  const FeatureValue* get(const std::string& f) const;
  // Atom value of a feature, or empty when absent / not an atom.
  std::string atom_of(const std::string& f) const;

  bool operator==(const FeatureStructure& o) const { return feats == o.feats; }
  bool operator!=(const FeatureStructure& o) const { return !(*this == o); }

  // "[f=v,g=W]"; "[]" when empty. Parse accepts the same shape.
  std::string serialize() const;
  static FeatureStructure parse(const std::string& text);
};

bool is_variable_token(const std::string& s);

// Variable bindings accumulated by unification. Bindings may chain.
using Env = std::map<std::string, FeatureValue>;

// Follow variable chains until an unbound variable or a non-variable value.
FeatureValue resolve(const FeatureValue& v, const Env& env);

// Unify under an environment; returns false on clash, leaving env in an
// undefined state the caller must discard.
bool unify_values(const FeatureValue& a, const FeatureValue& b, Env& env);
bool unify_into(const FeatureStructure& a, const FeatureStructure& b, Env& env);

// Apply bindings everywhere; unbound variables stay.
FeatureValue substitute(const FeatureValue& v, const Env& env);
FeatureStructure substitute(const FeatureStructure& fs, const Env& env);

// Most general unifier of two structures, or nullopt on clash.
std::optional<FeatureStructure> unify(const FeatureStructure& a,
                                      const FeatureStructure& b);

// Rewrite variable names through a mapping, inventing `prefix`+n names for
// unseen variables. Used both to rename rule instances apart and to put
// structures into canonical form.
FeatureStructure rename_variables(const FeatureStructure& fs,
                                  std::map<std::string, std::string>& mapping,
                                  const std::string& prefix, int& counter);

// In-place canonical renaming across several structures: variables become
// V1, V2, ... by first occurrence in iteration order.
void canonicalize_variables(std::vector<FeatureStructure*> fss);

} // namespace nblp
