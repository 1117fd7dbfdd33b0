#include "nblp/feature_structure.hpp"

#include <sstream>
#include <stdexcept>

namespace nblp {

FeatureValue FeatureValue::atom(std::string v) {
  FeatureValue out;
  out.kind_ = Kind::Atom;
  out.text_ = std::move(v);
  return out;
}

FeatureValue FeatureValue::var(std::string name) {
  FeatureValue out;
  out.kind_ = Kind::Var;
  out.text_ = std::move(name);
  return out;
}

FeatureValue FeatureValue::nested(FeatureStructure fs) {
  FeatureValue out;
  out.kind_ = Kind::Struct;
  out.fs_.push_back(std::move(fs));
  return out;
}

const FeatureStructure& FeatureValue::fs() const {
  if (kind_ != Kind::Struct)
    throw std::logic_error("feature value is not a structure");
  return fs_.front();
}

bool FeatureValue::operator==(const FeatureValue& o) const {
  if (kind_ != o.kind_) return false;
  if (kind_ == Kind::Struct) return fs_.front() == o.fs_.front();
  return text_ == o.text_;
}

void FeatureStructure::set(const std::string& f, FeatureValue v) {
  feats[f] = std::move(v);
}

const FeatureValue* FeatureStructure::get(const std::string& f) const {
  auto it = feats.find(f);
  return it == feats.end() ? nullptr : &it->second;
}

std::string FeatureStructure::atom_of(const std::string& f) const {
  const FeatureValue* v = get(f);
  return v && v->kind() == FeatureValue::Kind::Atom ? v->text() : "";
}

bool is_variable_token(const std::string& s) {
  return !s.empty() && (s[0] == '_' || (s[0] >= 'A' && s[0] <= 'Z'));
}

namespace {

void serialize_value(const FeatureValue& v, std::ostream& out) {
  if (v.kind() == FeatureValue::Kind::Struct)
    out << v.fs().serialize();
  else
    out << v.text();
}

} // namespace

std::string FeatureStructure::serialize() const {
  std::ostringstream out;
  out << '[';
  bool first = true;
  for (const auto& [f, v] : feats) {
    if (!first) out << ',';
    first = false;
    out << f << '=';
    serialize_value(v, out);
  }
  out << ']';
  return out.str();
}

namespace {

// Recursive descent over "[f=v,g=[h=w]]".
FeatureStructure parse_fs(const std::string& s, size_t& pos);

void skip_ws(const std::string& s, size_t& pos) {
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
}

std::string parse_token(const std::string& s, size_t& pos) {
  size_t start = pos;
  while (pos < s.size() && s[pos] != '=' && s[pos] != ',' && s[pos] != ']' &&
         s[pos] != '[' && s[pos] != ' ' && s[pos] != '\t')
    ++pos;
  if (pos == start)
    throw std::runtime_error("feature syntax: empty token in '" + s + "'");
  return s.substr(start, pos - start);
}

FeatureValue parse_value(const std::string& s, size_t& pos) {
  skip_ws(s, pos);
  if (pos < s.size() && s[pos] == '[')
    return FeatureValue::nested(parse_fs(s, pos));
  std::string tok = parse_token(s, pos);
  return is_variable_token(tok) ? FeatureValue::var(tok)
                                : FeatureValue::atom(tok);
}

FeatureStructure parse_fs(const std::string& s, size_t& pos) {
  FeatureStructure out;
  if (pos >= s.size() || s[pos] != '[')
    throw std::runtime_error("feature syntax: expected '[' in '" + s + "'");
  ++pos;
  skip_ws(s, pos);
  if (pos < s.size() && s[pos] == ']') {
    ++pos;
    return out;
  }
  while (true) {
    skip_ws(s, pos);
    std::string name = parse_token(s, pos);
    skip_ws(s, pos);
    if (pos >= s.size() || s[pos] != '=')
      throw std::runtime_error("feature syntax: expected '=' after '" + name +
                               "' in '" + s + "'");
    ++pos;
    FeatureValue v = parse_value(s, pos);
    if (out.feats.count(name))
      throw std::runtime_error("feature syntax: duplicate feature '" + name +
                               "' in '" + s + "'");
    out.set(name, std::move(v));
    skip_ws(s, pos);
    if (pos < s.size() && s[pos] == ',') {
      ++pos;
      continue;
    }
    if (pos < s.size() && s[pos] == ']') {
      ++pos;
      return out;
    }
    throw std::runtime_error("feature syntax: expected ',' or ']' in '" + s +
                             "'");
  }
}

} // namespace

FeatureStructure FeatureStructure::parse(const std::string& text) {
  size_t pos = 0;
  FeatureStructure out = parse_fs(text, pos);
  skip_ws(text, pos);
  if (pos != text.size())
    throw std::runtime_error("feature syntax: trailing input in '" + text +
                             "'");
  return out;
}

FeatureValue resolve(const FeatureValue& v, const Env& env) {
  FeatureValue cur = v;
  while (cur.kind() == FeatureValue::Kind::Var) {
    auto it = env.find(cur.text());
    if (it == env.end()) return cur;
    cur = it->second;
  }
  return cur;
}

namespace {

bool occurs(const std::string& name, const FeatureValue& v, const Env& env) {
  FeatureValue r = resolve(v, env);
  if (r.kind() == FeatureValue::Kind::Var) return r.text() == name;
  if (r.kind() == FeatureValue::Kind::Struct) {
    for (const auto& [f, sub] : r.fs().feats)
      if (occurs(name, sub, env)) return true;
  }
  return false;
}

} // namespace

bool unify_values(const FeatureValue& a, const FeatureValue& b, Env& env) {
  FeatureValue ra = resolve(a, env);
  FeatureValue rb = resolve(b, env);
  if (ra.kind() == FeatureValue::Kind::Var) {
    if (rb.kind() == FeatureValue::Kind::Var && rb.text() == ra.text())
      return true;
    if (occurs(ra.text(), rb, env)) return false;
    env[ra.text()] = rb;
    return true;
  }
  if (rb.kind() == FeatureValue::Kind::Var) {
    if (occurs(rb.text(), ra, env)) return false;
    env[rb.text()] = ra;
    return true;
  }
  if (ra.kind() != rb.kind()) return false;
  if (ra.kind() == FeatureValue::Kind::Atom) return ra.text() == rb.text();
  return unify_into(ra.fs(), rb.fs(), env);
}

bool unify_into(const FeatureStructure& a, const FeatureStructure& b,
                Env& env) {
  for (const auto& [f, av] : a.feats) {
    const FeatureValue* bv = b.get(f);
    if (bv && !unify_values(av, *bv, env)) return false;
  }
  return true;
}

FeatureValue substitute(const FeatureValue& v, const Env& env) {
  FeatureValue r = resolve(v, env);
  if (r.kind() == FeatureValue::Kind::Struct)
    return FeatureValue::nested(substitute(r.fs(), env));
  return r;
}

FeatureStructure substitute(const FeatureStructure& fs, const Env& env) {
  FeatureStructure out;
  for (const auto& [f, v] : fs.feats) out.set(f, substitute(v, env));
  return out;
}

namespace {

// Union of two already-unified values: nested structures merge feature-wise.
FeatureValue merged_value(const FeatureValue& a, const FeatureValue& b,
                          const Env& env) {
  FeatureValue ra = resolve(a, env);
  FeatureValue rb = resolve(b, env);
  if (ra.kind() == FeatureValue::Kind::Var) return substitute(rb, env);
  if (rb.kind() == FeatureValue::Kind::Var) return substitute(ra, env);
  if (ra.kind() == FeatureValue::Kind::Struct &&
      rb.kind() == FeatureValue::Kind::Struct) {
    FeatureStructure out;
    for (const auto& [f, av] : ra.fs().feats) {
      const FeatureValue* bv = rb.fs().get(f);
      out.set(f, bv ? merged_value(av, *bv, env) : substitute(av, env));
    }
    for (const auto& [f, bv] : rb.fs().feats)
      if (!out.get(f)) out.set(f, substitute(bv, env));
    return FeatureValue::nested(std::move(out));
  }
  return ra; // equal atoms
}

} // namespace

std::optional<FeatureStructure> unify(const FeatureStructure& a,
                                      const FeatureStructure& b) {
  Env env;
  if (!unify_into(a, b, env)) return std::nullopt;
  FeatureStructure out;
  for (const auto& [f, av] : a.feats) {
    const FeatureValue* bv = b.get(f);
    out.set(f, bv ? merged_value(av, *bv, env) : substitute(av, env));
  }
  for (const auto& [f, bv] : b.feats)
    if (!out.get(f)) out.set(f, substitute(bv, env));
  return out;
}

namespace {

FeatureValue rename_value(const FeatureValue& v,
                          std::map<std::string, std::string>& mapping,
                          const std::string& prefix, int& counter) {
  switch (v.kind()) {
  case FeatureValue::Kind::Atom:
    return v;
  case FeatureValue::Kind::Var: {
    auto it = mapping.find(v.text());
    if (it == mapping.end()) {
      ++counter;
      it = mapping.emplace(v.text(), prefix + std::to_string(counter)).first;
    }
    return FeatureValue::var(it->second);
  }
  case FeatureValue::Kind::Struct:
    return FeatureValue::nested(
        rename_variables(v.fs(), mapping, prefix, counter));
  }
  return v;
}

} // namespace

FeatureStructure rename_variables(const FeatureStructure& fs,
                                  std::map<std::string, std::string>& mapping,
                                  const std::string& prefix, int& counter) {
  FeatureStructure out;
  for (const auto& [f, v] : fs.feats)
    out.set(f, rename_value(v, mapping, prefix, counter));
  return out;
}

void canonicalize_variables(std::vector<FeatureStructure*> fss) {
  std::map<std::string, std::string> mapping;
  int counter = 0;
  for (FeatureStructure* fs : fss)
    *fs = rename_variables(*fs, mapping, "V", counter);
}

} // namespace nblp
