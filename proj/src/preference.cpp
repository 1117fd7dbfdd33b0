#include "nblp/preference.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace nblp {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, const char* what) {
  const char* c = s.c_str();
  char* end = nullptr;
  double v = std::strtod(c, &end);
  if (end == c || *end != '\0')
    throw std::runtime_error(std::string("model file: bad ") + what + " '" + s +
                             "'");
  return v;
}

long long parse_count(const std::string& s, const char* what) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error(std::string("model file: bad ") + what + " '" + s +
                             "'");
  }
  if (pos != s.size() || v < 0)
    throw std::runtime_error(std::string("model file: bad ") + what + " '" + s +
                             "'");
  return v;
}

std::vector<std::string> split_fields(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

void require_same_keys(const PreferenceVector& v,
                       const std::map<std::string, double>& w) {
  bool ok = v.size() == w.size();
  if (ok) {
    auto it = w.begin();
    for (const auto& [k, unused] : v) {
      (void)unused;
      if (it->first != k) {
        ok = false;
        break;
      }
      ++it;
    }
  }
  if (!ok)
    throw std::logic_error(
        "preference vector and scaling factors use different function sets");
}

} // namespace

void ObjectScoreTable::recompute() {
  for (auto& [obj, e] : entries) {
    (void)obj;
    e.score = std::log((static_cast<double>(e.good) + alpha) /
                       (static_cast<double>(e.good + e.bad) + 2.0 * alpha));
  }
}

double ObjectScoreTable::score_of(const std::string& object) const {
  auto it = entries.find(object);
  if (it == entries.end())
    return std::log(0.5);
  return it->second.score;
}

CombineMode combine_mode_from(const std::string& name) {
  if (name == "sum")
    return CombineMode::Sum;
  if (name == "average")
    return CombineMode::Average;
  throw std::runtime_error("unknown combine mode '" + name + "'");
}

const char* to_string(CombineMode mode) {
  return mode == CombineMode::Sum ? "sum" : "average";
}

double combining_score(const std::multiset<std::string>& objects,
                       const ObjectScoreTable& table, CombineMode mode) {
  if (objects.empty())
    return mode == CombineMode::Sum ? 0.0 : std::log(0.5);
  double total = 0.0;
  for (const auto& obj : objects)
    total += table.score_of(obj);
  if (mode == CombineMode::Average)
    total /= static_cast<double>(objects.size());
  return total;
}

double total_score(const PreferenceVector& v, const ScalingFactors& w) {
  require_same_keys(v, w.weights);
  double total = 0.0;
  auto wi = w.weights.begin();
  for (const auto& [k, x] : v) {
    (void)k;
    total += wi->second * x;
    ++wi;
  }
  return total;
}

ObjectScoreTable train_object_scores(
    const std::string& kind,
    const std::vector<std::pair<std::multiset<std::string>, bool>>& labeled,
    double alpha) {
  if (alpha <= 0.0)
    throw std::runtime_error("smoothing alpha must be positive");
  bool any_good = false, any_bad = false;
  for (const auto& [objs, good] : labeled) {
    (void)objs;
    (good ? any_good : any_bad) = true;
  }
  if (!any_good || !any_bad)
    throw std::runtime_error(
        "object score training needs both good and bad analyses");
  ObjectScoreTable t;
  t.kind = kind;
  t.alpha = alpha;
  for (const auto& [objs, good] : labeled) {
    for (const auto& obj : objs) {
      auto& e = t.entries[obj];
      (good ? e.good : e.bad) += 1;
    }
  }
  t.recompute();
  return t;
}

double speech_function(const Hypothesis& h, double list_min_acoustic,
                       double penalty) {
  if (h.repaired)
    return list_min_acoustic - penalty;
  return h.acoustic_score;
}

std::vector<double> normalize_speech_scores(std::vector<double> scores) {
  if (scores.empty())
    return scores;
  double top = *std::max_element(scores.begin(), scores.end());
  for (double& s : scores)
    s -= top;
  return scores;
}

std::vector<std::string> default_flag_names() {
  std::vector<std::string> names;
  for (const auto& [name, counter] : default_flag_registry()) {
    (void)counter;
    names.push_back(name);
  }
  return names;
}

PreferenceVector build_vector(const Analysis& a, double speech_score,
                              const std::map<std::string, ObjectScoreTable>& tables,
                              CombineMode mode,
                              const std::vector<std::string>& flag_names) {
  PreferenceVector v;
  v["speech"] = speech_score;
  static const std::multiset<std::string> kEmpty;
  for (const auto& [kind, table] : tables) {
    const std::multiset<std::string>* objs = nullptr;
    if (kind == "triple") {
      objs = &a.triples;
    } else if (kind == "rule") {
      objs = &a.rules_used;
    } else if (kind.rfind("ngram-", 0) == 0) {
      int n = 0;
      try {
        std::size_t pos = 0;
        n = std::stoi(kind.substr(6), &pos);
        if (pos != kind.size() - 6)
          n = 0;
      } catch (const std::exception&) {
        n = 0;
      }
      if (n < 1 || n > 4)
        throw std::logic_error("unknown object table kind '" + kind + "'");
      auto it = a.ngrams.find(n);
      objs = it == a.ngrams.end() ? &kEmpty : &it->second;
    } else {
      throw std::logic_error("unknown object table kind '" + kind + "'");
    }
    v[kind] = combining_score(*objs, table, mode);
  }
  for (const auto& name : flag_names) {
    auto it = a.structural.find(name);
    v["flag:" + name] = it == a.structural.end() ? 0.0 : it->second;
  }
  return v;
}

double word_similarity(const std::vector<std::string>& a,
                       const std::vector<std::string>& b) {
  const std::size_t n = a.size(), m = b.size();
  if (n == 0 && m == 0)
    return 1.0;
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j)
    prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  double dist = static_cast<double>(prev[m]);
  return 1.0 - dist / static_cast<double>(std::max(n, m));
}

double bracket_f1(const ParseTree& candidate, const ParseTree& reference) {
  auto cb = tree_brackets(candidate);
  auto rb = tree_brackets(reference);
  if (cb.empty() && rb.empty())
    return 1.0;
  std::size_t matched = 0;
  for (const auto& span : cb) {
    auto it = rb.find(span);
    if (it != rb.end()) {
      rb.erase(it);
      ++matched;
    }
  }
  // rb lost its matched elements above, so this denominator is the original
  // |cb| + |rb|.
  double denom = static_cast<double>(cb.size() + rb.size() + matched);
  return 2.0 * static_cast<double>(matched) / denom;
}

double similarity(const Analysis& candidate, const Analysis& reference,
                  double word_weight, double bracket_weight) {
  double words = word_similarity(tree_yield(candidate.tree),
                                 tree_yield(reference.tree));
  double brackets = bracket_f1(candidate.tree, reference.tree);
  return word_weight * words + bracket_weight * brackets;
}

ScalingFactors train_scaling_phase1(
    const std::vector<std::pair<PreferenceVector, double>>& data,
    double ridge_lambda) {
  if (data.empty())
    throw std::runtime_error("scaling fit needs at least one data point");
  const PreferenceVector& first = data.front().first;
  std::vector<std::string> keys;
  for (const auto& [k, unused] : first) {
    (void)unused;
    keys.push_back(k);
  }
  const std::size_t k = keys.size();
  if (k == 0)
    throw std::runtime_error("scaling fit needs at least one function");
  if (data.size() < k)
    throw std::runtime_error("scaling fit needs at least as many data points "
                             "as functions");
  Eigen::MatrixXd x(data.size(), k);
  Eigen::VectorXd y(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& [v, target] = data[i];
    if (v.size() != k)
      throw std::logic_error("inconsistent function sets in scaling fit data");
    std::size_t j = 0;
    for (const auto& [name, val] : v) {
      if (name != keys[j])
        throw std::logic_error("inconsistent function sets in scaling fit data");
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = val;
      ++j;
    }
    y(static_cast<Eigen::Index>(i)) = target;
  }
  Eigen::MatrixXd a = x.transpose() * x;
  Eigen::VectorXd b = x.transpose() * y;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (lu.rank() < static_cast<Eigen::Index>(k)) {
    if (ridge_lambda <= 0.0)
      throw std::runtime_error(
          "rank-deficient scaling fit and ridge fallback disabled");
    a += ridge_lambda *
         Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k),
                                   static_cast<Eigen::Index>(k));
  }
  Eigen::VectorXd w = a.ldlt().solve(b);
  ScalingFactors out;
  out.phase = 1;
  for (std::size_t j = 0; j < k; ++j)
    out.weights[keys[j]] = w(static_cast<Eigen::Index>(j));
  out.objectives.push_back((x * w - y).squaredNorm());
  return out;
}

int ranking_objective(const std::vector<RankingExample>& data,
                      const ScalingFactors& w) {
  int count = 0;
  for (const auto& ex : data) {
    if (ex.correct >= ex.candidates.size())
      throw std::logic_error("correct-candidate index out of range");
    double best = total_score(ex.candidates[ex.correct], w);
    bool top = true;
    for (std::size_t i = 0; i < ex.candidates.size(); ++i) {
      if (i == ex.correct)
        continue;
      if (total_score(ex.candidates[i], w) >= best) {
        top = false;
        break;
      }
    }
    if (top)
      ++count;
  }
  return count;
}

ScalingFactors train_scaling_phase2(const ScalingFactors& w0,
                                    const std::vector<RankingExample>& data,
                                    const Phase2Options& opt) {
  ScalingFactors w = w0;
  w.phase = 2;
  w.sweeps = 0;
  w.objectives.clear();
  int current = ranking_objective(data, w);
  w.objectives.push_back(current);
  for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    bool improved = false;
    for (auto& [name, weight] : w.weights) {
      (void)name;
      const double base = weight;
      const double trials[4] = {base * 2.0, base * 0.5, base + opt.step_delta,
                                base - opt.step_delta};
      int best_count = current;
      double best_val = base;
      double best_dist = 0.0;
      for (double t : trials) {
        if (t == base)
          continue;
        weight = t;
        int c = ranking_objective(data, w);
        double dist = std::abs(t - base);
        if (c > best_count || (c == best_count && c > current &&
                               dist < best_dist)) {
          best_count = c;
          best_val = t;
          best_dist = dist;
        }
      }
      weight = best_val;
      if (best_count > current) {
        current = best_count;
        improved = true;
      }
    }
    w.sweeps = sweep + 1;
    w.objectives.push_back(current);
    if (!improved)
      break;
  }
  return w;
}

std::size_t select_best(const std::vector<SelectionInput>& candidates,
                        const ScalingFactors& w) {
  if (candidates.empty())
    throw std::runtime_error("selection requires at least one candidate");
  std::size_t best = 0;
  double best_total = total_score(candidates[0].vec, w);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    double t = total_score(candidates[i].vec, w);
    const SelectionInput& a = candidates[i];
    const SelectionInput& b = candidates[best];
    bool wins = false;
    if (t > best_total) {
      wins = true;
    } else if (t == best_total) {
      if (a.repaired != b.repaired)
        wins = !a.repaired;
      else
        wins = a.acoustic > b.acoustic;
    }
    if (wins) {
      best = i;
      best_total = t;
    }
  }
  return best;
}

std::string serialize_model(const PreferenceModel& m) {
  std::ostringstream out;
  out << "nblp-model 1\n";
  out << "combine " << m.combine << "\n";
  out << "scaling phase " << m.scaling.phase << " sweeps " << m.scaling.sweeps
      << "\n";
  for (double obj : m.scaling.objectives)
    out << "objective " << fmt_double(obj) << "\n";
  for (const auto& [name, weight] : m.scaling.weights)
    out << "weight " << name << " " << fmt_double(weight) << "\n";
  for (const auto& [kind, table] : m.tables) {
    out << "table " << kind << " alpha " << fmt_double(table.alpha)
        << " entries " << table.entries.size() << "\n";
    for (const auto& [obj, e] : table.entries)
      out << "e\t" << obj << "\t" << e.good << "\t" << e.bad << "\n";
  }
  out << "end\n";
  return out.str();
}

PreferenceModel parse_model(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "nblp-model 1")
    throw std::runtime_error("model file: unsupported header '" + line + "'");
  PreferenceModel m;
  m.combine.clear();
  bool ended = false;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    if (line == "end") {
      ended = true;
      break;
    }
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "combine") {
      std::string mode;
      ls >> mode;
      combine_mode_from(mode); // validates
      m.combine = mode;
    } else if (tag == "scaling") {
      std::string kw1, kw2;
      int phase = 0, sweeps = 0;
      ls >> kw1 >> phase >> kw2 >> sweeps;
      if (!ls || kw1 != "phase" || kw2 != "sweeps" || phase < 0 || sweeps < 0)
        throw std::runtime_error("model file: bad scaling line '" + line + "'");
      m.scaling.phase = phase;
      m.scaling.sweeps = sweeps;
    } else if (tag == "objective") {
      std::string v;
      ls >> v;
      m.scaling.objectives.push_back(parse_double(v, "objective"));
    } else if (tag == "weight") {
      std::string name, v;
      ls >> name >> v;
      if (name.empty() || v.empty())
        throw std::runtime_error("model file: bad weight line '" + line + "'");
      m.scaling.weights[name] = parse_double(v, "weight");
    } else if (tag == "table") {
      std::string kind, kw1, av, kw2;
      std::size_t n = 0;
      ls >> kind >> kw1 >> av >> kw2 >> n;
      if (!ls || kind.empty() || kw1 != "alpha" || kw2 != "entries")
        throw std::runtime_error("model file: bad table line '" + line + "'");
      ObjectScoreTable t;
      t.kind = kind;
      t.alpha = parse_double(av, "alpha");
      if (t.alpha <= 0.0)
        throw std::runtime_error("model file: alpha must be positive");
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(in, line))
          throw std::runtime_error("model file: truncated table '" + kind +
                                   "'");
        auto fields = split_fields(line, '\t');
        if (fields.size() != 4 || fields[0] != "e" || fields[1].empty())
          throw std::runtime_error("model file: bad entry line '" + line + "'");
        ObjectScoreTable::Entry e;
        e.good = parse_count(fields[2], "good count");
        e.bad = parse_count(fields[3], "bad count");
        if (!t.entries.emplace(fields[1], e).second)
          throw std::runtime_error("model file: duplicate object '" +
                                   fields[1] + "'");
      }
      t.recompute();
      if (!m.tables.emplace(kind, std::move(t)).second)
        throw std::runtime_error("model file: duplicate table '" + kind + "'");
    } else {
      throw std::runtime_error("model file: unknown line '" + line + "'");
    }
  }
  if (!ended)
    throw std::runtime_error("model file: missing end marker");
  if (m.combine.empty())
    throw std::runtime_error("model file: missing combine mode");
  return m;
}

} // namespace nblp
