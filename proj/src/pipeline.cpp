#include "nblp/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "nblp/chart_parser.hpp"

namespace nblp {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t tab = line.find('\t', pos);
    if (tab == std::string::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
}

double parse_double_strict(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size())
    throw std::runtime_error("bad numeric value for " + what + ": '" + s + "'");
  return v;
}

int parse_int_strict(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(t, &used);
  } catch (const std::exception&) {
    throw std::runtime_error("bad integer value for " + what + ": '" + s + "'");
  }
  if (used != t.size())
    throw std::runtime_error("bad integer value for " + what + ": '" + s + "'");
  return v;
}

bool parse_bool_strict(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw std::runtime_error("bad boolean value for " + what + ": '" + s + "'");
}

std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    out += words[i];
  }
  return out;
}

std::string lower_join(const std::vector<std::string>& words) {
  return lowercase(join_words(words));
}

} // namespace

Config parse_config_text(const std::string& text, Config base) {
  Config c = base;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "repair_enabled") c.repair_enabled = parse_bool_strict(val, key);
    else if (key == "repair_penalty") c.repair_penalty = parse_double_strict(val, key);
    else if (key == "repair_min_score") c.repair_min_score = parse_int_strict(val, key);
    else if (key == "repair_span_cap") c.repair_span_cap = parse_int_strict(val, key);
    else if (key == "nbest_n") c.nbest_n = parse_int_strict(val, key);
    else if (key == "freq_threshold") c.freq_threshold = parse_int_strict(val, key);
    else if (key == "fallback_general") c.fallback_general = parse_bool_strict(val, key);
    else if (key == "alpha") c.alpha = parse_double_strict(val, key);
    else if (key == "combine") {
      combine_mode_from(val); // validates
      c.combine = val;
    } else if (key == "max_ngram") c.max_ngram = parse_int_strict(val, key);
    else if (key == "ridge_lambda") c.ridge_lambda = parse_double_strict(val, key);
    else if (key == "max_sweeps") c.max_sweeps = parse_int_strict(val, key);
    else if (key == "step_delta") c.step_delta = parse_double_strict(val, key);
    else if (key == "word_weight") c.word_weight = parse_double_strict(val, key);
    else if (key == "bracket_weight") c.bracket_weight = parse_double_strict(val, key);
    else
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": unknown key '" + key + "'");
  }
  if (c.nbest_n < 1) throw std::runtime_error("config: nbest_n must be >= 1");
  if (c.max_ngram < 1 || c.max_ngram > 4)
    throw std::runtime_error("config: max_ngram must be in [1,4]");
  if (c.alpha <= 0.0) throw std::runtime_error("config: alpha must be positive");
  return c;
}

Config load_config(const std::string& path, Config base) {
  return parse_config_text(read_text_file(path), base);
}

std::string serialize_config(const Config& c) {
  std::ostringstream out;
  out << "repair_enabled = " << (c.repair_enabled ? "true" : "false") << "\n";
  out << "repair_penalty = " << fmt_double(c.repair_penalty) << "\n";
  out << "repair_min_score = " << c.repair_min_score << "\n";
  out << "repair_span_cap = " << c.repair_span_cap << "\n";
  out << "nbest_n = " << c.nbest_n << "\n";
  out << "freq_threshold = " << c.freq_threshold << "\n";
  out << "fallback_general = " << (c.fallback_general ? "true" : "false") << "\n";
  out << "alpha = " << fmt_double(c.alpha) << "\n";
  out << "combine = " << c.combine << "\n";
  out << "max_ngram = " << c.max_ngram << "\n";
  out << "ridge_lambda = " << fmt_double(c.ridge_lambda) << "\n";
  out << "max_sweeps = " << c.max_sweeps << "\n";
  out << "step_delta = " << fmt_double(c.step_delta) << "\n";
  out << "word_weight = " << fmt_double(c.word_weight) << "\n";
  out << "bracket_weight = " << fmt_double(c.bracket_weight) << "\n";
  return out.str();
}

std::vector<Utterance> parse_nbest_text(const std::string& text, int max_n) {
  if (max_n < 1) throw std::runtime_error("n-best size must be >= 1");
  std::vector<Utterance> utts;
  std::map<std::string, std::size_t> index;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != 4)
      throw std::runtime_error("n-best line " + std::to_string(lineno) +
                               ": expected id<TAB>rank<TAB>score<TAB>words");
    const std::string id = trim(fields[0]);
    if (id.empty())
      throw std::runtime_error("n-best line " + std::to_string(lineno) +
                               ": empty utterance id");
    int rank = parse_int_strict(fields[1], "rank");
    if (rank < 1)
      throw std::runtime_error("n-best line " + std::to_string(lineno) +
                               ": rank must be >= 1");
    double acoustic = parse_double_strict(fields[2], "acoustic score");
    auto words = split_words(fields[3]);
    if (words.empty())
      throw std::runtime_error("n-best line " + std::to_string(lineno) +
                               ": empty hypothesis");
    auto it = index.find(id);
    if (it == index.end()) {
      index[id] = utts.size();
      utts.push_back(Utterance{});
      utts.back().id = id;
      it = index.find(id);
    }
    Utterance& u = utts[it->second];
    for (const auto& h : u.nbest)
      if (h.rank == rank)
        throw std::runtime_error("n-best line " + std::to_string(lineno) +
                                 ": duplicate rank " + std::to_string(rank) +
                                 " for utterance " + id);
    if (rank > max_n) continue; // hypotheses beyond the list size are dropped
    Hypothesis h;
    h.words = std::move(words);
    h.acoustic_score = acoustic;
    h.rank = rank;
    u.nbest.push_back(std::move(h));
  }
  for (auto& u : utts) {
    std::sort(u.nbest.begin(), u.nbest.end(),
              [](const Hypothesis& a, const Hypothesis& b) {
                return a.rank < b.rank;
              });
    if (u.nbest.empty())
      throw std::runtime_error("utterance " + u.id +
                               " has no hypothesis within the list size");
  }
  return utts;
}

std::string serialize_nbest(const std::vector<Utterance>& utts) {
  std::ostringstream out;
  for (const auto& u : utts)
    for (const auto& h : u.nbest)
      out << u.id << '\t' << h.rank << '\t' << fmt_double(h.acoustic_score)
          << '\t' << join_words(h.words) << "\n";
  return out.str();
}

void attach_references(std::vector<Utterance>& utts,
                       const std::string& refs_text) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < utts.size(); ++i) index[utts[i].id] = i;
  std::set<std::string> seen;
  std::istringstream in(refs_text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() < 2)
      throw std::runtime_error("reference line " + std::to_string(lineno) +
                               ": expected id<TAB>words");
    const std::string id = trim(fields[0]);
    if (!seen.insert(id).second)
      throw std::runtime_error("reference line " + std::to_string(lineno) +
                               ": duplicate reference for " + id);
    auto it = index.find(id);
    if (it == index.end()) continue; // reference without an utterance
    Utterance& u = utts[it->second];
    u.reference = split_words(fields[1]);
    if (u.reference.empty())
      throw std::runtime_error("reference line " + std::to_string(lineno) +
                               ": empty reference words");
    u.has_reference = true;
    for (std::size_t f = 2; f < fields.size(); ++f) {
      const std::string& kv = fields[f];
      std::size_t eq = kv.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("reference line " + std::to_string(lineno) +
                                 ": expected key=value, got '" + kv + "'");
      const std::string key = kv.substr(0, eq);
      const std::string val = kv.substr(eq + 1);
      if (key == "repair")
        u.actual_repair = parse_bool_strict(val, "repair");
      else
        throw std::runtime_error("reference line " + std::to_string(lineno) +
                                 ": unknown key '" + key + "'");
    }
  }
}

std::string serialize_references(const std::vector<Utterance>& utts) {
  std::ostringstream out;
  for (const auto& u : utts) {
    if (!u.has_reference) continue;
    out << u.id << '\t' << join_words(u.reference);
    if (u.actual_repair) out << "\trepair=1";
    out << "\n";
  }
  return out.str();
}

GrammarBundle load_bundle(const std::string& grammar_path,
                          const std::string& lexicon_path,
                          const std::string& specialized_path) {
  GrammarBundle b;
  b.general = Grammar::load_file(grammar_path);
  b.lexicon = Lexicon::load_file(lexicon_path);
  if (!specialized_path.empty()) {
    b.specialized = Grammar::load_file(specialized_path);
    b.table = compile_lr(b.specialized);
    b.has_specialized = true;
  }
  return b;
}

std::vector<AnalyzedHypothesis> analyze_utterance(const Utterance& utt,
                                                  const GrammarBundle& bundle,
                                                  const Config& cfg) {
  if (utt.nbest.empty())
    throw std::runtime_error("utterance " + utt.id + " has an empty n-best list");
  std::vector<Hypothesis> expanded;
  if (cfg.repair_enabled) {
    RepairOptions opts;
    opts.span_cap = cfg.repair_span_cap;
    opts.min_score = cfg.repair_min_score;
    expanded =
        expand_hypotheses(utt.nbest, cfg.repair_penalty, bundle.lexicon, opts);
  } else {
    expanded = utt.nbest;
  }

  std::vector<double> speech;
  double list_min = utt.nbest.front().acoustic_score;
  for (const auto& h : utt.nbest)
    list_min = std::min(list_min, h.acoustic_score);
  for (const auto& h : expanded)
    speech.push_back(speech_function(h, list_min, cfg.repair_penalty));
  speech = normalize_speech_scores(std::move(speech));

  std::vector<AnalyzedHypothesis> out;
  for (std::size_t i = 0; i < expanded.size(); ++i) {
    AnalyzedHypothesis ah;
    ah.hyp = expanded[i];
    ah.speech = speech[i];
    std::vector<ParseTree> trees;
    if (bundle.has_specialized) {
      auto lr = parse_lr(bundle.specialized, bundle.table, bundle.lexicon,
                         ah.hyp.words);
      for (const auto& t : lr)
        trees.push_back(expand_tree(bundle.general, bundle.specialized, t));
      if (trees.empty() && cfg.fallback_general) {
        trees = parse_chart(bundle.general, bundle.lexicon, ah.hyp.words);
        ah.from_fallback = !trees.empty();
      }
    } else {
      trees = parse_chart(bundle.general, bundle.lexicon, ah.hyp.words);
      ah.from_fallback = !trees.empty();
    }
    for (const auto& t : trees)
      ah.analyses.push_back(
          analyze(bundle.general, bundle.lexicon, t, cfg.max_ngram));
    out.push_back(std::move(ah));
  }
  return out;
}

namespace {

// Object tables the model carries but scoring always expects: missing
// kinds behave as empty tables (every object unseen).
std::vector<CandidateScore> score_candidates(
    const std::vector<AnalyzedHypothesis>& hyps, const PreferenceModel& model) {
  const CombineMode mode = combine_mode_from(model.combine);
  std::vector<CandidateScore> out;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const auto& ah = hyps[i];
    for (const auto& a : ah.analyses) {
      CandidateScore cs;
      cs.hyp_index = i;
      cs.rank = ah.hyp.rank;
      cs.repaired = ah.hyp.repaired;
      cs.words = join_words(ah.hyp.words);
      cs.signature = derivation_signature(a.tree);
      cs.vec = build_vector(a, ah.speech, model.tables, mode);
      cs.total = total_score(cs.vec, model.scaling);
      out.push_back(std::move(cs));
    }
  }
  return out;
}

} // namespace

std::string SelectionResult::to_text() const {
  std::ostringstream out;
  out << "utterance " << utt_id << "\n";
  if (!found) {
    out << "outcome no-analysis-found\n";
    return out.str();
  }
  const CandidateScore& c = breakdown[chosen];
  out << "outcome selected\n";
  out << "words " << c.words << "\n";
  out << "rank " << c.rank << (c.repaired ? " repaired" : "") << "\n";
  out << "total " << fmt_double(c.total) << "\n";
  for (std::size_t i = 0; i < breakdown.size(); ++i) {
    const CandidateScore& b = breakdown[i];
    out << "candidate " << i << (i == chosen ? " *" : "") << " rank " << b.rank
        << (b.repaired ? " repaired" : "") << " total " << fmt_double(b.total)
        << " words " << b.words << "\n";
    for (const auto& [k, v] : b.vec)
      out << "  " << k << " " << fmt_double(v) << "\n";
  }
  return out.str();
}

SelectionResult run_utterance(const Utterance& utt, const GrammarBundle& bundle,
                              const PreferenceModel& model, const Config& cfg) {
  SelectionResult r;
  r.utt_id = utt.id;
  r.hyps = analyze_utterance(utt, bundle, cfg);
  r.breakdown = score_candidates(r.hyps, model);
  if (r.breakdown.empty()) {
    r.found = false;
    return r;
  }
  std::vector<SelectionInput> inputs;
  for (const auto& c : r.breakdown) {
    SelectionInput si;
    si.vec = c.vec;
    si.repaired = c.repaired;
    si.acoustic = r.hyps[c.hyp_index].hyp.acoustic_score;
    inputs.push_back(std::move(si));
  }
  r.chosen = select_best(inputs, model.scaling);
  r.found = true;
  return r;
}

std::string EvalReport::to_text() const {
  std::ostringstream out;
  auto pct = [this](int n) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f",
                  total == 0 ? 0.0 : 100.0 * n / total);
    return std::string(buf);
  };
  out << "utterances        " << total << "\n";
  out << "combined          " << combined_correct << " (" << pct(combined_correct)
      << "%)\n";
  out << "speech-only       " << speech_only_correct << " ("
      << pct(speech_only_correct) << "%)\n";
  out << "first-parsable    " << first_parsable_correct << " ("
      << pct(first_parsable_correct) << "%)\n";
  out << "oracle            " << oracle_present << " (" << pct(oracle_present)
      << "%)\n";
  out << "no-analysis       " << no_analysis << "\n";
  out << "repair outcomes (rows: selector result; columns: actual repair, false alarm)\n";
  static const char* kRows[4] = {"no analysis     ", "right repair    ",
                                 "wrong repair    ", "non-repair used "};
  for (int r = 0; r < 4; ++r)
    out << "  " << kRows[r] << matrix[r][0] << "\t" << matrix[r][1] << "\n";
  return out.str();
}

std::string EvalReport::to_record() const {
  std::ostringstream out;
  out << "eval\t" << total << '\t' << combined_correct << '\t'
      << speech_only_correct << '\t' << first_parsable_correct << '\t'
      << oracle_present << '\t' << no_analysis;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 2; ++c) out << '\t' << matrix[r][c];
  out << "\n";
  return out.str();
}

EvalReport evaluate(const std::vector<Utterance>& corpus,
                    const GrammarBundle& bundle, const PreferenceModel& model,
                    const Config& cfg) {
  EvalReport rep;
  for (const auto& u : corpus) {
    if (!u.has_reference)
      throw std::runtime_error("utterance " + u.id +
                               " has no reference transcription");
    const std::string ref = lower_join(u.reference);
    SelectionResult sel = run_utterance(u, bundle, model, cfg);
    ++rep.total;

    bool combined_ok = false;
    if (sel.found)
      combined_ok = lowercase(sel.breakdown[sel.chosen].words) == ref;
    if (combined_ok) ++rep.combined_correct;
    if (!sel.found) ++rep.no_analysis;

    // Speech-only baseline: best normalized speech value over the expanded
    // list; ties keep the earlier hypothesis (originals precede repairs).
    std::size_t best_h = 0;
    for (std::size_t i = 1; i < sel.hyps.size(); ++i)
      if (sel.hyps[i].speech > sel.hyps[best_h].speech) best_h = i;
    if (lower_join(sel.hyps[best_h].hyp.words) == ref)
      ++rep.speech_only_correct;

    // First-parsable baseline: scan the original list in rank order.
    bool fp_ok = false;
    for (const auto& ah : sel.hyps) {
      if (ah.hyp.repaired) continue;
      if (ah.analyses.empty()) continue;
      fp_ok = lower_join(ah.hyp.words) == ref;
      break;
    }
    if (fp_ok) ++rep.first_parsable_correct;

    bool oracle = false;
    for (const auto& ah : sel.hyps)
      if (lower_join(ah.hyp.words) == ref) { oracle = true; break; }
    if (oracle) ++rep.oracle_present;

    // Repair outcome matrix, over utterances where the detector fired.
    bool fired = false;
    for (const auto& ah : sel.hyps)
      if (ah.hyp.repaired) { fired = true; break; }
    if (fired) {
      int col = u.actual_repair ? 0 : 1;
      int row;
      if (!sel.found) row = 0;
      else if (!sel.breakdown[sel.chosen].repaired) row = 3;
      else if (combined_ok) row = 1;
      else row = 2;
      ++rep.matrix[row][col];
    }
  }
  return rep;
}

TrainResult train_pipeline(const std::vector<Utterance>& corpus,
                           const GrammarBundle& bundle, const Config& cfg,
                           bool slt0_scoring) {
  if (corpus.empty()) throw std::runtime_error("training corpus is empty");
  TrainResult res;
  res.model.combine = cfg.combine;
  const CombineMode mode = combine_mode_from(cfg.combine);
  std::ostringstream log;

  // Analyze everything once; remember per-utterance analyses, speech values
  // and the good/bad labels (good = words match the reference).
  struct UttData {
    std::vector<AnalyzedHypothesis> hyps;
    std::vector<std::pair<std::size_t, std::size_t>> cands; // hyp, analysis
    std::vector<bool> good;
  };
  std::vector<UttData> data;
  for (const auto& u : corpus) {
    if (!u.has_reference)
      throw std::runtime_error("utterance " + u.id +
                               " has no reference transcription");
    UttData d;
    d.hyps = analyze_utterance(u, bundle, cfg);
    const std::string ref = lower_join(u.reference);
    for (std::size_t i = 0; i < d.hyps.size(); ++i) {
      bool match = lower_join(d.hyps[i].hyp.words) == ref;
      for (std::size_t j = 0; j < d.hyps[i].analyses.size(); ++j) {
        d.cands.push_back({i, j});
        d.good.push_back(match);
      }
    }
    data.push_back(std::move(d));
    ++res.utterances;
  }

  static const std::vector<std::string> kKinds = {
      "triple", "rule", "ngram-1", "ngram-2", "ngram-3", "ngram-4"};
  auto objects_of = [](const Analysis& a,
                       const std::string& kind) -> std::multiset<std::string> {
    if (kind == "triple") return a.triples;
    if (kind == "rule") return a.rules_used;
    int k = kind[kind.size() - 1] - '0';
    auto it = a.ngrams.find(k);
    return it == a.ngrams.end() ? std::multiset<std::string>{} : it->second;
  };

  if (!slt0_scoring) {
    for (const auto& kind : kKinds) {
      std::vector<std::pair<std::multiset<std::string>, bool>> labeled;
      for (const auto& d : data)
        for (std::size_t c = 0; c < d.cands.size(); ++c) {
          const Analysis& a =
              d.hyps[d.cands[c].first].analyses[d.cands[c].second];
          labeled.push_back({objects_of(a, kind), d.good[c]});
        }
      res.model.tables[kind] = train_object_scores(kind, labeled, cfg.alpha);
      log << "table " << kind << " entries "
          << res.model.tables[kind].entries.size() << "\n";
    }
  } else {
    // Reference-only scoring: count objects of one analysis per reference
    // transcription; nothing is ever labeled bad.
    int parsable = 0;
    std::map<std::string, ObjectScoreTable> tables;
    for (const auto& kind : kKinds) {
      tables[kind].kind = kind;
      tables[kind].alpha = cfg.alpha;
    }
    for (const auto& u : corpus) {
      auto trees = parse_chart(bundle.general, bundle.lexicon, u.reference);
      if (trees.empty()) continue;
      ++parsable;
      Analysis a = analyze(bundle.general, bundle.lexicon, trees.front(),
                           cfg.max_ngram);
      for (const auto& kind : kKinds)
        for (const auto& obj : objects_of(a, kind))
          tables[kind].entries[obj].good += 1;
    }
    if (parsable == 0)
      throw std::runtime_error(
          "reference-only scoring: no reference transcription parses");
    for (auto& [kind, t] : tables) t.recompute();
    res.model.tables = std::move(tables);
    log << "reference-only tables from " << parsable << " parses\n";
  }

  // Scaling phase 1: regression of candidate vectors onto similarity with
  // the gold candidate of their utterance.
  std::vector<std::pair<PreferenceVector, double>> phase1;
  std::vector<RankingExample> phase2;
  for (std::size_t ui = 0; ui < data.size(); ++ui) {
    const UttData& d = data[ui];
    std::size_t gold = d.cands.size();
    for (std::size_t c = 0; c < d.cands.size(); ++c)
      if (d.good[c]) { gold = c; break; }
    if (gold == d.cands.size()) continue; // reference never analyzed
    const Analysis& gold_a =
        d.hyps[d.cands[gold].first].analyses[d.cands[gold].second];
    RankingExample ex;
    for (std::size_t c = 0; c < d.cands.size(); ++c) {
      const Analysis& a = d.hyps[d.cands[c].first].analyses[d.cands[c].second];
      PreferenceVector v = build_vector(a, d.hyps[d.cands[c].first].speech,
                                        res.model.tables, mode);
      double target = similarity(a, gold_a, cfg.word_weight,
                                 cfg.bracket_weight);
      phase1.push_back({v, target});
      ex.candidates.push_back(std::move(v));
    }
    ex.correct = gold;
    phase2.push_back(std::move(ex));
    ++res.with_gold;
  }
  if (phase2.empty())
    throw std::runtime_error(
        "no utterance has an analyzed reference transcription; cannot train "
        "scaling factors");
  res.phase1_points = static_cast<int>(phase1.size());

  ScalingFactors w1 = train_scaling_phase1(phase1, cfg.ridge_lambda);
  log << "phase1 points " << phase1.size() << " residual "
      << fmt_double(w1.objectives.back()) << "\n";

  Phase2Options p2;
  p2.max_sweeps = cfg.max_sweeps;
  p2.step_delta = cfg.step_delta;
  res.model.scaling = train_scaling_phase2(w1, phase2, p2);
  log << "phase2 examples " << phase2.size() << " objective";
  for (double o : res.model.scaling.objectives) log << " " << fmt_double(o);
  log << "\n";
  res.log = log.str();
  return res;
}

std::string SpecializeReport::to_text() const {
  std::ostringstream out;
  out << "treebank trees     " << treebank_trees << "\n";
  out << "general rules      " << general_rules << "\n";
  out << "specialized rules  " << specialized_rules << "\n";
  out << "lr states          " << lr_states << "\n";
  out << "lr conflicts       " << lr_conflicts << "\n";
  out << "treebank coverage  " << covered << "/" << treebank_trees << "\n";
  out << "mean parses lr     " << fmt_double(mean_lr_parses) << "\n";
  out << "mean parses chart  " << fmt_double(mean_chart_parses) << "\n";
  return out.str();
}

SpecializeReport specialize_corpus(const Grammar& general, const Lexicon& lex,
                                   const std::vector<ParseTree>& treebank,
                                   const Config& cfg, Grammar& sg_out,
                                   LRTable& table_out) {
  if (treebank.empty()) throw std::runtime_error("treebank is empty");
  SpecializeReport rep;
  rep.treebank_trees = static_cast<int>(treebank.size());
  rep.general_rules = static_cast<int>(general.rules.size());
  SpecializeOptions opts;
  opts.freq_threshold = cfg.freq_threshold;
  sg_out = specialize_grammar(general, treebank, opts);
  table_out = compile_lr(sg_out);
  rep.specialized_rules = static_cast<int>(sg_out.rules.size());
  rep.lr_states = table_out.num_states();
  rep.lr_conflicts = table_out.conflict_entries();
  long lr_total = 0, chart_total = 0;
  for (const auto& t : treebank) {
    auto words = tree_yield(t);
    auto lr = parse_lr(sg_out, table_out, lex, words);
    auto ch = parse_chart(general, lex, words);
    if (!lr.empty()) ++rep.covered;
    lr_total += static_cast<long>(lr.size());
    chart_total += static_cast<long>(ch.size());
  }
  rep.mean_lr_parses = double(lr_total) / rep.treebank_trees;
  rep.mean_chart_parses = double(chart_total) / rep.treebank_trees;
  return rep;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

} // namespace nblp
