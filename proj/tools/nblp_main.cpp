// Command-line front end: repair inspection, parsing, grammar
// specialization, preference training, n-best selection, evaluation, and
// synthetic corpus generation.
//
// Exit codes: 0 success, 1 usage error, 2 data validation error,
// 3 internal invariant violation.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "nblp/chart_parser.hpp"
#include "nblp/corpus_gen.hpp"
#include "nblp/pipeline.hpp"

using nlohmann::json;
using namespace nblp;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string grammar_path = "data/grammar.txt";
  std::string lexicon_path = "data/lexicon.txt";
  std::string specialized_path;
  bool no_fallback = false;
  bool no_repair = false;
  int nbest_n = -1; // -1: keep the config value
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_grammar = true) {
  cmd->add_option("--config", o.config_path, "configuration file (key = value)");
  if (with_grammar) {
    cmd->add_option("--grammar", o.grammar_path, "general grammar file");
    cmd->add_option("--lexicon", o.lexicon_path, "lexicon file");
    cmd->add_option("--specialized", o.specialized_path,
                    "specialized grammar file (enables the fast parser)");
  }
  cmd->add_flag("--no-fallback", o.no_fallback,
                "disable the general-grammar fallback when the specialized "
                "parser fails");
  cmd->add_flag("--no-repair", o.no_repair, "disable repair expansion");
  cmd->add_option("--nbest-n", o.nbest_n, "n-best list size cap");
}

Config make_config(const CommonOpts& o, Config base = Config{}) {
  Config cfg = base;
  if (!o.config_path.empty()) cfg = load_config(o.config_path, base);
  if (o.no_fallback) cfg.fallback_general = false;
  if (o.no_repair) cfg.repair_enabled = false;
  if (o.nbest_n > 0) cfg.nbest_n = o.nbest_n;
  return cfg;
}

GrammarBundle make_bundle(const CommonOpts& o) {
  return load_bundle(o.grammar_path, o.lexicon_path, o.specialized_path);
}

std::vector<Utterance> load_corpus(const std::string& nbest_path,
                                   const std::string& refs_path,
                                   const Config& cfg) {
  auto utts = parse_nbest_text(read_text_file(nbest_path), cfg.nbest_n);
  if (!refs_path.empty())
    attach_references(utts, read_text_file(refs_path));
  return utts;
}

int cmd_repair(const CommonOpts& o) {
  Config cfg = make_config(o);
  Lexicon lex = Lexicon::load_file(o.lexicon_path);
  RepairOptions opts;
  opts.span_cap = cfg.repair_span_cap;
  opts.min_score = cfg.repair_min_score;
  std::string line;
  while (std::getline(std::cin, line)) {
    auto words = split_words(line);
    if (words.empty()) continue;
    auto cands = detect_repairs(words, lex, opts);
    json out;
    out["words"] = words;
    out["candidates"] = json::array();
    for (const auto& c : cands) {
      json jc;
      jc["reparandum"] = json::array({c.reparandum.start, c.reparandum.end});
      jc["repair"] = json::array({c.repair.start, c.repair.end});
      jc["score"] = c.score;
      jc["deleted_words"] = c.deleted_words;
      out["candidates"].push_back(jc);
    }
    out["repaired"] = apply_candidates(words, cands);
    std::cout << out.dump() << "\n";
  }
  return 0;
}

int cmd_parse(const CommonOpts& o, const std::string& mode) {
  GrammarBundle b = make_bundle(o);
  if (mode == "specialized" && !b.has_specialized)
    throw std::runtime_error(
        "parse mode 'specialized' needs --specialized <grammar file>");
  std::string line;
  while (std::getline(std::cin, line)) {
    auto words = split_words(line);
    if (words.empty()) continue;
    std::vector<ParseTree> trees;
    if (mode == "specialized") {
      auto lr = parse_lr(b.specialized, b.table, b.lexicon, words);
      for (const auto& t : lr)
        trees.push_back(expand_tree(b.general, b.specialized, t));
    } else {
      trees = parse_chart(b.general, b.lexicon, words);
    }
    std::cout << "# " << trees.size() << " parse"
              << (trees.size() == 1 ? "" : "s") << "\n";
    for (const auto& t : trees) std::cout << serialize_tree(t) << "\n";
  }
  return 0;
}

int cmd_specialize(const CommonOpts& o, const std::string& treebank_path,
                   const std::string& out_path, const std::string& table_path,
                   int threshold) {
  Config cfg = make_config(o);
  if (threshold > 0) cfg.freq_threshold = threshold;
  Grammar g = Grammar::load_file(o.grammar_path);
  Lexicon lex = Lexicon::load_file(o.lexicon_path);
  auto treebank = load_treebank(treebank_path);
  Grammar sg;
  LRTable table;
  SpecializeReport rep = specialize_corpus(g, lex, treebank, cfg, sg, table);
  std::cout << rep.to_text();
  if (!out_path.empty()) write_text_file(out_path, sg.serialize());
  if (!table_path.empty()) write_text_file(table_path, table.serialize());
  if (rep.covered != rep.treebank_trees) {
    std::cerr << "error: specialized grammar covers only " << rep.covered
              << "/" << rep.treebank_trees << " training sentences\n";
    return 2;
  }
  return 0;
}

int cmd_train(const CommonOpts& o, const std::string& nbest_path,
              const std::string& refs_path, const std::string& model_path,
              bool slt0) {
  Config cfg = make_config(o);
  GrammarBundle b = make_bundle(o);
  auto corpus = load_corpus(nbest_path, refs_path, cfg);
  TrainResult tr = train_pipeline(corpus, b, cfg, slt0);
  std::cout << tr.log;
  std::cout << "utterances " << tr.utterances << " with-gold " << tr.with_gold
            << "\n";
  write_text_file(model_path, serialize_model(tr.model));
  std::cout << "model written to " << model_path << "\n";
  return 0;
}

int cmd_select(const CommonOpts& o, const std::string& nbest_path,
               const std::string& model_path, bool verbose) {
  Config cfg = make_config(o);
  GrammarBundle b = make_bundle(o);
  PreferenceModel model = parse_model(read_text_file(model_path));
  auto corpus = load_corpus(nbest_path, "", cfg);
  for (const auto& u : corpus) {
    SelectionResult r = run_utterance(u, b, model, cfg);
    if (verbose) {
      std::cout << r.to_text();
      continue;
    }
    if (!r.found) {
      std::cout << u.id << "\tno-analysis-found\n";
    } else {
      const CandidateScore& c = r.breakdown[r.chosen];
      std::cout << u.id << "\tselected\t" << c.rank << "\t"
                << (c.repaired ? "repaired" : "verbatim") << "\t" << c.words
                << "\n";
    }
  }
  return 0;
}

int cmd_evaluate(const CommonOpts& o, const std::string& nbest_path,
                 const std::string& refs_path, const std::string& model_path) {
  Config base;
  base.nbest_n = 10; // evaluation reads deeper lists by default
  Config cfg = make_config(o, base);
  GrammarBundle b = make_bundle(o);
  PreferenceModel model = parse_model(read_text_file(model_path));
  auto corpus = load_corpus(nbest_path, refs_path, cfg);
  EvalReport rep = evaluate(corpus, b, model, cfg);
  std::cout << rep.to_text();
  std::cout << rep.to_record();
  return 0;
}

int cmd_gen_corpus(const CommonOpts& o, const GenOptions& gen,
                   const std::string& nbest_path, const std::string& refs_path,
                   const std::string& treebank_path,
                   const std::string& heldout_path, int sentences) {
  Grammar g = Grammar::load_file(o.grammar_path);
  Lexicon lex = Lexicon::load_file(o.lexicon_path);
  if (!treebank_path.empty() || !heldout_path.empty()) {
    // Treebank mode: one pool of distinct sentences, first half becomes
    // training trees, second half held-out yields.
    auto sents = sample_sentences(g, lex, sentences, gen.seed, gen.max_words);
    int half = sentences / 2;
    std::vector<std::vector<std::string>> train(sents.begin(),
                                                sents.begin() + half);
    auto bank = sample_treebank(g, lex, train);
    if (!treebank_path.empty())
      write_text_file(treebank_path, serialize_treebank(bank));
    if (!heldout_path.empty()) {
      std::string text;
      for (int i = half; i < sentences; ++i) {
        for (std::size_t w = 0; w < sents[i].size(); ++w) {
          if (w) text += ' ';
          text += sents[i][w];
        }
        text += '\n';
      }
      write_text_file(heldout_path, text);
    }
    std::cout << "treebank " << half << " trees, held-out "
              << (sentences - half) << " sentences\n";
    return 0;
  }
  auto corpus = generate_corpus(g, lex, gen);
  write_text_file(nbest_path, serialize_nbest(corpus));
  write_text_file(refs_path, serialize_references(corpus));
  int repairs = 0;
  for (const auto& u : corpus)
    if (u.actual_repair) ++repairs;
  std::cout << "generated " << corpus.size() << " utterances ("
            << repairs << " with injected repairs) into " << nbest_path
            << " and " << refs_path << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"n-best language processing pipeline"};
  app.require_subcommand(1);

  CommonOpts repair_o;
  auto* c_repair = app.add_subcommand(
      "repair", "detect self-repairs in word sequences read from stdin");
  add_common(c_repair, repair_o, true);

  CommonOpts parse_o;
  std::string parse_mode = "general";
  auto* c_parse =
      app.add_subcommand("parse", "parse word sequences read from stdin");
  c_parse->add_option("mode", parse_mode, "general or specialized")
      ->check(CLI::IsMember({"general", "specialized"}));
  add_common(c_parse, parse_o);

  CommonOpts spec_o;
  std::string spec_treebank, spec_out, spec_table;
  int spec_threshold = 0;
  auto* c_spec = app.add_subcommand(
      "specialize", "extract a specialized grammar from a treebank");
  c_spec->add_option("--treebank", spec_treebank, "treebank file")->required();
  c_spec->add_option("--out", spec_out, "specialized grammar output file");
  c_spec->add_option("--table-out", spec_table, "parse table dump file");
  c_spec->add_option("--threshold", spec_threshold,
                     "minimum rule frequency to keep");
  add_common(c_spec, spec_o);

  CommonOpts train_o;
  std::string train_nbest, train_refs, train_model;
  bool train_slt0 = false;
  auto* c_train = app.add_subcommand(
      "train", "fit object score tables and scaling factors");
  c_train->add_option("--nbest", train_nbest, "n-best corpus file")->required();
  c_train->add_option("--refs", train_refs, "reference transcriptions")
      ->required();
  c_train->add_option("--model-out", train_model, "model output file")
      ->required();
  c_train->add_flag("--slt0-scoring", train_slt0,
                    "score objects by reference-parse frequency only");
  add_common(c_train, train_o);

  CommonOpts select_o;
  std::string select_nbest, select_model;
  bool select_verbose = false;
  auto* c_select = app.add_subcommand(
      "select", "pick the best analysis for each n-best list");
  c_select->add_option("--nbest", select_nbest, "n-best corpus file")
      ->required();
  c_select->add_option("--model", select_model, "trained model file")
      ->required();
  c_select->add_flag("--verbose", select_verbose,
                     "print full score breakdowns");
  add_common(c_select, select_o);

  CommonOpts eval_o;
  std::string eval_nbest, eval_refs, eval_model;
  auto* c_eval = app.add_subcommand(
      "evaluate", "score selections against reference transcriptions");
  c_eval->add_option("--nbest", eval_nbest, "n-best corpus file")->required();
  c_eval->add_option("--refs", eval_refs, "reference transcriptions")
      ->required();
  c_eval->add_option("--model", eval_model, "trained model file")->required();
  add_common(c_eval, eval_o);

  CommonOpts gen_o;
  GenOptions gen;
  std::string gen_nbest = "nbest.tsv", gen_refs = "refs.tsv";
  std::string gen_treebank, gen_heldout;
  int gen_sentences = 100;
  auto* c_gen = app.add_subcommand(
      "gen-corpus", "generate synthetic n-best corpora or treebanks");
  c_gen->add_option("--out-nbest", gen_nbest, "n-best output file");
  c_gen->add_option("--out-refs", gen_refs, "references output file");
  c_gen->add_option("--utterances", gen.utterances, "number of utterances");
  c_gen->add_option("--nbest-size", gen.nbest, "hypotheses per utterance");
  c_gen->add_option("--seed", gen.seed, "random seed");
  c_gen->add_option("--max-words", gen.max_words, "sentence length cap");
  c_gen->add_option("--absent-rate", gen.absent_rate,
                    "fraction of lists missing the reference");
  c_gen->add_option("--repair-rate", gen.repair_rate,
                    "fraction of references spoken with a disfluency");
  c_gen->add_option("--treebank-out", gen_treebank,
                    "write a treebank instead of an n-best corpus");
  c_gen->add_option("--heldout-out", gen_heldout,
                    "held-out sentence file (treebank mode)");
  c_gen->add_option("--sentences", gen_sentences,
                    "sentence pool size for treebank mode");
  add_common(c_gen, gen_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*c_repair) return cmd_repair(repair_o);
    if (*c_parse) return cmd_parse(parse_o, parse_mode);
    if (*c_spec)
      return cmd_specialize(spec_o, spec_treebank, spec_out, spec_table,
                            spec_threshold);
    if (*c_train)
      return cmd_train(train_o, train_nbest, train_refs, train_model,
                       train_slt0);
    if (*c_select)
      return cmd_select(select_o, select_nbest, select_model, select_verbose);
    if (*c_eval) return cmd_evaluate(eval_o, eval_nbest, eval_refs, eval_model);
    if (*c_gen)
      return cmd_gen_corpus(gen_o, gen, gen_nbest, gen_refs, gen_treebank,
                            gen_heldout, gen_sentences);
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
