// gparse: preprocess, train, parse, eval, neighbors, dump-curves.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gparse/ensemble.h"
#include "gparse/errors.h"
#include "gparse/evalb.h"
#include "gparse/neighbors.h"
#include "gparse/params.h"
#include "gparse/parser.h"
#include "gparse/trainer.h"
#include "gparse/treebank.h"
#include "gparse/vocab.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace gparse;

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

// Raised for bad flag combinations detected after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json manifest_base(const std::string& command) {
  return json{{"tool", "gparse"}, {"version", GPARSE_VERSION}, {"command", command}};
}

void write_manifest(const fs::path& dir, const json& m) {
  std::ofstream out(dir / "manifest.json");
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + (dir / "manifest.json").string());
  out << m.dump(2) << '\n';
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Dims parse_dims(const std::string& text, int window, int kmax) {
  Dims d;
  char c1 = 0;
  char c2 = 0;
  std::istringstream in(text);
  if (!(in >> d.word >> c1 >> d.tag >> c2 >> d.hidden) || c1 != ',' || c2 != ',' || !in.eof()) {
    throw UsageError("--dims expects D,T,H, got '" + text + "'");
  }
  d.window = window;
  d.max_arity = kmax;
  return d;
}

json dims_json(const Dims& d) {
  return {{"D", d.word}, {"T", d.tag}, {"H", d.hidden}, {"K", d.window}, {"Kmax", d.max_arity}};
}

// ---------------------------------------------------------------------------

struct PreprocessArgs {
  std::string input;
  std::string out_dir;
  int merge_threshold = kDefaultMergeThreshold;
  std::string labels_from;
  int min_word_count = 1;
};

int cmd_preprocess(const PreprocessArgs& a) {
  const auto raw = read_trees(a.input);
  fs::create_directories(a.out_dir);
  const bool training_split = a.labels_from.empty();
  const LabelCounts counts = training_split ? count_merged_labels(raw) : read_label_counts(a.labels_from);
  const auto trees = preprocess_all(raw, counts, a.merge_threshold);

  const fs::path out = a.out_dir;
  const fs::path trees_path = out / (fs::path(a.input).stem().string() + ".mrg");
  write_trees(trees_path, trees);
  json m = manifest_base("preprocess");
  m["config"] = {{"merge_threshold", a.merge_threshold}, {"min_word_count", a.min_word_count}};
  m["inputs"] = {a.input};
  m["trees"] = trees_path.string();
  if (training_split) {
    write_label_counts(out / "merged_labels.tsv", counts, a.merge_threshold);
    build_tagset(trees, a.min_word_count).save(out / "tagset.txt");
    m["merged_labels"] = (out / "merged_labels.tsv").string();
    m["tagset"] = (out / "tagset.txt").string();
  } else {
    m["labels_from"] = a.labels_from;
  }
  write_manifest(out, m);
  std::cerr << "preprocessed " << trees.size() << " of " << raw.size() << " trees into "
            << trees_path.string() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string train;
  std::string dev;
  std::string out_dir;
  std::string tagset;
  std::string embeddings;
  std::string dims = "200,20,500";
  double lr = 0.15;
  double dropout = 0.25;
  int window = 7;
  int kmax = 7;
  uint64_t seed = 1;
  int epochs = 30;
  int patience = 5;
  int precision = 64;
  int min_word_count = 1;
};

int cmd_train(const TrainArgs& a) {
  if (a.precision != 64 && a.precision != 32) throw UsageError("--precision must be 64 or 32");
  TrainConfig cfg;
  cfg.base_lr = a.lr;
  cfg.p_drop = a.dropout;
  cfg.dims = parse_dims(a.dims, a.window, a.kmax);
  cfg.max_epochs = a.epochs;
  cfg.patience = a.patience;
  cfg.seed = a.seed;
  cfg.precision = a.precision == 64 ? Precision::kFloat64 : Precision::kFloat32;

  const auto train_trees = read_trees(a.train);
  const auto dev_trees = read_trees(a.dev);
  const TagSet tagset = a.tagset.empty() ? build_tagset(train_trees, a.min_word_count) : TagSet::load(a.tagset);

  const fs::path out = a.out_dir;
  fs::create_directories(out / "checkpoints");
  tagset.save(out / "tagset.txt");

  std::optional<Tensor> word_init;
  json emb = nullptr;
  if (!a.embeddings.empty()) {
    Rng emb_rng(a.seed ^ 0x9e3779b97f4a7c15ULL);
    EmbeddingLoad load = load_pretrained_embeddings(a.embeddings, tagset, cfg.dims.word, emb_rng);
    std::cerr << "embeddings: " << load.matched << " matched, " << load.defaulted << " defaulted, "
              << load.skipped << " skipped\n";
    emb = {{"path", a.embeddings}, {"matched", load.matched}, {"defaulted", load.defaulted},
           {"skipped", load.skipped}};
    word_init = std::move(load.table);
  }

  std::vector<std::string> checkpoints;
  auto on_epoch = [&](const EpochRecord& r, const ModelParams& params, bool improved) {
    std::fprintf(stderr, "epoch %3d  train_nll %9.5f  dev_f1 %6.2f%s\n", r.epoch, r.train_nll, r.dev_f1,
                 improved ? "  *" : "");
    if (improved) {
      const fs::path ck = out / "checkpoints" / ("epoch-" + std::to_string(r.epoch) + ".bin");
      params.save(ck, cfg.precision);
      checkpoints.push_back(ck.string());
    }
  };
  const TrainResult result = train(train_trees, dev_trees, tagset, cfg, on_epoch, word_init);

  result.best.save(out / "model.bin", cfg.precision);
  {
    std::ofstream h(out / "history.csv");
    write_history_csv(h, result.history);
  }
  json m = manifest_base("train");
  m["config"] = {{"lr", cfg.base_lr},         {"dropout", cfg.p_drop},   {"dims", dims_json(cfg.dims)},
                 {"epochs", cfg.max_epochs},  {"patience", cfg.patience}, {"precision", a.precision},
                 {"min_word_count", a.min_word_count}};
  m["seed"] = a.seed;
  m["corpora"] = {{"train", a.train}, {"dev", a.dev}};
  m["embeddings"] = emb;
  m["tagset"] = (out / "tagset.txt").string();
  m["model"] = (out / "model.bin").string();
  m["history"] = (out / "history.csv").string();
  m["checkpoints"] = checkpoints;
  m["best_epoch"] = result.best_epoch;
  write_manifest(out, m);
  return 0;
}

// ---------------------------------------------------------------------------

struct ParseArgs {
  std::vector<std::string> models;
  std::vector<std::string> tagsets;
  std::string input;
  std::string output;
  bool vote = false;
  int threads = 1;
};

int cmd_parse(const ParseArgs& a) {
  if (a.models.size() > 1 && !a.vote) throw UsageError("several --model given without --vote");
  if (a.tagsets.size() != 1 && a.tagsets.size() != a.models.size()) {
    throw UsageError("give one --tagset, or one per --model");
  }
  if (a.threads < 1) throw UsageError("--threads must be at least 1");

  std::vector<ModelParams> models;
  std::vector<TagSet> tagsets;
  for (const auto& m : a.models) models.push_back(ModelParams::load(m));
  for (const auto& t : a.tagsets) tagsets.push_back(TagSet::load(t));
  std::vector<const ModelParams*> model_ptrs;
  std::vector<const TagSet*> tagset_ptrs;
  for (size_t i = 0; i < models.size(); ++i) {
    model_ptrs.push_back(&models[i]);
    tagset_ptrs.push_back(&tagsets[tagsets.size() == 1 ? 0 : i]);
  }
  VotingScorer{model_ptrs, tagset_ptrs};  // validates tagsets and shapes up front

  std::vector<std::string> lines;
  {
    std::istringstream in(read_file(a.input));
    for (std::string line; std::getline(in, line);) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(std::move(line));
    }
  }
  std::vector<Sentence> sentences;
  for (size_t i = 0; i < lines.size(); ++i) {
    try {
      sentences.push_back(parse_tagged_line(lines[i]));
    } catch (const Error& e) {
      throw Error(e.code(), "input line " + std::to_string(i + 1) + ": " + e.what());
    }
  }

  const auto start = std::chrono::steady_clock::now();
  std::vector<std::string> results(sentences.size());
  std::vector<std::string> errors(sentences.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    VotingScorer scorer(model_ptrs, tagset_ptrs);
    for (size_t i = next++; i < sentences.size(); i = next++) {
      if (sentences[i].words.empty()) continue;
      try {
        results[i] = to_bracketed(parse(sentences[i], scorer, *tagset_ptrs[0]));
      } catch (const Error& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < a.threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  for (size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) {
      std::cerr << "input line " << i + 1 << ": " << errors[i] << '\n';
      return kDataError;
    }
  }
  std::ofstream file;
  if (!a.output.empty()) {
    file.open(a.output);
    if (!file) throw Error(ErrorCode::kIo, "cannot write " + a.output);
  }
  std::ostream& out = a.output.empty() ? std::cout : file;
  for (const auto& r : results) out << r << '\n';
  std::fprintf(stderr, "parsed %zu sentences in %.3f s\n", sentences.size(), seconds);

  if (!a.output.empty()) {
    json m = manifest_base("parse");
    m["config"] = {{"vote", a.vote}, {"threads", a.threads}};
    m["models"] = a.models;
    m["tagsets"] = a.tagsets;
    m["inputs"] = {a.input};
    m["output"] = a.output;
    write_manifest(fs::absolute(a.output).parent_path(), m);
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string gold;
  std::string pred;
  std::string csv;
  int max_length = 40;
  bool raw = false;
};

std::vector<ParseTree> normalized(const std::vector<ParseTree>& trees) {
  std::vector<ParseTree> out;
  for (const auto& t : trees) {
    auto n = normalize(t);
    out.push_back(n ? *n : t);
  }
  return out;
}

int cmd_eval(const EvalArgs& a) {
  auto gold = read_trees(a.gold);
  auto pred = read_trees(a.pred);
  if (!a.raw) {
    gold = normalized(gold);
    pred = normalized(pred);
  }
  const EvalReport report = evaluate(gold, pred, a.max_length);
  std::cout << format_report(report);
  if (!a.csv.empty()) {
    std::ofstream out(a.csv);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + a.csv);
    write_length_csv(out, report.full);
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct NeighborsArgs {
  std::string model;
  std::string tagset;
  std::string corpus;
  std::string dump;
  std::string query;
  int k = 5;
};

int cmd_neighbors(const NeighborsArgs& a) {
  if (a.corpus.empty() && a.dump.empty()) throw UsageError("need --corpus or --dump");
  if (a.k < 1) throw UsageError("-k must be at least 1");
  const ModelParams params = ModelParams::load(a.model);
  const TagSet tagset = TagSet::load(a.tagset);
  params.check_compatible(tagset);

  NeighborDump dump;
  if (!a.corpus.empty()) {
    dump = collect_phrase_vectors(read_trees(a.corpus), params, tagset);
    if (!a.dump.empty()) write_dump(a.dump, dump);
  } else {
    dump = read_dump(a.dump);
  }
  const auto normalized_query = normalize(parse_tree(a.query));
  if (!normalized_query) throw Error(ErrorCode::kEmptyLabel, "query has no words");
  const ParseTree query = merge_unary_chains(*normalized_query);
  const Vec v = phrase_vector(query, params, tagset);
  for (const auto& n : nearest_phrases(v, dump, size_t(a.k), to_phrase_text(query))) {
    std::printf("%.6f\t%s\n", n.distance, n.phrase.c_str());
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct CurvesArgs {
  std::vector<std::string> runs;
  std::string output;
};

// Concatenates the history files of several training runs into one long CSV
// keyed by run name.
int cmd_dump_curves(const CurvesArgs& a) {
  std::ostringstream out;
  out << "run,epoch,train_nll,dev_f1\n";
  for (const auto& run : a.runs) {
    fs::path hist = run;
    if (fs::is_directory(hist)) hist /= "history.csv";
    std::istringstream in(read_file(hist));
    std::string line;
    std::getline(in, line);
    if (line != "epoch,train_nll,dev_f1") throw Error(ErrorCode::kBadFormat, hist.string() + " is not a history file");
    const std::string name = fs::is_directory(run) ? fs::path(run).filename().string() : hist.stem().string();
    while (std::getline(in, line)) {
      if (!line.empty()) out << name << ',' << line << '\n';
    }
  }
  if (a.output.empty()) {
    std::cout << out.str();
  } else {
    std::ofstream f(a.output);
    if (!f) throw Error(ErrorCode::kIo, "cannot write " + a.output);
    f << out.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Greedy constituency parser with compositional node representations"};
  app.set_version_flag("--version", GPARSE_VERSION);
  app.require_subcommand(1);

  PreprocessArgs pre;
  auto* c_pre = app.add_subcommand("preprocess", "Normalize a bracketed treebank and merge unary chains");
  c_pre->add_option("input", pre.input, "Bracketed treebank file")->required()->check(CLI::ExistingFile);
  c_pre->add_option("out_dir", pre.out_dir, "Output directory")->required();
  c_pre->add_option("--merge-threshold", pre.merge_threshold, "Minimum count for a merged label")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  c_pre->add_option("--labels-from", pre.labels_from, "Merged-label sidecar of the training split")
      ->check(CLI::ExistingFile);
  c_pre->add_option("--min-word-count", pre.min_word_count, "Rarer words map to the unknown word")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  TrainArgs tr;
  auto* c_train = app.add_subcommand("train", "Train a model on preprocessed trees");
  c_train->add_option("--train", tr.train, "Preprocessed training trees")->required()->check(CLI::ExistingFile);
  c_train->add_option("--dev", tr.dev, "Preprocessed development trees")->required()->check(CLI::ExistingFile);
  c_train->add_option("--out", tr.out_dir, "Output directory")->required();
  c_train->add_option("--tagset", tr.tagset, "Use this tagset instead of building one")->check(CLI::ExistingFile);
  c_train->add_option("--embeddings", tr.embeddings, "Pretrained word vectors")->check(CLI::ExistingFile);
  c_train->add_option("--lr", tr.lr, "Base learning rate")->capture_default_str();
  c_train->add_option("--dropout", tr.dropout, "Lookup-table dropout probability")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 0.999999));
  c_train->add_option("--dims", tr.dims, "Word, tag and hidden sizes as D,T,H")->capture_default_str();
  c_train->add_option("--window", tr.window, "Tagger window (odd)")->capture_default_str();
  c_train->add_option("--kmax", tr.kmax, "Largest arity with its own composition matrix")->capture_default_str();
  c_train->add_option("--seed", tr.seed, "Random seed")->capture_default_str();
  c_train->add_option("--epochs", tr.epochs, "Maximum epochs")->capture_default_str()->check(CLI::NonNegativeNumber);
  c_train->add_option("--patience", tr.patience, "Epochs without dev gain before stopping")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  c_train->add_option("--precision", tr.precision, "Model file precision, 64 or 32")->capture_default_str();
  c_train->add_option("--min-word-count", tr.min_word_count, "Rarer words map to the unknown word")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  ParseArgs pa;
  auto* c_parse = app.add_subcommand("parse", "Parse word/POS sentences, one per line");
  c_parse->add_option("--model", pa.models, "Model file; repeat with --vote")->required()->check(CLI::ExistingFile);
  c_parse->add_option("--tagset", pa.tagsets, "Tagset file; one, or one per model")->required()->check(CLI::ExistingFile);
  c_parse->add_option("--input", pa.input, "Input file")->required()->check(CLI::ExistingFile);
  c_parse->add_option("--output", pa.output, "Write trees here instead of standard output");
  c_parse->add_flag("--vote", pa.vote, "Average the score tables of all models");
  c_parse->add_option("--threads", pa.threads, "Sentences parsed in parallel")->capture_default_str();

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "Labeled bracket precision, recall and F1");
  c_eval->add_option("gold", ev.gold, "Gold trees")->required()->check(CLI::ExistingFile);
  c_eval->add_option("pred", ev.pred, "Predicted trees")->required()->check(CLI::ExistingFile);
  c_eval->add_option("--csv", ev.csv, "Write the per-length table here");
  c_eval->add_option("--max-length", ev.max_length, "Length cut-off of the short subset")->capture_default_str();
  c_eval->add_flag("--raw", ev.raw, "Compare labels as written, without normalization");

  NeighborsArgs nb;
  auto* c_nb = app.add_subcommand("neighbors", "Closest corpus phrases to a query phrase");
  c_nb->add_option("--model", nb.model, "Model file")->required()->check(CLI::ExistingFile);
  c_nb->add_option("--tagset", nb.tagset, "Tagset file")->required()->check(CLI::ExistingFile);
  c_nb->add_option("--corpus", nb.corpus, "Preprocessed trees to search")->check(CLI::ExistingFile);
  c_nb->add_option("--dump", nb.dump, "Phrase-vector dump; written when --corpus is given, read otherwise");
  c_nb->add_option("--query", nb.query, "Bracketed query phrase, e.g. \"(NP (DT the) (NN dog))\"")->required();
  c_nb->add_option("-k", nb.k, "Number of neighbors")->capture_default_str();

  CurvesArgs cv;
  auto* c_cv = app.add_subcommand("dump-curves", "Merge training histories into one CSV");
  c_cv->add_option("runs", cv.runs, "Training output directories or history files")->required();
  c_cv->add_option("--output", cv.output, "Write here instead of standard output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*c_pre) return cmd_preprocess(pre);
    if (*c_train) return cmd_train(tr);
    if (*c_parse) return cmd_parse(pa);
    if (*c_eval) return cmd_eval(ev);
    if (*c_nb) return cmd_neighbors(nb);
    if (*c_cv) return cmd_dump_curves(cv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}
