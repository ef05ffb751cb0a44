// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <time.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <string>
#include <vector>

#include "gparse/bioes.h"
#include "gparse/composer.h"
#include "gparse/decoder.h"
#include "gparse/ensemble.h"
#include "gparse/evalb.h"
#include "gparse/synthetic.h"
#include "gparse/tagger.h"
#include "gparse/trainer.h"
#include "gparse/treebank.h"
#include "support/oracles.h"

using namespace gparse;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& name, const std::string& detail) {
  std::printf("[%s] criterion %d  %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double wall_seconds(const std::function<void()>& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double thread_cpu_seconds() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return double(ts.tv_sec) + 1e-9 * double(ts.tv_nsec);
}

Vec dense(const std::map<int, Vec>& cols, const Tensor& table) {
  Vec out(table.size(), 0.0);
  for (const auto& [c, g] : cols) {
    for (size_t r = 0; r < g.size(); ++r) out[c * table.rows() + r] = g[r];
  }
  return out;
}

std::vector<ParseTree> expanded(const std::vector<ParseTree>& trees) {
  std::vector<ParseTree> out;
  for (const auto& t : trees) out.push_back(expand_merged_labels(t));
  return out;
}

std::vector<ParseTree> parse_all(const std::vector<ParseTree>& trees, NodeScorer& scorer, const TagSet& ts) {
  std::vector<ParseTree> out;
  for (const auto& t : trees) out.push_back(parse(Sentence{t.words(), t.pos_tags()}, scorer, ts));
  return out;
}

double f1_percent(const std::vector<ParseTree>& gold, const std::vector<ParseTree>& pred) {
  return 100.0 * evalb_f1(expanded(gold), pred).f1();
}

// ---------------------------------------------------------------------------

void decoder_oracle() {
  Rng rng(1000);
  std::uniform_int_distribution<int> len(1, 8);
  std::uniform_int_distribution<int> labs(1, 3);
  double score_err = 0.0;
  double logz_err = 0.0;
  double marg_err = 0.0;
  int path_mismatch = 0;
  const double secs = wall_seconds([&] {
    for (int trial = 0; trial < 1000; ++trial) {
      const ScoreTable s = oracle::random_scores(rng, len(rng), labs(rng), -2.0, 2.0);
      const TagLattice lat(s);
      const oracle::Enumeration e = oracle::enumerate(s);
      const ViterbiResult v = viterbi(lat);
      path_mismatch += v.tags != e.best;
      score_err = std::max(score_err, std::abs(v.score - e.best_score));
      logz_err = std::max(logz_err, std::abs(log_partition(lat) - e.log_z));
      const ScoreTable m = marginals(lat);
      for (size_t i = 0; i < m.values().size(); ++i) {
        marg_err = std::max(marg_err, std::abs(m.values()[i] - e.marginals.values()[i]));
      }
    }
  });
  const bool pass = path_mismatch == 0 && score_err <= 1e-9 && logz_err <= 1e-9 && marg_err <= 1e-9 && secs < 10.0;
  report(2, pass, "decoder oracle equivalence",
         fmt("1000 lattices, %d path mismatches, max |score| err %.2e, |logZ| err %.2e, marginal err %.2e, %.2f s",
             path_mismatch, score_err, logz_err, marg_err, secs));
}

// ---------------------------------------------------------------------------

void gradient_suite() {
  const Dims dims{4, 4, 6, 3, 3};
  double worst_composer = 0.0;
  double worst_tagger = 0.0;
  double worst_step = 0.0;
  const double secs = wall_seconds([&] {
    {
      const ParseTree tree = parse_tree("(NP (DT the) (JJ big) (NN dog))");
      const TagSet ts = build_tagset({tree});
      Rng init(1);
      ModelParams p = ModelParams::create(dims, ts, 0.0, init);
      const Vec w{0.3, -0.8, 1.2, 0.5};
      auto run = [&](ParamGrads* g) {
        ReprArena arena(p, Mode::kTrain);
        const Handle root = compose_tree(arena, tree, ts);
        double loss = 0.0;
        for (int i = 0; i < 4; ++i) loss += w[i] * arena.vec(root)[i];
        if (g) compose_backward(arena, root, w, *g);
        return loss;
      };
      ParamGrads g(p);
      run(&g);
      auto f = [&] { return run(nullptr); };
      worst_composer = std::max({grad_check(f, p.compose[2].values(), g.compose[2].values()),
                                 grad_check(f, p.words.values(), dense(g.words, p.words)),
                                 grad_check(f, p.tags.values(), dense(g.tags, p.tags))});
    }
    {
      Rng init(2);
      ModelParams p = ModelParams::create(dims, 10, 6, 9, 0.0, init);
      std::vector<Vec> x(3, Vec(8));
      ScoreTable wts(3, 9);
      std::uniform_real_distribution<double> u(-1, 1);
      for (auto& v : x) {
        for (double& e : v) e = u(init);
      }
      for (double& e : wts.values()) e = u(init);
      auto f = [&] {
        const ScoreTable s = score_sequence(x, p);
        double t = 0.0;
        for (size_t i = 0; i < s.values().size(); ++i) t += wts.values()[i] * s.values()[i];
        return t;
      };
      TaggerCache cache;
      score_sequence(x, p, &cache);
      ParamGrads g(p);
      const auto gx = tagger_backward(cache, wts, p, g);
      worst_tagger = std::max({grad_check(f, p.hidden.values(), g.hidden.values()),
                               grad_check(f, p.output.values(), g.output.values()),
                               grad_check(f, p.pad.values(), g.pad.values())});
      for (int i = 0; i < 3; ++i) worst_tagger = std::max(worst_tagger, grad_check(f, x[i], gx[i]));
    }
    {
      const std::vector<ParseTree> trees = {
          parse_tree("(S (NP (DT the) (NN dog)) (VP (VBD saw) (NP (DT a) (NN cat))) (. .))"),
          parse_tree("(S|VP (VB go) (ADVP (RB home)))")};
      const TagSet ts = build_tagset(trees);
      const auto items = make_training_items(trees, ts);
      Rng init(3);
      ModelParams p = ModelParams::create(dims, ts, 0.0, init);
      for (const auto& item : items) {
        ParamGrads g(p);
        Rng rng(0);
        compute_gradients(item, p, rng, g);
        auto f = [&] {
          ParamGrads scratch(p);
          Rng r(0);
          return compute_gradients(item, p, r, scratch);
        };
        worst_step = std::max({worst_step, grad_check(f, p.hidden.values(), g.hidden.values()),
                               grad_check(f, p.output.values(), g.output.values()),
                               grad_check(f, p.pad.values(), g.pad.values()),
                               grad_check(f, p.words.values(), dense(g.words, p.words)),
                               grad_check(f, p.tags.values(), dense(g.tags, p.tags))});
        for (size_t k = 0; k < p.compose.size(); ++k) {
          worst_step = std::max(worst_step, grad_check(f, p.compose[k].values(), g.compose[k].values()));
        }
      }
    }
  });
  const bool pass = worst_composer < 1e-4 && worst_tagger < 1e-4 && worst_step < 1e-4 && secs < 5.0;
  report(3, pass, "gradient suite",
         fmt("max rel err composer %.2e, tagger %.2e, train step %.2e, %.2f s", worst_composer, worst_tagger,
             worst_step, secs));
}

// ---------------------------------------------------------------------------

void oracle_round_trip() {
  const auto raw = oracle::random_trees(199, 4);
  std::vector<ParseTree> trees = preprocess_all(raw, count_merged_labels(raw), 1);
  trees.push_back(oracle::look_around_tree());
  const TagSet ts = build_tagset(trees);
  std::vector<ParseTree> pred;
  int exact = 0;
  for (const auto& t : trees) {
    oracle::GoldScorer scorer(t, ts);
    pred.push_back(parse(Sentence{t.words(), t.pos_tags()}, scorer, ts));
    exact += pred.back() == expand_merged_labels(t);
  }
  const std::string caption =
      "(S (VP (VP (VB Look) (PRT (RP around))) (CC and) (VP (VB choose) (NP (PRP$ your) (JJ own) "
      "(NN ground)))) (. .))";
  const bool caption_ok = to_bracketed(pred.back()) == caption;
  const double f1 = f1_percent(trees, pred);
  report(4, exact == int(trees.size()) && f1 == 100.0 && caption_ok, "oracle round trip",
         fmt("%d/%zu trees exact, F1 %.2f, look-around caption tree %s", exact, trees.size(), f1,
             caption_ok ? "reproduced" : "differs"));
}

// ---------------------------------------------------------------------------

void replay_consistency(const std::vector<ParseTree>& synthetic) {
  const auto raw = oracle::random_trees(200, 5);
  std::vector<ParseTree> trees = preprocess_all(raw, count_merged_labels(raw), 1);
  trees.insert(trees.end(), synthetic.begin(), synthetic.begin() + 200);
  trees.push_back(oracle::look_around_tree());
  const TagSet ts = build_tagset(trees);
  int rebuilt = 0;
  long sequences = 0;
  long invalid = 0;
  for (const auto& t : trees) {
    const auto seqs = extract_gold_sequences(t);
    for (const auto& s : seqs) {
      std::vector<int> tags;
      for (const auto& name : s.targets) tags.push_back(*ts.bioes_index(name));
      ++sequences;
      invalid += !constrain_path_validity(tags);
    }
    rebuilt += reassemble_from_sequences(t.words(), t.pos_tags(), seqs) == t;
  }
  report(5, rebuilt == int(trees.size()) && invalid == 0, "replay consistency",
         fmt("%d/%zu trees rebuilt, %ld of %ld target sequences invalid", rebuilt, trees.size(), invalid,
             sequences));
}

// ---------------------------------------------------------------------------

struct Run {
  TrainResult result;
  double cpu_seconds = 0.0;
  double train_f1 = 0.0;
  double dev_f1 = 0.0;
};

Run run_training(const std::vector<ParseTree>& train_trees, const std::vector<ParseTree>& dev_trees,
                 const TagSet& ts, TrainConfig cfg) {
  Run r;
  const double t0 = thread_cpu_seconds();
  r.result = train(train_trees, dev_trees, ts, cfg);
  r.cpu_seconds = thread_cpu_seconds() - t0;
  r.train_f1 = corpus_f1(train_trees, r.result.best, ts);
  r.dev_f1 = corpus_f1(dev_trees, r.result.best, ts);
  return r;
}

void end_to_end(const std::vector<ParseTree>& train_trees, const std::vector<ParseTree>& dev_trees,
                const TagSet& ts) {
  TrainConfig cfg;
  cfg.dims = {32, 8, 64, 7, 7};
  cfg.max_epochs = 30;
  cfg.seed = 1;
  TrainConfig no_drop = cfg;
  no_drop.p_drop = 0.0;
  TrainConfig second = cfg;
  second.seed = 2;

  auto a = std::async(std::launch::async, run_training, std::cref(train_trees), std::cref(dev_trees), std::cref(ts), cfg);
  auto b = std::async(std::launch::async, run_training, std::cref(train_trees), std::cref(dev_trees), std::cref(ts), no_drop);
  auto c = std::async(std::launch::async, run_training, std::cref(train_trees), std::cref(dev_trees), std::cref(ts), second);
  const Run drop = a.get();
  const Run plain = b.get();
  const Run other = c.get();

  const double gap_drop = drop.train_f1 - drop.dev_f1;
  const double gap_plain = plain.train_f1 - plain.dev_f1;
  const bool learn = drop.dev_f1 >= 95.0 && drop.cpu_seconds < 600.0;
  report(6, learn && gap_plain > gap_drop, "end-to-end learning",
         fmt("dropout 0.25: dev F1 %.2f (best epoch %d, %.0f s CPU), train/dev gap %.2f; "
             "dropout 0: dev F1 %.2f, gap %.2f",
             drop.dev_f1, drop.result.best_epoch, drop.cpu_seconds, gap_drop, plain.dev_f1, gap_plain));

  // Voting.
  const ModelParams* single[] = {&drop.result.best};
  const ModelParams* dup[] = {&drop.result.best, &drop.result.best};
  const ModelParams* pair[] = {&drop.result.best, &other.result.best};
  const TagSet* ts1[] = {&ts};
  const TagSet* ts2[] = {&ts, &ts};
  VotingScorer s_single(single, ts1);
  VotingScorer s_dup(dup, ts2);
  VotingScorer s_pair(pair, ts2);
  const auto p_single = parse_all(dev_trees, s_single, ts);
  const auto p_dup = parse_all(dev_trees, s_dup, ts);
  const auto p_pair = parse_all(dev_trees, s_pair, ts);
  const bool same = p_single == p_dup;
  const double v2 = f1_percent(dev_trees, p_pair);
  const double best_member = std::max(drop.dev_f1, other.dev_f1);
  report(7, same && v2 >= best_member - 0.5, "voting sanity",
         fmt("duplicated V2 %s single model; V2 of seeds 1 and 2: dev F1 %.2f vs members %.2f / %.2f",
             same ? "identical to" : "differs from", v2, drop.dev_f1, other.dev_f1));
}

// ---------------------------------------------------------------------------

void bioes_algebra(const std::vector<const TagSet*>& tagsets) {
  bool sizes = true;
  bool closed_form = true;
  std::string detail;
  for (const TagSet* ts : tagsets) {
    const int l = ts->num_labels();
    sizes = sizes && ts->num_bioes() == 4 * l + 1 && bioes::num_tags(l) == 4 * l + 1;
    const double logz = log_partition(TagLattice(ScoreTable(1, ts->num_bioes())));
    const double expected = std::log(2.0 * l + 1.0);
    const bool ok = std::abs(logz - expected) < 1e-12;
    closed_form = closed_form && ok;
    detail += fmt("L=%d: |tags| %d, N=1 logZ %.6f vs log(2L+1) %.6f (log(L+1) %.6f); ", l, ts->num_bioes(), logz,
                  expected, std::log(l + 1.0));
  }
  report(8, sizes && closed_form, "BIOES algebra", detail);
}

// ---------------------------------------------------------------------------

void determinism(const std::vector<ParseTree>& train_trees, const std::vector<ParseTree>& dev_trees,
                 const TagSet& ts) {
  TrainConfig cfg;
  cfg.dims = {16, 4, 32, 5, 7};
  cfg.max_epochs = 3;
  cfg.seed = 9;
  const std::vector<ParseTree> subset(train_trees.begin(), train_trees.begin() + 400);
  auto run = [&] {
    const TrainResult r = train(subset, dev_trees, ts, cfg);
    ModelScorer scorer(r.best, ts);
    std::string trees;
    for (const auto& t : parse_all(dev_trees, scorer, ts)) trees += to_bracketed(t) + "\n";
    return std::make_pair(r.best.serialize(Precision::kFloat64), trees);
  };
  auto first = std::async(std::launch::async, run);
  const auto b = run();
  const auto a = first.get();
  const bool model_same = a.first == b.first;
  const bool trees_same = a.second == b.second;
  report(9, model_same && trees_same, "determinism",
         fmt("model files %s (%zu bytes), parsed dev trees %s", model_same ? "bit-identical" : "differ",
             a.first.size(), trees_same ? "identical" : "differ"));
}

}  // namespace

int main() {
  std::printf("[N/A ] criterion 1  treebank benchmark numbers: the licensed treebank is not available; "
              "criteria 2-9 stand in\n");
  std::fflush(stdout);

  const SyntheticCorpus corpus = make_synthetic_corpus();
  const LabelCounts stats = count_merged_labels(corpus.train);
  const auto train_trees = preprocess_all(corpus.train, stats, kDefaultMergeThreshold);
  const auto dev_trees = preprocess_all(corpus.dev, stats, kDefaultMergeThreshold);
  const TagSet ts = build_tagset(train_trees);

  decoder_oracle();
  gradient_suite();
  oracle_round_trip();
  replay_consistency(train_trees);

  const TagSet fixture_ts = build_tagset(oracle::random_trees(50, 6));
  const TagSet figure_ts = build_tagset({oracle::look_around_tree()});
  const TagSet two_ts = build_tagset({parse_tree("(NP (NP (DT a) (NN b)) (VP (VB c)))")});
  bioes_algebra({&two_ts, &figure_ts, &fixture_ts, &ts});

  end_to_end(train_trees, dev_trees, ts);
  determinism(train_trees, dev_trees, ts);

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
