#include "gparse/decoder.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gparse/errors.h"

namespace gparse {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Tags that close whatever precedes them: O, E-x, S-x.
bool closes(int t) { return bioes::can_end(t); }
// Tags that may follow a closed tag: O, B-x, S-x.
bool opens(int t) { return bioes::can_start(t); }

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// Forward log-scores: alpha[n][t] covers positions 0..n with tag t at n,
// including t's own score.
ScoreTable forward(const TagLattice& lat) {
  const int n = lat.length();
  const int tags = lat.num_tags();
  const int labels = lat.num_labels();
  const ScoreTable& s = lat.scores();
  ScoreTable alpha(n, tags, kNegInf);
  for (int i = 0; i < n; ++i) {
    double closed = 0.0;
    if (i > 0) {
      closed = kNegInf;
      for (int t = 0; t < tags; ++t) {
        if (closes(t)) closed = log_add(closed, alpha.at(i - 1, t));
      }
    }
    alpha.at(i, bioes::kOutside) = s.at(i, bioes::kOutside) + closed;
    for (int l = 0; l < labels; ++l) {
      const int b = bioes::tag(Prefix::kBegin, l);
      const int in = bioes::tag(Prefix::kInside, l);
      const int e = bioes::tag(Prefix::kEnd, l);
      const int sg = bioes::tag(Prefix::kSingle, l);
      alpha.at(i, b) = s.at(i, b) + closed;
      alpha.at(i, sg) = s.at(i, sg) + closed;
      if (i > 0) {
        const double open = log_add(alpha.at(i - 1, b), alpha.at(i - 1, in));
        alpha.at(i, in) = s.at(i, in) + open;
        alpha.at(i, e) = s.at(i, e) + open;
      }
    }
  }
  return alpha;
}

// Backward log-scores: beta[n][t] covers positions n+1..N-1 given tag t at n,
// excluding t's own score.
ScoreTable backward(const TagLattice& lat) {
  const int n = lat.length();
  const int tags = lat.num_tags();
  const int labels = lat.num_labels();
  const ScoreTable& s = lat.scores();
  ScoreTable beta(n, tags, kNegInf);
  if (n == 0) return beta;
  for (int t = 0; t < tags; ++t) {
    if (closes(t)) beta.at(n - 1, t) = 0.0;
  }
  for (int i = n - 2; i >= 0; --i) {
    double open = kNegInf;
    for (int t = 0; t < tags; ++t) {
      if (opens(t)) open = log_add(open, s.at(i + 1, t) + beta.at(i + 1, t));
    }
    beta.at(i, bioes::kOutside) = open;
    for (int l = 0; l < labels; ++l) {
      const int in = bioes::tag(Prefix::kInside, l);
      const int e = bioes::tag(Prefix::kEnd, l);
      const double cont =
          log_add(s.at(i + 1, in) + beta.at(i + 1, in), s.at(i + 1, e) + beta.at(i + 1, e));
      beta.at(i, bioes::tag(Prefix::kBegin, l)) = cont;
      beta.at(i, in) = cont;
      beta.at(i, e) = open;
      beta.at(i, bioes::tag(Prefix::kSingle, l)) = open;
    }
  }
  return beta;
}

double log_partition_from(const ScoreTable& alpha) {
  const int n = alpha.rows();
  if (n == 0) return 0.0;
  double z = kNegInf;
  for (int t = 0; t < alpha.cols(); ++t) {
    if (closes(t)) z = log_add(z, alpha.at(n - 1, t));
  }
  return z;
}

}  // namespace

TagLattice::TagLattice(ScoreTable scores) : scores_(std::move(scores)) {
  if (scores_.cols() < 1 || (scores_.cols() - 1) % 4 != 0) {
    throw Error(ErrorCode::kShapeMismatch,
                "lattice needs 4L+1 tag columns, got " + std::to_string(scores_.cols()));
  }
}

ViterbiResult viterbi(const TagLattice& lat) {
  const int n = lat.length();
  const int tags = lat.num_tags();
  const int labels = lat.num_labels();
  const ScoreTable& s = lat.scores();
  ViterbiResult result;
  if (n == 0) return result;

  ScoreTable best(n, tags, kNegInf);
  std::vector<int> back(static_cast<size_t>(n) * tags, -1);
  for (int i = 0; i < n; ++i) {
    double closed = 0.0;
    int closed_arg = -1;
    if (i > 0) {
      closed = kNegInf;
      for (int t = 0; t < tags; ++t) {
        if (closes(t) && best.at(i - 1, t) > closed) {
          closed = best.at(i - 1, t);
          closed_arg = t;
        }
      }
    }
    auto set = [&](int t, double prev, int arg) {
      best.at(i, t) = prev == kNegInf ? kNegInf : s.at(i, t) + prev;
      back[static_cast<size_t>(i) * tags + t] = arg;
    };
    set(bioes::kOutside, closed, closed_arg);
    for (int l = 0; l < labels; ++l) {
      const int b = bioes::tag(Prefix::kBegin, l);
      const int in = bioes::tag(Prefix::kInside, l);
      set(b, closed, closed_arg);
      set(bioes::tag(Prefix::kSingle, l), closed, closed_arg);
      if (i > 0) {
        // B-l has the lower index, so it wins ties.
        const bool take_inside = best.at(i - 1, in) > best.at(i - 1, b);
        const double open = take_inside ? best.at(i - 1, in) : best.at(i - 1, b);
        const int arg = take_inside ? in : b;
        set(in, open, arg);
        set(bioes::tag(Prefix::kEnd, l), open, arg);
      }
    }
  }

  int last = -1;
  double score = kNegInf;
  for (int t = 0; t < tags; ++t) {
    if (closes(t) && best.at(n - 1, t) > score) {
      score = best.at(n - 1, t);
      last = t;
    }
  }
  result.score = score;
  result.tags.assign(n, 0);
  for (int i = n - 1; i >= 0; --i) {
    result.tags[i] = last;
    last = back[static_cast<size_t>(i) * tags + last];
  }
  return result;
}

double log_partition(const TagLattice& lattice) { return log_partition_from(forward(lattice)); }

ScoreTable marginals(const TagLattice& lattice) {
  const ScoreTable alpha = forward(lattice);
  const ScoreTable beta = backward(lattice);
  const double z = log_partition_from(alpha);
  ScoreTable m(lattice.length(), lattice.num_tags());
  for (int i = 0; i < m.rows(); ++i) {
    for (int t = 0; t < m.cols(); ++t) {
      const double a = alpha.at(i, t);
      const double b = beta.at(i, t);
      m.at(i, t) = (a == kNegInf || b == kNegInf) ? 0.0 : std::exp(a + b - z);
    }
  }
  return m;
}

double path_score(const TagLattice& lattice, std::span<const int> tags) {
  if (static_cast<int>(tags.size()) != lattice.length()) {
    throw Error(ErrorCode::kShapeMismatch, "path length differs from lattice length");
  }
  double total = 0.0;
  for (int i = 0; i < lattice.length(); ++i) {
    if (tags[i] < 0 || tags[i] >= lattice.num_tags()) {
      throw Error(ErrorCode::kIndexOutOfRange, "tag index " + std::to_string(tags[i]));
    }
    total += lattice.scores().at(i, tags[i]);
  }
  return total;
}

NllGrad sequence_nll_grad(const TagLattice& lattice, std::span<const int> gold) {
  const bool in_range = std::all_of(gold.begin(), gold.end(),
                                    [&](int t) { return t >= 0 && t < lattice.num_tags(); });
  if (static_cast<int>(gold.size()) != lattice.length() || !in_range ||
      !constrain_path_validity(gold)) {
    throw Error(ErrorCode::kInvalidGoldPath, "gold tags are not a valid path of the lattice");
  }
  const ScoreTable alpha = forward(lattice);
  const ScoreTable beta = backward(lattice);
  const double z = log_partition_from(alpha);
  NllGrad out;
  out.nll = z - path_score(lattice, gold);
  out.grad = ScoreTable(lattice.length(), lattice.num_tags());
  for (int i = 0; i < lattice.length(); ++i) {
    for (int t = 0; t < lattice.num_tags(); ++t) {
      const double a = alpha.at(i, t);
      const double b = beta.at(i, t);
      out.grad.at(i, t) = (a == kNegInf || b == kNegInf) ? 0.0 : std::exp(a + b - z);
    }
    out.grad.at(i, gold[i]) -= 1.0;
  }
  return out;
}

bool constrain_path_validity(std::span<const int> tags) { return bioes::is_valid(tags); }

}  // namespace gparse
