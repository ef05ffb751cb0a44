#include "gparse/evalb.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>

#include "gparse/errors.h"

namespace gparse {

namespace {

void collect(const ParseTree& t, std::vector<Bracket>& out) {
  if (t.is_preterminal()) return;
  out.push_back({t.label, t.span.start, t.span.end});
  for (const auto& c : t.children) collect(c, out);
}

}  // namespace

double BracketCounts::f1() const {
  const double p = precision();
  const double r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

std::vector<Bracket> brackets(const ParseTree& tree) {
  std::vector<Bracket> out;
  collect(tree, out);
  std::sort(out.begin(), out.end());
  return out;
}

long matched_brackets(std::span<const Bracket> gold, std::span<const Bracket> pred) {
  long n = 0;
  size_t i = 0;
  size_t j = 0;
  while (i < gold.size() && j < pred.size()) {
    if (gold[i] < pred[j]) {
      ++i;
    } else if (pred[j] < gold[i]) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

EvalbResult evalb_f1(std::span<const ParseTree> gold, std::span<const ParseTree> pred) {
  if (gold.size() != pred.size()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(gold.size()) + " gold trees vs " +
                                                std::to_string(pred.size()) + " predicted");
  }
  EvalbResult r;
  std::map<int, LengthBucket> buckets;
  for (size_t i = 0; i < gold.size(); ++i) {
    const int len = gold[i].num_tokens();
    if (pred[i].num_tokens() != len) {
      throw Error(ErrorCode::kLengthMismatch, "sentence " + std::to_string(i + 1) +
                                                  " has different token counts");
    }
    const auto g = brackets(gold[i]);
    const auto p = brackets(pred[i]);
    const long m = matched_brackets(g, p);
    for (BracketCounts* c : {&r.total, &buckets[len].counts}) {
      c->matched += m;
      c->gold += static_cast<long>(g.size());
      c->pred += static_cast<long>(p.size());
    }
    buckets[len].length = len;
    ++buckets[len].sentences;
  }
  for (auto& [len, b] : buckets) r.by_length.push_back(b);
  return r;
}

EvalReport evaluate(std::span<const ParseTree> gold, std::span<const ParseTree> pred,
                    int max_length) {
  EvalReport report;
  report.max_length = max_length;
  report.full = evalb_f1(gold, pred);
  std::vector<ParseTree> g_short;
  std::vector<ParseTree> p_short;
  for (size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].num_tokens() <= max_length) {
      g_short.push_back(gold[i]);
      p_short.push_back(pred[i]);
    }
  }
  report.short_sentences = evalb_f1(g_short, p_short);
  return report;
}

std::string format_report(const EvalReport& report) {
  auto row = [](const char* name, const EvalbResult& r, size_t sentences) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-12s sentences %6zu  P %6.2f  R %6.2f  F1 %6.2f\n", name,
                  sentences, 100.0 * r.precision(), 100.0 * r.recall(), 100.0 * r.f1());
    return std::string(buf);
  };
  auto count = [](const EvalbResult& r) {
    size_t n = 0;
    for (const auto& b : r.by_length) n += b.sentences;
    return n;
  };
  const std::string short_name = "len<=" + std::to_string(report.max_length);
  return row(short_name.c_str(), report.short_sentences, count(report.short_sentences)) +
         row("all", report.full, count(report.full));
}

void write_length_csv(std::ostream& out, const EvalbResult& result) {
  out << "length,count,f1\n";
  char buf[32];
  for (const auto& b : result.by_length) {
    std::snprintf(buf, sizeof buf, "%.4f", 100.0 * b.counts.f1());
    out << b.length << ',' << b.sentences << ',' << buf << '\n';
  }
}

}  // namespace gparse
