// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#include "vdpost/metrics.hpp"

#include <iomanip>
#include <sstream>

#include "vdpost/error.hpp"

namespace vdpost {

using nlohmann::json;

OutcomeMatrix::OutcomeMatrix(std::vector<std::vector<bool>> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) return;
  const std::size_t g = rows_.front().size();
  if (g == 0) throw ArgumentError("outcome matrix rows must hold at least one response");
  for (const auto& r : rows_)
    if (r.size() != g) throw ArgumentError("outcome matrix is ragged");
}

double pass_at_1(const OutcomeMatrix& p) {
  if (p.empty()) throw ArgumentError("pass@1 of an empty outcome matrix");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < p.samples(); ++i)
    for (bool b : p.row(i)) hits += b;
  return static_cast<double>(hits) / static_cast<double>(p.samples() * p.responses());
}

double pass_at_k(const OutcomeMatrix& p, std::size_t k) {
  if (p.empty()) throw ArgumentError("pass@k of an empty outcome matrix");
  if (k < 1 || k > p.responses())
    throw ArgumentError("pass@k needs 1 <= k <= " + std::to_string(p.responses()) + ", got k = " + std::to_string(k));
  std::size_t solved = 0;
  for (std::size_t i = 0; i < p.samples(); ++i) {
    const auto& row = p.row(i);
    for (std::size_t j = 0; j < k; ++j)
      if (row[j]) {
        ++solved;
        break;
      }
  }
  return static_cast<double>(solved) / static_cast<double>(p.samples());
}

std::string_view to_string(Outcome o) noexcept {
  switch (o) {
    case Outcome::TP: return "TP";
    case Outcome::FP: return "FP";
    case Outcome::TN: return "TN";
    case Outcome::FN: return "FN";
  }
  return "FN";
}

std::optional<Outcome> parse_outcome(std::string_view text) noexcept {
  for (auto o : {Outcome::TP, Outcome::FP, Outcome::TN, Outcome::FN})
    if (text == to_string(o)) return o;
  return std::nullopt;
}

Outcome classify(const Completion& completion, const JudgeVerdict* judgment, const GroundTruth& truth, Role role,
                 Granularity granularity, const CweTaxonomy& tax) {
  const Verdict v = completion.verdict;
  const bool vulnerable = role == Role::Vulnerable;
  auto positive_side = [&](bool correct) { return correct ? Outcome::TP : Outcome::FN; };
  auto negative_side = [&](bool correct) { return correct ? Outcome::TN : Outcome::FP; };

  switch (granularity) {
    case Granularity::Detection:
      return vulnerable ? positive_side(v == Verdict::HasVul) : negative_side(v == Verdict::NoVul);
    case Granularity::Prediction: {
      const std::vector<CweId> gold = parse_cwe_list(truth.cwe_ids);
      const bool match = match_any(completion.predicted_cwes, gold, tax);
      if (vulnerable) return positive_side(v == Verdict::HasVul && match);
      return negative_side(v == Verdict::NoVul || (v == Verdict::HasVul && !match));
    }
    case Granularity::Reasoning: {
      if (judgment == nullptr) throw ArgumentError("reasoning-level classification needs a judge verdict");
      if (!option_allowed(judgment->option, role))
        throw ArgumentError("judge option " + std::string(to_string(judgment->option)) + " is not valid for a " +
                            std::string(to_string(role)) + " sample");
      if (vulnerable) return positive_side(v == Verdict::HasVul && judgment->option == JudgeOption::Correct);
      return negative_side(v != Verdict::Unparseable &&
                           (judgment->option == JudgeOption::Correct || judgment->option == JudgeOption::Unknown));
    }
    case Granularity::Specification: break;
  }
  throw ArgumentError("classification is defined for detection, prediction and reasoning only");
}

void Confusion::add(Outcome o) noexcept {
  switch (o) {
    case Outcome::TP: ++tp; break;
    case Outcome::FP: ++fp; break;
    case Outcome::TN: ++tn; break;
    case Outcome::FN: ++fn; break;
  }
}

Prf prf(const Confusion& c) noexcept {
  auto ratio = [](double num, double den) { return den > 0 ? num / den : 0.0; };
  Prf r;
  r.recall = ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn));
  r.precision = ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp));
  r.f1 = ratio(2 * r.precision * r.recall, r.precision + r.recall);
  return r;
}

PairMetrics pair_metrics(std::span<const PairOutcome> outcomes) {
  if (outcomes.empty()) throw ArgumentError("pair metrics of an empty outcome list");
  std::size_t c = 0, b = 0, v = 0, r = 0;
  for (const auto& o : outcomes) {
    if (o.vuln_correct && o.patch_correct) ++c;
    else if (o.vuln_correct) ++v;
    else if (o.patch_correct) ++b;
    else ++r;
  }
  const double n = static_cast<double>(outcomes.size());
  return {static_cast<double>(c) / n, static_cast<double>(b) / n, static_cast<double>(v) / n,
          static_cast<double>(r) / n};
}

// --- shift matrix ------------------------------------------------------------------

std::size_t ShiftMatrix::index(Outcome d, Outcome p, Outcome r) noexcept {
  return static_cast<std::size_t>(d) * 16 + static_cast<std::size_t>(p) * 4 + static_cast<std::size_t>(r);
}

std::size_t ShiftMatrix::count(Outcome d, Outcome p, Outcome r) const noexcept { return cells_[index(d, p, r)]; }

void ShiftMatrix::add(Outcome d, Outcome p, Outcome r) noexcept { ++cells_[index(d, p, r)]; }

std::size_t ShiftMatrix::total() const noexcept {
  std::size_t t = 0;
  for (auto c : cells_) t += c;
  return t;
}

std::size_t ShiftMatrix::detection_count(Outcome d) const noexcept {
  std::size_t t = 0;
  for (std::size_t i = 0; i < 16; ++i) t += cells_[static_cast<std::size_t>(d) * 16 + i];
  return t;
}

double ShiftMatrix::prediction_ratio(Outcome d, Outcome p) const noexcept {
  const std::size_t denom = detection_count(d);
  if (denom == 0) return 0.0;
  std::size_t num = 0;
  for (std::size_t r = 0; r < 4; ++r) num += cells_[static_cast<std::size_t>(d) * 16 + static_cast<std::size_t>(p) * 4 + r];
  return static_cast<double>(num) / static_cast<double>(denom);
}

json ShiftMatrix::to_json() const {
  constexpr Outcome kAll[] = {Outcome::TP, Outcome::FP, Outcome::TN, Outcome::FN};
  json cells = json::array();
  for (Outcome d : kAll)
    for (Outcome p : kAll)
      for (Outcome r : kAll)
        if (const auto n = count(d, p, r); n > 0)
          cells.push_back({{"detection", to_string(d)}, {"prediction", to_string(p)}, {"reasoning", to_string(r)},
                           {"count", n}});
  return {{"total", total()}, {"cells", std::move(cells)}};
}

ShiftMatrix granularity_shift(std::span<const ShiftRecord> records) {
  ShiftMatrix m;
  for (const auto& r : records) {
    if (!r.detection || !r.prediction || !r.reasoning)
      throw ArgumentError("shift record '" + r.completion_ref + "' lacks an outcome");
    m.add(*r.detection, *r.prediction, *r.reasoning);
  }
  return m;
}

AgreementCounts judge_agreement(std::span<const bool> judge, std::span<const bool> human) {
  if (judge.size() != human.size())
    throw ArgumentError("judge_agreement: " + std::to_string(judge.size()) + " judge labels vs " +
                        std::to_string(human.size()) + " human labels");
  AgreementCounts c;
  for (std::size_t i = 0; i < judge.size(); ++i) (judge[i] == human[i] ? c.correct_judgments : c.incorrect_judgments)++;
  return c;
}

// --- report ----------------------------------------------------------------------------

const GranularityReport& MetricsReport::at(Granularity g) const {
  for (const auto& l : levels)
    if (l.granularity == g) return l;
  throw ArgumentError("report has no " + std::string(to_string(g)) + " level");
}

json to_json(const GranularityReport& r) {
  return {{"granularity", to_string(r.granularity)},
          {"pass_at_1", r.pass_at_1},
          {"pass_at_k", r.pass_at_k},
          {"k", r.k},
          {"recall", r.prf.recall},
          {"precision", r.prf.precision},
          {"f1", r.prf.f1},
          {"p_c", r.pairs.p_c},
          {"p_b", r.pairs.p_b},
          {"p_v", r.pairs.p_v},
          {"p_r", r.pairs.p_r},
          {"confusion", {{"tp", r.confusion.tp}, {"fp", r.confusion.fp}, {"tn", r.confusion.tn}, {"fn", r.confusion.fn}}}};
}

json MetricsReport::to_json() const {
  json lv = json::array();
  for (const auto& l : levels) lv.push_back(vdpost::to_json(l));
  return {{"headline", to_string(headline)}, {"levels", std::move(lv)}, {"shift_matrix", shift.to_json()}};
}

std::string MetricsReport::to_table() const {
  std::ostringstream out;
  out << std::left << std::setw(12) << "level" << std::right;
  for (const char* h : {"pass@1", "pass@k", "recall", "prec", "f1", "P-C", "P-B", "P-V", "P-R"}) out << std::setw(8) << h;
  for (const char* h : {"TP", "FP", "TN", "FN"}) out << std::setw(6) << h;
  out << '\n';
  out << std::fixed << std::setprecision(4);
  for (const auto& l : levels) {
    out << std::left << std::setw(12) << to_string(l.granularity) << std::right;
    for (double v : {l.pass_at_1, l.pass_at_k, l.prf.recall, l.prf.precision, l.prf.f1, l.pairs.p_c, l.pairs.p_b,
                     l.pairs.p_v, l.pairs.p_r})
      out << std::setw(8) << v;
    for (auto n : {l.confusion.tp, l.confusion.fp, l.confusion.tn, l.confusion.fn}) out << std::setw(6) << n;
    out << '\n';
  }
  if (!levels.empty()) out << "k = " << levels.front().k << ", pair metrics at " << to_string(headline) << " level\n";

  constexpr Outcome kAll[] = {Outcome::TP, Outcome::FP, Outcome::TN, Outcome::FN};
  out << "\nshift (detection -> prediction -> reasoning)\n";
  for (Outcome d : kAll)
    for (Outcome p : kAll)
      for (Outcome r : kAll)
        if (const auto n = shift.count(d, p, r); n > 0)
          out << "  " << to_string(d) << " -> " << to_string(p) << " -> " << to_string(r) << std::setw(8) << n << '\n';
  return out.str();
}

}  // namespace vdpost
