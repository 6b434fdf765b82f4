#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "hamenc/error.hpp"
#include "hamenc/eval.hpp"

namespace hamenc {

void write_jsonl(const EvalReport& report, std::ostream& out) {
  for (const auto& r : report.records) {
    nlohmann::ordered_json line;
    line["repeat"] = r.repeat;
    line["fold"] = r.fold;
    line["classifier"] = r.classifier;
    line["accuracy"] = r.accuracy;
    line["n_patterns"] = r.n_patterns;
    line["train_seconds"] = r.train_seconds;
    out << line.dump() << '\n';
  }
  if (!out) throw IoError("failed writing report");
}

namespace {

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;
  double patterns = 0.0;
  double seconds = 0.0;
  std::size_t folds = 0;
};

Summary summarize(const EvalReport& report, const std::string& classifier) {
  Summary s;
  for (const auto& r : report.records) {
    if (!classifier.empty() && r.classifier != classifier) continue;
    s.mean += r.accuracy;
    s.patterns += static_cast<double>(r.n_patterns);
    s.seconds += r.train_seconds;
    ++s.folds;
  }
  if (s.folds == 0) return s;
  const auto n = static_cast<double>(s.folds);
  s.mean /= n;
  s.patterns /= n;
  s.seconds /= n;
  for (const auto& r : report.records) {
    if (!classifier.empty() && r.classifier != classifier) continue;
    s.stddev += (r.accuracy - s.mean) * (r.accuracy - s.mean);
  }
  s.stddev = std::sqrt(s.stddev / n);
  return s;
}

}  // namespace

std::string format_table(const EvalReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(14) << "classifier" << std::right << std::setw(8) << "folds" << std::setw(10)
      << "mean_acc" << std::setw(10) << "std" << std::setw(12) << "patterns" << std::setw(12) << "sec/fold" << '\n';
  out << std::fixed;
  for (const auto& [name, mean] : report.per_classifier_mean()) {
    const auto s = summarize(report, name);
    out << std::left << std::setw(14) << name << std::right << std::setw(8) << s.folds << std::setw(10)
        << std::setprecision(4) << s.mean << std::setw(10) << s.stddev << std::setw(12) << std::setprecision(1)
        << s.patterns << std::setw(12) << std::setprecision(3) << s.seconds << '\n';
  }
  return out.str();
}

std::string format_quantizer_comparison(std::span<const std::pair<QuantizerKind, EvalReport>> reports) {
  std::ostringstream out;
  out << std::left << std::setw(12) << "quantizer" << std::right << std::setw(8) << "folds" << std::setw(10)
      << "mean_acc" << std::setw(10) << "std" << '\n';
  out << std::fixed << std::setprecision(4);
  for (const auto& [kind, report] : reports) {
    const auto s = summarize(report, "");
    out << std::left << std::setw(12) << to_string(kind) << std::right << std::setw(8) << s.folds << std::setw(10)
        << s.mean << std::setw(10) << s.stddev << '\n';
  }
  return out.str();
}

}  // namespace hamenc
