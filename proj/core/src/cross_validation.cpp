#include <algorithm>
#include <chrono>
#include <deque>
#include <limits>
#include <random>

#include "hamenc/error.hpp"
#include "hamenc/eval.hpp"
#include "hamenc/features.hpp"
#include "parallel.hpp"
#include "seeding.hpp"

namespace hamenc {

void CvPlan::validate() const {
  if (folds < 2) throw ValidationError("cross-validation needs at least 2 folds");
  if (repeats == 0) throw ValidationError("cross-validation needs at least one repeat");
}

namespace {

// Max flow on a small dense graph (Edmonds-Karp). Returns the flow matrix.
std::vector<std::vector<std::size_t>> max_flow(std::vector<std::vector<std::size_t>> cap, std::size_t source,
                                               std::size_t sink, std::size_t& total) {
  const std::size_t n = cap.size();
  std::vector<std::vector<std::size_t>> flow(n, std::vector<std::size_t>(n, 0));
  total = 0;
  for (;;) {
    std::vector<std::size_t> parent(n, n);
    parent[source] = source;
    std::deque<std::size_t> queue{source};
    while (!queue.empty() && parent[sink] == n) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t v = 0; v < n; ++v) {
        if (parent[v] == n && cap[u][v] > 0) {
          parent[v] = u;
          queue.push_back(v);
        }
      }
    }
    if (parent[sink] == n) return flow;
    std::size_t push = std::numeric_limits<std::size_t>::max();
    for (std::size_t v = sink; v != source; v = parent[v]) push = std::min(push, cap[parent[v]][v]);
    for (std::size_t v = sink; v != source; v = parent[v]) {
      const std::size_t u = parent[v];
      cap[u][v] -= push;
      cap[v][u] += push;
      if (flow[v][u] >= push) {
        flow[v][u] -= push;
      } else {
        flow[u][v] += push - flow[v][u];
        flow[v][u] = 0;
      }
    }
    total += push;
  }
}

// Per-fold class counts: each count[f][c] is the floor or ceiling of
// n_c * s_f / N, rows sum to the balanced fold sizes s_f and columns to n_c.
// Such a rounding always exists for a two-way table; it is found as a flow
// that hands out the leftover +1s. Counts that would put a whole class in one
// fold are avoided when possible.
std::vector<std::vector<std::size_t>> apportion(const std::vector<std::size_t>& class_sizes, std::size_t folds) {
  const std::size_t d = class_sizes.size();
  std::size_t n = 0;
  for (auto c : class_sizes) n += c;
  std::vector<std::size_t> fold_size(folds);
  for (std::size_t f = 0; f < folds; ++f) fold_size[f] = n / folds + (f < n % folds ? 1 : 0);

  std::vector<std::vector<std::size_t>> count(folds, std::vector<std::size_t>(d));
  std::vector<std::size_t> row_need(folds), col_need(class_sizes);
  for (std::size_t f = 0; f < folds; ++f) {
    row_need[f] = fold_size[f];
    for (std::size_t c = 0; c < d; ++c) {
      count[f][c] = class_sizes[c] * fold_size[f] / n;
      row_need[f] -= count[f][c];
      col_need[c] -= count[f][c];
    }
  }
  std::size_t needed = 0;
  for (auto r : row_need) needed += r;

  // Nodes: source, folds, classes, sink.
  const std::size_t source = 0, sink = 1 + folds + d;
  for (bool allow_whole_class : {false, true}) {
    std::vector<std::vector<std::size_t>> cap(sink + 1, std::vector<std::size_t>(sink + 1, 0));
    for (std::size_t f = 0; f < folds; ++f) cap[source][1 + f] = row_need[f];
    for (std::size_t c = 0; c < d; ++c) cap[1 + folds + c][sink] = col_need[c];
    for (std::size_t f = 0; f < folds; ++f) {
      for (std::size_t c = 0; c < d; ++c) {
        const bool fractional = class_sizes[c] * fold_size[f] % n != 0;
        if (fractional && (allow_whole_class || count[f][c] + 1 < class_sizes[c])) cap[1 + f][1 + folds + c] = 1;
      }
    }
    std::size_t total = 0;
    const auto flow = max_flow(std::move(cap), source, sink, total);
    if (total != needed) continue;
    for (std::size_t f = 0; f < folds; ++f)
      for (std::size_t c = 0; c < d; ++c) count[f][c] += flow[1 + f][1 + folds + c];
    return count;
  }
  throw Error("stratified fold apportionment failed");  // unreachable for integer margins
}

}  // namespace

std::vector<std::size_t> stratified_folds(std::span<const int> labels, const std::vector<std::string>& class_names,
                                          std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw ValidationError("cross-validation needs at least 2 folds");
  const std::size_t d = class_names.size();
  std::vector<std::vector<std::size_t>> members(d);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= d) throw ValidationError("label outside the class list");
    members[static_cast<std::size_t>(y)].push_back(i);
  }
  std::vector<std::size_t> class_sizes(d);
  for (std::size_t c = 0; c < d; ++c) {
    if (members[c].size() < folds) {
      throw ValidationError("class '" + class_names[c] + "' has " + std::to_string(members[c].size()) +
                            " records, fewer than " + std::to_string(folds) + " folds");
    }
    class_sizes[c] = members[c].size();
  }
  const auto count = apportion(class_sizes, folds);
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> fold_of(labels.size(), 0);
  for (std::size_t c = 0; c < d; ++c) {
    auto& idx = members[c];
    std::shuffle(idx.begin(), idx.end(), rng);
    std::size_t next = 0;
    for (std::size_t f = 0; f < folds; ++f) {
      for (std::size_t i = 0; i < count[f][c]; ++i) fold_of[idx[next++]] = f;
    }
  }
  return fold_of;
}

FoldData prepare_fold(const LabeledSequenceDataset& dataset, std::span<const std::size_t> train_indices,
                      std::span<const std::size_t> test_indices) {
  FoldData fold;
  fold.train.class_names = dataset.class_names;
  for (std::size_t i : train_indices) {
    const auto& rec = dataset.records.at(i);
    Record out{{}, rec.label};
    out.items.reserve(rec.items.size());
    for (Item item : rec.items) {
      out.items.push_back(item < 0 ? item : fold.train.alphabet.add(dataset.alphabet.symbol(item)));
    }
    fold.train.records.push_back(std::move(out));
  }
  for (std::size_t i : test_indices) {
    const auto& rec = dataset.records.at(i);
    fold.test.push_back(reindex(rec.items, dataset.alphabet, fold.train.alphabet));
    fold.test_labels.push_back(rec.label);
  }
  return fold;
}

double EvalReport::mean_accuracy() const {
  if (records.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : records) sum += r.accuracy;
  return sum / static_cast<double>(records.size());
}

std::map<std::string, double> EvalReport::per_classifier_mean() const {
  std::map<std::string, std::pair<double, std::size_t>> acc;
  for (const auto& r : records) {
    auto& [sum, count] = acc[r.classifier];
    sum += r.accuracy;
    ++count;
  }
  std::map<std::string, double> out;
  for (const auto& [name, sc] : acc) out[name] = sc.first / static_cast<double>(sc.second);
  return out;
}

double EvalReport::total_train_seconds() const {
  double sum = 0.0;
  for (const auto& r : records) sum += r.train_seconds;
  return sum;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Runs `body(repeat, fold, context)` for every (repeat, fold) pair and
// concatenates the records in (repeat, fold) order.
template <typename Body>
EvalReport run_folds(const LabeledSequenceDataset& dataset, const CvPlan& plan, const EvalOptions& options,
                     Body body) {
  dataset.validate();
  plan.validate();
  const auto labels = dataset.labels();

  std::vector<std::vector<std::size_t>> assignments;
  for (std::size_t r = 0; r < plan.repeats; ++r) {
    assignments.push_back(
        stratified_folds(labels, dataset.class_names, plan.folds, detail::derive_seed(plan.seed, detail::kFoldStream, r)));
  }

  const std::size_t tasks = plan.repeats * plan.folds;
  std::vector<std::vector<FoldRecord>> results(tasks);
  detail::parallel_for(tasks, options.threads, [&](std::size_t task) {
    const std::size_t repeat = task / plan.folds;
    const std::size_t fold = task % plan.folds;
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      (assignments[repeat][i] == fold ? test_idx : train_idx).push_back(i);
    }
    FoldData data = prepare_fold(dataset, train_idx, test_idx);
    if (options.on_fold) options.on_fold(FoldContext{repeat, fold, train_idx, test_idx, data});
    results[task] = body(repeat, fold, data);
    for (auto& rec : results[task]) {
      rec.repeat = repeat;
      rec.fold = fold;
      if (!options.record_timings) rec.train_seconds = 0.0;
    }
  });

  EvalReport report;
  for (auto& chunk : results) {
    for (auto& rec : chunk) report.records.push_back(std::move(rec));
  }
  return report;
}

TrainConfig fold_config(TrainConfig config, const CvPlan& plan, std::size_t repeat, std::size_t fold) {
  config.seed = detail::derive_seed(config.seed, detail::kTrainStream, repeat * plan.folds + fold);
  config.threads = 1;
  return config;
}

}  // namespace

EvalReport cross_validate(const LabeledSequenceDataset& dataset, const PipelineOptions& pipeline, const CvPlan& plan,
                          const EvalOptions& options) {
  if (pipeline.classifiers.empty()) throw ValidationError("pipeline needs at least one classifier");
  if (pipeline.train.quantizer != QuantizerKind::hamming) {
    throw UnsupportedError("the k-mer pipeline needs the hamming quantizer");
  }
  return run_folds(dataset, plan, options, [&](std::size_t repeat, std::size_t fold, const FoldData& data) {
    const auto start = Clock::now();
    const auto config = fold_config(pipeline.train, plan, repeat, fold);
    auto trained = train(data.train, config);
    const KmerSet kmers = extract_kmers(trained.model);
    const auto width = trained.model.padded_width;
    const Matrix train_x = featurize(data.train.sequences(), kmers, width).to_matrix();
    const Matrix test_x = featurize(data.test, kmers, width).to_matrix();
    const double encoder_seconds = seconds_since(start);
    const auto train_y = data.train.labels();

    std::vector<FoldRecord> out;
    for (auto kind : pipeline.classifiers) {
      const auto fit_start = Clock::now();
      std::vector<int> predicted;
      switch (kind) {
        case ClassifierKind::knn: predicted = classify_knn(train_x, train_y, test_x, pipeline.knn_neighbors); break;
        case ClassifierKind::gnb: predicted = classify_gnb(train_x, train_y, test_x); break;
        case ClassifierKind::svm: {
          SvmOptions svm = pipeline.svm;
          svm.seed = detail::derive_seed(svm.seed, detail::kSvmStream, repeat * plan.folds + fold);
          predicted = classify_linear_svm(train_x, train_y, test_x, svm);
          break;
        }
      }
      FoldRecord rec;
      rec.classifier = std::string(to_string(kind));
      rec.accuracy = accuracy(predicted, data.test_labels);
      rec.n_patterns = kmers.size();
      rec.train_seconds = encoder_seconds + seconds_since(fit_start);
      out.push_back(std::move(rec));
    }
    return out;
  });
}

EvalReport end_to_end_eval(const LabeledSequenceDataset& dataset, const TrainConfig& config, QuantizerKind quantizer,
                           const CvPlan& plan, const EvalOptions& options) {
  TrainConfig base = config;
  base.quantizer = quantizer;
  return run_folds(dataset, plan, options, [&](std::size_t repeat, std::size_t fold, const FoldData& data) {
    const auto start = Clock::now();
    auto trained = train(data.train, fold_config(base, plan, repeat, fold));
    const double seconds = seconds_since(start);
    const auto predicted = predict(trained.model, data.test);
    FoldRecord rec;
    rec.classifier = "e2e-" + std::string(to_string(quantizer));
    rec.accuracy = accuracy(predicted, data.test_labels);
    rec.n_patterns = trained.model.kernel_count();
    rec.train_seconds = seconds;
    return std::vector<FoldRecord>{std::move(rec)};
  });
}

}  // namespace hamenc
