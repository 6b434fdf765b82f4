#include <gtest/gtest.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>

#include "test_support.hpp"

namespace hamenc {
namespace {

Matrix points(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.begin()->size());
  std::size_t r = 0;
  for (const auto& row : rows) {
    std::size_t c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

TEST(Knn, ExactMatchWithOneNeighbour) {
  const auto train = points({{0, 0}, {3, 1}, {7, 7}});
  const std::vector<int> labels{2, 0, 1};
  EXPECT_EQ(classify_knn(train, labels, points({{3, 1}}), 1), (std::vector<int>{0}));
}

TEST(Knn, SingleClassTrainingSet) {
  const auto train = points({{0}, {1}, {2}});
  const std::vector<int> labels{1, 1, 1};
  EXPECT_EQ(classify_knn(train, labels, points({{-5}, {100}}), 5), (std::vector<int>{1, 1}));
}

TEST(Knn, AgreesWithDistanceTable) {
  const auto train = points({{0, 0}, {1, 0}, {0, 3}, {4, 4}, {5, 5}});
  const std::vector<int> labels{0, 0, 1, 1, 1};
  // Squared distances from (1,1): 2, 1, 5, 18, 32 -> nearest three are A, A, B.
  // From (0,2): 4, 5, 1, 20, 34 -> nearest two are B, A (tie, nearest wins).
  // From (4,3): 25, 18, 16, 1, 5 -> five neighbours vote B three to two.
  EXPECT_EQ(classify_knn(train, labels, points({{1, 1}}), 3), (std::vector<int>{0}));
  EXPECT_EQ(classify_knn(train, labels, points({{0, 2}}), 2), (std::vector<int>{1}));
  EXPECT_EQ(classify_knn(train, labels, points({{4, 3}}), 5), (std::vector<int>{1}));
  EXPECT_EQ(classify_knn(train, labels, points({{4, 3}}), 50), (std::vector<int>{1}));  // clamped
}

TEST(Knn, EquidistantTieGoesToLowerClass) {
  const auto train = points({{1}, {-1}});
  const std::vector<int> labels{1, 0};
  EXPECT_EQ(classify_knn(train, labels, points({{0}}), 2), (std::vector<int>{0}));
}

TEST(GaussianNb, MidpointBoundary) {
  const auto train = points({{-2}, {0}, {4}, {6}});
  const std::vector<int> labels{0, 0, 1, 1};
  EXPECT_EQ(classify_gnb(train, labels, points({{1.9}, {2.1}})), (std::vector<int>{0, 1}));
}

TEST(GaussianNb, ConstantFeatureFallsBackToPriors) {
  Matrix train(10, 2, 3.0);
  const std::vector<int> labels{1, 1, 1, 0, 1, 1, 0, 1, 1, 0};
  EXPECT_EQ(classify_gnb(train, labels, Matrix(4, 2, 3.0)), (std::vector<int>(4, 1)));
}

TEST(GaussianNb, MatchesClosedFormPosterior) {
  const auto train = points({{0}, {2}, {4}, {6}, {8}});
  const std::vector<int> labels{0, 0, 1, 1, 1};
  GaussianNaiveBayes gnb;
  gnb.fit(train, labels);
  // Class 0: mean 1, variance 1, prior 2/5. Class 1: mean 6, variance 8/3, prior 3/5.
  auto log_normal = [](double x, double mu, double var) {
    return -0.5 * std::log(2 * std::numbers::pi * var) - (x - mu) * (x - mu) / (2 * var);
  };
  const double x = 3.0;
  const double j0 = std::log(0.4) + log_normal(x, 1.0, 1.0);
  const double j1 = std::log(0.6) + log_normal(x, 6.0, 8.0 / 3.0);
  const auto joint = gnb.log_joint(std::vector<double>{x});
  EXPECT_NEAR(joint[0], j0, 1e-12);
  EXPECT_NEAR(joint[1], j1, 1e-12);
  const double p1 = 1.0 / (1.0 + std::exp(j0 - j1));
  EXPECT_NEAR(p1, 1.0 / (1.0 + std::exp(joint[0] - joint[1])), 1e-12);
  EXPECT_EQ(gnb.predict_one(std::vector<double>{x}), p1 > 0.5 ? 1 : 0);
  EXPECT_NEAR(gnb.variances()(1, 0), 8.0 / 3.0, 1e-12);
}

TEST(LinearSvm, SeparableSetIsLearned) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> noise(0.0, 0.3);
  Matrix train(60, 2);
  std::vector<int> labels(60);
  for (std::size_t i = 0; i < 60; ++i) {
    const int y = static_cast<int>(i % 3);
    labels[i] = y;
    train(i, 0) = 4.0 * (y == 1) + noise(rng);
    train(i, 1) = 4.0 * (y == 2) + noise(rng);
  }
  EXPECT_EQ(accuracy(classify_linear_svm(train, labels, train), labels), 1.0);
}

TEST(LinearSvm, OnePointPerClass) {
  const auto train = points({{0, 5}, {5, 0}, {5, 5}});
  const std::vector<int> labels{0, 1, 2};
  EXPECT_EQ(classify_linear_svm(train, labels, train), labels);
}

TEST(LinearSvm, ObjectiveDecreasesAndIsDeterministic) {
  std::mt19937_64 rng(4);
  auto train = test::random_matrix(rng, 80, 6);
  std::vector<int> labels(80);
  for (std::size_t i = 0; i < 80; ++i) labels[i] = train(i, 0) + 0.5 * train(i, 1) > 0 ? 1 : 0;
  LinearSvm svm({50, 0.1, 1e-3, 9});
  const auto history = svm.fit(train, labels);
  ASSERT_EQ(history.size(), 51u);
  EXPECT_LT(history.back(), 0.5 * history.front());
  EXPECT_LT(history.back(), history[history.size() / 2] + 1e-9);
  LinearSvm again({50, 0.1, 1e-3, 9});
  EXPECT_EQ(again.fit(train, labels), history);
}

TEST(Accuracy, Basics) {
  EXPECT_EQ(accuracy(std::vector<int>{1, 0, 1, 1}, std::vector<int>{1, 1, 1, 0}), 0.5);
  EXPECT_THROW(accuracy(std::vector<int>{1}, std::vector<int>{1, 0}), ShapeError);
}

TEST(Classifier, ParseNames) {
  EXPECT_EQ(parse_classifier("knn"), ClassifierKind::knn);
  EXPECT_EQ(parse_classifier("nb"), ClassifierKind::gnb);
  EXPECT_EQ(parse_classifier("svm"), ClassifierKind::svm);
  EXPECT_THROW(parse_classifier("tree"), ValidationError);
}

TEST(StratifiedFolds, SharesAreBalanced) {
  std::vector<int> labels;
  for (int i = 0; i < 37; ++i) labels.push_back(0);
  for (int i = 0; i < 23; ++i) labels.push_back(1);
  for (int i = 0; i < 11; ++i) labels.push_back(2);
  const std::vector<std::string> names{"a", "b", "c"};
  const auto fold_of = stratified_folds(labels, names, 5, 3);
  for (std::size_t f = 0; f < 5; ++f) {
    std::vector<double> count(3, 0.0);
    double size = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (fold_of[i] != f) continue;
      ++count[static_cast<std::size_t>(labels[i])];
      ++size;
    }
    ASSERT_GT(size, 0);
    for (std::size_t c = 0; c < 3; ++c) {
      const double global = c == 0 ? 37.0 / 71 : c == 1 ? 23.0 / 71 : 11.0 / 71;
      EXPECT_LT(std::abs(count[c] / size - global), 1.0 / size) << "fold " << f << " class " << c;
      EXPECT_GE(count[c], 2.0);
    }
  }
  EXPECT_EQ(stratified_folds(labels, names, 5, 3), fold_of);
}

TEST(StratifiedFolds, SmallClassIsNamed) {
  std::istringstream in("big\ta\nbig\ta\nbig\tb\nbig\ta\nbig\tb\nbig\tb\ntiny\tc\ntiny\tc\ntiny\ta\n");
  const auto ds = parse_dataset(in);
  try {
    stratified_folds(ds.labels(), ds.class_names, 5, 1);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("'tiny'"), std::string::npos) << e.what();
  }
}

PipelineOptions quick_pipeline() {
  PipelineOptions p;
  p.train.kernels = 16;
  p.train.epochs = 8;
  p.train.kmer_length = 5;
  return p;
}

LabeledSequenceDataset small_set(double noise = 0.0) {
  auto config = test::small_planted(noise, 6);
  config.per_class = 30;
  return generate_planted_motif_dataset(config).dataset;
}

TEST(CrossValidate, NoTestLeakage) {
  auto ds = small_set();
  // Give one record a token and a length that no other record has.
  ds.alphabet.add("rare");
  ds.records[7].items.assign(75, static_cast<Item>(ds.alphabet.size() - 1));

  std::mutex mu;
  std::size_t folds_seen = 0;
  EvalOptions options;
  options.threads = 2;
  options.on_fold = [&](const FoldContext& ctx) {
    std::set<std::size_t> train(ctx.train_indices.begin(), ctx.train_indices.end());
    for (std::size_t i : ctx.test_indices) EXPECT_EQ(train.count(i), 0u);
    EXPECT_EQ(train.size() + ctx.test_indices.size(), ds.size());

    std::set<std::string> train_tokens;
    std::size_t train_max = 0;
    for (std::size_t i : ctx.train_indices) {
      for (Item item : ds.records[i].items) train_tokens.insert(ds.alphabet.symbol(item));
      train_max = std::max(train_max, ds.records[i].items.size());
    }
    const auto& symbols = ctx.data.train.alphabet.symbols();
    EXPECT_EQ(std::set<std::string>(symbols.begin(), symbols.end()), train_tokens);
    EXPECT_EQ(ctx.data.train.max_length(), train_max);
    EXPECT_EQ(ctx.data.train.size(), ctx.train_indices.size());
    const bool rare_in_test = std::ranges::find(ctx.test_indices, std::size_t{7}) != ctx.test_indices.end();
    if (rare_in_test) {
      EXPECT_FALSE(ctx.data.train.alphabet.find("rare").has_value());
      const auto pos = static_cast<std::size_t>(std::ranges::find(ctx.test_indices, std::size_t{7}) -
                                                ctx.test_indices.begin());
      for (Item item : ctx.data.test[pos]) EXPECT_EQ(item, kUnknownItem);
    }
    std::lock_guard lock(mu);
    ++folds_seen;
  };
  const auto report = cross_validate(ds, quick_pipeline(), {3, 2, 5}, options);
  EXPECT_EQ(folds_seen, 6u);
  EXPECT_EQ(report.records.size(), 18u);
}

TEST(CrossValidate, ReportIsConsistentAndDeterministic) {
  const auto ds = small_set(0.1);
  EvalOptions options;
  options.record_timings = false;
  const auto a = cross_validate(ds, quick_pipeline(), {3, 2, 5}, options);
  options.threads = 3;
  const auto b = cross_validate(ds, quick_pipeline(), {3, 2, 5}, options);
  std::ostringstream ja, jb;
  write_jsonl(a, ja);
  write_jsonl(b, jb);
  EXPECT_EQ(ja.str(), jb.str());

  double sum = 0.0;
  for (const auto& r : a.records) {
    EXPECT_GE(r.accuracy, 0.0);
    EXPECT_LE(r.accuracy, 1.0);
    EXPECT_EQ(r.train_seconds, 0.0);
    EXPECT_GE(r.n_patterns, 1u);
    EXPECT_LE(r.n_patterns, 16u);
    sum += r.accuracy;
  }
  EXPECT_NEAR(a.mean_accuracy(), sum / static_cast<double>(a.records.size()), 1e-12);
  EXPECT_EQ(a.per_classifier_mean().size(), 3u);

  const std::string first = ja.str().substr(0, ja.str().find('\n'));
  EXPECT_EQ(first.rfind("{\"repeat\":0,\"fold\":0,\"classifier\":\"knn\",\"accuracy\":", 0), 0u) << first;
  EXPECT_NE(first.find("\"n_patterns\":"), std::string::npos);
  EXPECT_NE(first.find("\"train_seconds\":0.0}"), std::string::npos) << first;

  const auto table = format_table(a);
  EXPECT_NE(table.find("knn"), std::string::npos);
  EXPECT_NE(table.find("svm"), std::string::npos);
}

TEST(CrossValidate, RejectsNonHammingAndSmallClasses) {
  auto p = quick_pipeline();
  p.train.quantizer = QuantizerKind::sign;
  EXPECT_THROW(cross_validate(small_set(), p, {}), UnsupportedError);
  std::istringstream in("a\tx y\na\ty\na\tx\na\ty y\na\tx y x\nrare\tz\nrare\tz x\n");
  EXPECT_THROW(cross_validate(parse_dataset(in), quick_pipeline(), {}), ValidationError);
}

TEST(EndToEnd, UntrainedIsNearChance) {
  const auto ds = small_set();
  TrainConfig c = quick_pipeline().train;
  c.epochs = 0;
  const auto report = end_to_end_eval(ds, c, QuantizerKind::hamming, {5, 5, 1});
  ASSERT_EQ(report.records.size(), 25u);
  EXPECT_EQ(report.records[0].classifier, "e2e-hamming");
  EXPECT_EQ(report.records[0].n_patterns, 16u);
  const double n = 25.0 * 12.0;  // 25 folds x 12 test records
  EXPECT_LE(std::abs(report.mean_accuracy() - 0.5), 3.0 * std::sqrt(0.25 / n));
}

TEST(EndToEnd, AllQuantizersProduceReports) {
  const auto ds = small_set();
  TrainConfig c = quick_pipeline().train;
  std::vector<std::pair<QuantizerKind, EvalReport>> reports;
  for (auto kind : {QuantizerKind::hamming, QuantizerKind::none, QuantizerKind::heaviside, QuantizerKind::sign}) {
    reports.emplace_back(kind, end_to_end_eval(ds, c, kind, {3, 1, 2}));
    EXPECT_EQ(reports.back().second.records.size(), 3u);
  }
  const auto text = format_quantizer_comparison(reports);
  for (const char* name : {"hamming", "none", "heaviside", "sign"}) EXPECT_NE(text.find(name), std::string::npos);
}

}  // namespace
}  // namespace hamenc
