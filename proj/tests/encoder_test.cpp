#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "test_support.hpp"

namespace hamenc {
namespace {

LabeledSequenceDataset tiny_dataset() {
  auto config = test::small_planted(0.0, 4);
  config.per_class = 20;
  return generate_planted_motif_dataset(config).dataset;
}

TrainConfig tiny_config() {
  TrainConfig c;
  c.kernels = 16;
  c.epochs = 5;
  c.batch_size = 8;
  c.kmer_length = 5;
  return c;
}

EncoderModel worked_example_model() {
  EncoderModel model;
  model.conv_weights = Tensor3(1, 3, 3);
  const double w[3][3] = {{0.22, 0.43, 0.78}, {0.65, 0.62, 0.21}, {0.97, 0.31, 0.36}};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t r = 0; r < 3; ++r) model.conv_weights(0, i, r) = w[i][r];
  model.dense_weights = Matrix(2, 1);
  model.alphabet = ItemAlphabet({"A", "B", "C"});
  model.class_names = {"x", "y"};
  model.padded_width = 5;
  return model;
}

TEST(TrainConfig, Defaults) {
  TrainConfig c;
  EXPECT_EQ(c.epochs, 100u);
  EXPECT_EQ(c.batch_size, 64u);
  EXPECT_EQ(c.kernels, 1024u);
  EXPECT_EQ(c.learning_rate, 3e-4);
  EXPECT_EQ(c.weight_decay, 1e-5);
  EXPECT_EQ(c.quantizer, QuantizerKind::hamming);
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(InitModel, DeterministicAndBounded) {
  TrainConfig c;
  c.kernels = 32;
  const auto alphabet = default_alphabet(6);
  auto a = init_model(c, 4, alphabet, {"p", "q", "r"}, 10);
  auto b = init_model(c, 4, alphabet, {"p", "q", "r"}, 10);
  EXPECT_EQ(a, b);
  c.seed = 2;
  auto other = init_model(c, 4, alphabet, {"p", "q", "r"}, 10);
  EXPECT_NE(a.conv_weights, other.conv_weights);

  const double conv_bound = 1.0 / std::sqrt(6.0 * 4.0);
  const double dense_bound = 1.0 / std::sqrt(32.0);
  for (double v : a.conv_weights.values()) EXPECT_LE(std::abs(v), conv_bound);
  for (double v : a.dense_weights.values()) EXPECT_LE(std::abs(v), dense_bound);
  EXPECT_EQ(a.kernel_count(), 32u);
  EXPECT_EQ(a.alphabet_size(), 6u);
  EXPECT_EQ(a.kmer_length(), 4u);
  EXPECT_EQ(a.num_classes(), 3u);
}

TEST(Train, ZeroEpochsReturnsInitialModel) {
  const auto ds = tiny_dataset();
  auto c = tiny_config();
  c.epochs = 0;
  auto result = train(ds, c);
  EXPECT_TRUE(result.loss_history.empty());
  EXPECT_EQ(result.best_epoch, 0u);
  EXPECT_EQ(result.model, init_model(c, 5, ds.alphabet, ds.class_names, ds.max_length()));
}

TEST(Train, DeterministicAcrossRunsAndThreads) {
  const auto ds = tiny_dataset();
  auto c = tiny_config();
  auto a = train(ds, c);
  auto b = train(ds, c);
  EXPECT_EQ(a.model, b.model);
  EXPECT_EQ(a.loss_history, b.loss_history);
  c.threads = 3;
  auto t = train(ds, c);
  EXPECT_EQ(a.model, t.model);
  EXPECT_EQ(a.loss_history, t.loss_history);
}

TEST(Train, HistoryCheckpointAndInitialLoss) {
  const auto ds = tiny_dataset();
  auto c = tiny_config();
  c.epochs = 12;
  std::vector<double> seen;
  auto result = train(ds, c, [&](std::size_t epoch, double loss) {
    EXPECT_EQ(epoch, seen.size() + 1);
    seen.push_back(loss);
  });
  ASSERT_EQ(result.loss_history.size(), 12u);
  EXPECT_EQ(seen, result.loss_history);
  const double best = result.loss_history[result.best_epoch - 1];
  for (double l : result.loss_history) EXPECT_LE(best, l);

  const double ln_d = std::log(2.0);
  EXPECT_GE(result.loss_history.front(), 0.3 * ln_d);
  EXPECT_LE(result.loss_history.front(), 3.0 * ln_d);
  EXPECT_EQ(result.model.padded_width, ds.max_length());
}

TEST(Train, ShortSequencesArePaddedToK) {
  std::istringstream in("a\tx\nb\ty\na\tx x\nb\ty\n");
  const auto ds = parse_dataset(in);
  auto c = tiny_config();
  c.kmer_length = 3;
  c.epochs = 2;
  auto result = train(ds, c);
  EXPECT_EQ(result.model.padded_width, 3u);
  EXPECT_EQ(predict(result.model, ds.sequences()).size(), 4u);
}

TEST(ChooseK, MedianRule) {
  auto with_lengths = [](std::vector<std::size_t> lengths) {
    LabeledSequenceDataset ds;
    for (auto n : lengths) ds.records.push_back({Sequence(n, 0), 0});
    return ds;
  };
  EXPECT_EQ(choose_k(with_lengths({100, 100, 100})), 5u);
  EXPECT_EQ(choose_k(with_lengths({10, 10, 10})), 2u);
  EXPECT_EQ(choose_k(with_lengths({10, 30, 40})), 5u);
  EXPECT_EQ(choose_k(with_lengths({29, 30})), 2u);  // median 29.5
  TrainConfig c;
  c.kmer_length = 7;
  EXPECT_EQ(resolve_kmer_length(c, with_lengths({10, 10})), 7u);
  EXPECT_THROW(choose_k(LabeledSequenceDataset{}), ValidationError);
}

TEST(ExtractKmers, WorkedExampleIsCba) {
  const auto model = worked_example_model();
  const auto set = extract_kmers(model);
  ASSERT_EQ(set.size(), 1u);
  EXPECT_EQ(join_tokens(set[0], model.alphabet, ""), "CBA");
  EXPECT_EQ(set.provenance(0), (std::vector<std::size_t>{0}));
}

TEST(ExtractKmers, DuplicateKernelsShareAnEntry) {
  auto model = worked_example_model();
  Tensor3 w(3, 3, 3);
  for (std::size_t c : {0, 2})
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t r = 0; r < 3; ++r) w(c, i, r) = model.conv_weights(0, i, r) * (c + 1.0);
  w(1, 0, 0) = w(1, 0, 1) = w(1, 0, 2) = 1.0;  // AAA
  model.conv_weights = w;
  model.dense_weights = Matrix(2, 3);
  const auto set = extract_kmers(model);
  ASSERT_EQ(set.size(), 2u);
  EXPECT_EQ(join_tokens(set[0], model.alphabet, ""), "CBA");
  EXPECT_EQ(set.provenance(0), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(join_tokens(set[1], model.alphabet, ""), "AAA");
}

TEST(ExtractKmers, DistinctKernelsGiveOneEntryEach) {
  EncoderModel model = worked_example_model();
  model.conv_weights = Tensor3(9, 3, 2);
  for (std::size_t c = 0; c < 9; ++c) {
    model.conv_weights(c, c / 3, 0) = 1;
    model.conv_weights(c, c % 3, 1) = 1;
  }
  model.dense_weights = Matrix(2, 9);
  EXPECT_EQ(extract_kmers(model).size(), 9u);
}

TEST(ExtractKmers, NonHammingIsUnsupported) {
  auto model = worked_example_model();
  for (auto kind : {QuantizerKind::heaviside, QuantizerKind::sign, QuantizerKind::none}) {
    model.quantizer = kind;
    EXPECT_THROW(extract_kmers(model), UnsupportedError);
  }
}

TEST(KmerSet, RejectsWrongLength) {
  KmerSet set(3);
  EXPECT_EQ(set.add({0, 1, 2}, 4), 0u);
  EXPECT_EQ(set.add({0, 1, 2}, 1), 0u);
  EXPECT_EQ(set.provenance(0), (std::vector<std::size_t>{1, 4}));
  EXPECT_THROW(set.add({0, 1}, 2), ShapeError);
}

TEST(ModelIo, RoundTripIsBitExact) {
  auto result = train(tiny_dataset(), tiny_config());
  result.model.conv_weights(0, 0, 0) = 1.0 / 3.0;
  std::stringstream buf;
  save_model(result.model, buf);
  EXPECT_EQ(load_model(buf), result.model);

  const auto dir = test::scratch_dir("model_io");
  save_model(result.model, dir / "m.bin");
  EXPECT_EQ(load_model(dir / "m.bin"), result.model);
}

TEST(ModelIo, CorruptFilesAreRejected) {
  std::stringstream buf;
  save_model(worked_example_model(), buf);
  const std::string bytes = buf.str();
  ASSERT_EQ(bytes.substr(0, 7), "HAMMENC");

  for (std::size_t cut : {std::size_t{3}, std::size_t{20}, bytes.size() - 1}) {
    std::istringstream truncated(bytes.substr(0, cut));
    EXPECT_THROW(load_model(truncated), ValidationError) << "cut at " << cut;
  }
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  std::istringstream in1(bad_magic);
  EXPECT_THROW(load_model(in1), ValidationError);

  std::string bad_version = bytes;
  bad_version[7] = 9;
  std::istringstream in2(bad_version);
  EXPECT_THROW(load_model(in2), ValidationError);

  std::istringstream in3(bytes + "x");
  EXPECT_THROW(load_model(in3), ValidationError);

  auto nan_model = worked_example_model();
  nan_model.dense_weights(0, 0) = std::nan("");
  std::stringstream nan_buf;
  save_model(nan_model, nan_buf);
  EXPECT_THROW(load_model(nan_buf), ValidationError);

  auto twin_classes = worked_example_model();
  twin_classes.class_names.assign(twin_classes.class_names.size(), "same");
  std::stringstream twin_buf;
  save_model(twin_classes, twin_buf);
  EXPECT_THROW(load_model(twin_buf), ValidationError);

  EXPECT_THROW(load_model(std::filesystem::path("/nonexistent/model.bin")), IoError);
}

TEST(Predict, MatchesForwardArgmax) {
  auto result = train(tiny_dataset(), tiny_config());
  const auto ds = tiny_dataset();
  const auto seqs = ds.sequences();
  const auto predicted = predict(result.model, seqs);
  auto batch = one_hot_encode(seqs, result.model.alphabet_size(), result.model.padded_width);
  const auto logits = forward(result.model, batch).logits;
  for (std::size_t n = 0; n < seqs.size(); ++n) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < logits.cols(); ++c)
      if (logits(n, c) > logits(n, best)) best = c;
    EXPECT_EQ(predicted[n], static_cast<int>(best));
  }
  // Longer than padded_width is encoded at its own length.
  Sequence longer(result.model.padded_width + 7, 1);
  EXPECT_EQ(predict(result.model, std::vector<Sequence>{longer}).size(), 1u);
}

}  // namespace
}  // namespace hamenc
