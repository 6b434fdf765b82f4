#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "hamenc/hamenc.hpp"

namespace hamenc::cli {
namespace {

// Invalid flag combination detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const CLI::Range kAtLeastOne(1.0, 1e18, "POSITIVE");

struct TrainFlags {
  TrainConfig config;
  std::string quantizer = "hamming";
};

void add_train_flags(CLI::App* cmd, TrainFlags& f, bool with_quantizer) {
  auto& c = f.config;
  cmd->add_option("--epochs", c.epochs, "Training epochs");
  cmd->add_option("--batch-size", c.batch_size, "Mini-batch size")->check(kAtLeastOne);
  cmd->add_option("--kernels", c.kernels, "Number of convolution kernels (initial k-mers)")->check(kAtLeastOne);
  cmd->add_option("--k", c.kmer_length, "k-mer length; 0 picks 5 or 2 from the median sequence length");
  cmd->add_option("--lr", c.learning_rate, "Adam learning rate")->check(CLI::PositiveNumber);
  cmd->add_option("--weight-decay", c.weight_decay, "L2 weight decay")->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--threads", c.threads, "Worker threads; 1 is the bit-exact reference")->check(kAtLeastOne);
  if (with_quantizer) {
    cmd->add_option("--quantizer", f.quantizer, "Kernel binarization")
        ->check(CLI::IsMember({"hamming", "heaviside", "sign", "none"}));
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

// --- synth -------------------------------------------------------------------

struct SynthFlags {
  std::size_t classes = 2;
  std::vector<std::string> motifs;
  std::size_t motif_length = 5;
  std::size_t alphabet = 10;
  std::size_t per_class = 100;
  std::size_t lmin = 30;
  std::size_t lmax = 60;
  double noise = 0.0;
  std::uint64_t seed = 1;
  std::string out;
};

int run_synth(const SynthFlags& f, std::ostream& err) {
  if (f.lmin == 0 || f.lmin > f.lmax) throw UsageError("--lmin must be in [1, --lmax]");
  if (!(f.noise >= 0.0 && f.noise < 1.0)) throw UsageError("--noise must lie in [0, 1)");
  const ItemAlphabet alphabet = default_alphabet(f.alphabet);
  PlantedMotifConfig config;
  config.alphabet_size = f.alphabet;
  config.per_class = f.per_class;
  config.min_length = f.lmin;
  config.max_length = f.lmax;
  config.noise = f.noise;
  config.seed = f.seed;
  if (f.motifs.empty()) {
    if (f.motif_length > f.lmin) throw UsageError("--motif-length is longer than --lmin");
    config.motifs = random_motifs(f.classes, f.motif_length, f.alphabet, f.seed);
  } else {
    if (f.motifs.size() != f.classes) {
      throw UsageError(std::to_string(f.motifs.size()) + " motifs given for " + std::to_string(f.classes) +
                       " classes");
    }
    std::set<std::string> distinct(f.motifs.begin(), f.motifs.end());
    if (distinct.size() != f.motifs.size()) throw UsageError("--motifs must be distinct");
    for (const auto& text : f.motifs) {
      if (text.empty()) throw UsageError("empty motif");
      if (text.size() > f.lmin) throw UsageError("motif '" + text + "' is longer than --lmin");
      Sequence motif;
      for (char ch : text) {
        auto item = alphabet.find(std::string(1, ch));
        if (!item) throw UsageError("motif symbol '" + std::string(1, ch) + "' is outside the first " +
                                    std::to_string(f.alphabet) + " symbols");
        motif.push_back(*item);
      }
      config.motifs.push_back(std::move(motif));
    }
  }
  auto result = generate_planted_motif_dataset(config);
  for (std::size_t c = 0; c < config.motifs.size(); ++c) {
    err << "motif " << result.dataset.class_names[c] << ' ' << join_tokens(config.motifs[c], alphabet, "") << '\n';
  }
  write_dataset(result.dataset, std::filesystem::path(f.out));
  return kOk;
}

// --- train / extract / featurize / classify -----------------------------------

TrainConfig finish(TrainFlags f) {
  f.config.quantizer = parse_quantizer(f.quantizer);
  f.config.validate();
  return f.config;
}

struct TrainCmd {
  TrainFlags train;
  std::string data;
  std::string model;
  std::string loss_csv;
  bool verbose = false;
};

int run_train(const TrainCmd& f, std::ostream& out, std::ostream& err) {
  const auto config = finish(f.train);
  const auto dataset = parse_dataset(std::filesystem::path(f.data));
  EpochCallback on_epoch;
  if (f.verbose) {
    on_epoch = [&err](std::size_t epoch, double loss) { err << "epoch " << epoch << " loss " << loss << '\n'; };
  }
  auto result = train(dataset, config, on_epoch);
  save_model(result.model, std::filesystem::path(f.model));

  const std::string loss_path = f.loss_csv.empty() ? f.model + ".loss.csv" : f.loss_csv;
  auto loss_out = open_output(loss_path);
  loss_out << "epoch,mean_loss\n" << std::setprecision(17);
  for (std::size_t e = 0; e < result.loss_history.size(); ++e) loss_out << e + 1 << ',' << result.loss_history[e] << '\n';
  if (!loss_out) throw IoError("failed writing '" + loss_path + "'");

  out << "trained k=" << result.model.kmer_length() << " K=" << result.model.kernel_count()
      << " quantizer=" << to_string(result.model.quantizer) << " best_epoch=" << result.best_epoch;
  if (!result.loss_history.empty()) out << " best_loss=" << result.loss_history[result.best_epoch - 1];
  out << '\n';
  return kOk;
}

struct ExtractCmd {
  std::string model;
  std::string out = "-";
};

int run_extract(const ExtractCmd& f, std::ostream& out) {
  const auto model = load_model(std::filesystem::path(f.model));
  const auto kmers = extract_kmers(model);
  std::ofstream file;
  std::ostream* sink = &out;
  if (f.out != "-") {
    file = open_output(f.out);
    sink = &file;
  }
  for (std::size_t i = 0; i < kmers.size(); ++i) {
    *sink << join_tokens(kmers[i], model.alphabet, " ") << '\t' << kmers.provenance(i).size() << '\n';
  }
  if (!*sink) throw IoError("failed writing k-mer list");
  return kOk;
}

struct FeaturizeCmd {
  std::string model;
  std::string data;
  std::string out;
  unsigned threads = 1;
};

int run_featurize(const FeaturizeCmd& f) {
  const auto model = load_model(std::filesystem::path(f.model));
  const auto kmers = extract_kmers(model);
  const auto dataset = conform(parse_dataset(std::filesystem::path(f.data)), model.alphabet, model.class_names);
  const auto features = featurize(dataset.sequences(), kmers, model.padded_width, f.threads);
  export_features(features, dataset.labels(), model.class_names, kmers, model.alphabet, std::filesystem::path(f.out));
  return kOk;
}

struct ClassifyCmd {
  std::string model;
  std::string train;
  std::string test;
  std::string classifier = "knn";
  std::size_t neighbors = 5;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

int run_classify(const ClassifyCmd& f, std::ostream& out) {
  const auto model = load_model(std::filesystem::path(f.model));
  const auto kmers = extract_kmers(model);
  const auto train_set = conform(parse_dataset(std::filesystem::path(f.train)), model.alphabet, model.class_names);
  const auto test_set = conform(parse_dataset(std::filesystem::path(f.test)), model.alphabet, model.class_names);
  const Matrix train_x = featurize(train_set.sequences(), kmers, model.padded_width, f.threads).to_matrix();
  const Matrix test_x = featurize(test_set.sequences(), kmers, model.padded_width, f.threads).to_matrix();
  const auto train_y = train_set.labels();
  const auto test_y = test_set.labels();
  std::vector<int> predicted;
  switch (parse_classifier(f.classifier)) {
    case ClassifierKind::knn: predicted = classify_knn(train_x, train_y, test_x, f.neighbors); break;
    case ClassifierKind::gnb: predicted = classify_gnb(train_x, train_y, test_x); break;
    case ClassifierKind::svm: {
      SvmOptions svm;
      svm.seed = f.seed;
      predicted = classify_linear_svm(train_x, train_y, test_x, svm);
      break;
    }
  }
  out << "classifier " << f.classifier << " patterns " << kmers.size() << " test " << test_y.size() << " accuracy "
      << std::fixed << std::setprecision(4) << accuracy(predicted, test_y) << '\n';
  return kOk;
}

// --- eval / end2end ----------------------------------------------------------

struct CvFlags {
  std::size_t folds = 5;
  std::size_t repeats = 5;
  std::string report;
  bool no_timings = false;
};

void add_cv_flags(CLI::App* cmd, CvFlags& f) {
  cmd->add_option("--folds", f.folds, "Cross-validation folds")->check(CLI::Range(std::size_t{2}, std::size_t{1000}));
  cmd->add_option("--repeats", f.repeats, "Cross-validation repeats")->check(kAtLeastOne);
  cmd->add_option("--report", f.report, "JSON-lines report output path")->required();
  cmd->add_flag("--no-timings", f.no_timings, "Write train_seconds as 0 so reports are byte-reproducible");
}

struct EvalCmd {
  TrainFlags train;
  CvFlags cv;
  std::string data;
  std::vector<std::string> classifiers{"knn", "gnb", "svm"};
  std::size_t neighbors = 5;
};

int run_eval(const EvalCmd& f, std::ostream& out) {
  PipelineOptions pipeline;
  pipeline.train = finish(f.train);
  pipeline.classifiers.clear();
  for (const auto& name : f.classifiers) pipeline.classifiers.push_back(parse_classifier(name));
  pipeline.knn_neighbors = f.neighbors;
  pipeline.svm.seed = pipeline.train.seed;
  const CvPlan plan{f.cv.folds, f.cv.repeats, pipeline.train.seed};
  EvalOptions options;
  options.threads = pipeline.train.threads;
  options.record_timings = !f.cv.no_timings;

  const auto dataset = parse_dataset(std::filesystem::path(f.data));
  const auto report = cross_validate(dataset, pipeline, plan, options);
  auto report_out = open_output(f.cv.report);
  write_jsonl(report, report_out);
  out << format_table(report);
  out << "mean accuracy " << std::fixed << std::setprecision(4) << report.mean_accuracy() << '\n';
  return kOk;
}

struct EndToEndCmd {
  TrainFlags train;
  CvFlags cv;
  std::string data;
  std::vector<std::string> quantizers{"hamming", "none", "heaviside", "sign"};
};

int run_end2end(const EndToEndCmd& f, std::ostream& out) {
  const auto config = finish(f.train);
  const CvPlan plan{f.cv.folds, f.cv.repeats, config.seed};
  EvalOptions options;
  options.threads = config.threads;
  options.record_timings = !f.cv.no_timings;

  const auto dataset = parse_dataset(std::filesystem::path(f.data));
  std::vector<std::pair<QuantizerKind, EvalReport>> reports;
  EvalReport combined;
  for (const auto& name : f.quantizers) {
    const auto kind = parse_quantizer(name);
    auto report = end_to_end_eval(dataset, config, kind, plan, options);
    combined.records.insert(combined.records.end(), report.records.begin(), report.records.end());
    reports.emplace_back(kind, std::move(report));
  }
  auto report_out = open_output(f.cv.report);
  write_jsonl(combined, report_out);
  out << format_quantizer_comparison(reports);
  return kOk;
}

// --- verify ------------------------------------------------------------------

struct VerifyCmd {
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::size_t alphabet = 26;
  std::size_t max_length = 50;
  std::size_t max_k = 8;
  bool inject_fault = false;
};

int run_verify(const VerifyCmd& f, std::ostream& out, std::ostream& err) {
  EquivalenceCheckOptions options;
  options.trials = f.trials;
  options.seed = f.seed;
  options.alphabet_size = f.alphabet;
  options.max_length = f.max_length;
  options.max_k = f.max_k;
  if (f.inject_fault) {
    // Exercises the failure path: corrupt every network value.
    options.perturb_network = [](int v) { return v + 1; };
  }
  const auto report = verify_equivalence(options);
  out << "trials " << report.trials << " mismatches " << report.mismatches << '\n';
  if (report.mismatches == 0) return kOk;
  const auto& cx = *report.first_mismatch;
  const auto alphabet = default_alphabet(cx.alphabet_size);
  err << "counterexample trial " << cx.trial << ": sequence " << join_tokens(cx.sequence, alphabet, "") << " k-mer "
      << join_tokens(cx.kmer, alphabet, "") << " conv+maxpool " << cx.network_value << " kh_similarity "
      << cx.hamming_value << '\n';
  return kFailure;
}

void show_defaults(CLI::App* cmd) { cmd->option_defaults()->always_capture_default(); }

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hamming Encoder: binarized-CNN k-mer mining, KH-similarity features, evaluation"};
  app.require_subcommand(1);
  show_defaults(&app);

  SynthFlags synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a planted-motif dataset as TSV");
  show_defaults(synth_cmd);
  synth_cmd->add_option("--classes", synth.classes, "Number of classes")->check(CLI::Range(2, 1000));
  synth_cmd->add_option("--motifs", synth.motifs, "Comma-separated motif per class, one character per symbol")
      ->delimiter(',');
  synth_cmd->add_option("--motif-length", synth.motif_length, "Length of auto-generated motifs")
      ->check(kAtLeastOne);
  synth_cmd->add_option("--alphabet", synth.alphabet, "Background alphabet size")->check(kAtLeastOne);
  synth_cmd->add_option("--per-class", synth.per_class, "Sequences per class")->check(kAtLeastOne);
  synth_cmd->add_option("--lmin", synth.lmin, "Minimum sequence length");
  synth_cmd->add_option("--lmax", synth.lmax, "Maximum sequence length");
  synth_cmd->add_option("--noise", synth.noise, "Per-position motif corruption probability");
  synth_cmd->add_option("--seed", synth.seed, "Random seed");
  synth_cmd->add_option("--out", synth.out, "Output TSV path")->required();

  TrainCmd train_flags;
  auto* train_cmd = app.add_subcommand("train", "Train an encoder; writes the model and a loss-history CSV");
  show_defaults(train_cmd);
  train_cmd->add_option("--data", train_flags.data, "Training TSV")->required();
  train_cmd->add_option("--model", train_flags.model, "Model output path")->required();
  train_cmd->add_option("--loss-csv", train_flags.loss_csv, "Loss history output (default: <model>.loss.csv)");
  train_cmd->add_flag("-v,--verbose", train_flags.verbose, "Print per-epoch loss");
  add_train_flags(train_cmd, train_flags.train, true);

  ExtractCmd extract;
  auto* extract_cmd = app.add_subcommand("extract", "List the k-mers of a hamming model with provenance counts");
  show_defaults(extract_cmd);
  extract_cmd->add_option("--model", extract.model, "Model file")->required();
  extract_cmd->add_option("--out", extract.out, "Output path, - for stdout");

  FeaturizeCmd featurize_flags;
  auto* featurize_cmd = app.add_subcommand("featurize", "Write KH-similarity features as CSV");
  show_defaults(featurize_cmd);
  featurize_cmd->add_option("--model", featurize_flags.model, "Model file")->required();
  featurize_cmd->add_option("--data", featurize_flags.data, "Labeled TSV")->required();
  featurize_cmd->add_option("--out", featurize_flags.out, "Feature CSV output")->required();
  featurize_cmd->add_option("--threads", featurize_flags.threads, "Worker threads")->check(kAtLeastOne);

  ClassifyCmd classify;
  auto* classify_cmd = app.add_subcommand("classify", "Fit a classifier on KH features and report test accuracy");
  show_defaults(classify_cmd);
  classify_cmd->add_option("--model", classify.model, "Model file")->required();
  classify_cmd->add_option("--train", classify.train, "Training TSV")->required();
  classify_cmd->add_option("--test", classify.test, "Labeled test TSV")->required();
  classify_cmd->add_option("--classifier", classify.classifier, "knn, gnb or svm")
      ->check(CLI::IsMember({"knn", "gnb", "nb", "svm"}));
  classify_cmd->add_option("--neighbors", classify.neighbors, "kNN neighbours")->check(kAtLeastOne);
  classify_cmd->add_option("--seed", classify.seed, "SVM seed");
  classify_cmd->add_option("--threads", classify.threads, "Worker threads")->check(kAtLeastOne);

  EvalCmd eval_flags;
  auto* eval_cmd = app.add_subcommand("eval", "Repeated stratified CV of train -> extract -> featurize -> classify");
  show_defaults(eval_cmd);
  eval_cmd->add_option("--data", eval_flags.data, "Labeled TSV")->required();
  eval_cmd->add_option("--classifier", eval_flags.classifiers, "Classifiers to score")
      ->delimiter(',')
      ->check(CLI::IsMember({"knn", "gnb", "nb", "svm"}));
  eval_cmd->add_option("--neighbors", eval_flags.neighbors, "kNN neighbours")->check(kAtLeastOne);
  add_train_flags(eval_cmd, eval_flags.train, false);
  add_cv_flags(eval_cmd, eval_flags.cv);

  EndToEndCmd e2e;
  auto* e2e_cmd = app.add_subcommand("end2end", "Repeated stratified CV of the network classifier per quantizer");
  show_defaults(e2e_cmd);
  e2e_cmd->add_option("--data", e2e.data, "Labeled TSV")->required();
  e2e_cmd->add_option("--quantizer", e2e.quantizers, "Quantizers to compare")
      ->delimiter(',')
      ->check(CLI::IsMember({"hamming", "heaviside", "sign", "none"}));
  add_train_flags(e2e_cmd, e2e.train, false);
  add_cv_flags(e2e_cmd, e2e.cv);

  VerifyCmd verify;
  auto* verify_cmd = app.add_subcommand("verify", "Check conv + global max pool against the Hamming scan");
  show_defaults(verify_cmd);
  verify_cmd->add_option("--trials", verify.trials, "Random instances")->check(kAtLeastOne);
  verify_cmd->add_option("--seed", verify.seed, "Random seed");
  verify_cmd->add_option("--alphabet", verify.alphabet, "Largest alphabet size")->check(CLI::Range(1, 1 << 20));
  verify_cmd->add_option("--max-length", verify.max_length, "Longest sequence")->check(kAtLeastOne);
  verify_cmd->add_option("--max-k", verify.max_k, "Longest k-mer")->check(kAtLeastOne);
  verify_cmd->add_flag("--inject-fault", verify.inject_fault, "Test-only: corrupt the network path")->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (synth_cmd->parsed()) return run_synth(synth, err);
    if (train_cmd->parsed()) return run_train(train_flags, out, err);
    if (extract_cmd->parsed()) return run_extract(extract, out);
    if (featurize_cmd->parsed()) return run_featurize(featurize_flags);
    if (classify_cmd->parsed()) return run_classify(classify, out);
    if (eval_cmd->parsed()) return run_eval(eval_flags, out);
    if (e2e_cmd->parsed()) return run_end2end(e2e, out);
    if (verify_cmd->parsed()) return run_verify(verify, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace hamenc::cli
