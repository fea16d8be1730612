#include "sner/cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "sner/corpus.hpp"
#include "sner/crf.hpp"
#include "sner/error.hpp"
#include "sner/eval.hpp"
#include "sner/features.hpp"
#include "sner/model_io.hpp"
#include "sner/preprocess.hpp"
#include "sner/report.hpp"
#include "sner/svm.hpp"

namespace sner {

namespace {

// Defaults reproduce the reference configuration: CRF with L1 = L2 = 0.1 and
// 200 iterations, a linear SVM, 80/20 holdout (70/30 via --split), 10 folds.
struct RunConfig {
  std::string model = "crf";
  std::string train_path;
  std::string test_path;
  std::string data_path;
  std::string gold_path;
  std::string pred_path;
  std::string model_path;
  std::string out_path;
  std::string out_dir;
  std::string split = "80/20";
  std::size_t k = 10;
  std::uint64_t seed = 42;
  double l1 = 0.1;
  double l2 = 0.1;
  int max_iter = 200;
  double c = 1.0;
  double svm_tolerance = 1e-4;
  int max_epochs = 1000;
  std::size_t window = kDefaultWindow;
  bool constrain_bio = false;
  bool repair_bio = false;
  std::string format = "table";
  bool include_o = false;
  int threads = 0;

  // preprocess / validate / iaa / features
  std::string input_path;
  std::string second_path;
  std::string digits = "arabic";
  bool keep_latin = false;
  bool sentence_lines = false;
  bool lint_period = false;
  std::string repair_out;
  std::string sentence;
  std::size_t position = 0;
};

ReportFormat report_format(const RunConfig& cfg) {
  if (cfg.format == "table") return ReportFormat::Table;
  if (cfg.format == "json" || cfg.format == "structured") return ReportFormat::Structured;
  throw UsageError("unknown --format '" + cfg.format + "' (table | json)");
}

ExecutionMode execution_mode(const RunConfig& cfg) {
  if (cfg.threads <= 0) return ExecutionMode::Serial;
  omp_set_num_threads(cfg.threads);
  return ExecutionMode::Parallel;
}

// Accepts "80/20", "70/30" or a fraction such as "0.8".
double parse_split(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return std::stod(text);
    const double train = std::stod(text.substr(0, slash));
    const double test = std::stod(text.substr(slash + 1));
    if (train <= 0 || test <= 0) throw UsageError("bad --split '" + text + "'");
    return train / (train + test);
  } catch (const std::logic_error&) {
    throw UsageError("bad --split '" + text + "' (expected e.g. 80/20 or 0.8)");
  }
}

std::string split_label(double fraction) {
  const auto train = static_cast<int>(std::lround(fraction * 100.0));
  return std::to_string(train) + "/" + std::to_string(100 - train);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot write '" + path + "'");
  file << text;
}

CrfTrainConfig crf_config(const RunConfig& cfg) {
  CrfTrainConfig config;
  config.l1 = cfg.l1;
  config.l2 = cfg.l2;
  config.max_iterations = cfg.max_iter;
  config.window = cfg.window;
  config.mode = execution_mode(cfg);
  if (config.l1 < 0 || config.l2 < 0) throw UsageError("--l1 and --l2 must be non-negative");
  return config;
}

SvmTrainConfig svm_config(const RunConfig& cfg) {
  SvmTrainConfig config;
  config.c = cfg.c;
  config.tolerance = cfg.svm_tolerance;
  config.max_epochs = cfg.max_epochs;
  config.window = cfg.window;
  config.seed = cfg.seed;
  config.mode = execution_mode(cfg);
  if (!(config.c > 0)) throw UsageError("--c must be positive");
  return config;
}

void check_model_name(const std::string& model, bool allow_both = false) {
  if (model == "crf" || model == "svm" || (allow_both && model == "both")) return;
  throw UsageError("unknown --model '" + model + "' (crf | svm" +
                   std::string(allow_both ? " | both" : "") + ")");
}

TagSequences predict_corpus(const AnyModel& model, const Corpus& corpus, const RunConfig& cfg) {
  TagSequences out;
  out.reserve(corpus.sentence_count());
  for (const auto& sentence : corpus.sentences) {
    const auto surfaces = sentence.surfaces();
    if (const auto* crf = std::get_if<CrfModel>(&model)) {
      auto tags = crf->tag(surfaces, cfg.constrain_bio);
      out.push_back(cfg.repair_bio ? repair_bio(std::move(tags)) : std::move(tags));
    } else {
      out.push_back(predict_tags(std::get<LinearModel>(model), surfaces, cfg.repair_bio));
    }
  }
  return out;
}

AnyModel train_model(const std::string& model, const Corpus& train, const RunConfig& cfg) {
  if (model == "crf") return train_crf(train, crf_config(cfg)).model;
  return train_svm(train, svm_config(cfg)).model;
}

Trainer make_trainer(const std::string& model, const RunConfig& cfg) {
  return [model, cfg](const Corpus& train, const Corpus& test) {
    return predict_corpus(train_model(model, train, cfg), test, cfg);
  };
}

// --train file, or --data file split by --split/--seed.
std::pair<Corpus, Corpus> training_data(const RunConfig& cfg, bool need_test) {
  if (!cfg.train_path.empty()) {
    Corpus train = read_conll_file(cfg.train_path);
    Corpus test;
    if (!cfg.test_path.empty()) {
      test = read_conll_file(cfg.test_path);
    } else if (need_test) {
      throw UsageError("--test is required with --train");
    }
    return {std::move(train), std::move(test)};
  }
  if (!cfg.data_path.empty()) {
    return split_holdout(read_conll_file(cfg.data_path), parse_split(cfg.split), cfg.seed);
  }
  throw UsageError("either --train or --data is required");
}

std::string model_name(const AnyModel& model) {
  return std::holds_alternative<CrfModel>(model) ? "crf" : "svm";
}

int cmd_preprocess(const RunConfig& cfg, std::ostream& out) {
  PreprocessConfig config;
  if (cfg.digits == "arabic") {
    config = PreprocessConfig::defaults();
  } else if (cfg.digits == "extended") {
    config = PreprocessConfig::extended_digits();
  } else {
    throw UsageError("unknown --digits '" + cfg.digits + "' (arabic | extended)");
  }
  config.strip_latin = !cfg.keep_latin;
  const std::string raw = read_text_file(cfg.input_path);
  std::string text;
  if (cfg.sentence_lines) {
    for (const auto& words : preprocess(raw, config)) {
      for (std::size_t i = 0; i < words.size(); ++i) text += (i ? " " : "") + words[i];
      text += '\n';
    }
  } else {
    text = serialize_conll(preprocess_to_skeleton(raw, config));
  }
  write_output(cfg.out_path, text, out);
  return kExitOk;
}

int cmd_stats(const RunConfig& cfg, std::ostream& out) {
  const Corpus corpus = read_conll_file(cfg.input_path);
  out << render_distribution(corpus_stats(corpus), report_format(cfg));
  if (report_format(cfg) == ReportFormat::Table) {
    out << "sentences " << corpus.sentence_count() << "\n";
  }
  return kExitOk;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
  const Corpus corpus = read_conll_file(cfg.input_path);
  const auto format = report_format(cfg);
  const auto violations = validate_bio(corpus);
  out << render_violations(violations, "iob2", format);
  if (cfg.lint_period) out << render_violations(lint_final_period(corpus), "final-period", format);
  if (!cfg.repair_out.empty()) write_conll_file(cfg.repair_out, repair_bio(corpus));
  return violations.empty() ? kExitOk : kExitData;
}

int cmd_split(const RunConfig& cfg, std::ostream& out, bool kfold) {
  if (cfg.data_path.empty()) throw UsageError("--data is required");
  const Corpus corpus = read_conll_file(cfg.data_path);
  const std::filesystem::path dir = cfg.out_dir.empty() ? "." : cfg.out_dir;
  std::filesystem::create_directories(dir);
  if (kfold) {
    const auto folds = split_kfold(corpus, cfg.k, cfg.seed);
    for (std::size_t f = 0; f < folds.size(); ++f) {
      std::ostringstream name;
      name << "fold-" << std::setw(2) << std::setfill('0') << f + 1;
      write_conll_file((dir / (name.str() + "-train.conll")).string(), folds[f].train);
      write_conll_file((dir / (name.str() + "-test.conll")).string(), folds[f].test);
      out << name.str() << ": train " << folds[f].train.sentence_count() << ", test "
          << folds[f].test.sentence_count() << " sentences\n";
    }
    return kExitOk;
  }
  const auto [train, test] = split_holdout(corpus, parse_split(cfg.split), cfg.seed);
  write_conll_file((dir / "train.conll").string(), train);
  write_conll_file((dir / "test.conll").string(), test);
  out << "train " << train.sentence_count() << ", test " << test.sentence_count()
      << " sentences\n";
  return kExitOk;
}

int cmd_train(const RunConfig& cfg, std::ostream& out) {
  check_model_name(cfg.model);
  if (cfg.out_path.empty()) throw UsageError("--out (model path) is required");
  const auto [train, unused] = training_data(cfg, false);
  if (cfg.model == "crf") {
    const auto result = train_crf(train, crf_config(cfg));
    save_model(cfg.out_path, result.model);
    out << "crf: " << result.model.num_features() << " features, "
        << result.optimizer.iterations << " iterations, objective " << std::setprecision(10)
        << result.optimizer.objective_history.back() << "\n";
  } else {
    const auto result = train_svm(train, svm_config(cfg));
    save_model(cfg.out_path, result.model);
    int epochs = 0;
    for (const auto& s : result.solutions) epochs = std::max(epochs, s.epochs);
    out << "svm: " << result.model.num_features() << " features, max " << epochs
        << " epochs\n";
  }
  return kExitOk;
}

int cmd_predict(const RunConfig& cfg, std::ostream& out) {
  if (cfg.model_path.empty()) throw UsageError("--model-path is required");
  if (cfg.test_path.empty()) throw UsageError("--test is required");
  const AnyModel model = load_model(cfg.model_path);
  Corpus corpus = read_conll_file(cfg.test_path);
  const auto pred = predict_corpus(model, corpus, cfg);
  for (std::size_t s = 0; s < pred.size(); ++s) {
    for (std::size_t i = 0; i < pred[s].size(); ++i) corpus.sentences[s].tokens[i].tag = pred[s][i];
  }
  write_output(cfg.out_path, serialize_conll(corpus), out);
  return kExitOk;
}

TagSequences tags_of(const Corpus& corpus) {
  TagSequences out;
  for (const auto& s : corpus.sentences) out.push_back(s.tags());
  return out;
}

void check_same_tokens(const Corpus& a, const Corpus& b) {
  if (a.sentence_count() != b.sentence_count()) {
    throw DataError("files differ in sentence count (" + std::to_string(a.sentence_count()) +
                    " vs " + std::to_string(b.sentence_count()) + ")");
  }
  for (std::size_t s = 0; s < a.sentence_count(); ++s) {
    const auto& x = a.sentences[s].tokens;
    const auto& y = b.sentences[s].tokens;
    if (x.size() != y.size()) {
      throw DataError("sentence " + std::to_string(s + 1) + " differs in token count");
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].surface != y[i].surface) {
        throw DataError("sentence " + std::to_string(s + 1) + ", token " + std::to_string(i + 1) +
                        ": '" + x[i].surface + "' vs '" + y[i].surface + "'");
      }
    }
  }
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
  const auto format = report_format(cfg);
  Corpus gold;
  TagSequences pred;
  RunInfo run;
  if (!cfg.pred_path.empty()) {
    if (cfg.gold_path.empty()) throw UsageError("--gold is required with --pred");
    gold = read_conll_file(cfg.gold_path);
    const Corpus predicted = read_conll_file(cfg.pred_path);
    check_same_tokens(gold, predicted);
    pred = tags_of(predicted);
    run.split = "given";
  } else if (!cfg.model_path.empty()) {
    if (cfg.test_path.empty()) throw UsageError("--test is required with --model-path");
    const AnyModel model = load_model(cfg.model_path);
    gold = read_conll_file(cfg.test_path);
    pred = predict_corpus(model, gold, cfg);
    run = {model_name(model), "given"};
  } else {
    check_model_name(cfg.model);
    auto [train, test] = training_data(cfg, true);
    pred = predict_corpus(train_model(cfg.model, train, cfg), test, cfg);
    gold = std::move(test);
    run = {cfg.model, cfg.train_path.empty() ? split_label(parse_split(cfg.split)) : "given"};
  }
  out << render_evaluation(tag_metrics(gold, pred, cfg.include_o), span_metrics(gold, pred), run,
                           format);
  return kExitOk;
}

int cmd_crossval(const RunConfig& cfg, std::ostream& out) {
  check_model_name(cfg.model, true);
  if (cfg.data_path.empty()) throw UsageError("--data is required");
  const auto format = report_format(cfg);
  const Corpus corpus = read_conll_file(cfg.data_path);
  const std::vector<std::string> models =
      cfg.model == "both" ? std::vector<std::string>{"crf", "svm"}
                          : std::vector<std::string>{cfg.model};
  std::vector<CvReport> reports;
  for (const auto& m : models) {
    reports.push_back(cross_validate(corpus, make_trainer(m, cfg), cfg.k, cfg.seed, cfg.include_o));
    out << render_crossval(reports.back(), RunInfo{m, std::to_string(cfg.k) + "-fold"}, format);
  }
  if (reports.size() == 2) {
    out << render_ttest(paired_ttest(reports[0].fold_f1(), reports[1].fold_f1()), models[0],
                        models[1], format);
  }
  return kExitOk;
}

int cmd_iaa(const RunConfig& cfg, std::ostream& out) {
  const Corpus a = read_conll_file(cfg.input_path);
  const Corpus b = read_conll_file(cfg.second_path);
  check_same_tokens(a, b);
  std::vector<Label> ta, tb;
  for (const auto& s : a.sentences) {
    for (const auto& t : s.tokens) ta.push_back(t.tag);
  }
  for (const auto& s : b.sentences) {
    for (const auto& t : s.tokens) tb.push_back(t.tag);
  }
  out << render_kappa(cohen_kappa(ta, tb), ta.size(), report_format(cfg));
  return kExitOk;
}

int cmd_features(const RunConfig& cfg, std::ostream& out) {
  const auto words = tokenize_words(cfg.sentence);
  if (words.empty()) throw UsageError("--sentence is empty");
  if (cfg.position >= words.size()) {
    throw UsageError("--position " + std::to_string(cfg.position) + " outside sentence of " +
                     std::to_string(words.size()) + " tokens");
  }
  for (const auto& f : token_features(words, cfg.position, cfg.window)) {
    out << f.name << '\t';
    if (const auto* s = std::get_if<std::string>(&f.value)) {
      out << *s;
    } else {
      out << std::get<double>(f.value);
    }
    out << '\n';
  }
  return kExitOk;
}

void add_format(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--format", cfg.format, "Report format: table | json")->capture_default_str();
}

void add_model_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--model", cfg.model, "Model type: crf | svm")->capture_default_str();
  sub->add_option("--l1", cfg.l1, "CRF L1 coefficient")->capture_default_str();
  sub->add_option("--l2", cfg.l2, "CRF L2 coefficient")->capture_default_str();
  sub->add_option("--max-iter", cfg.max_iter, "CRF iteration cap")->capture_default_str();
  sub->add_option("--c", cfg.c, "SVM regularization C")->capture_default_str();
  sub->add_option("--svm-tol", cfg.svm_tolerance, "SVM stopping tolerance")->capture_default_str();
  sub->add_option("--max-epochs", cfg.max_epochs, "SVM epoch cap")->capture_default_str();
  sub->add_option("--window", cfg.window, "Context window (tokens each side)")
      ->capture_default_str();
  sub->add_option("--threads", cfg.threads,
                  "OpenMP threads for training kernels (0 = serial reference)")
      ->capture_default_str();
}

void add_decode_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_flag("--constrain-bio", cfg.constrain_bio, "Mask IOB2-illegal transitions (CRF)");
  sub->add_flag("--repair-bio", cfg.repair_bio, "Rewrite stray I-X to B-X after decoding");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Sorani NER toolkit: corpus tools, CRF and SVM taggers, evaluation"};
  app.name(args.empty() ? "sner" : args[0]);
  app.set_config("--config", "", "TOML/INI file of defaults; command-line flags override");
  app.require_subcommand(1);

  auto* pre = app.add_subcommand("preprocess", "Raw text to a CoNLL skeleton (all tags O)");
  pre->add_option("input", cfg.input_path, "Raw UTF-8 text file")->required();
  pre->add_option("-o,--out", cfg.out_path, "Output file (default stdout)");
  pre->add_option("--digits", cfg.digits, "Digit target: arabic | extended")->capture_default_str();
  pre->add_flag("--keep-latin", cfg.keep_latin, "Do not strip Latin-script words");
  pre->add_flag("--lines", cfg.sentence_lines, "One tokenized sentence per line instead of CoNLL");

  auto* stats = app.add_subcommand("stats", "Entity type distribution of a CoNLL file");
  stats->add_option("input", cfg.input_path, "CoNLL file")->required();
  add_format(stats, cfg);

  auto* validate = app.add_subcommand("validate", "Check IOB2 consistency (exit 2 on violations)");
  validate->add_option("input", cfg.input_path, "CoNLL file")->required();
  validate->add_option("--repair", cfg.repair_out, "Write a repaired copy here");
  validate->add_flag("--lint-period", cfg.lint_period, "Also report sentences not ending in '. O'");
  add_format(validate, cfg);

  auto* split = app.add_subcommand("split", "Holdout or k-fold split of a CoNLL file");
  split->add_option("--data", cfg.data_path, "CoNLL file to split")->required();
  split->add_option("--split", cfg.split, "Train/test ratio, e.g. 80/20 or 0.7")
      ->capture_default_str();
  auto* k_opt = split->add_option("--k", cfg.k, "Write k folds instead of a holdout split");
  split->add_option("--seed", cfg.seed, "Shuffle seed")->capture_default_str();
  split->add_option("--out-dir", cfg.out_dir, "Output directory")->capture_default_str();

  auto* train = app.add_subcommand("train", "Train a CRF or SVM tagger");
  add_model_options(train, cfg);
  train->add_option("--train", cfg.train_path, "Training CoNLL file");
  train->add_option("--data", cfg.data_path, "Corpus to split; trains on the train part");
  train->add_option("--split", cfg.split, "Train/test ratio with --data")->capture_default_str();
  train->add_option("--seed", cfg.seed, "Split and solver seed")->capture_default_str();
  train->add_option("-o,--out", cfg.out_path, "Model output path")->required();

  auto* predict = app.add_subcommand("predict", "Tag a CoNLL file with a trained model");
  predict->add_option("--model-path", cfg.model_path, "Model file")->required();
  predict->add_option("--test", cfg.test_path, "CoNLL file to tag (tags are replaced)")->required();
  predict->add_option("-o,--out", cfg.out_path, "Output file (default stdout)");
  add_decode_options(predict, cfg);

  auto* evaluate = app.add_subcommand(
      "evaluate", "Score predictions: --gold/--pred, --model-path/--test, or train and test");
  add_model_options(evaluate, cfg);
  add_decode_options(evaluate, cfg);
  add_format(evaluate, cfg);
  evaluate->add_option("--gold", cfg.gold_path, "Gold CoNLL file");
  evaluate->add_option("--pred", cfg.pred_path, "Predicted CoNLL file");
  evaluate->add_option("--model-path", cfg.model_path, "Trained model file");
  evaluate->add_option("--train", cfg.train_path, "Training CoNLL file");
  evaluate->add_option("--test", cfg.test_path, "Test CoNLL file");
  evaluate->add_option("--data", cfg.data_path, "Corpus to split into train/test");
  evaluate->add_option("--split", cfg.split, "Train/test ratio with --data")->capture_default_str();
  evaluate->add_option("--seed", cfg.seed, "Split and solver seed")->capture_default_str();
  evaluate->add_flag("--include-o", cfg.include_o, "Include O in aggregate scores");

  auto* crossval = app.add_subcommand("crossval", "k-fold cross-validation");
  add_model_options(crossval, cfg);
  add_decode_options(crossval, cfg);
  add_format(crossval, cfg);
  crossval->add_option("--data", cfg.data_path, "CoNLL corpus")->required();
  crossval->add_option("--k", cfg.k, "Number of folds")->capture_default_str();
  crossval->add_option("--seed", cfg.seed, "Fold shuffle seed")->capture_default_str();
  crossval->add_flag("--include-o", cfg.include_o, "Include O in aggregate scores");

  auto* iaa = app.add_subcommand("iaa", "Cohen's kappa between two annotations of the same tokens");
  iaa->add_option("first", cfg.input_path, "First annotator's CoNLL file")->required();
  iaa->add_option("second", cfg.second_path, "Second annotator's CoNLL file")->required();
  add_format(iaa, cfg);

  auto* features = app.add_subcommand("features", "Dump the feature set of one token");
  features->add_option("--sentence", cfg.sentence, "Whitespace-tokenized sentence")->required();
  features->add_option("--position", cfg.position, "0-based token position")->required();
  features->add_option("--window", cfg.window, "Context window")->capture_default_str();

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  if (args.empty()) argv.push_back("sner");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (pre->parsed()) return cmd_preprocess(cfg, out);
    if (stats->parsed()) return cmd_stats(cfg, out);
    if (validate->parsed()) return cmd_validate(cfg, out);
    if (split->parsed()) return cmd_split(cfg, out, k_opt->count() > 0);
    if (train->parsed()) return cmd_train(cfg, out);
    if (predict->parsed()) return cmd_predict(cfg, out);
    if (evaluate->parsed()) return cmd_evaluate(cfg, out);
    if (crossval->parsed()) return cmd_crossval(cfg, out);
    if (iaa->parsed()) return cmd_iaa(cfg, out);
    if (features->parsed()) return cmd_features(cfg, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace sner
