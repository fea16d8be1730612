#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sner/cli.hpp"
#include "sner/corpus.hpp"
#include "sner/preprocess.hpp"
#include "synthetic.hpp"

using namespace sner;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "sner");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::vector<nlohmann::json> records(const std::string& ndjson) {
  std::vector<nlohmann::json> out;
  std::istringstream in(ndjson);
  for (std::string line; std::getline(in, line);) out.push_back(nlohmann::json::parse(line));
  return out;
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("sner_cli_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("usage errors") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"bogus"}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
  CHECK(run({"stats"}).code == kExitUsage);
  CHECK(run({"features", "--sentence", "a b", "--position", "x"}).code == kExitUsage);
  CHECK(run({"features", "--sentence", "a b", "--position", "5"}).code == kExitUsage);
}

TEST_CASE("preprocess") {
  TempDir dir;
  SUBCASE("empty file") {
    spit(dir / "empty.txt", "");
    const auto r = run({"preprocess", dir / "empty.txt"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.empty());
  }
  SUBCASE("one sentence becomes one all-O block with converted digits") {
    spit(dir / "one.txt", "ساڵی 2023 هات.\n");
    const auto r = run({"preprocess", dir / "one.txt", "-o", dir / "one.conll"});
    CHECK(r.code == kExitOk);
    const Corpus c = read_conll_file(dir / "one.conll");
    REQUIRE(c.sentence_count() == 1);
    for (const auto& t : c.sentences[0].tokens) CHECK(t.tag == Label::outside());
    CHECK(c.sentences[0].tokens[1].surface ==
          convert_digits("2023", PreprocessConfig::defaults()));
    CHECK(c.sentences[0].tokens.back().surface == ".");
  }
  SUBCASE("missing input is a data error") {
    CHECK(run({"preprocess", dir / "nope.txt"}).code == kExitData);
  }
}

TEST_CASE("stats") {
  TempDir dir;
  SUBCASE("all-O file") {
    spit(dir / "o.conll", "ئەو O\n. O\n");
    const auto r = run({"stats", dir / "o.conll", "--format", "json"});
    REQUIRE(r.code == kExitOk);
    const auto rec = records(r.out).at(0);
    CHECK(rec["schema"] == "sner.report/1");
    CHECK(rec["outside"]["percentage"] == 100.0);
    CHECK(rec["total"] == 2);
  }
  SUBCASE("percentages sum to 100") {
    write_conll_file(dir / "s.conll", synthetic::generate(200, 7));
    const auto rec = records(run({"stats", dir / "s.conll", "--format", "json"}).out).at(0);
    double sum = rec["outside"]["percentage"].get<double>();
    for (const auto& [name, e] : rec["entities"].items()) sum += e["percentage"].get<double>();
    CHECK(std::abs(sum - 100.0) <= 0.05);
    const auto table = run({"stats", dir / "s.conll"}).out;
    CHECK(table.find("ORGANIZATION") != std::string::npos);
    CHECK(table.find("OUTSIDE") != std::string::npos);
  }
  SUBCASE("malformed file reports the line") {
    spit(dir / "bad.conll", "ئەو O\nبەڵام B-XYZ\n");
    const auto r = run({"stats", dir / "bad.conll"});
    CHECK(r.code == kExitData);
    CHECK(r.err.find("line 2") != std::string::npos);
  }
}

TEST_CASE("validate") {
  TempDir dir;
  spit(dir / "ok.conll", "ئەحمەد B-PER\nهات O\n. O\n");
  spit(dir / "bad.conll", "ئەحمەد I-PER\nهات O\n. O\n");
  CHECK(run({"validate", dir / "ok.conll"}).code == kExitOk);
  const auto r = run({"validate", dir / "bad.conll", "--repair", dir / "fixed.conll"});
  CHECK(r.code == kExitData);
  CHECK(r.out.find("I-PER") != std::string::npos);
  CHECK(run({"validate", dir / "fixed.conll"}).code == kExitOk);
  CHECK(slurp(dir / "fixed.conll") == slurp(dir / "ok.conll"));
}

TEST_CASE("split") {
  TempDir dir;
  const Corpus corpus = synthetic::generate(50, 9);
  write_conll_file(dir / "all.conll", corpus);

  SUBCASE("holdout") {
    const auto r = run({"split", "--data", dir / "all.conll", "--split", "80/20", "--out-dir", dir.path.string()});
    REQUIRE(r.code == kExitOk);
    const Corpus train = read_conll_file(dir / "train.conll");
    const Corpus test = read_conll_file(dir / "test.conll");
    CHECK(train.sentence_count() == 40);
    CHECK(test.sentence_count() == 10);
    const auto expected = split_holdout(corpus, 0.8, 42);
    CHECK(train == expected.first);
    CHECK(test == expected.second);
  }
  SUBCASE("k-fold") {
    const auto r = run({"split", "--data", dir / "all.conll", "--k", "5", "--seed", "3", "--out-dir", dir.path.string()});
    REQUIRE(r.code == kExitOk);
    std::size_t total = 0;
    for (int f = 1; f <= 5; ++f) {
      const std::string name = "fold-0" + std::to_string(f);
      total += read_conll_file(dir / (name + "-test.conll")).sentence_count();
      CHECK(read_conll_file(dir / (name + "-train.conll")).sentence_count() == 40);
    }
    CHECK(total == 50);
  }
  SUBCASE("bad ratio") {
    for (const std::string bad : {"1.5", "80/0", "eighty"}) {
      CHECK(run({"split", "--data", dir / "all.conll", "--split", bad}).code == kExitUsage);
    }
  }
}

TEST_CASE("train, predict, evaluate") {
  TempDir dir;
  write_conll_file(dir / "all.conll", synthetic::generate(120, 10));

  for (const std::string model : {"crf", "svm"}) {
    CAPTURE(model);
    const auto t = run({"train", "--model", model, "--data", dir / "all.conll", "-o", dir / (model + ".bin")});
    REQUIRE(t.code == kExitOk);

    const std::vector<std::string> eval = {"evaluate", "--model", model, "--data", dir / "all.conll",
                                           "--split", "80/20", "--seed", "42", "--format", "json"};
    const auto first = run(eval);
    const auto second = run(eval);
    REQUIRE(first.code == kExitOk);
    CHECK(first.out == second.out);
    const auto recs = records(first.out);
    CHECK(recs.at(0)["record"] == "evaluation");
    CHECK(recs.at(0)["split"] == "80/20");
    CHECK(recs.at(0)["micro"]["f1"].get<double>() >= 0.95);

    run({"split", "--data", dir / "all.conll", "--out-dir", dir.path.string()});
    const auto p = run({"predict", "--model-path", dir / (model + ".bin"), "--test", dir / "test.conll",
                        "-o", dir / "pred.conll", "--constrain-bio"});
    REQUIRE(p.code == kExitOk);
    const Corpus gold = read_conll_file(dir / "test.conll");
    const Corpus pred = read_conll_file(dir / "pred.conll");
    REQUIRE(pred.sentence_count() == gold.sentence_count());
    for (std::size_t s = 0; s < gold.sentence_count(); ++s) {
      CHECK(pred.sentences[s].surfaces() == gold.sentences[s].surfaces());
    }

    const auto by_model = run({"evaluate", "--model-path", dir / (model + ".bin"), "--test", dir / "test.conll",
                               "--format", "json"});
    const auto by_file = run({"evaluate", "--gold", dir / "test.conll", "--pred", dir / "pred.conll",
                              "--format", "json"});
    REQUIRE(by_model.code == kExitOk);
    REQUIRE(by_file.code == kExitOk);
    if (model == "svm") {
      // predict above was not repaired, so both paths score the same tags.
      CHECK(records(by_model.out).at(0)["micro"] == records(by_file.out).at(0)["micro"]);
    }
    CHECK(records(by_file.out).at(0)["model"] == "");
  }

  SUBCASE("unknown model name") {
    CHECK(run({"train", "--model", "hmm", "--data", dir / "all.conll", "-o", dir / "x.bin"}).code == kExitUsage);
  }
  SUBCASE("negative regularization") {
    CHECK(run({"train", "--l1", "-1", "--data", dir / "all.conll", "-o", dir / "x.bin"}).code == kExitUsage);
  }
  SUBCASE("corrupt model file") {
    spit(dir / "junk.bin", "not a model");
    CHECK(run({"predict", "--model-path", dir / "junk.bin", "--test", dir / "all.conll"}).code == kExitData);
  }
  SUBCASE("gold and prediction with different tokens") {
    spit(dir / "g.conll", "ئەو O\n");
    spit(dir / "p.conll", "ئەم O\n");
    CHECK(run({"evaluate", "--gold", dir / "g.conll", "--pred", dir / "p.conll"}).code == kExitData);
  }
}

TEST_CASE("config file with flag override") {
  TempDir dir;
  write_conll_file(dir / "all.conll", synthetic::generate(40, 11));
  spit(dir / "run.toml", "[evaluate]\nmodel = \"svm\"\nformat = \"json\"\nsplit = \"70/30\"\n");
  const auto r = run({"--config", dir / "run.toml", "evaluate", "--data", dir / "all.conll", "--split", "80/20"});
  REQUIRE(r.code == kExitOk);
  const auto rec = records(r.out).at(0);
  CHECK(rec["model"] == "svm");
  CHECK(rec["split"] == "80/20");
}

TEST_CASE("crossval") {
  TempDir dir;
  write_conll_file(dir / "all.conll", synthetic::generate(60, 12));
  const auto r = run({"crossval", "--model", "both", "--data", dir / "all.conll", "--k", "3",
                      "--max-iter", "30", "--format", "json"});
  REQUIRE(r.code == kExitOk);
  const auto recs = records(r.out);
  int crossval = 0, folds = 0, ttest = 0;
  for (const auto& rec : recs) {
    crossval += rec["record"] == "crossval";
    folds += rec["record"] == "fold";
    ttest += rec["record"] == "ttest";
  }
  CHECK(crossval == 2);
  CHECK(folds == 6);
  CHECK(ttest == 1);
  CHECK(run({"crossval", "--data", dir / "all.conll", "--k", "1"}).code == kExitUsage);
  CHECK(run({"crossval", "--data", dir / "all.conll", "--k", "61"}).code == kExitData);
}

TEST_CASE("iaa") {
  TempDir dir;
  write_conll_file(dir / "a.conll", synthetic::generate(30, 13));
  const auto same = run({"iaa", dir / "a.conll", dir / "a.conll", "--format", "json"});
  REQUIRE(same.code == kExitOk);
  CHECK(records(same.out).at(0)["kappa"] == 1.0);

  spit(dir / "x.conll", "ئەو O\n");
  CHECK(run({"iaa", dir / "a.conll", dir / "x.conll"}).code == kExitData);
}

TEST_CASE("features") {
  const auto r = run({"features", "--sentence", "ئەحمەد چوو بۆ هەولێر", "--position", "0"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("w\tئەحمەد\n") != std::string::npos);
  CHECK(r.out.find("w[-1]\t__BOS__\n") != std::string::npos);
  CHECK(r.out.find("w[+2]\tبۆ\n") != std::string::npos);
  CHECK(r.out.find("w[+3]") == std::string::npos);
}

TEST_CASE("annotation tool export interchange") {
  // Shape of an export from the annotation tool: 250 rows, single space,
  // blank-line sentence separators, final newline.
  Corpus corpus;
  std::size_t rows = 0;
  for (const auto& s : synthetic::generate(100, 14).sentences) {
    if (rows + s.size() > 250) break;
    corpus.sentences.push_back(s);
    rows += s.size();
  }
  Sentence filler;
  while (rows < 250) {
    filler.tokens.push_back({"و", Label::outside()});
    ++rows;
  }
  if (!filler.tokens.empty()) corpus.sentences.push_back(filler);
  const std::string exported = serialize_conll(corpus);

  const Corpus parsed = parse_conll(exported);
  CHECK(parsed.token_count() == 250);
  CHECK(serialize_conll(parsed) == exported);
  CHECK((parsed.token_count() + 99) / 100 == 3);

  // One tag changed to B-LOC changes exactly one line.
  Corpus edited = parsed;
  edited.sentences[0].tokens[0].tag = Label::begin(EntityType::Location);
  std::istringstream a(exported), b(serialize_conll(edited));
  int differing = 0;
  for (std::string la, lb; std::getline(a, la) && std::getline(b, lb);) differing += la != lb;
  CHECK(differing == 1);

  std::string crlf;
  for (char ch : exported) {
    if (ch == '\n') crlf += '\r';
    crlf += ch;
  }
  CHECK(parse_conll(crlf) == parsed);
}
