// Serial reference against the OpenMP kernels: CRF corpus gradient and
// one-vs-rest SVM training on the synthetic corpus.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "sner/crf.hpp"
#include "sner/svm.hpp"
#include "synthetic.hpp"

namespace {

using namespace sner;

struct GradientFixture {
  CrfModel model;
  std::vector<CrfInstance> instances;

  explicit GradientFixture(std::size_t sentences) {
    const Corpus corpus = synthetic::generate(sentences, 3);
    model = train_crf(corpus, CrfTrainConfig{.max_iterations = 3}).model;
    for (const auto& s : corpus.sentences) {
      CrfInstance inst;
      const auto features = sentence_features(s.surfaces());
      inst.positions = vectorize_positions(model.index(), features);
      for (const auto& t : s.tokens) inst.gold.push_back(t.tag.index());
      instances.push_back(std::move(inst));
    }
  }
};

const GradientFixture& gradient_fixture() {
  static const GradientFixture fixture(2000);
  return fixture;
}

void crf_gradient(benchmark::State& state, ExecutionMode mode) {
  const auto& f = gradient_fixture();
  if (mode == ExecutionMode::Parallel) omp_set_num_threads(static_cast<int>(state.range(0)));
  std::vector<double> grad(f.model.num_weights());
  for (auto _ : state) {
    benchmark::DoNotOptimize(corpus_nll_and_gradient(f.model, f.instances, grad, mode));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.instances.size()));
}

void svm_train(benchmark::State& state, ExecutionMode mode) {
  static const Corpus corpus = synthetic::generate(1000, 4);
  if (mode == ExecutionMode::Parallel) omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto result = train_svm(corpus, SvmTrainConfig{.mode = mode});
    benchmark::DoNotOptimize(result.model.bias(0));
  }
}

}  // namespace

BENCHMARK_CAPTURE(crf_gradient, serial, ExecutionMode::Serial)->Arg(1)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(crf_gradient, parallel, ExecutionMode::Parallel)
    ->DenseRange(1, 4)
    ->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(svm_train, serial, ExecutionMode::Serial)->Arg(1)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(svm_train, parallel, ExecutionMode::Parallel)
    ->DenseRange(1, 4)
    ->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
