#include <benchmark/benchmark.h>

#include <memory>

#include "qheom/bath.hpp"
#include "qheom/heom.hpp"

using namespace qheom;

namespace {

struct Fixture {
  std::vector<heom::DissipationChannel> channels;
  std::shared_ptr<const heom::Hierarchy> hierarchy;
  std::unique_ptr<heom::Generator> generator;
  Eigen::MatrixXcd ados, out;
  CMatrix hamiltonian;

  Fixture(std::size_t qubits, std::size_t depth) {
    const auto fit = bath::fit_exponentials(bath::BathModel::table_one(), 500.0, 1e-3);
    for (std::size_t q = 0; q < qubits; ++q)
      channels.push_back(heom::DissipationChannel::on_qubit(q, qubits, fit.series));
    heom::HierarchyOptions opt;
    opt.depth = depth;
    opt.layout = heom::Layout::Merged;
    opt.importance_threshold = 1e-4;
    opt.horizon = 500.0;
    hierarchy = std::make_shared<const heom::Hierarchy>(heom::build_hierarchy(channels, opt));
    generator = std::make_unique<heom::Generator>(hierarchy, channels);
    const std::size_t d = std::size_t{1} << qubits;
    ados = Eigen::MatrixXcd::Random(d * d, hierarchy->size());
    out.resize(ados.rows(), ados.cols());
    hamiltonian = CMatrix::Random(d, d);
    hamiltonian = (hamiltonian + hamiltonian.adjoint()).eval();
  }
};

void apply(benchmark::State& state, heom::Execution exec) {
  static Fixture f(state.range(0), 6);
  for (auto _ : state) {
    f.generator->apply(f.hamiltonian, f.ados, f.out, exec);
    benchmark::DoNotOptimize(f.out.data());
  }
  state.counters["ados"] = static_cast<double>(f.hierarchy->size());
}

void BM_ApplySerial(benchmark::State& state) { apply(state, heom::Execution::Serial); }
void BM_ApplyParallel(benchmark::State& state) { apply(state, heom::Execution::Parallel); }

}  // namespace

BENCHMARK(BM_ApplySerial)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ApplyParallel)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
