#include <benchmark/benchmark.h>

#include "ia/channel.hpp"
#include "ia/lifted.hpp"
#include "ia/linalg.hpp"
#include "ia/rng.hpp"
#include "ia/solver.hpp"
#include "ia/supports.hpp"

using namespace ia;

namespace {

lin::Matrix random_hermitian(int n, std::uint64_t seed) {
  Rng rng(seed);
  lin::Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      lin::cplx z = i == j ? lin::cplx(rng.gaussian(), 0.0) : rng.cgaussian();
      a(i, j) = z;
      a(j, i) = std::conj(z);
    }
  return a;
}

void BM_HermitianEig(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  lin::Matrix a = random_hermitian(n, 42);
  for (auto _ : state) {
    lin::HermitianEig eig;
    eig.compute(a);
    benchmark::DoNotOptimize(eig.values().data());
  }
}
BENCHMARK(BM_HermitianEig)->Arg(4)->Arg(8)->Arg(16);

void BM_AssembleChannel(benchmark::State& state) {
  auto bb = channel::build_blocks(channel::ChannelFamily::mimo_generic_ext(2, 2, 2));
  auto inst = channel::sample_instance(bb, 4, 7);
  for (auto _ : state) {
    lin::Matrix h = channel::assemble(bb, inst.tau[0][1]);
    benchmark::DoNotOptimize(h.data());
  }
}
BENCHMARK(BM_AssembleChannel);

void BM_AltMinStep(benchmark::State& state) {
  auto bb = channel::build_blocks(channel::ChannelFamily::mimo_constant(2, 2));
  auto inst = channel::sample_instance(bb, 3, 11);
  auto beams = solver::random_beams(inst, 5);
  for (auto _ : state) {
    beams = solver::alt_min_step(inst, beams);
    benchmark::DoNotOptimize(beams.v.data());
  }
}
BENCHMARK(BM_AltMinStep);

void BM_SolveConstant2x2(benchmark::State& state) {
  auto bb = channel::build_blocks(channel::ChannelFamily::mimo_constant(2, 2));
  solver::SolverConfig cfg;
  cfg.restarts = 4;
  cfg.max_iters = 800;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto inst = channel::sample_instance(bb, 3, ++seed);
    auto [beams, rep] = solver::solve(inst, cfg);
    benchmark::DoNotOptimize(rep.best_leakage);
  }
}
BENCHMARK(BM_SolveConstant2x2)->Unit(benchmark::kMillisecond);

void BM_PatternCensus(benchmark::State& state) {
  int K = static_cast<int>(state.range(0));
  auto fam = channel::ChannelFamily::siso_generic_ext(2);
  for (auto _ : state) {
    std::uint64_t ruled = 0;
    supports::enumerate_block_patterns(
        fam, K, 10000000,
        [&](const supports::BlockSupportPattern&, const supports::CountReport& rep) {
          if (rep.ruled_out) ++ruled;
        });
    benchmark::DoNotOptimize(ruled);
  }
}
BENCHMARK(BM_PatternCensus)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_LiftedReceivers(benchmark::State& state) {
  auto bb = channel::build_blocks(channel::ChannelFamily::siso_generic_ext(3));
  auto inst = channel::sample_instance(bb, 3, 23);
  solver::SolverConfig cfg;
  auto [beams, rep] = solver::solve(inst, cfg);
  auto li = lifted::make_lifted(inst, beams.v);
  for (auto _ : state) {
    auto u = lifted::lifted_zf_receivers(li);
    benchmark::DoNotOptimize(u.data());
  }
}
BENCHMARK(BM_LiftedReceivers);

}  // namespace

BENCHMARK_MAIN();
