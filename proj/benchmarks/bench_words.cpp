// Word-enumeration throughput against truncation length.

#include <benchmark/benchmark.h>

#include "schottky/group.hpp"

namespace {

schottky::SchottkyGroup four_disk() {
  using schottky::cplx;
  schottky::OrientedDisk d1{cplx(2.0, 0.0), 0.5, false};
  schottky::OrientedDisk d1p{cplx(-2.0, 0.0), 0.5, false};
  schottky::OrientedDisk d2{cplx(0.0, 2.0), 0.5, false};
  schottky::OrientedDisk d2p{cplx(0.0, -2.0), 0.5, false};
  return schottky::SchottkyGroup(
      {schottky::pairing_map(d1, d1p, 0.0), schottky::pairing_map(d2, d2p, 0.0)},
      {d1, d1p, d2, d2p});
}

void bm_word_walk(benchmark::State& state) {
  const auto group = four_disk();
  const int max_len = static_cast<int>(state.range(0));
  for (auto _ : state) {
    std::uint64_t visited = 0;
    schottky::for_each_word(group, max_len,
                            [&](const std::vector<std::int32_t>&, const schottky::MoebiusMap& m) {
                              benchmark::DoNotOptimize(m.a);
                              ++visited;
                            });
    benchmark::DoNotOptimize(visited);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(schottky::reduced_word_count(2, max_len)));
}

}  // namespace

BENCHMARK(bm_word_walk)->Arg(6)->Arg(8)->Arg(10);

BENCHMARK_MAIN();
