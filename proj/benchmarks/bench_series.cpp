// Series summation cost against truncation length and worker count.

#include <benchmark/benchmark.h>

#include "schottky/series.hpp"

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

void bm_green_series(benchmark::State& state) {
  const auto group = four_disk();
  const auto pt = [](double re, double im) {
    return schottky::ProjectivePoint::from_complex(schottky::cplx(re, im));
  };
  const int max_len = static_cast<int>(state.range(0));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    const auto est = schottky::green_series(group, pt(0.1, 0.0), pt(-0.3, 0.0), pt(0.2, 0.4),
                                            pt(-0.1, -0.5), max_len, threads);
    benchmark::DoNotOptimize(est.total);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(schottky::reduced_word_count(2, max_len)));
}

}  // namespace

BENCHMARK(bm_green_series)
    ->Args({6, 1})
    ->Args({8, 1})
    ->Args({10, 1})
    ->Args({10, 4})
    ->Unit(benchmark::kMillisecond);
