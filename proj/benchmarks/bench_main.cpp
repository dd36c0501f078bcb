#include <benchmark/benchmark.h>

#include <vector>

#include "advdist/analytics.hpp"
#include "advdist/montecarlo.hpp"
#include "advdist/numerics.hpp"
#include "advdist/reconciliation.hpp"
#include "advdist/rng.hpp"

namespace {

using namespace advdist;

// Codebook entry stream, q = 2^10, n = 45.
void BM_CodebookGeneration(benchmark::State& state) {
    Codebook cb(0xBEEF, 1024, 45);
    double sink = 0.0;
    for (auto _ : state) {
        for (std::uint32_t r = 0; r < cb.rows(); ++r) {
            const std::uint64_t key = cb.row_key(r);
            for (std::uint32_t i = 0; i < cb.row_length(); ++i)
                sink += Codebook::entry_hash(key, i);
        }
    }
    benchmark::DoNotOptimize(sink);
    state.SetItemsProcessed(state.iterations() * 1024 * 45);
}
BENCHMARK(BM_CodebookGeneration);

void BM_NoncentralChi2Cdf(benchmark::State& state) {
    const double lambda = double(state.range(0));
    double z = 30.0 + lambda;
    double sink = 0.0;
    for (auto _ : state) {
        sink += noncentral_chi2_cdf(z, {41.0, lambda});
        z += 1e-6;
    }
    benchmark::DoNotOptimize(sink);
}
BENCHMARK(BM_NoncentralChi2Cdf)->Arg(150)->Arg(2000)->Arg(100000);

void BM_StdNormalQuantile(benchmark::State& state) {
    double p = 1e-9;
    double sink = 0.0;
    for (auto _ : state) {
        sink += std_normal_quantile(p);
        p += 1e-7;
        if (p >= 1.0)
            p = 1e-9;
    }
    benchmark::DoNotOptimize(sink);
}
BENCHMARK(BM_StdNormalQuantile);

void BM_SecretKeyRatio(benchmark::State& state) {
    SchemeParams s{1024, 1.45, -0.55, 0};
    const ChannelParams ch{1e-3, 1.34};
    const ModulationParams mod{134.0};
    double sink = 0.0;
    for (auto _ : state)
        sink += secret_key_ratio(s, ch, mod).skr;
    benchmark::DoNotOptimize(sink);
}
BENCHMARK(BM_SecretKeyRatio);

// Full protocol trials at the q = 2^10, n = 45 configuration.
void BM_ProtocolTrials(benchmark::State& state) {
    TrialConfig cfg;
    cfg.trials = 16;
    cfg.master_seed = 99;
    cfg.scheme = {1024, 1.45, -0.55, 45};
    cfg.channel = {1e-6, 1200.0};
    cfg.modulation = {1.2e5};
    cfg.threads = unsigned(state.range(0));
    for (auto _ : state) {
        auto tally = run_batch(cfg);
        benchmark::DoNotOptimize(tally.trials);
        cfg.master_seed += 1;
    }
    state.SetItemsProcessed(state.iterations() * cfg.trials);
}
BENCHMARK(BM_ProtocolTrials)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
