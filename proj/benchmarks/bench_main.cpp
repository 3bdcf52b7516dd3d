#include <benchmark/benchmark.h>

#include <random>

#include "dde/losses.hpp"
#include "dde/predictor.hpp"
#include "dde/sampler.hpp"
#include "dde/schedule.hpp"

namespace {

dde::PredictorConfig bench_predictor_config() {
    dde::PredictorConfig pc;
    pc.dim = 2;
    pc.n_classes = 4;
    pc.hidden = 32;
    pc.time_feats = 16;
    pc.n_steps = 1000;
    return pc;
}

void BM_MakeSchedule(benchmark::State& state) {
    for (auto _ : state) {
        dde::Schedule s(1000, 1e-4, 0.02);
        benchmark::DoNotOptimize(s.alpha_bar(1000));
    }
}
BENCHMARK(BM_MakeSchedule);

void BM_PredictorForward(benchmark::State& state) {
    dde::NoisePredictor net(bench_predictor_config());
    net.init_random(7);
    std::vector<double> x{0.3, -0.8};
    for (auto _ : state) {
        auto out = net.predict(x, 500, 1);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_PredictorForward);

void BM_PredictorBackward(benchmark::State& state) {
    dde::NoisePredictor net(bench_predictor_config());
    net.init_random(7);
    std::vector<double> x{0.3, -0.8};
    dde::ForwardCache cache;
    net.predict(x, 500, 1, cache);
    std::vector<double> upstream{1.0, -1.0};
    dde::ParamGradient grad(net.params().size(), 0.0);
    for (auto _ : state) {
        net.backward(upstream, cache, grad);
        benchmark::DoNotOptimize(grad);
    }
}
BENCHMARK(BM_PredictorBackward);

void BM_DdeLoss(benchmark::State& state) {
    dde::Schedule s(1000, 1e-4, 0.02);
    dde::NoisePredictor target(bench_predictor_config());
    target.init_random(7);
    auto reference = target.clone_as_reference();
    dde::CalibrationTable table(1000, 0.1);
    dde::PreferencePair pair;
    pair.class_id = 0;
    pair.x0_w = {2.1, 1.9};
    pair.x0_l = {1.4, 2.6};
    pair.reward_w = -0.1;
    pair.reward_l = -0.7;
    std::vector<double> nw{0.5, -0.2}, nl{-0.9, 0.4};
    for (auto _ : state) {
        auto res = dde::dde_loss(s, target, reference, pair, 500, nw, nl, table, 5000.0);
        benchmark::DoNotOptimize(res);
    }
}
BENCHMARK(BM_DdeLoss);

void BM_DdimSample(benchmark::State& state) {
    dde::Schedule s(1000, 1e-4, 0.02);
    dde::NoisePredictor net(bench_predictor_config());
    net.init_random(7);
    dde::SamplerConfig cfg;
    cfg.n_steps = static_cast<int>(state.range(0));
    std::mt19937_64 rng(1);
    for (auto _ : state) {
        auto x = dde::sample(net, s, 0, cfg, rng);
        benchmark::DoNotOptimize(x);
    }
}
BENCHMARK(BM_DdimSample)->Arg(20)->Arg(50)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
