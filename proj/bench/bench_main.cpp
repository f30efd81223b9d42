#include <random>

#include <benchmark/benchmark.h>

#include "crane/harness.hpp"
#include "crane/model.hpp"
#include "crane/mpc.hpp"
#include "crane/qp.hpp"

using namespace crane;

namespace {

struct RandomQp {
    Eigen::MatrixXd H, W;
    Eigen::VectorXd g, w;
};

RandomQp random_qp(int n, int m, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N;
    RandomQp q;
    Eigen::MatrixXd R(n, n);
    for (int i = 0; i < n * n; ++i)
        R.data()[i] = N(rng);
    q.H = R * R.transpose() + n * Eigen::MatrixXd::Identity(n, n);
    q.g.resize(n);
    q.W.resize(m, n);
    q.w.resize(m);
    for (int i = 0; i < n; ++i)
        q.g[i] = 3 * N(rng);
    for (int i = 0; i < m * n; ++i)
        q.W.data()[i] = N(rng);
    for (int i = 0; i < m; ++i)
        q.w[i] = std::abs(N(rng));
    return q;
}

void BM_RunBatch(benchmark::State& st)
{
    std::vector<ScenarioConfig> cfgs;
    for (int sc = 1; sc <= 3; ++sc)
        for (auto c : {ControllerKind::Mpc, ControllerKind::Sfb})
            cfgs.push_back(ScenarioConfig::canonical(sc, c, "fast", 0.8));
    const bool parallel = st.range(0) != 0;
    for (auto _ : st)
        benchmark::DoNotOptimize(run_batch(cfgs, parallel));
}
BENCHMARK(BM_RunBatch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_QpEnumerate(benchmark::State& st)
{
    const RandomQp q = random_qp(6, 12, 7);
    const bool parallel = st.range(0) != 0;
    for (auto _ : st)
        benchmark::DoNotOptimize(solve_qp_enumerate(q.H, q.g, q.W, q.w, 1e-9, parallel));
}
BENCHMARK(BM_QpEnumerate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SolveQp(benchmark::State& st)
{
    const RandomQp q = random_qp(static_cast<int>(st.range(0)), static_cast<int>(2 * st.range(0)), 11);
    for (auto _ : st)
        benchmark::DoNotOptimize(solve_qp(q.H, q.g, q.W, q.w));
}
BENCHMARK(BM_SolveQp)->Arg(6)->Arg(12)->Arg(24);

void BM_MpcStep(benchmark::State& st)
{
    const DiscretePlantModel model = model_from_params(CraneParameters::laboratory(0.8), 0.01);
    MpcController ctl(model);
    Vec6 x = Vec6::Zero();
    x[4] = 0.25;
    std::vector<Eigen::Vector3d> yref(ctl.config().Hp, Eigen::Vector3d(0.1, 0.05, 0.3));
    for (auto _ : st) {
        ctl.reset();
        benchmark::DoNotOptimize(ctl.step(x, yref, Eigen::Vector3d::Zero()));
    }
}
BENCHMARK(BM_MpcStep);

}  // namespace

BENCHMARK_MAIN();
