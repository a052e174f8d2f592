// Serial reference vs OpenMP for the trial-parallel kernels.

#include "ippsz/cct.hpp"
#include "ippsz/experiment.hpp"
#include "ippsz/generator.hpp"
#include "ippsz/solver.hpp"

#include <benchmark/benchmark.h>

using namespace ippsz;

namespace
{

Exec exec_of( const benchmark::State& state )
{
    return state.range( 0 ) == 0 ? Exec::serial : Exec::openmp;
}

Formula instance( Var n, std::size_t m )
{
    GeneratorSpec spec;
    spec.n = n;
    spec.m = m;
    spec.seed = 1;
    return generate( spec );
}

void BM_CutProbability( benchmark::State& state )
{
    AbstractTreeSpec spec{ 3, 3, 9 };
    spec.impatient = true;
    spec.theta = 0.4;
    for ( auto _ : state )
        benchmark::DoNotOptimize( mc_cut_probability( spec, 0.5, 200'000, 7, exec_of( state ) ).mean );
    state.SetItemsProcessed( state.iterations() * 200'000 );
}

void BM_SdkMonteCarlo( benchmark::State& state )
{
    for ( auto _ : state )
        benchmark::DoNotOptimize( mc_s_dk( 3, 3, 7, 8, 20'000, 3, exec_of( state ) ).mean );
    state.SetItemsProcessed( state.iterations() * 8 * 20'000 );
}

void BM_Solve( benchmark::State& state )
{
    const auto f = instance( 12, 200 );
    SolveParams p;
    p.theta = 0.1;
    p.seed = 11;
    p.max_repetitions = 1'000'000;
    p.exec = exec_of( state );
    for ( auto _ : state )
        benchmark::DoNotOptimize( solve( f, p ).repetitions );
}

void BM_Experiment( benchmark::State& state )
{
    const std::vector< NamedInstance > inst{ { "a", instance( 8, 120 ) } };
    ExperimentParams p;
    p.trials = 5'000;
    p.theta = 0.2;
    p.exact_limit = 0;
    p.exec = exec_of( state );
    for ( auto _ : state )
        benchmark::DoNotOptimize( run_experiment( inst, p ).instances.size() );
    state.SetItemsProcessed( state.iterations() * 5'000 );
}

} // namespace

// Argument 0 runs the serial reference, 1 the OpenMP kernel.
BENCHMARK( BM_CutProbability )->Arg( 0 )->Arg( 1 )->Unit( benchmark::kMillisecond )->UseRealTime();
BENCHMARK( BM_SdkMonteCarlo )->Arg( 0 )->Arg( 1 )->Unit( benchmark::kMillisecond )->UseRealTime();
BENCHMARK( BM_Solve )->Arg( 0 )->Arg( 1 )->Unit( benchmark::kMillisecond )->UseRealTime();
BENCHMARK( BM_Experiment )->Arg( 0 )->Arg( 1 )->Unit( benchmark::kMillisecond )->UseRealTime();

BENCHMARK_MAIN();
