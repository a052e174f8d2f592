#include "ippsz/experiment.hpp"

#include "ippsz/rng.hpp"

#include <chrono>
#include <cmath>

namespace ippsz
{

double AlgorithmStats::rate() const
{
    return trials ? static_cast< double >( successes ) / trials : 0.0;
}

double AlgorithmStats::std_error() const
{
    if ( trials == 0 )
        return 0.0;
    const double r = rate();
    return std::sqrt( r * ( 1.0 - r ) / trials );
}

namespace
{

InstanceResult run_one( const NamedInstance& inst, std::uint64_t index, const ExperimentParams& params )
{
    const Formula& f = inst.formula;
    InstanceResult out;
    out.name = inst.name;
    out.d = f.d();
    out.k = f.k();
    out.n = f.n();
    out.m = f.size();

    const PlausibilityOracle oracle{ f, params.strength, params.cache };
    const std::uint64_t seed = derive_seed( params.seed, index );
    const auto count = static_cast< std::int64_t >( params.trials );
    std::vector< std::uint8_t > ppsz( params.trials, 0 );
    std::vector< std::uint8_t > imp( params.trials, 0 );

    auto trial = [ & ]( std::int64_t t ) {
        const auto u = static_cast< std::uint64_t >( t );
        const auto pl = sample_placement( f.n(), params.theta, derive_seed( seed, 2 * u ) );
        const auto rs = derive_seed( seed, 2 * u + 1 );
        ppsz[ u ] = ppsz_run( oracle, pl, rs ).success() ? 1 : 0;
        imp[ u ] = impatient_run( oracle, pl, rs, params.cutoff ).success() ? 1 : 0;
    };
    if ( params.exec == Exec::openmp )
    {
#pragma omp parallel for schedule( dynamic, 64 )
        for ( std::int64_t t = 0; t < count; ++t )
            trial( t );
    }
    else
    {
        for ( std::int64_t t = 0; t < count; ++t )
            trial( t );
    }

    auto stats = [ & ]( Algorithm a, std::vector< std::uint8_t >& v ) {
        AlgorithmStats s;
        s.algorithm = a;
        s.trials = params.trials;
        for ( auto o : v )
            s.successes += o;
        if ( params.keep_outcomes )
            s.outcomes = std::move( v );
        return s;
    };
    out.algorithms.push_back( stats( Algorithm::ppsz, ppsz ) );
    out.algorithms.push_back( stats( Algorithm::impatient, imp ) );

    if ( f.n() <= params.exact_limit && f.n() <= ExactOracle::kExpectedVarLimit )
    {
        const auto sols = count_solutions( f, kOracleVarLimit, 1 );
        out.unique = sols.count == 1;
        if ( out.unique )
        {
            const auto unique = UniqueInstance::verify( f );
            const ExactOracle exact{ unique, params.strength, true, params.cutoff };
            out.algorithms[ 0 ].exact = exact.expected_ppsz_success();
            out.algorithms[ 1 ].exact = exact.expected_impatient_success( params.theta );
        }
    }
    return out;
}

} // namespace

ExperimentResult run_experiment( const std::vector< NamedInstance >& instances,
                                 const ExperimentParams& params )
{
    ExperimentResult res;
    res.params = params;
    for ( std::size_t i = 0; i < instances.size(); ++i )
    {
        const auto start = std::chrono::steady_clock::now();
        InstanceResult r;
        try
        {
            r = run_one( instances[ i ], i, params );
        }
        catch ( const std::exception& e )
        {
            r.name = instances[ i ].name;
            r.d = instances[ i ].formula.d();
            r.k = instances[ i ].formula.k();
            r.n = instances[ i ].formula.n();
            r.m = instances[ i ].formula.size();
            r.error = e.what();
        }
        r.wall_seconds =
            std::chrono::duration< double >( std::chrono::steady_clock::now() - start ).count();
        res.instances.push_back( std::move( r ) );
    }
    return res;
}

} // namespace ippsz
