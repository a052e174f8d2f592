#include "ippsz/independence.hpp"

#include "ippsz/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ippsz
{

bool IndependenceReport::holds() const
{
    return left <= right + 3.0 * std::sqrt( left_se * left_se + right_se * right_se );
}

namespace
{

struct Sample
{
    double p = 0.0;
    bool marked = false;
    ColorSet plausible;
};

std::vector< Sample > draw( const ExactOracle& oracle, Var x, double theta, std::uint64_t trials,
                            std::uint64_t seed )
{
    const Var n = oracle.instance().formula().n();
    std::vector< Sample > out( trials );
    const auto count = static_cast< std::int64_t >( trials );
#pragma omp parallel for schedule( dynamic, 16 )
    for ( std::int64_t t = 0; t < count; ++t )
    {
        const auto pl = sample_placement( n, theta, derive_seed( seed, static_cast< std::uint64_t >( t ) ) );
        out[ t ] = { pl.positions[ x ], pl.marked( x ), oracle.indicators( pl, x ).impatient };
    }
    return out;
}

double score( bool marked, unsigned a )
{
    return std::log2( std::max( marked ? 2.0 : 1.0, static_cast< double >( a ) ) );
}

void mean_se( const std::vector< double >& v, double& mean, double& se )
{
    mean = 0.0;
    for ( double s : v )
        mean += s;
    mean /= v.size();
    double var = 0.0;
    for ( double s : v )
        var += ( s - mean ) * ( s - mean );
    se = v.size() > 1 ? std::sqrt( var / ( v.size() - 1 ) / v.size() ) : 0.0;
}

} // namespace

IndependenceReport verify_independence_upper_bound( const ExactOracle& oracle, Var x, double theta,
                                                    std::uint64_t trials, std::uint64_t seed,
                                                    unsigned bins )
{
    if ( trials < 2 || bins < 1 )
        throw std::invalid_argument( "verify_independence_upper_bound: need trials >= 2, bins >= 1" );
    const unsigned d = oracle.instance().formula().d();
    auto bin_of = [ & ]( double p ) { return std::min( bins - 1, static_cast< unsigned >( p * bins ) ); };

    const auto calib = draw( oracle, x, theta, trials, derive_seed( seed, 0 ) );
    std::vector< std::vector< double > > hits( bins, std::vector< double >( d + 1, 0.0 ) );
    std::vector< double > total( bins, 0.0 );
    for ( const auto& s : calib )
    {
        const unsigned b = bin_of( s.p );
        total[ b ] += 1.0;
        for ( Color c = 1; c <= d; ++c )
            hits[ b ][ c ] += s.plausible.contains( c ) ? 1.0 : 0.0;
    }

    const auto eval = draw( oracle, x, theta, trials, derive_seed( seed, 1 ) );
    std::vector< double > left( trials );
    std::vector< double > right( trials );
    for ( std::size_t t = 0; t < eval.size(); ++t )
    {
        const auto& s = eval[ t ];
        const unsigned b = bin_of( s.p );
        left[ t ] = score( s.marked, s.plausible.size() );
        Rng rng{ derive_seed( seed, 2, t ) };
        unsigned a = 0;
        for ( Color c = 1; c <= d; ++c )
        {
            const double marginal = total[ b ] > 0.0 ? hits[ b ][ c ] / total[ b ] : 1.0;
            a += rng.bernoulli( marginal ) ? 1 : 0;
        }
        right[ t ] = score( s.marked, a );
    }

    IndependenceReport r;
    r.trials = trials;
    r.bins = bins;
    mean_se( left, r.left, r.left_se );
    mean_se( right, r.right, r.right_se );
    return r;
}

} // namespace ippsz
