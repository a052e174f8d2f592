#include "ippsz/generator.hpp"

#include "ippsz/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace ippsz
{

Assignment planted_solution( const GeneratorSpec& spec )
{
    if ( spec.planted )
        return *spec.planted;
    return Assignment( spec.n, spec.d );
}

namespace
{

using Key = std::vector< std::pair< Var, Color > >;

Key key_of( const Clause& c )
{
    Key k;
    for ( const auto& l : c.literals )
        k.emplace_back( l.var, l.color );
    std::sort( k.begin(), k.end() );
    return k;
}

std::vector< Var > random_subset( Var n, unsigned k, Rng& rng )
{
    std::vector< Var > all( n );
    std::iota( all.begin(), all.end(), Var{ 0 } );
    for ( unsigned i = 0; i < k; ++i )
        std::swap( all[ i ], all[ i + rng.below( n - i ) ] );
    all.resize( k );
    std::sort( all.begin(), all.end() );
    return all;
}

// Uniform over the d^k - 1 tuples on `vars` other than the planted one.
Clause random_clause( const std::vector< Var >& vars, const Assignment& planted, unsigned d, Rng& rng )
{
    for ( ;; )
    {
        Clause c;
        bool differs = false;
        for ( Var v : vars )
        {
            const auto col = static_cast< Color >( 1 + rng.below( d ) );
            differs = differs || col != planted[ v ];
            c.literals.push_back( { v, col } );
        }
        if ( differs )
            return c;
    }
}

// A clause forbidding `w` on a random k-subset that includes a variable
// where `w` departs from the planted assignment.
Clause killing_clause( const Assignment& w, const Assignment& planted, Var n, unsigned k, Rng& rng )
{
    std::vector< Var > off;
    for ( Var v = 0; v < n; ++v )
        if ( w[ v ] != planted[ v ] )
            off.push_back( v );
    const Var pivot = off[ rng.below( off.size() ) ];
    std::vector< Var > vars{ pivot };
    while ( vars.size() < k )
    {
        const auto v = static_cast< Var >( rng.below( n ) );
        if ( std::find( vars.begin(), vars.end(), v ) == vars.end() )
            vars.push_back( v );
    }
    std::sort( vars.begin(), vars.end() );
    Clause c;
    for ( Var v : vars )
        c.literals.push_back( { v, w[ v ] } );
    return c;
}

bool violates( const Assignment& a, const Clause& c )
{
    return std::all_of( c.literals.begin(), c.literals.end(), [ & ]( const auto& l ) { return a[ l.var ] == l.color; } );
}

// Index of the clause whose removal uncovers the fewest non-planted
// assignments once `fresh` is in. Falls back to a uniform pick when the
// space is too large to enumerate.
std::size_t pick_victim( const std::vector< Clause >& clauses, const Clause& fresh, const Assignment& planted,
                         unsigned d, Var n, Rng& rng )
{
    constexpr double kEnumerationLimit = 2e5;
    if ( std::pow( static_cast< double >( d ), n ) > kEnumerationLimit )
        return rng.below( clauses.size() );

    std::vector< std::size_t > sole( clauses.size(), 0 );
    Assignment a( n, 1 );
    for ( ;; )
    {
        if ( a != planted && !violates( a, fresh ) )
        {
            std::size_t hits = 0, last = 0;
            for ( std::size_t i = 0; i < clauses.size() && hits < 2; ++i )
                if ( violates( a, clauses[ i ] ) )
                {
                    ++hits;
                    last = i;
                }
            if ( hits == 1 )
                ++sole[ last ];
        }
        Var v = 0;
        while ( v < n && a[ v ] == d )
            a[ v++ ] = 1;
        if ( v == n )
            break;
        ++a[ v ];
    }

    const auto best = *std::min_element( sole.begin(), sole.end() );
    std::vector< std::size_t > ties;
    for ( std::size_t i = 0; i < sole.size(); ++i )
        if ( sole[ i ] == best )
            ties.push_back( i );
    return ties[ rng.below( ties.size() ) ];
}

} // namespace

Formula generate( const GeneratorSpec& spec )
{
    if ( spec.k > spec.n )
        throw GenerationError( "generate: k exceeds n" );
    const Assignment planted = planted_solution( spec );
    if ( planted.size() != spec.n ||
         std::any_of( planted.begin(), planted.end(), [ & ]( Color c ) { return c < 1 || c > spec.d; } ) )
        throw GenerationError( "generate: planted assignment out of range" );

    if ( spec.mode == Uniqueness::verified )
    {
        const long double need = std::pow( static_cast< long double >( spec.d ), spec.n ) - 1.0L;
        const long double reach =
            spec.m * std::pow( static_cast< long double >( spec.d ), static_cast< long double >( spec.n - spec.k ) );
        if ( reach < need )
            throw GenerationError( "generate: m = " + std::to_string( spec.m ) +
                                   " clauses cannot leave a unique solution (need m * d^(n-k) >= d^n - 1)" );
    }

    // Distinct clauses only.
    const long double distinct = [ & ] {
        long double c = 1.0L;
        for ( unsigned i = 0; i < spec.k; ++i )
            c = c * ( spec.n - i ) / ( i + 1 );
        return c * ( std::pow( static_cast< long double >( spec.d ), spec.k ) - 1.0L );
    }();
    if ( static_cast< long double >( spec.m ) > distinct )
        throw GenerationError( "generate: more clauses requested than distinct clauses exist" );

    Rng rng{ spec.seed };
    std::vector< Clause > clauses;
    std::set< Key > seen;
    while ( clauses.size() < spec.m )
    {
        Clause c = random_clause( random_subset( spec.n, spec.k, rng ), planted, spec.d, rng );
        if ( seen.insert( key_of( c ) ).second )
            clauses.push_back( std::move( c ) );
    }

    Formula f{ spec.d, spec.k, spec.n, clauses };
    if ( spec.mode == Uniqueness::best_effort )
        return f;

    for ( unsigned repair = 0;; ++repair )
    {
        const auto sols = count_solutions( f, kOracleVarLimit, 2 );
        if ( sols.count == 1 )
            return f;
        if ( repair >= spec.max_repairs )
            throw GenerationError( "generate: still " + std::to_string( sols.count ) +
                                   " solutions after " + std::to_string( spec.max_repairs ) +
                                   " clause replacements (n=" + std::to_string( spec.n ) +
                                   ", m=" + std::to_string( spec.m ) + ")" );
        const Assignment& w = sols.witnesses[ 0 ] == planted ? sols.witnesses[ 1 ] : sols.witnesses[ 0 ];
        Clause fresh = killing_clause( w, planted, spec.n, spec.k, rng );
        if ( !seen.insert( key_of( fresh ) ).second )
            continue;
        const std::size_t victim = pick_victim( clauses, fresh, planted, spec.d, spec.n, rng );
        seen.erase( key_of( clauses[ victim ] ) );
        clauses[ victim ] = std::move( fresh );
        f = Formula{ spec.d, spec.k, spec.n, clauses };
    }
}

} // namespace ippsz
