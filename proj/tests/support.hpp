#pragma once

#include "ippsz/csp.hpp"
#include "ippsz/generator.hpp"
#include "ippsz/rng.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

namespace ippsz::testing
{

inline Clause clause( std::initializer_list< Literal > lits ) { return Clause{ lits }; }

// Uniform random clauses: k distinct variables, independent uniform colors.
inline Formula random_formula( unsigned d, unsigned k, Var n, std::size_t m, std::uint64_t seed )
{
    Rng rng{ seed };
    Formula f{ d, k, n };
    std::vector< Var > vars( n );
    std::iota( vars.begin(), vars.end(), Var{ 0 } );
    for ( std::size_t i = 0; i < m; ++i )
    {
        for ( unsigned j = 0; j < k; ++j )
            std::swap( vars[ j ], vars[ j + rng.below( n - j ) ] );
        Clause c;
        for ( unsigned j = 0; j < k; ++j )
            c.literals.push_back( { vars[ j ], static_cast< Color >( 1 + rng.below( d ) ) } );
        f.add( c );
    }
    return f;
}

// Uniformly random partial assignment binding each variable with probability 1/2.
inline PartialAssignment random_partial( Var n, unsigned d, Rng& rng )
{
    PartialAssignment a{ n };
    for ( Var v = 0; v < n; ++v )
        if ( rng.bernoulli( 0.5 ) )
            a.bind( v, static_cast< Color >( 1 + rng.below( d ) ) );
    return a;
}

// Verified unique planted instances with solution (d, ..., d).
inline std::vector< Formula > unique_formulas( std::size_t count, unsigned d, unsigned k, Var n,
                                               std::size_t m, std::uint64_t seed )
{
    std::vector< Formula > out;
    for ( std::uint64_t s = 0; out.size() < count && s < 50 * count; ++s )
    {
        GeneratorSpec spec;
        spec.d = d;
        spec.k = k;
        spec.n = n;
        spec.m = m;
        spec.seed = derive_seed( seed, s );
        try
        {
            out.push_back( generate( spec ) );
        }
        catch ( const GenerationError& )
        {
        }
    }
    return out;
}

// The small worked example: root clause (x y z != 1 3 3), with clauses
// (y u v != 1 3 3), (y a b != 2 3 3), (z e w != 1 3 3), (z r s != 2 3 3).
// The all-3 assignment satisfies it.
namespace ex
{
inline constexpr Var x = 0, y = 1, z = 2, u = 3, v = 4, a = 5, b = 6, e = 7, w = 8, r = 9, s = 10;
inline constexpr Var n = 11;

inline Formula formula()
{
    return Formula{ 3,
                    3,
                    n,
                    { clause( { { x, 1 }, { y, 3 }, { z, 3 } } ),
                      clause( { { y, 1 }, { u, 3 }, { v, 3 } } ),
                      clause( { { y, 2 }, { a, 3 }, { b, 3 } } ),
                      clause( { { z, 1 }, { e, 3 }, { w, 3 } } ),
                      clause( { { z, 2 }, { r, 3 }, { s, 3 } } ) } };
}

inline Assignment solution() { return Assignment( n, 3 ); }

// r, s, u, v, x, z, y below theta, then e, w, a, b.
inline std::vector< Var > order() { return { r, s, u, v, x, z, y, e, w, a, b }; }
inline constexpr std::size_t below_theta = 7;
} // namespace ex

} // namespace ippsz::testing
