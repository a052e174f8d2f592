#pragma once

// D-implication: a literal u is D-implied by a formula F when some subset of
// at most D clauses of F implies u. Plaus(x, F, D) is the set of colors c for
// which (x != c) is not D-implied.

#include "ippsz/csp.hpp"

#include <bit>
#include <cstdint>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace ippsz
{

inline constexpr unsigned kMaxStrength = 4;

// Set of colors in [1, 64], bit (c - 1) set for color c.
class ColorSet
{
public:
    constexpr ColorSet() = default;
    constexpr explicit ColorSet( std::uint64_t bits ) : _bits{ bits } {}

    static constexpr ColorSet all( unsigned d )
    {
        return ColorSet{ d >= 64 ? ~std::uint64_t{ 0 } : ( std::uint64_t{ 1 } << d ) - 1 };
    }

    [[nodiscard]] constexpr bool contains( Color c ) const { return ( _bits >> ( c - 1 ) ) & 1U; }
    [[nodiscard]] constexpr unsigned size() const { return static_cast< unsigned >( std::popcount( _bits ) ); }
    [[nodiscard]] constexpr bool empty() const { return _bits == 0; }
    [[nodiscard]] constexpr std::uint64_t bits() const { return _bits; }

    constexpr void insert( Color c ) { _bits |= std::uint64_t{ 1 } << ( c - 1 ); }
    constexpr void erase( Color c ) { _bits &= ~( std::uint64_t{ 1 } << ( c - 1 ) ); }

    // The i-th smallest color, 0 <= i < size().
    [[nodiscard]] Color nth( unsigned i ) const;
    [[nodiscard]] std::vector< Color > colors() const;
    [[nodiscard]] constexpr bool subset_of( ColorSet other ) const { return ( _bits & ~other._bits ) == 0; }

    friend constexpr bool operator==( ColorSet, ColorSet ) = default;

private:
    std::uint64_t _bits = 0;
};

// Does the clause set `g` imply `u`? Decided by enumerating every assignment
// of vbl(g) and u.var; throws std::length_error past `guard` assignments.
[[nodiscard]] bool implies( std::span< const ResidualClause > g, Literal u, unsigned d,
                            std::uint64_t guard = kEnumerationGuard );

// Minimal-size witness (input clause indices) for F |=_D u, if one exists.
[[nodiscard]] std::optional< std::vector< std::size_t > > d_implies( const Residual& f, Literal u,
                                                                     unsigned strength );

[[nodiscard]] ColorSet plaus( const Residual& f, Var x, unsigned strength );

// Plausible colors for variables of one fixed formula under varying partial
// assignments. With caching enabled, results are memoized per (assignment,
// variable); the table is safe for concurrent readers and writers.
class PlausibilityOracle
{
public:
    PlausibilityOracle( const Formula& f, unsigned strength, bool cache = false );

    PlausibilityOracle( const PlausibilityOracle& ) = delete;
    PlausibilityOracle& operator=( const PlausibilityOracle& ) = delete;

    [[nodiscard]] const Formula& formula() const { return _f; }
    [[nodiscard]] unsigned strength() const { return _strength; }
    [[nodiscard]] bool caching() const { return _cache; }
    [[nodiscard]] std::size_t cache_size() const;

    [[nodiscard]] ColorSet plausible( const PartialAssignment& alpha, Var x ) const;

private:
    [[nodiscard]] std::string key( const PartialAssignment& alpha, Var x ) const;

    const Formula& _f;
    unsigned _strength;
    bool _cache;
    mutable std::shared_mutex _mutex;
    mutable std::unordered_map< std::string, ColorSet > _table;
};

} // namespace ippsz
