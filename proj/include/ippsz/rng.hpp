#pragma once

// Seed derivation and a small counter-free generator. Every Monte-Carlo
// trial derives its own stream from (master seed, trial index), so results
// do not depend on how trials are scheduled across threads.

#include <cstdint>
#include <limits>

namespace ippsz
{

[[nodiscard]] constexpr std::uint64_t mix64( std::uint64_t z )
{
    z = ( z ^ ( z >> 30 ) ) * 0xbf58476d1ce4e5b9ULL;
    z = ( z ^ ( z >> 27 ) ) * 0x94d049bb133111ebULL;
    return z ^ ( z >> 31 );
}

[[nodiscard]] constexpr std::uint64_t derive_seed( std::uint64_t master, std::uint64_t index )
{
    return mix64( master ^ mix64( index + 0x9e3779b97f4a7c15ULL ) );
}

[[nodiscard]] constexpr std::uint64_t derive_seed( std::uint64_t master, std::uint64_t a,
                                                   std::uint64_t b )
{
    return derive_seed( derive_seed( master, a ), b );
}

// SplitMix64; satisfies UniformRandomBitGenerator.
class Rng
{
public:
    using result_type = std::uint64_t;

    explicit constexpr Rng( std::uint64_t seed ) : _state{ seed } {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits< result_type >::max(); }

    constexpr result_type operator()()
    {
        _state += 0x9e3779b97f4a7c15ULL;
        return mix64( _state );
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast< double >( ( *this )() >> 11 ) * 0x1.0p-53; }

    bool bernoulli( double prob ) { return uniform() < prob; }

    // Uniform on [0, bound), bound >= 1 (Lemire's method with rejection).
    std::uint64_t below( std::uint64_t bound )
    {
        unsigned __int128 m = static_cast< unsigned __int128 >( ( *this )() ) * bound;
        auto low = static_cast< std::uint64_t >( m );
        if ( low < bound )
        {
            const std::uint64_t threshold = ( 0 - bound ) % bound;
            while ( low < threshold )
            {
                m = static_cast< unsigned __int128 >( ( *this )() ) * bound;
                low = static_cast< std::uint64_t >( m );
            }
        }
        return static_cast< std::uint64_t >( m >> 64 );
    }

private:
    std::uint64_t _state;
};

} // namespace ippsz
