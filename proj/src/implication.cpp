#include "ippsz/implication.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace ippsz
{

Color ColorSet::nth( unsigned i ) const
{
    std::uint64_t b = _bits;
    for ( unsigned j = 0; j < i; ++j )
        b &= b - 1;
    return static_cast< Color >( std::countr_zero( b ) + 1 );
}

std::vector< Color > ColorSet::colors() const
{
    std::vector< Color > out;
    for ( std::uint64_t b = _bits; b != 0; b &= b - 1 )
        out.push_back( static_cast< Color >( std::countr_zero( b ) + 1 ) );
    return out;
}

bool implies( std::span< const ResidualClause > g, Literal u, unsigned d, std::uint64_t guard )
{
    std::vector< Var > vars{ u.var };
    for ( const auto& c : g )
        for ( const auto& l : c.literals )
            vars.push_back( l.var );
    std::sort( vars.begin(), vars.end() );
    vars.erase( std::unique( vars.begin(), vars.end() ), vars.end() );

    if ( saturating_pow( d, vars.size() ) > guard )
        throw std::length_error( "implies: enumeration guard exceeded" );

    Var top = vars.back();
    std::vector< Color > value( top + 1, 1 );
    for ( ;; )
    {
        bool sat = std::all_of( g.begin(), g.end(), [ & ]( const ResidualClause& c ) {
            return std::any_of( c.literals.begin(), c.literals.end(),
                                [ & ]( const Literal& l ) { return value[ l.var ] != l.color; } );
        } );
        if ( sat && value[ u.var ] == u.color )
            return false;

        std::size_t i = 0;
        while ( i < vars.size() && value[ vars[ i ] ] == d )
            value[ vars[ i++ ] ] = 1;
        if ( i == vars.size() )
            return true;
        ++value[ vars[ i ] ];
    }
}

namespace
{

constexpr double kWeightSlack = 1e-9;

// A clause of F restricted by u.var = u.color. G |= (x != c) exactly when G
// restricted this way is unsatisfiable, so the search below looks for small
// unsatisfiable subsets. Minimal unsatisfiable sets are connected in the
// clause/variable incidence graph, which bounds the enumeration.
struct Restricted
{
    std::size_t source;
    std::vector< Literal > literals;
    double weight; // d^-width: fraction of assignments the clause forbids
};

bool shares_var( const Restricted& a, const Restricted& b )
{
    for ( const auto& la : a.literals )
        for ( const auto& lb : b.literals )
            if ( la.var == lb.var )
                return true;
    return false;
}

bool satisfiable( const std::vector< const Restricted* >& set, unsigned d )
{
    std::vector< Var > vars;
    for ( const auto* c : set )
        for ( const auto& l : c->literals )
            vars.push_back( l.var );
    std::sort( vars.begin(), vars.end() );
    vars.erase( std::unique( vars.begin(), vars.end() ), vars.end() );

    // Clause j is checked once its last variable (in `vars` order) is set.
    std::vector< std::vector< std::size_t > > due( vars.size() );
    for ( std::size_t j = 0; j < set.size(); ++j )
    {
        std::size_t last = 0;
        for ( const auto& l : set[ j ]->literals )
            last = std::max( last, static_cast< std::size_t >(
                                       std::lower_bound( vars.begin(), vars.end(), l.var ) -
                                       vars.begin() ) );
        due[ last ].push_back( j );
    }

    std::vector< Color > value( vars.empty() ? 0 : vars.back() + 1, kUnbound );
    auto violated = [ & ]( std::size_t j ) {
        return std::all_of( set[ j ]->literals.begin(), set[ j ]->literals.end(),
                            [ & ]( const Literal& l ) { return value[ l.var ] == l.color; } );
    };
    auto descend = [ & ]( auto& self, std::size_t i ) -> bool {
        if ( i == vars.size() )
            return true;
        for ( Color c = 1; c <= d; ++c )
        {
            value[ vars[ i ] ] = c;
            if ( std::none_of( due[ i ].begin(), due[ i ].end(), violated ) && self( self, i + 1 ) )
                return true;
        }
        value[ vars[ i ] ] = kUnbound;
        return false;
    };
    return descend( descend, 0 );
}

class UnsatSearch
{
public:
    UnsatSearch( std::vector< Restricted > clauses, unsigned d, unsigned strength )
        : _clauses{ std::move( clauses ) }, _d{ d }, _strength{ strength }
    {
        double wmax = 0.0;
        for ( const auto& c : _clauses )
            wmax = std::max( wmax, c.weight );
        // A set of at most D clauses can only be unsatisfiable if the
        // fractions they forbid add up to at least 1.
        const double need = 1.0 - ( strength - 1 ) * wmax - kWeightSlack;
        std::erase_if( _clauses, [ & ]( const Restricted& c ) { return c.weight < need; } );
        _wmax = wmax;

        _adj.resize( _clauses.size() );
        for ( std::size_t i = 0; i < _clauses.size(); ++i )
            for ( std::size_t j = i + 1; j < _clauses.size(); ++j )
                if ( shares_var( _clauses[ i ], _clauses[ j ] ) )
                {
                    _adj[ i ].push_back( j );
                    _adj[ j ].push_back( i );
                }
    }

    std::optional< std::vector< std::size_t > > run()
    {
        for ( std::size_t i = 0; i < _clauses.size(); ++i )
            if ( _clauses[ i ].literals.empty() )
                return std::vector< std::size_t >{ _clauses[ i ].source };

        for ( _size = 1; _size <= _strength; ++_size )
        {
            for ( std::size_t seed = 0; seed < _clauses.size() && !_found; ++seed )
            {
                std::vector< std::size_t > sub{ seed };
                std::vector< std::size_t > ext;
                for ( std::size_t u : _adj[ seed ] )
                    if ( u > seed )
                        ext.push_back( u );
                extend( sub, ext, seed, _clauses[ seed ].weight );
            }
            if ( _found )
            {
                std::vector< std::size_t > witness;
                for ( std::size_t i : _witness )
                    witness.push_back( _clauses[ i ].source );
                std::sort( witness.begin(), witness.end() );
                return witness;
            }
        }
        return std::nullopt;
    }

private:
    bool adjacent_to_sub( std::size_t u, const std::vector< std::size_t >& sub ) const
    {
        for ( std::size_t s : sub )
            if ( s == u || std::find( _adj[ s ].begin(), _adj[ s ].end(), u ) != _adj[ s ].end() )
                return true;
        return false;
    }

    // Connected-subset enumeration in the style of ESU: every connected set
    // of `_size` clauses is visited once, rooted at its smallest index.
    void extend( std::vector< std::size_t >& sub, std::vector< std::size_t > ext, std::size_t seed,
                 double weight )
    {
        if ( _found )
            return;
        if ( weight + ( _size - sub.size() ) * _wmax < 1.0 - kWeightSlack )
            return;
        if ( sub.size() == _size )
        {
            std::vector< const Restricted* > set;
            for ( std::size_t i : sub )
                set.push_back( &_clauses[ i ] );
            if ( !satisfiable( set, _d ) )
            {
                _found = true;
                _witness = sub;
            }
            return;
        }
        while ( !ext.empty() && !_found )
        {
            std::size_t w = ext.back();
            ext.pop_back();
            std::vector< std::size_t > next = ext;
            for ( std::size_t u : _adj[ w ] )
                if ( u > seed && !adjacent_to_sub( u, sub ) &&
                     std::find( next.begin(), next.end(), u ) == next.end() )
                    next.push_back( u );
            sub.push_back( w );
            extend( sub, std::move( next ), seed, weight + _clauses[ w ].weight );
            sub.pop_back();
        }
    }

    std::vector< Restricted > _clauses;
    unsigned _d;
    unsigned _strength;
    double _wmax = 0.0;
    std::vector< std::vector< std::size_t > > _adj;
    std::size_t _size = 0;
    bool _found = false;
    std::vector< std::size_t > _witness;
};

} // namespace

std::optional< std::vector< std::size_t > > d_implies( const Residual& f, Literal u,
                                                       unsigned strength )
{
    if ( strength < 1 || strength > kMaxStrength )
        throw std::invalid_argument( "d_implies: strength D must be in [1, " +
                                     std::to_string( kMaxStrength ) + "]" );
    if ( u.var >= f.n() || u.color < 1 || u.color > f.d() )
        throw std::invalid_argument( "d_implies: literal out of range" );

    std::vector< Restricted > restricted;
    restricted.reserve( f.size() );
    for ( const auto& c : f.clauses() )
    {
        Restricted r{ c.source, {}, 0.0 };
        bool satisfied = false;
        for ( const auto& l : c.literals )
        {
            if ( l.var != u.var )
                r.literals.push_back( l );
            else if ( l.color != u.color )
            {
                satisfied = true;
                break;
            }
        }
        if ( satisfied )
            continue;
        r.weight = std::pow( static_cast< double >( f.d() ), -static_cast< double >( r.literals.size() ) );
        restricted.push_back( std::move( r ) );
    }
    return UnsatSearch{ std::move( restricted ), f.d(), strength }.run();
}

ColorSet plaus( const Residual& f, Var x, unsigned strength )
{
    ColorSet out;
    for ( Color c = 1; c <= f.d(); ++c )
        if ( !d_implies( f, Literal{ x, c }, strength ) )
            out.insert( c );
    return out;
}

PlausibilityOracle::PlausibilityOracle( const Formula& f, unsigned strength, bool cache )
    : _f{ f }, _strength{ strength }, _cache{ cache }
{
    if ( strength < 1 || strength > kMaxStrength )
        throw std::invalid_argument( "PlausibilityOracle: strength D out of range" );
}

std::size_t PlausibilityOracle::cache_size() const
{
    std::shared_lock lock( _mutex );
    return _table.size();
}

std::string PlausibilityOracle::key( const PartialAssignment& alpha, Var x ) const
{
    std::string k;
    k.reserve( alpha.size() + 4 );
    for ( Color c : alpha.raw() )
        k.push_back( static_cast< char >( c ) );
    for ( int shift = 0; shift < 32; shift += 8 )
        k.push_back( static_cast< char >( ( x >> shift ) & 0xff ) );
    return k;
}

ColorSet PlausibilityOracle::plausible( const PartialAssignment& alpha, Var x ) const
{
    if ( !_cache )
        return plaus( simplify( _f, alpha ), x, _strength );

    auto k = key( alpha, x );
    {
        std::shared_lock lock( _mutex );
        if ( auto it = _table.find( k ); it != _table.end() )
            return it->second;
    }
    ColorSet result = plaus( simplify( _f, alpha ), x, _strength );
    std::unique_lock lock( _mutex );
    _table.emplace( std::move( k ), result );
    return result;
}

} // namespace ippsz
