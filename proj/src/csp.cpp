#include "ippsz/csp.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

namespace ippsz
{

std::size_t PartialAssignment::bound_count() const
{
    return static_cast< std::size_t >(
        std::count_if( _colors.begin(), _colors.end(), []( Color c ) { return c != kUnbound; } ) );
}

std::vector< Var > PartialAssignment::bound_vars() const
{
    std::vector< Var > out;
    for ( Var v = 0; v < size(); ++v )
        if ( is_bound( v ) )
            out.push_back( v );
    return out;
}

void PartialAssignment::bind( Var v, Color c )
{
    if ( v >= size() )
        throw std::out_of_range( "PartialAssignment::bind: variable out of range" );
    if ( c == kUnbound )
        throw std::invalid_argument( "PartialAssignment::bind: color must be >= 1" );
    _colors[ v ] = c;
}

Formula::Formula( unsigned d, unsigned k, Var n, std::vector< Clause > clauses )
    : _d{ d }, _k{ k }, _n{ n }
{
    if ( d < 2 || d > kMaxDomain )
        throw std::invalid_argument( "Formula: d must be in [2, 64]" );
    if ( k < 2 )
        throw std::invalid_argument( "Formula: k must be >= 2" );
    for ( auto& c : clauses )
        add( std::move( c ) );
}

void Formula::check( const Clause& c ) const
{
    if ( c.width() > _k )
        throw std::invalid_argument( "Formula: clause wider than k" );
    for ( std::size_t i = 0; i < c.literals.size(); ++i )
    {
        const auto& lit = c.literals[ i ];
        if ( lit.var >= _n )
            throw std::invalid_argument( "Formula: variable out of range" );
        if ( lit.color < 1 || lit.color > _d )
            throw std::invalid_argument( "Formula: color out of range" );
        for ( std::size_t j = 0; j < i; ++j )
            if ( c.literals[ j ].var == lit.var )
                throw std::invalid_argument( "Formula: variable repeated within a clause" );
    }
}

void Formula::add( Clause c )
{
    check( c );
    _clauses.push_back( std::move( c ) );
}

bool Residual::has_empty_clause() const
{
    return std::any_of( _clauses.begin(), _clauses.end(),
                        []( const ResidualClause& c ) { return c.empty(); } );
}

namespace
{

void check_full( std::span< const Color > assignment, Var n, unsigned d )
{
    if ( assignment.size() != n )
        throw std::invalid_argument( "satisfies: assignment does not bind every variable" );
    for ( Color c : assignment )
        if ( c < 1 || c > d )
            throw std::invalid_argument( "satisfies: color out of range" );
}

template < typename Lits >
bool clause_satisfied( const Lits& literals, std::span< const Color > assignment )
{
    return std::any_of( literals.begin(), literals.end(),
                        [ & ]( const Literal& l ) { return assignment[ l.var ] != l.color; } );
}

template < typename ClauseRange >
std::vector< ResidualClause > simplify_clauses( const ClauseRange& clauses,
                                                const PartialAssignment& alpha, auto source_of,
                                                auto literals_of )
{
    std::vector< ResidualClause > out;
    out.reserve( clauses.size() );
    for ( std::size_t i = 0; i < clauses.size(); ++i )
    {
        const auto& lits = literals_of( clauses[ i ] );
        ResidualClause rc{ source_of( clauses[ i ], i ), {} };
        bool satisfied = false;
        for ( const auto& lit : lits )
        {
            if ( !alpha.is_bound( lit.var ) )
                rc.literals.push_back( lit );
            else if ( alpha[ lit.var ] != lit.color )
            {
                satisfied = true;
                break;
            }
        }
        if ( !satisfied )
            out.push_back( std::move( rc ) );
    }
    return out;
}

} // namespace

bool satisfies( std::span< const Color > assignment, const Formula& f )
{
    check_full( assignment, f.n(), f.d() );
    return std::all_of( f.clauses().begin(), f.clauses().end(), [ & ]( const Clause& c ) {
        return clause_satisfied( c.literals, assignment );
    } );
}

bool satisfies( std::span< const Color > assignment, const Residual& f )
{
    check_full( assignment, f.n(), f.d() );
    return std::all_of( f.clauses().begin(), f.clauses().end(), [ & ]( const ResidualClause& c ) {
        return clause_satisfied( c.literals, assignment );
    } );
}

Residual simplify( const Formula& f, const PartialAssignment& alpha )
{
    if ( alpha.size() != f.n() )
        throw std::invalid_argument( "simplify: assignment size mismatch" );
    return Residual{ f.d(), f.n(),
                     simplify_clauses(
                         f.clauses(), alpha, []( const Clause&, std::size_t i ) { return i; },
                         []( const Clause& c ) -> const auto& { return c.literals; } ) };
}

Residual simplify( const Residual& f, const PartialAssignment& alpha )
{
    if ( alpha.size() != f.n() )
        throw std::invalid_argument( "simplify: assignment size mismatch" );
    return Residual{ f.d(), f.n(),
                     simplify_clauses(
                         f.clauses(), alpha,
                         []( const ResidualClause& c, std::size_t ) { return c.source; },
                         []( const ResidualClause& c ) -> const auto& { return c.literals; } ) };
}

std::uint64_t saturating_pow( std::uint64_t base, std::uint64_t e )
{
    std::uint64_t r = 1;
    for ( std::uint64_t i = 0; i < e; ++i )
    {
        if ( base != 0 && r > std::numeric_limits< std::uint64_t >::max() / base )
            return std::numeric_limits< std::uint64_t >::max();
        r *= base;
    }
    return r;
}

namespace
{

// Depth-first enumeration in variable order; a clause is checked as soon as
// its highest variable is assigned.
class Counter
{
public:
    Counter( const Formula& f, std::size_t witness_cap )
        : _f{ f }, _cap{ witness_cap }, _by_last( f.n() ), _assignment( f.n(), kUnbound )
    {
        for ( std::size_t i = 0; i < f.size(); ++i )
        {
            const auto& lits = f[ i ].literals;
            if ( lits.empty() )
            {
                _has_empty = true;
                continue;
            }
            Var last = 0;
            for ( const auto& l : lits )
                last = std::max( last, l.var );
            _by_last[ last ].push_back( i );
        }
    }

    SolutionSet run()
    {
        if ( !_has_empty )
            descend( 0 );
        return std::move( _result );
    }

private:
    void descend( Var v )
    {
        if ( v == _f.n() )
        {
            ++_result.count;
            if ( _result.witnesses.size() < _cap )
                _result.witnesses.push_back( _assignment );
            return;
        }
        for ( Color c = 1; c <= _f.d(); ++c )
        {
            _assignment[ v ] = c;
            bool ok = true;
            for ( std::size_t ci : _by_last[ v ] )
                if ( !clause_satisfied( _f[ ci ].literals, _assignment ) )
                {
                    ok = false;
                    break;
                }
            if ( ok )
                descend( v + 1 );
        }
        _assignment[ v ] = kUnbound;
    }

    const Formula& _f;
    std::size_t _cap;
    bool _has_empty = false;
    std::vector< std::vector< std::size_t > > _by_last;
    Assignment _assignment;
    SolutionSet _result;
};

} // namespace

SolutionSet count_solutions( const Formula& f, Var cap_n, std::size_t witness_cap )
{
    if ( f.n() > cap_n )
        throw std::invalid_argument( "count_solutions: n = " + std::to_string( f.n() ) +
                                     " exceeds the oracle limit " + std::to_string( cap_n ) );
    if ( saturating_pow( f.d(), f.n() ) > kEnumerationGuard )
        throw std::invalid_argument( "count_solutions: d^n exceeds the enumeration guard" );
    return Counter{ f, witness_cap }.run();
}

UniqueInstance UniqueInstance::verify( Formula f, Var cap_n )
{
    auto sols = count_solutions( f, cap_n, 2 );
    if ( sols.count != 1 )
        throw std::invalid_argument( "instance has " + std::to_string( sols.count ) +
                                     " satisfying assignments, expected exactly one" );
    return UniqueInstance{ std::move( f ), std::move( sols.witnesses.front() ) };
}

ParseError::ParseError( std::size_t line, const std::string& what )
    : std::runtime_error( "line " + std::to_string( line ) + ": " + what ), _line{ line } {}

namespace
{

template < typename T >
bool parse_number( std::string_view s, T& out )
{
    auto [ ptr, ec ] = std::from_chars( s.data(), s.data() + s.size(), out );
    return ec == std::errc{} && ptr == s.data() + s.size();
}

std::vector< std::string_view > split_ws( std::string_view line )
{
    std::vector< std::string_view > tokens;
    std::size_t i = 0;
    while ( i < line.size() )
    {
        while ( i < line.size() && std::isspace( static_cast< unsigned char >( line[ i ] ) ) )
            ++i;
        std::size_t j = i;
        while ( j < line.size() && !std::isspace( static_cast< unsigned char >( line[ j ] ) ) )
            ++j;
        if ( j > i )
            tokens.push_back( line.substr( i, j - i ) );
        i = j;
    }
    return tokens;
}

unsigned header_field( std::size_t line_no, std::string_view token, std::string_view key )
{
    if ( token.size() <= key.size() + 1 || token.substr( 0, key.size() ) != key ||
         token[ key.size() ] != '=' )
        throw ParseError( line_no, "expected '" + std::string( key ) + "=<int>' in header" );
    unsigned value = 0;
    if ( !parse_number( token.substr( key.size() + 1 ), value ) )
        throw ParseError( line_no, "malformed header field '" + std::string( token ) + "'" );
    return value;
}

} // namespace

Formula parse_mvcsp( std::string_view text )
{
    bool have_header = false;
    unsigned d = 0, k = 0, m = 0;
    Var n = 0;
    std::vector< Clause > clauses;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while ( pos <= text.size() )
    {
        std::size_t end = text.find( '\n', pos );
        if ( end == std::string_view::npos )
            end = text.size();
        std::string_view line = text.substr( pos, end - pos );
        pos = end + 1;
        ++line_no;

        auto tokens = split_ws( line );
        if ( tokens.empty() || tokens[ 0 ] == "c" || tokens[ 0 ].front() == 'c' )
            continue;

        if ( tokens[ 0 ] == "p" )
        {
            if ( have_header )
                throw ParseError( line_no, "duplicate header" );
            if ( tokens.size() != 6 || tokens[ 1 ] != "mvcsp" )
                throw ParseError( line_no, "expected 'p mvcsp d=<d> k=<k> n=<n> m=<m>'" );
            d = header_field( line_no, tokens[ 2 ], "d" );
            k = header_field( line_no, tokens[ 3 ], "k" );
            n = header_field( line_no, tokens[ 4 ], "n" );
            m = header_field( line_no, tokens[ 5 ], "m" );
            if ( d < 2 || d > kMaxDomain )
                throw ParseError( line_no, "d must be in [2, 64]" );
            if ( k < 2 )
                throw ParseError( line_no, "k must be >= 2" );
            have_header = true;
            continue;
        }

        if ( !have_header )
            throw ParseError( line_no, "clause before header" );
        if ( tokens.back() != "0" )
            throw ParseError( line_no, "clause line must end with 0" );
        if ( tokens.size() - 1 != k )
            throw ParseError( line_no, "clause has " + std::to_string( tokens.size() - 1 ) +
                                           " literals, expected k = " + std::to_string( k ) );
        Clause clause;
        for ( std::size_t t = 0; t + 1 < tokens.size(); ++t )
        {
            auto tok = tokens[ t ];
            auto colon = tok.find( ':' );
            Var var1 = 0;
            Color color = 0;
            if ( colon == std::string_view::npos || !parse_number( tok.substr( 0, colon ), var1 ) ||
                 !parse_number( tok.substr( colon + 1 ), color ) )
                throw ParseError( line_no, "malformed literal '" + std::string( tok ) + "'" );
            if ( var1 < 1 || var1 > n )
                throw ParseError( line_no, "variable " + std::to_string( var1 ) + " out of range" );
            if ( color < 1 || color > d )
                throw ParseError( line_no, "color " + std::to_string( color ) + " out of range" );
            for ( const auto& l : clause.literals )
                if ( l.var == var1 - 1 )
                    throw ParseError( line_no, "variable " + std::to_string( var1 ) +
                                                   " repeated within a clause" );
            clause.literals.push_back( Literal{ var1 - 1, color } );
        }
        clauses.push_back( std::move( clause ) );
    }

    if ( !have_header )
        throw ParseError( line_no, "missing header" );
    if ( clauses.size() != m )
        throw ParseError( line_no, "header announces m = " + std::to_string( m ) + " clauses, found " +
                                       std::to_string( clauses.size() ) );
    return Formula{ d, k, n, std::move( clauses ) };
}

Formula read_mvcsp( const std::string& path )
{
    std::ifstream in( path );
    if ( !in )
        throw std::runtime_error( "cannot open " + path );
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_mvcsp( ss.str() );
}

std::string serialize_mvcsp( const Formula& f )
{
    std::ostringstream out;
    out << "p mvcsp d=" << f.d() << " k=" << f.k() << " n=" << f.n() << " m=" << f.size() << '\n';
    for ( const auto& c : f.clauses() )
    {
        for ( const auto& l : c.literals )
            out << l.var + 1 << ':' << l.color << ' ';
        out << "0\n";
    }
    return out.str();
}

void write_mvcsp( const std::string& path, const Formula& f )
{
    std::ofstream out( path );
    if ( !out )
        throw std::runtime_error( "cannot write " + path );
    out << serialize_mvcsp( f );
}

} // namespace ippsz
