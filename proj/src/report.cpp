#include "ippsz/report.hpp"

#include <json.hpp>

#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ippsz
{

using Json = nlohmann::ordered_json;

Format parse_format( std::string_view name )
{
    if ( name == "json" )
        return Format::json;
    if ( name == "csv" )
        return Format::csv;
    if ( name == "markdown" || name == "md" )
        return Format::markdown;
    throw std::invalid_argument( "unknown format: " + std::string( name ) );
}

const char* to_string( Format f )
{
    switch ( f )
    {
    case Format::json:
        return "json";
    case Format::csv:
        return "csv";
    case Format::markdown:
        return "markdown";
    }
    return "?";
}

const std::vector< std::string >& csv_columns()
{
    static const std::vector< std::string > cols{ "instance", "d",    "k",         "n",
                                                  "m",        "algorithm", "trials", "successes",
                                                  "rate",     "stderr",    "exact",  "s_dk",
                                                  "bound" };
    return cols;
}

namespace
{

std::string num( double v )
{
    char buf[ 32 ];
    std::snprintf( buf, sizeof buf, "%.10g", v );
    return buf;
}

// Exponent summary per (d, k) at the experiment's theta, in first-seen order.
std::vector< ExponentReport > summaries( const ExperimentResult& r )
{
    std::vector< ExponentReport > out;
    for ( const auto& inst : r.instances )
    {
        if ( inst.d < 2 || inst.k < 2 )
            continue;
        bool have = false;
        for ( const auto& e : out )
            have = have || ( e.d == inst.d && e.k == inst.k );
        if ( have )
            continue;
        ExponentParams p;
        p.d = inst.d;
        p.k = inst.k;
        p.theta = r.params.theta;
        out.push_back( evaluate_exponent( p ) );
    }
    return out;
}

const ExponentReport* find( const std::vector< ExponentReport >& s, unsigned d, unsigned k )
{
    for ( const auto& e : s )
        if ( e.d == d && e.k == k )
            return &e;
    return nullptr;
}

std::vector< std::vector< std::string > > rows( const ExperimentResult& r )
{
    const auto sums = summaries( r );
    std::vector< std::vector< std::string > > out;
    for ( const auto& inst : r.instances )
        for ( const auto& a : inst.algorithms )
        {
            const auto* e = find( sums, inst.d, inst.k );
            out.push_back( { inst.name, std::to_string( inst.d ), std::to_string( inst.k ),
                             std::to_string( inst.n ), std::to_string( inst.m ), to_string( a.algorithm ),
                             std::to_string( a.trials ), std::to_string( a.successes ), num( a.rate() ),
                             num( a.std_error() ), a.exact ? num( *a.exact ) : "",
                             e ? num( e->s_dk ) : "", e ? num( e->final_bound ) : "" } );
        }
    return out;
}

std::string csv_field( const std::string& s )
{
    if ( s.find_first_of( ",\"\n" ) == std::string::npos )
        return s;
    std::string q = "\"";
    for ( char c : s )
    {
        if ( c == '"' )
            q += '"';
        q += c;
    }
    return q + "\"";
}

Json exponent_json( const ExponentReport& e )
{
    Json j;
    j[ "d" ] = e.d;
    j[ "k" ] = e.k;
    j[ "L" ] = e.L;
    j[ "theta" ] = e.theta;
    j[ "eligibility" ] = e.eligibility;
    j[ "s_dk" ] = e.s_dk;
    j[ "loss" ] = e.loss;
    j[ "loss_leading_order" ] = e.loss_leading_order;
    j[ "gain" ] = e.gain;
    j[ "gain_leading_order" ] = e.gain_leading_order;
    j[ "impatient_bound" ] = e.impatient_bound;
    j[ "epsilon_privileged" ] = e.epsilon_privileged;
    j[ "privileged_bound" ] = e.privileged_bound;
    j[ "final_bound" ] = e.final_bound;
    j[ "improvement" ] = e.improvement;
    j[ "improves" ] = e.improves();
    j[ "in_theorem_scope" ] = e.in_theorem_scope;
    if ( !e.in_theorem_scope )
        j[ "note" ] = "out of theorem scope (d < 3)";
    return j;
}

} // namespace

std::string to_json( const ExperimentResult& r )
{
    Json j;
    j[ "schema" ] = kSchemaVersion;
    Json& p = j[ "params" ];
    p[ "strength" ] = r.params.strength;
    p[ "theta" ] = r.params.theta;
    p[ "cutoff" ] = r.params.cutoff;
    p[ "trials" ] = r.params.trials;
    p[ "seed" ] = r.params.seed;
    j[ "exponents" ] = Json::array();
    for ( const auto& e : summaries( r ) )
        j[ "exponents" ].push_back( exponent_json( e ) );
    j[ "instances" ] = Json::array();
    for ( const auto& inst : r.instances )
    {
        Json i;
        i[ "name" ] = inst.name;
        i[ "d" ] = inst.d;
        i[ "k" ] = inst.k;
        i[ "n" ] = inst.n;
        i[ "m" ] = inst.m;
        i[ "unique" ] = inst.unique;
        i[ "wall_seconds" ] = inst.wall_seconds;
        i[ "algorithms" ] = Json::array();
        for ( const auto& a : inst.algorithms )
        {
            Json s;
            s[ "name" ] = to_string( a.algorithm );
            s[ "trials" ] = a.trials;
            s[ "successes" ] = a.successes;
            s[ "rate" ] = a.rate();
            s[ "stderr" ] = a.std_error();
            s[ "exact" ] = a.exact ? Json( *a.exact ) : Json( nullptr );
            i[ "algorithms" ].push_back( s );
        }
        i[ "error" ] = inst.error ? Json( *inst.error ) : Json( nullptr );
        j[ "instances" ].push_back( i );
    }
    return j.dump( 2 ) + "\n";
}

ExperimentResult experiment_from_json( std::string_view text )
{
    const Json j = Json::parse( text );
    if ( j.at( "schema" ).get< int >() != kSchemaVersion )
        throw std::invalid_argument( "experiment_from_json: unsupported schema" );
    ExperimentResult r;
    const Json& p = j.at( "params" );
    r.params.strength = p.at( "strength" ).get< unsigned >();
    r.params.theta = p.at( "theta" ).get< double >();
    r.params.cutoff = p.at( "cutoff" ).get< unsigned >();
    r.params.trials = p.at( "trials" ).get< std::uint64_t >();
    r.params.seed = p.at( "seed" ).get< std::uint64_t >();
    for ( const Json& i : j.at( "instances" ) )
    {
        InstanceResult inst;
        inst.name = i.at( "name" ).get< std::string >();
        inst.d = i.at( "d" ).get< unsigned >();
        inst.k = i.at( "k" ).get< unsigned >();
        inst.n = i.at( "n" ).get< Var >();
        inst.m = i.at( "m" ).get< std::size_t >();
        inst.unique = i.at( "unique" ).get< bool >();
        inst.wall_seconds = i.at( "wall_seconds" ).get< double >();
        for ( const Json& s : i.at( "algorithms" ) )
        {
            AlgorithmStats a;
            const auto name = s.at( "name" ).get< std::string >();
            if ( name != "ppsz" && name != "impatient" )
                throw std::invalid_argument( "experiment_from_json: unknown algorithm " + name );
            a.algorithm = name == "ppsz" ? Algorithm::ppsz : Algorithm::impatient;
            a.trials = s.at( "trials" ).get< std::uint64_t >();
            a.successes = s.at( "successes" ).get< std::uint64_t >();
            if ( !s.at( "exact" ).is_null() )
                a.exact = s.at( "exact" ).get< double >();
            inst.algorithms.push_back( a );
        }
        if ( !i.at( "error" ).is_null() )
            inst.error = i.at( "error" ).get< std::string >();
        r.instances.push_back( std::move( inst ) );
    }
    return r;
}

std::string to_csv( const ExperimentResult& r )
{
    std::ostringstream out;
    const auto& cols = csv_columns();
    for ( std::size_t i = 0; i < cols.size(); ++i )
        out << ( i ? "," : "" ) << cols[ i ];
    out << '\n';
    for ( const auto& row : rows( r ) )
    {
        for ( std::size_t i = 0; i < row.size(); ++i )
            out << ( i ? "," : "" ) << csv_field( row[ i ] );
        out << '\n';
    }
    return out.str();
}

std::string to_markdown( const ExperimentResult& r )
{
    std::ostringstream out;
    const auto& cols = csv_columns();
    out << '|';
    for ( const auto& c : cols )
        out << ' ' << c << " |";
    out << "\n|";
    for ( std::size_t i = 0; i < cols.size(); ++i )
        out << "---|";
    out << '\n';
    for ( const auto& row : rows( r ) )
    {
        out << '|';
        for ( const auto& f : row )
            out << ' ' << f << " |";
        out << '\n';
    }
    return out.str();
}

std::string render( const ExperimentResult& r, Format f )
{
    switch ( f )
    {
    case Format::json:
        return to_json( r );
    case Format::csv:
        return to_csv( r );
    case Format::markdown:
        return to_markdown( r );
    }
    return {};
}

std::string to_json( const ExponentReport& r )
{
    Json j = exponent_json( r );
    j = Json{ { "schema", kSchemaVersion }, { "exponent", j } };
    return j.dump( 2 ) + "\n";
}

std::string curves_csv( const std::vector< CurveSample >& samples )
{
    std::ostringstream out;
    out << "p,R,Q,W\n";
    for ( const auto& s : samples )
        out << num( s.p ) << ',' << num( s.R ) << ',' << num( s.Q ) << ',' << num( s.W ) << '\n';
    return out.str();
}

} // namespace ippsz
