#include "ippsz/cct.hpp"
#include "ippsz/csp.hpp"
#include "ippsz/experiment.hpp"
#include "ippsz/exponent.hpp"
#include "ippsz/generator.hpp"
#include "ippsz/implication.hpp"
#include "ippsz/parallel.hpp"
#include "ippsz/report.hpp"
#include "ippsz/solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace ippsz;
using Json = nlohmann::ordered_json;

namespace
{

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitBudget = 2;

struct Global
{
    std::uint64_t seed = 0;
    int threads = 0;
    std::string out;
    std::string format = "json";
};

void emit( const Global& g, const std::string& text )
{
    if ( g.out.empty() )
    {
        std::cout << text;
        return;
    }
    std::ofstream f( g.out );
    if ( !f )
        throw std::runtime_error( "cannot write " + g.out );
    f << text;
}

Algorithm parse_algorithm( const std::string& s )
{
    if ( s == "ppsz" )
        return Algorithm::ppsz;
    if ( s == "impatient" )
        return Algorithm::impatient;
    throw std::invalid_argument( "unknown algorithm: " + s );
}

// Replays a successful run and reports, for every assignment event, which
// clauses (1-based, in file order) ruled out each excluded color.
std::string explain( const Formula& f, const RunTrace& trace, unsigned strength )
{
    std::ostringstream out;
    PartialAssignment alpha( f.n() );
    for ( const auto& e : trace.events )
    {
        const Residual r = simplify( f, alpha );
        out << "c x" << e.var + 1 << ( e.impatient ? " (impatient)" : "" ) << " = " << e.color
            << " from " << e.choices << " plausible";
        for ( Color c = 1; c <= f.d(); ++c )
            if ( auto w = d_implies( r, Literal{ e.var, c }, strength ) )
            {
                out << "; !=" << c << " by [";
                for ( std::size_t i = 0; i < w->size(); ++i )
                    out << ( i ? " " : "" ) << ( *w )[ i ] + 1;
                out << "]";
            }
        out << '\n';
        alpha.bind( e.var, e.color );
    }
    return out.str();
}

int cmd_gen( const Global& g, GeneratorSpec spec, std::optional< double > density, bool best_effort )
{
    spec.seed = g.seed;
    if ( density )
        spec.m = static_cast< std::size_t >( std::llround( *density * spec.n ) );
    spec.mode = best_effort ? Uniqueness::best_effort : Uniqueness::verified;
    try
    {
        const Formula f = generate( spec );
        std::ostringstream text;
        text << "c planted (d,...,d) seed=" << spec.seed
             << ( best_effort ? " uniqueness unverified" : " unique" ) << '\n'
             << serialize_mvcsp( f );
        emit( g, text.str() );
    }
    catch ( const GenerationError& e )
    {
        std::cerr << "ippsz gen: " << e.what() << '\n';
        return kExitBudget;
    }
    return kExitOk;
}

struct SolveArgs
{
    std::string file;
    std::string algo = "impatient";
    unsigned strength = kDefaultStrength;
    std::optional< double > theta;
    std::optional< std::uint64_t > max_reps;
    unsigned cutoff = kDefaultCutoff;
    bool explain = false;
};

int cmd_solve( const Global& g, const SolveArgs& a )
{
    const Formula f = read_mvcsp( a.file );
    SolveParams p;
    p.strength = a.strength;
    p.theta = a.theta;
    p.max_repetitions = a.max_reps;
    p.algorithm = parse_algorithm( a.algo );
    p.seed = g.seed;
    p.cutoff = a.cutoff;
    const SolveResult r = solve( f, p );

    std::ostringstream out;
    if ( r.success() )
    {
        for ( Var v = 0; v < f.n(); ++v )
            out << v + 1 << '=' << ( *r.assignment )[ v ] << '\n';
        if ( a.explain )
            out << explain( f, r.trace, a.strength );
    }
    else
        out << "UNSAT-BUDGET\n";

    Json stats;
    stats[ "algorithm" ] = to_string( p.algorithm );
    stats[ "strength" ] = p.strength;
    stats[ "theta" ] = r.theta;
    stats[ "seed" ] = p.seed;
    stats[ "budget" ] = r.budget;
    stats[ "repetitions" ] = r.repetitions;
    stats[ "solved" ] = r.success();
    if ( r.success() )
    {
        Json t;
        t[ "events" ] = r.trace.events.size();
        t[ "impatient" ] = r.trace.impatient_count();
        std::size_t forced = 0;
        double log2_choices = 0.0;
        for ( const auto& e : r.trace.events )
        {
            forced += e.choices == 1 ? 1 : 0;
            log2_choices += std::log2( static_cast< double >( e.choices ) );
        }
        t[ "forced" ] = forced;
        t[ "log2_choices" ] = log2_choices;
        stats[ "trace" ] = t;
    }
    out << stats.dump( 2 ) << '\n';
    emit( g, out.str() );
    return r.success() ? kExitOk : kExitBudget;
}

struct AnalyzeArgs
{
    unsigned d = 3;
    unsigned k = 3;
    std::optional< double > theta;
    bool optimize = false;
    std::string grid; // lo:hi:points
    std::string csv;
    unsigned csv_points = 201;
};

std::vector< double > parse_grid( const std::string& spec )
{
    double lo = 0.0, hi = 0.0;
    unsigned points = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in( spec );
    if ( !( in >> lo >> c1 >> hi >> c2 >> points ) || c1 != ':' || c2 != ':' )
        throw std::invalid_argument( "--grid expects lo:hi:points" );
    return geometric_grid( lo, hi, points );
}

int cmd_analyze( const Global& g, const AnalyzeArgs& a )
{
    ExponentParams p;
    p.d = a.d;
    p.k = a.k;
    p.validate();
    ExponentReport r;
    if ( a.theta && !a.optimize )
    {
        p.theta = *a.theta;
        r = evaluate_exponent( p );
    }
    else
        r = optimize_theta( p, a.grid.empty() ? default_theta_grid() : parse_grid( a.grid ) );
    emit( g, to_json( r ) );
    if ( !a.csv.empty() )
    {
        p.theta = r.theta;
        std::ofstream f( a.csv );
        if ( !f )
            throw std::runtime_error( "cannot write " + a.csv );
        f << curves_csv( sample_curves( p, a.csv_points ) );
    }
    return kExitOk;
}

struct TreesimArgs
{
    unsigned d = 3;
    unsigned k = 3;
    double p = 0.5;
    unsigned h = 9;
    std::uint64_t trials = 100000;
    bool impatient = false;
    double theta = 0.0;
    std::string dot_instance;
    unsigned dot_var = 1;
    unsigned dot_color = 1;
    std::string dot;
};

int cmd_treesim( const Global& g, const TreesimArgs& a )
{
    if ( !a.dot.empty() )
    {
        if ( a.dot_instance.empty() )
            throw std::invalid_argument( "--dot needs --instance" );
        const auto inst = UniqueInstance::verify( read_mvcsp( a.dot_instance ) );
        if ( a.dot_var < 1 || a.dot_var > inst.formula().n() )
            throw std::invalid_argument( "--x out of range" );
        const auto t = build_cct( inst, a.dot_var - 1, a.dot_color, a.h );
        std::ofstream f( a.dot );
        if ( !f )
            throw std::runtime_error( "cannot write " + a.dot );
        f << to_dot( t, &inst.formula() );
    }

    AbstractTreeSpec spec;
    spec.d = a.d;
    spec.k = a.k;
    spec.height = a.h;
    spec.impatient = a.impatient;
    spec.theta = a.theta;
    const Estimate e = mc_cut_probability( spec, a.p, a.trials, g.seed );
    ExponentParams ep;
    ep.d = a.d;
    ep.k = a.k;
    ep.theta = a.theta;
    Json j;
    j[ "d" ] = a.d;
    j[ "k" ] = a.k;
    j[ "p" ] = a.p;
    j[ "h" ] = a.h;
    j[ "impatient" ] = a.impatient;
    j[ "trials" ] = e.trials;
    j[ "estimate" ] = e.mean;
    j[ "stderr" ] = e.std_error;
    j[ "Q" ] = solve_Q( a.p, ep );
    j[ "truncated_Q" ] = truncated_cut_probability( a.p, a.d, a.k, a.h );
    if ( a.impatient )
        j[ "W_target" ] = std::pow( w_curve( a.p, ep ), a.k - 1 );
    emit( g, j.dump( 2 ) + "\n" );
    return kExitOk;
}

struct ExperimentArgs
{
    std::vector< std::string > files;
    unsigned count = 10;
    unsigned d = 3;
    unsigned k = 3;
    unsigned n = 5;
    std::size_t m = 60;
    std::uint64_t trials = 10000;
    double theta = 0.0;
    bool optimize_theta = false;
    unsigned strength = kDefaultStrength;
};

int cmd_experiment( const Global& g, const ExperimentArgs& a )
{
    std::vector< NamedInstance > instances;
    for ( const auto& path : a.files )
        instances.push_back( { path, read_mvcsp( path ) } );
    if ( a.files.empty() )
        for ( unsigned i = 0; i < a.count; ++i )
        {
            GeneratorSpec spec;
            spec.d = a.d;
            spec.k = a.k;
            spec.n = a.n;
            spec.m = a.m;
            spec.seed = g.seed + i;
            try
            {
                instances.push_back( { "gen-" + std::to_string( i ), generate( spec ) } );
            }
            catch ( const GenerationError& e )
            {
                std::cerr << "ippsz experiment: " << e.what() << '\n';
                return kExitBudget;
            }
        }
    ExperimentParams p;
    p.strength = a.strength;
    p.trials = a.trials;
    p.seed = g.seed;
    p.theta = a.theta;
    if ( a.optimize_theta && !instances.empty() )
    {
        ExponentParams ep;
        ep.d = instances[ 0 ].formula.d();
        ep.k = instances[ 0 ].formula.k();
        p.theta = optimize_theta( ep ).theta;
    }
    emit( g, render( run_experiment( instances, p ), parse_format( g.format ) ) );
    return kExitOk;
}

} // namespace

int main( int argc, char** argv )
{
    CLI::App app{ "PPSZ and ImpatientPPSZ for (d,k)-CSP" };
    app.require_subcommand( 1 );
    app.fallthrough();

    Global g;
    app.add_option( "--seed", g.seed, "master seed" );
    app.add_option( "--threads", g.threads, "OpenMP threads (0: runtime default)" );
    app.add_option( "--out", g.out, "write output to this file" );

    GeneratorSpec gen;
    std::optional< double > density;
    bool best_effort = false;
    auto* gen_cmd = app.add_subcommand( "gen", "generate a planted instance" );
    gen_cmd->add_option( "--d", gen.d )->required();
    gen_cmd->add_option( "--k", gen.k )->required();
    gen_cmd->add_option( "--n", gen.n )->required();
    auto* m_opt = gen_cmd->add_option( "--m", gen.m, "clause count" );
    gen_cmd->add_option( "--density", density, "clauses per variable" )->excludes( m_opt );
    gen_cmd->add_flag( "--best-effort", best_effort, "skip the uniqueness check" );
    gen_cmd->add_option( "--max-repairs", gen.max_repairs );

    SolveArgs sa;
    auto* solve_cmd = app.add_subcommand( "solve", "solve an instance" );
    solve_cmd->add_option( "file", sa.file )->required()->check( CLI::ExistingFile );
    solve_cmd->add_option( "--algo", sa.algo )->check( CLI::IsMember( { "ppsz", "impatient" } ) );
    solve_cmd->add_option( "--D", sa.strength )->check( CLI::Range( 1U, kMaxStrength ) );
    solve_cmd->add_option( "--theta", sa.theta )->check( CLI::Range( 0.0, 1.0 ) );
    solve_cmd->add_option( "--max-reps", sa.max_reps );
    solve_cmd->add_option( "--cutoff", sa.cutoff, "impatient threshold on |Plaus|" );
    solve_cmd->add_flag( "--explain", sa.explain, "print implication witnesses per assignment" );

    AnalyzeArgs aa;
    auto* an_cmd = app.add_subcommand( "analyze", "exponent report for (d,k)" );
    an_cmd->add_option( "--d", aa.d )->required();
    an_cmd->add_option( "--k", aa.k )->required();
    auto* th_opt = an_cmd->add_option( "--theta", aa.theta )->check( CLI::Range( 0.0, 1.0 ) );
    an_cmd->add_flag( "--optimize", aa.optimize )->excludes( th_opt );
    an_cmd->add_option( "--grid", aa.grid, "theta grid lo:hi:points (geometric)" );
    an_cmd->add_option( "--csv", aa.csv, "write (p,R,Q,W) samples here" );
    an_cmd->add_option( "--csv-points", aa.csv_points );

    TreesimArgs ta;
    auto* ts_cmd = app.add_subcommand( "treesim", "Monte-Carlo cut probability on abstract trees" );
    ts_cmd->set_help_flag( "--help", "print this help message and exit" );
    ts_cmd->add_option( "--d", ta.d );
    ts_cmd->add_option( "--k", ta.k );
    ts_cmd->add_option( "--p", ta.p )->check( CLI::Range( 0.0, 1.0 ) );
    ts_cmd->add_option( "--h", ta.h );
    ts_cmd->add_option( "--trials", ta.trials );
    ts_cmd->add_flag( "--impatient", ta.impatient );
    ts_cmd->add_option( "--theta", ta.theta )->check( CLI::Range( 0.0, 1.0 ) );
    ts_cmd->add_option( "--dot", ta.dot, "write T^h_{x,c} of --instance as Graphviz" );
    ts_cmd->add_option( "--instance", ta.dot_instance )->check( CLI::ExistingFile );
    ts_cmd->add_option( "--x", ta.dot_var, "1-based variable" );
    ts_cmd->add_option( "--c", ta.dot_color );

    ExperimentArgs ea;
    auto* ex_cmd = app.add_subcommand( "experiment", "paired PPSZ / ImpatientPPSZ runs" );
    ex_cmd->add_option( "files", ea.files )->check( CLI::ExistingFile );
    ex_cmd->add_option( "--count", ea.count, "generated instances when no files are given" );
    ex_cmd->add_option( "--d", ea.d );
    ex_cmd->add_option( "--k", ea.k );
    ex_cmd->add_option( "--n", ea.n );
    ex_cmd->add_option( "--m", ea.m );
    ex_cmd->add_option( "--trials", ea.trials );
    auto* eth = ex_cmd->add_option( "--theta", ea.theta )->check( CLI::Range( 0.0, 1.0 ) );
    ex_cmd->add_flag( "--optimize-theta", ea.optimize_theta )->excludes( eth );
    ex_cmd->add_option( "--D", ea.strength )->check( CLI::Range( 1U, kMaxStrength ) );
    ex_cmd->add_option( "--format", g.format, "json, csv or markdown" )
        ->check( CLI::IsMember( { "json", "csv", "markdown" } ) );

    try
    {
        app.parse( argc, argv );
    }
    catch ( const CLI::Success& e )
    {
        return app.exit( e );
    }
    catch ( const CLI::ParseError& e )
    {
        app.exit( e );
        return kExitInput;
    }

    set_threads( g.threads );
    try
    {
        if ( *gen_cmd )
            return cmd_gen( g, gen, density, best_effort );
        if ( *solve_cmd )
            return cmd_solve( g, sa );
        if ( *an_cmd )
            return cmd_analyze( g, aa );
        if ( *ts_cmd )
            return cmd_treesim( g, ta );
        if ( *ex_cmd )
            return cmd_experiment( g, ea );
    }
    catch ( const ParseError& e )
    {
        std::cerr << "ippsz: " << e.what() << '\n';
        return kExitInput;
    }
    catch ( const std::exception& e )
    {
        std::cerr << "ippsz: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitInput;
}
