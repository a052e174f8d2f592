#include "ippsz/solver.hpp"

#include "ippsz/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ippsz
{

std::vector< Var > Placement::order() const
{
    std::vector< Var > ord( positions.size() );
    std::iota( ord.begin(), ord.end(), Var{ 0 } );
    std::sort( ord.begin(), ord.end(),
               [ & ]( Var a, Var b ) { return positions[ a ] < positions[ b ]; } );
    return ord;
}

void Placement::validate() const
{
    if ( marks.size() != positions.size() )
        throw std::invalid_argument( "Placement: marks and positions differ in size" );
    for ( Var v = 0; v < size(); ++v )
    {
        if ( !( positions[ v ] >= 0.0 && positions[ v ] <= 1.0 ) )
            throw std::invalid_argument( "Placement: position outside [0, 1]" );
        if ( marks[ v ] && positions[ v ] >= theta )
            throw std::invalid_argument( "Placement: marked variable at or above theta" );
    }
    auto ord = order();
    for ( std::size_t i = 1; i < ord.size(); ++i )
        if ( positions[ ord[ i ] ] == positions[ ord[ i - 1 ] ] )
            throw std::invalid_argument( "Placement: repeated position" );
}

Placement sample_placement( Var n, double theta, std::uint64_t seed, double eligibility )
{
    if ( !( theta >= 0.0 && theta <= 1.0 ) )
        throw std::invalid_argument( "sample_placement: theta must be in [0, 1]" );
    Rng rng{ seed };
    Placement pl;
    pl.theta = theta;
    pl.eligibility = eligibility;
    pl.positions.resize( n );
    for ( auto& x : pl.positions )
        x = rng.uniform();
    for ( ;; )
    {
        auto ord = pl.order();
        bool clash = false;
        for ( std::size_t i = 1; i < ord.size(); ++i )
            if ( pl.positions[ ord[ i ] ] == pl.positions[ ord[ i - 1 ] ] )
            {
                pl.positions[ ord[ i ] ] = rng.uniform();
                clash = true;
            }
        if ( !clash )
            break;
    }
    pl.marks.resize( n );
    for ( Var v = 0; v < n; ++v )
    {
        const bool draw = rng.bernoulli( eligibility );
        pl.marks[ v ] = ( pl.positions[ v ] < theta && draw ) ? 1 : 0;
    }
    return pl;
}

Placement placement_from_order( const std::vector< Var >& order, double theta,
                                std::size_t below_theta, const std::vector< std::uint8_t >& marks )
{
    const std::size_t n = order.size();
    if ( below_theta > n || marks.size() != n )
        throw std::invalid_argument( "placement_from_order: inconsistent sizes" );
    if ( ( below_theta > 0 && theta <= 0.0 ) || ( below_theta < n && theta >= 1.0 ) )
        throw std::invalid_argument( "placement_from_order: theta leaves no room" );
    Placement pl;
    pl.theta = theta;
    pl.positions.assign( n, 0.0 );
    pl.marks = marks;
    const std::size_t above = n - below_theta;
    for ( std::size_t i = 0; i < n; ++i )
    {
        const Var v = order[ i ];
        if ( v >= n )
            throw std::invalid_argument( "placement_from_order: not a permutation" );
        pl.positions[ v ] = i < below_theta
                                ? theta * ( i + 1.0 ) / ( below_theta + 1.0 )
                                : theta + ( 1.0 - theta ) * ( i - below_theta + 1.0 ) / ( above + 1.0 );
    }
    pl.validate();
    return pl;
}

std::size_t RunTrace::impatient_count() const
{
    return static_cast< std::size_t >(
        std::count_if( events.begin(), events.end(), []( const auto& e ) { return e.impatient; } ) );
}

namespace
{

// Shared skeleton of the randomized runs and the all-correct replay. `pick`
// receives (variable, plausible set) and returns the color to assign, or
// kUnbound to abort.
template < class Pick >
RunFailure walk( const PlausibilityOracle& oracle, const Placement& placement, bool impatient,
                 unsigned cutoff, PartialAssignment& alpha, std::vector< AssignmentEvent >& events,
                 Pick&& pick, std::vector< PartialAssignment >* snapshots = nullptr )
{
    const Var n = oracle.formula().n();
    if ( placement.size() != n )
        throw std::invalid_argument( "run: placement size does not match formula" );

    const auto order = placement.order();
    std::vector< Var > marked;
    if ( impatient )
        for ( Var v : order )
            if ( placement.marked( v ) )
                marked.push_back( v );

    auto assign = [ & ]( Var y, ColorSet plaus, bool is_imp ) {
        if ( plaus.empty() )
            return false;
        Color c = pick( y, plaus );
        if ( c == kUnbound )
            return false;
        alpha.bind( y, c );
        events.push_back( { y, c, plaus.size(), is_imp } );
        return true;
    };

    for ( Var x : order )
    {
        // Eligible variables are scanned by ascending position and the scan
        // restarts after every assignment, since each one can shrink the
        // plausible sets of the others.
        bool progress = true;
        while ( impatient && progress )
        {
            progress = false;
            for ( Var y : marked )
            {
                if ( alpha.is_bound( y ) )
                    continue;
                ColorSet pl = oracle.plausible( alpha, y );
                if ( pl.size() <= cutoff )
                {
                    if ( !assign( y, pl, true ) )
                        return RunFailure::empty_plausible;
                    progress = true;
                    break;
                }
            }
        }
        if ( snapshots )
        {
            PartialAssignment snap = alpha;
            snap.unbind( x );
            ( *snapshots )[ x ] = std::move( snap );
        }
        if ( alpha.is_bound( x ) )
            continue;
        if ( !assign( x, oracle.plausible( alpha, x ), false ) )
            return RunFailure::empty_plausible;
    }
    return RunFailure::none;
}

RunResult randomized( const PlausibilityOracle& oracle, const Placement& placement,
                      std::uint64_t seed, bool impatient, unsigned cutoff )
{
    Rng rng{ seed };
    RunResult out;
    PartialAssignment alpha( oracle.formula().n() );
    out.failure = walk( oracle, placement, impatient, cutoff, alpha, out.trace.events,
                        [ & ]( Var, ColorSet pl ) { return pl.nth( static_cast< unsigned >( rng.below( pl.size() ) ) ); } );
    if ( out.failure != RunFailure::none )
        return out;
    Assignment full( alpha.raw().begin(), alpha.raw().end() );
    if ( !satisfies( full, oracle.formula() ) )
    {
        out.failure = RunFailure::unsatisfied;
        return out;
    }
    out.assignment = std::move( full );
    return out;
}

} // namespace

RunResult ppsz_run( const PlausibilityOracle& oracle, const Placement& placement, std::uint64_t seed )
{
    return randomized( oracle, placement, seed, false, 0 );
}

RunResult ppsz_run( const Formula& f, const Placement& placement, unsigned strength,
                    std::uint64_t seed )
{
    PlausibilityOracle oracle{ f, strength };
    return ppsz_run( oracle, placement, seed );
}

RunResult impatient_run( const PlausibilityOracle& oracle, const Placement& placement,
                         std::uint64_t seed, unsigned cutoff )
{
    return randomized( oracle, placement, seed, true, cutoff );
}

RunResult impatient_run( const Formula& f, const Placement& placement, unsigned strength,
                         std::uint64_t seed )
{
    PlausibilityOracle oracle{ f, strength };
    return impatient_run( oracle, placement, seed );
}

CorrectRun correct_impatient_run( const PlausibilityOracle& oracle, const Placement& placement,
                                  const Assignment& solution, unsigned cutoff )
{
    const Var n = oracle.formula().n();
    CorrectRun out;
    out.at_regular_step.resize( n );
    PartialAssignment alpha( n );
    auto failure = walk(
        oracle, placement, true, cutoff, alpha, out.events,
        [ & ]( Var y, ColorSet pl ) {
            if ( !pl.contains( solution[ y ] ) )
                throw std::logic_error( "correct_impatient_run: solution color ruled out" );
            return solution[ y ];
        },
        &out.at_regular_step );
    if ( failure != RunFailure::none )
        throw std::logic_error( "correct_impatient_run: empty plausible set on the correct path" );
    return out;
}

ExactOracle::ExactOracle( const UniqueInstance& instance, unsigned strength, bool cache,
                          unsigned cutoff )
    : _instance{ instance }, _oracle{ instance.formula(), strength, cache }, _cutoff{ cutoff }
{
}

namespace
{

PartialAssignment correct_before( const Placement& placement, const Assignment& solution, Var x )
{
    PartialAssignment alpha( placement.size() );
    for ( Var v = 0; v < placement.size(); ++v )
        if ( placement.positions[ v ] < placement.positions[ x ] )
            alpha.bind( v, solution[ v ] );
    return alpha;
}

} // namespace

double ExactOracle::ppsz_success( const Placement& placement ) const
{
    const auto& sol = _instance.solution();
    double prob = 1.0;
    for ( Var x = 0; x < placement.size(); ++x )
        prob /= _oracle.plausible( correct_before( placement, sol, x ), x ).size();
    return prob;
}

double ExactOracle::impatient_success( const Placement& placement ) const
{
    const auto run = correct_impatient_run( _oracle, placement, _instance.solution(), _cutoff );
    double prob = 1.0;
    for ( const auto& e : run.events )
        prob /= e.choices;
    return prob;
}

ColorIndicators ExactOracle::indicators( const Placement& placement, Var x ) const
{
    return all_indicators( placement ).at( x );
}

std::vector< ColorIndicators > ExactOracle::all_indicators( const Placement& placement ) const
{
    const auto& sol = _instance.solution();
    const auto run = correct_impatient_run( _oracle, placement, sol, _cutoff );
    std::vector< ColorIndicators > out( placement.size() );
    for ( Var x = 0; x < placement.size(); ++x )
    {
        out[ x ].regular = _oracle.plausible( correct_before( placement, sol, x ), x );
        out[ x ].impatient = _oracle.plausible( run.at_regular_step[ x ], x );
    }
    return out;
}

namespace
{

void check_expected_limit( Var n )
{
    if ( n > ExactOracle::kExpectedVarLimit )
        throw std::length_error( "ExactOracle: too many variables for placement enumeration" );
}

double factorial( unsigned n )
{
    double r = 1.0;
    for ( unsigned i = 2; i <= n; ++i )
        r *= i;
    return r;
}

} // namespace

double ExactOracle::expected_ppsz_success() const
{
    const Var n = _instance.formula().n();
    check_expected_limit( n );
    std::vector< Var > order( n );
    std::iota( order.begin(), order.end(), Var{ 0 } );
    const std::vector< std::uint8_t > none( n, 0 );
    double sum = 0.0;
    do
        sum += ppsz_success( placement_from_order( order, 0.0, 0, none ) );
    while ( std::next_permutation( order.begin(), order.end() ) );
    return sum / factorial( n );
}

double ExactOracle::expected_impatient_success( double theta, double eligibility ) const
{
    const Var n = _instance.formula().n();
    check_expected_limit( n );
    if ( !( theta >= 0.0 && theta <= 1.0 ) )
        throw std::invalid_argument( "expected_impatient_success: theta must be in [0, 1]" );

    // Given the order, the number of variables below theta is Binomial(n,
    // theta) and those are the first ones; each of them is marked
    // independently with probability `eligibility`.
    std::vector< double > below( n + 1 );
    for ( Var j = 0; j <= n; ++j )
    {
        double binom = 1.0;
        for ( Var i = 1; i <= j; ++i )
            binom = binom * ( n - j + i ) / i;
        below[ j ] = binom * std::pow( theta, j ) * std::pow( 1.0 - theta, n - j );
    }

    std::vector< Var > order( n );
    std::iota( order.begin(), order.end(), Var{ 0 } );
    double sum = 0.0;
    do
    {
        for ( Var j = 0; j <= n; ++j )
        {
            if ( below[ j ] == 0.0 )
                continue;
            for ( std::uint32_t mask = 0; mask < ( 1U << j ); ++mask )
            {
                const int on = std::popcount( mask );
                const double w = below[ j ] * std::pow( eligibility, on ) *
                                 std::pow( 1.0 - eligibility, static_cast< int >( j ) - on );
                if ( w == 0.0 )
                    continue;
                std::vector< std::uint8_t > marks( n, 0 );
                for ( Var i = 0; i < j; ++i )
                    marks[ order[ i ] ] = ( mask >> i ) & 1U;
                sum += w * impatient_success( placement_from_order( order, theta, j, marks ) );
            }
        }
    } while ( std::next_permutation( order.begin(), order.end() ) );
    return sum / factorial( n );
}

double success_probability_exact( const Formula& f, const Placement& placement, unsigned strength )
{
    const auto inst = UniqueInstance::verify( f );
    return ExactOracle{ inst, strength, false }.ppsz_success( placement );
}

double impatient_success_probability_exact( const Formula& f, const Placement& placement,
                                            unsigned strength )
{
    const auto inst = UniqueInstance::verify( f );
    return ExactOracle{ inst, strength, false }.impatient_success( placement );
}

const char* to_string( Algorithm a )
{
    return a == Algorithm::ppsz ? "ppsz" : "impatient";
}

std::uint64_t default_repetition_budget( const Formula& f )
{
    ExponentParams params;
    params.d = f.d();
    params.k = f.k();
    const double e = ( s_dk( params ) + 0.1 ) * f.n();
    if ( e >= std::log2( static_cast< double >( kRepetitionCap ) ) )
        return kRepetitionCap;
    return std::min< std::uint64_t >( kRepetitionCap,
                                      static_cast< std::uint64_t >( std::ceil( std::exp2( e ) ) ) );
}

SolveResult solve( const Formula& f, const SolveParams& params )
{
    SolveResult out;
    if ( params.theta )
        out.theta = *params.theta;
    else if ( params.algorithm == Algorithm::impatient )
    {
        ExponentParams ep;
        ep.d = f.d();
        ep.k = f.k();
        out.theta = optimize_theta( ep ).theta;
    }
    out.budget = params.max_repetitions ? *params.max_repetitions : default_repetition_budget( f );

    const PlausibilityOracle oracle{ f, params.strength, params.cache };
    const bool imp = params.algorithm == Algorithm::impatient;
    auto trial = [ & ]( std::uint64_t t ) {
        const auto pl = sample_placement( f.n(), imp ? out.theta : 0.0,
                                          derive_seed( params.seed, t, 0 ) );
        const auto seed = derive_seed( params.seed, t, 1 );
        return imp ? impatient_run( oracle, pl, seed, params.cutoff ) : ppsz_run( oracle, pl, seed );
    };

    // Trials run in blocks; the reported run is the lowest-indexed success,
    // which is the one a serial loop would find first.
    const std::uint64_t block = 64 * static_cast< std::uint64_t >( std::max( 1, max_threads() ) );
    for ( std::uint64_t start = 0; start < out.budget; start += block )
    {
        const std::uint64_t stop = std::min( out.budget, start + block );
        const auto count = static_cast< std::int64_t >( stop - start );
        std::uint64_t first = stop;
        if ( params.exec == Exec::openmp )
        {
#pragma omp parallel for schedule( dynamic, 4 ) reduction( min : first )
            for ( std::int64_t i = 0; i < count; ++i )
                if ( trial( start + i ).success() )
                    first = std::min< std::uint64_t >( first, start + i );
        }
        else
        {
            for ( std::int64_t i = 0; i < count && first == stop; ++i )
                if ( trial( start + i ).success() )
                    first = start + i;
        }
        if ( first < stop )
        {
            auto run = trial( first );
            out.assignment = std::move( run.assignment );
            out.trace = std::move( run.trace );
            out.repetitions = first + 1;
            return out;
        }
    }
    out.repetitions = out.budget;
    return out;
}

} // namespace ippsz
