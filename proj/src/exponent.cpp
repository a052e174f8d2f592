#include "ippsz/exponent.hpp"

#include "ippsz/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ippsz
{

namespace
{

double ipow( double x, unsigned e )
{
    double r = 1.0;
    while ( e != 0 )
    {
        if ( e & 1U )
            r *= x;
        x *= x;
        e >>= 1;
    }
    return r;
}

double binom( unsigned n, unsigned j )
{
    double r = 1.0;
    for ( unsigned i = 1; i <= j; ++i )
        r = r * ( n - j + i ) / i;
    return r;
}

QuadratureOptions quad( const ExponentParams& params, double abs_tol = 1e-300 )
{
    QuadratureOptions o;
    o.rel_tol = params.tolerance;
    o.abs_tol = abs_tol;
    return o;
}

// d/ds of expected_log_count.
double expected_log_count_slope( double s, unsigned d )
{
    const unsigned m = d - 2;
    double sum = 0.0;
    for ( unsigned j = 0; j <= m; ++j )
        sum += binom( m, j ) * ipow( s, j ) * ipow( 1.0 - s, m - j ) *
               ( std::log2( j + 2.0 ) - std::log2( j + 1.0 ) );
    return ( d - 1 ) * sum;
}

} // namespace

void ExponentParams::validate() const
{
    if ( d < 2 || k < 2 )
        throw std::invalid_argument( "ExponentParams: need d, k >= 2" );
    if ( !( theta >= 0.0 && theta <= 1.0 ) )
        throw std::invalid_argument( "ExponentParams: theta must be in [0, 1]" );
    if ( !( eligibility >= 0.0 && eligibility <= 1.0 ) )
        throw std::invalid_argument( "ExponentParams: eligibility must be in [0, 1]" );
    if ( !( tolerance > 0.0 ) || !( fixed_point_tolerance > 0.0 ) )
        throw std::invalid_argument( "ExponentParams: tolerances must be positive" );
}

double abamo( double q, unsigned l )
{
    if ( !( q >= 0.0 && q <= 1.0 ) || l < 1 )
        throw std::domain_error( "abamo: need q in [0, 1] and l >= 1" );
    return ipow( q, l ) + l * ( 1.0 - q ) * ipow( q, l - 1 );
}

double fixed_point_residual( double R, double p, const ExponentParams& params )
{
    return R - p - ( 1.0 - p ) * ipow( R, params.L() );
}

double solve_R( double p, const ExponentParams& params )
{
    if ( !( p >= 0.0 && p <= 1.0 ) )
        throw std::domain_error( "solve_R: p must be in [0, 1]" );
    const unsigned L = params.L();
    if ( p == 0.0 )
        return 0.0;
    if ( p >= params.critical_p() )
        return 1.0;

    // g(R) = p + (1-p) R^L - R is convex with g(0) = p > 0 and g(1) = 0,
    // g'(1) > 0 below the critical p, so the smallest root lies left of the
    // minimizer R_m where g < 0.
    const double rm = std::pow( 1.0 / ( ( 1.0 - p ) * L ), 1.0 / ( L - 1.0 ) );
    double lo = 0.0;
    double hi = std::min( rm, 1.0 );
    auto g = [ & ]( double r ) { return -fixed_point_residual( r, p, params ); };
    if ( g( hi ) > 0.0 )
        throw std::runtime_error( "solve_R: failed to bracket the smallest root" );
    for ( int it = 0; it < 200; ++it )
    {
        const double mid = 0.5 * ( lo + hi );
        if ( mid <= lo || mid >= hi )
            break;
        ( g( mid ) > 0.0 ? lo : hi ) = mid;
    }
    const double r = std::abs( g( lo ) ) <= std::abs( g( hi ) ) ? lo : hi;
    if ( std::abs( g( r ) ) > params.fixed_point_tolerance )
        throw std::runtime_error( "solve_R: fixed point did not converge" );
    return r;
}

double solve_Q( double p, const ExponentParams& params )
{
    return ipow( solve_R( p, params ), params.k - 1 );
}

double w_curve( double p, const ExponentParams& params )
{
    if ( p >= params.theta )
        return solve_R( p, params );
    const double c = params.eligibility;
    const double q = solve_Q( p, params );
    const double boost = c * ( params.theta - p );
    return p + boost * abamo( ipow( p, params.k - 1 ), params.d - 1 ) +
           ( 1.0 - p - boost ) * ipow( q, params.d - 1 );
}

double w_envelope( double p, const ExponentParams& params )
{
    const unsigned L = params.L();
    return p + ( params.d - 1 ) * params.theta * ipow( p, ( params.d - 2 ) * ( params.k - 1 ) ) +
           ipow( p + 4.0 * ipow( p, L ), L );
}

double expected_log_count( double s, unsigned d )
{
    double sum = 0.0;
    for ( unsigned j = 1; j <= d - 1; ++j )
        sum += binom( d - 1, j ) * ipow( s, j ) * ipow( 1.0 - s, d - 1 - j ) * std::log2( j + 1.0 );
    return sum;
}

double s_dk( const ExponentParams& params )
{
    params.validate();
    const unsigned d = params.d;
    return integrate( [ & ]( double p ) { return expected_log_count( 1.0 - solve_Q( p, params ), d ); },
                      0.0, params.critical_p(), quad( params, 1e-15 ) );
}

double s_dk( const ExponentParams& params, const CutCurve& cut )
{
    params.validate();
    const unsigned d = params.d;
    return integrate( [ & ]( double p ) { return expected_log_count( 1.0 - cut( p ), d ); }, 0.0, 1.0,
                      quad( params, 1e-15 ), { params.critical_p() } );
}

IntegralWithLeadingOrder loss_integral( const ExponentParams& params )
{
    params.validate();
    const unsigned L = params.L();
    const double c = params.eligibility;
    IntegralWithLeadingOrder out;
    out.leading_order = c * ipow( params.theta, L + 1 ) / ( L + 1 );
    if ( params.theta == 0.0 )
        return out;
    out.exact = c * integrate( [ & ]( double p ) { return ipow( w_curve( p, params ), L ); }, 0.0,
                               params.theta, quad( params ), { params.critical_p() } );
    return out;
}

IntegralWithLeadingOrder gain_integral( const ExponentParams& params )
{
    params.validate();
    const unsigned d = params.d;
    const unsigned k = params.k;
    const unsigned L = params.L();
    const double c = params.eligibility;
    IntegralWithLeadingOrder out;
    out.leading_order =
        ( d - 1 ) * std::log2( 1.0 - 1.0 / d ) * c * ipow( params.theta, L + 1 ) / ( L + 1 );
    if ( params.theta == 0.0 )
        return out;

    // f(1 - W^(k-1)) - f(1 - Q) for p < theta, where W - R is formed directly
    // from its defining terms; subtracting W and R themselves would lose all
    // significant digits for small theta.
    auto integrand = [ & ]( double p ) {
        if ( p >= params.theta )
            return 0.0;
        const double r = solve_R( p, params );
        const double q = ipow( r, k - 1 );
        const double wr = c * ( params.theta - p ) *
                          ( abamo( ipow( p, k - 1 ), d - 1 ) - ipow( q, d - 1 ) );
        const double w = r + wr;
        double sum = 0.0;
        for ( unsigned i = 0; i + 1 < k; ++i )
            sum += ipow( w, i ) * ipow( r, k - 2 - i );
        const double delta = wr * sum; // W^(k-1) - Q
        const double b = 1.0 - q;
        if ( std::abs( delta ) > 1e-3 )
            return expected_log_count( b - delta, d ) - expected_log_count( b, d );
        // -delta times the mean slope on [b - delta, b]; nodes are placed from
        // delta so that 1 - q rounding cannot swallow it.
        return -delta * gauss_legendre(
                            [ & ]( double t ) { return expected_log_count_slope( b - delta * t, d ); },
                            0.0, 1.0, 8 );
    };
    out.exact = integrate( integrand, 0.0, params.theta, quad( params ), { params.critical_p() } );
    return out;
}

double impatient_bound( const ExponentParams& params )
{
    return s_dk( params ) + loss_integral( params ).exact + gain_integral( params ).exact;
}

PrivilegedCase PrivilegedCase::standard( unsigned d, unsigned k )
{
    return { k - 2, 2 * ( d - 2 ) + 2 * ( k - 2 ) };
}

double epsilon_privileged( const ExponentParams& params, PrivilegedCase counts )
{
    params.validate();
    const unsigned d = params.d;
    auto delta = [ & ]( double p ) {
        const double r = solve_R( p, params );
        const double q = ipow( r, params.k - 1 );
        const double miss = 1.0 - ipow( q, d - 1 );
        return ( p - p * p ) * ipow( q, counts.uncles ) * ipow( r, counts.aunts ) * miss * miss *
               ( 1.0 - p ) * ( 1.0 - p );
    };
    return std::numbers::log2e / d * integrate( delta, 0.0, params.critical_p(), quad( params ) );
}

double epsilon_privileged( const ExponentParams& params )
{
    return epsilon_privileged( params, PrivilegedCase::standard( params.d, params.k ) );
}

double gain_multiplier( unsigned d )
{
    if ( d < 2 )
        throw std::domain_error( "gain_multiplier: need d >= 2" );
    return 1.0 + ( d - 1 ) * std::log2( 1.0 - 1.0 / d );
}

namespace
{

ExponentReport evaluate_with( const ExponentParams& params, double s, double eps )
{
    ExponentReport r;
    r.d = params.d;
    r.k = params.k;
    r.L = params.L();
    r.theta = params.theta;
    r.eligibility = params.eligibility;
    r.s_dk = s;
    const auto loss = loss_integral( params );
    const auto gain = gain_integral( params );
    r.loss = loss.exact;
    r.loss_leading_order = loss.leading_order;
    r.gain = gain.exact;
    r.gain_leading_order = gain.leading_order;
    r.impatient_bound = s + r.loss + r.gain;
    r.epsilon_privileged = eps;
    r.privileged_bound = s - eps + params.eligibility * params.theta;
    r.improvement = std::min( -( r.loss + r.gain ), eps - params.eligibility * params.theta );
    r.final_bound = s - r.improvement;
    r.in_theorem_scope = params.d >= 3;
    return r;
}

} // namespace

ExponentReport evaluate_exponent( const ExponentParams& params )
{
    return evaluate_with( params, s_dk( params ), epsilon_privileged( params ) );
}

std::vector< double > geometric_grid( double lo, double hi, unsigned points )
{
    if ( !( lo > 0.0 && hi >= lo ) || points < 1 )
        throw std::invalid_argument( "geometric_grid: need 0 < lo <= hi and points >= 1" );
    std::vector< double > g;
    if ( points == 1 )
        return { lo };
    const double ratio = std::log( hi / lo ) / ( points - 1 );
    for ( unsigned i = 0; i < points; ++i )
        g.push_back( lo * std::exp( ratio * i ) );
    g.back() = hi;
    return g;
}

std::vector< double > default_theta_grid()
{
    return geometric_grid( 1e-6, 0.5, 64 );
}

ExponentReport optimize_theta( const ExponentParams& params, const std::vector< double >& grid )
{
    if ( grid.empty() )
        throw std::invalid_argument( "optimize_theta: empty grid" );
    std::vector< double > sorted = grid;
    std::sort( sorted.begin(), sorted.end() );
    sorted.erase( std::unique( sorted.begin(), sorted.end() ), sorted.end() );

    const double s = s_dk( params );
    const double eps = epsilon_privileged( params );
    auto at = [ & ]( double theta ) {
        ExponentParams p = params;
        p.theta = theta;
        return evaluate_with( p, s, eps );
    };

    std::vector< ExponentReport > reports;
    reports.reserve( sorted.size() );
    for ( double t : sorted )
        reports.push_back( at( t ) );
    std::size_t best = 0;
    for ( std::size_t i = 1; i < reports.size(); ++i )
        if ( reports[ i ].improvement > reports[ best ].improvement )
            best = i;
    ExponentReport winner = reports[ best ];
    if ( sorted.size() < 2 )
        return winner;

    double a = sorted[ best == 0 ? 0 : best - 1 ];
    double b = sorted[ std::min( best + 1, sorted.size() - 1 ) ];
    const double phi = 0.5 * ( std::sqrt( 5.0 ) - 1.0 );
    double x1 = b - phi * ( b - a );
    double x2 = a + phi * ( b - a );
    ExponentReport r1 = at( x1 );
    ExponentReport r2 = at( x2 );
    for ( int it = 0; it < 80 && b - a > 1e-15 * b; ++it )
    {
        if ( r1.improvement >= r2.improvement )
        {
            b = x2;
            x2 = x1;
            r2 = r1;
            x1 = b - phi * ( b - a );
            r1 = at( x1 );
        }
        else
        {
            a = x1;
            x1 = x2;
            r1 = r2;
            x2 = a + phi * ( b - a );
            r2 = at( x2 );
        }
        for ( const auto* r : { &r1, &r2 } )
            if ( r->improvement > winner.improvement )
                winner = *r;
    }
    return winner;
}

ExponentReport optimize_theta( const ExponentParams& params )
{
    return optimize_theta( params, default_theta_grid() );
}

std::vector< CurveSample > sample_curves( const ExponentParams& params, unsigned points )
{
    std::vector< CurveSample > out;
    for ( unsigned i = 0; i < points; ++i )
    {
        const double p = points == 1 ? 0.0 : static_cast< double >( i ) / ( points - 1 );
        const double r = solve_R( p, params );
        out.push_back( { p, r, ipow( r, params.k - 1 ), w_curve( p, params ) } );
    }
    return out;
}

} // namespace ippsz
