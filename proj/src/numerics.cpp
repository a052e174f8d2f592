#include "ippsz/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace ippsz
{

namespace
{

struct Simpson
{
    const std::function< double( double ) >& f;
    const QuadratureOptions& opts;
    bool failed = false;

    double run( double a, double b, double fa, double fm, double fb, double whole, double tol,
                int depth )
    {
        const double m = 0.5 * ( a + b );
        const double lm = 0.5 * ( a + m );
        const double rm = 0.5 * ( m + b );
        const double flm = f( lm );
        const double frm = f( rm );
        const double left = ( m - a ) / 6.0 * ( fa + 4.0 * flm + fm );
        const double right = ( b - m ) / 6.0 * ( fm + 4.0 * frm + fb );
        const double delta = left + right - whole;

        if ( depth >= opts.min_depth && std::abs( delta ) <= 15.0 * tol )
            return left + right + delta / 15.0;
        if ( depth >= opts.max_depth || m <= a || m >= b )
        {
            failed = true;
            return left + right + delta / 15.0;
        }
        return run( a, m, fa, flm, fm, left, 0.5 * tol, depth + 1 ) +
               run( m, b, fm, frm, fb, right, 0.5 * tol, depth + 1 );
    }
};

double panel( const std::function< double( double ) >& f, double a, double b,
              const QuadratureOptions& opts, bool& failed )
{
    if ( b <= a )
        return 0.0;
    const double fa = f( a );
    const double fb = f( b );
    const double fm = f( 0.5 * ( a + b ) );
    const double whole = ( b - a ) / 6.0 * ( fa + 4.0 * fm + fb );

    // Scale for the relative tolerance from a 16-point Gauss rule, which is
    // far less likely than a 3-point Simpson estimate to be accidentally 0.
    const double scale = std::abs( gauss_legendre( f, a, b, 16 ) );
    const double tol = std::max( opts.abs_tol, opts.rel_tol * scale );

    Simpson s{ f, opts };
    double v = s.run( a, b, fa, fm, fb, whole, tol, 0 );
    failed = failed || s.failed;
    return v;
}

} // namespace

double integrate( const std::function< double( double ) >& f, double a, double b,
                  const QuadratureOptions& opts, const std::vector< double >& breakpoints )
{
    if ( !( a <= b ) )
        throw std::invalid_argument( "integrate: need a <= b" );
    std::vector< double > cuts{ a };
    for ( double x : breakpoints )
        if ( x > a && x < b )
            cuts.push_back( x );
    cuts.push_back( b );
    std::sort( cuts.begin(), cuts.end() );

    bool failed = false;
    double total = 0.0;
    for ( std::size_t i = 0; i + 1 < cuts.size(); ++i )
        total += panel( f, cuts[ i ], cuts[ i + 1 ], opts, failed );
    if ( failed || !std::isfinite( total ) )
        throw QuadratureError( "integrate: tolerance not met", total );
    return total;
}

namespace
{

// Nodes and weights on [-1, 1] by Newton iteration on P_n.
struct Rule
{
    std::array< double, 16 > x{};
    std::array< double, 16 > w{};
};

Rule make_rule( unsigned n )
{
    Rule r;
    for ( unsigned i = 0; i < n; ++i )
    {
        double z = std::cos( std::numbers::pi * ( i + 0.75 ) / ( n + 0.5 ) );
        double dp = 0.0;
        for ( int it = 0; it < 100; ++it )
        {
            double p0 = 1.0, p1 = 0.0;
            for ( unsigned j = 1; j <= n; ++j )
            {
                double p2 = p1;
                p1 = p0;
                p0 = ( ( 2.0 * j - 1.0 ) * z * p1 - ( j - 1.0 ) * p2 ) / j;
            }
            dp = n * ( z * p0 - p1 ) / ( z * z - 1.0 );
            double dz = p0 / dp;
            z -= dz;
            if ( std::abs( dz ) < 1e-16 )
                break;
        }
        r.x[ i ] = z;
        r.w[ i ] = 2.0 / ( ( 1.0 - z * z ) * dp * dp );
    }
    return r;
}

const Rule& rule( unsigned n )
{
    static const auto rules = [] {
        std::array< Rule, 17 > all{};
        for ( unsigned m = 1; m <= 16; ++m )
            all[ m ] = make_rule( m );
        return all;
    }();
    return rules[ n ];
}

} // namespace

double gauss_legendre( const std::function< double( double ) >& f, double a, double b, unsigned n )
{
    if ( n < 1 || n > 16 )
        throw std::invalid_argument( "gauss_legendre: n must be in [1, 16]" );
    const Rule& r = rule( n );
    const double half = 0.5 * ( b - a );
    const double mid = 0.5 * ( a + b );
    double sum = 0.0;
    for ( unsigned i = 0; i < n; ++i )
        sum += r.w[ i ] * f( mid + half * r.x[ i ] );
    return half * sum;
}

} // namespace ippsz
