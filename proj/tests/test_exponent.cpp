#include "ippsz/exponent.hpp"
#include "ippsz/numerics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace ippsz;

namespace
{

ExponentParams params_for( unsigned d, unsigned k, double theta = 0.0 )
{
    ExponentParams p;
    p.d = d;
    p.k = k;
    p.theta = theta;
    return p;
}

const std::vector< std::pair< unsigned, unsigned > > kPairs{ { 3, 2 }, { 3, 3 }, { 3, 4 },
                                                             { 4, 3 }, { 5, 4 } };

} // namespace

TEST( Quadrature, Polynomials )
{
    EXPECT_NEAR( integrate( []( double x ) { return x * x; }, 0.0, 3.0 ), 9.0, 1e-12 );
    EXPECT_NEAR( integrate( []( double x ) { return std::exp( x ); }, 0.0, 1.0 ),
                 std::numbers::e - 1.0, 1e-12 );
    EXPECT_NEAR( gauss_legendre( []( double x ) { return x * x * x * x; }, 0.0, 1.0, 4 ), 0.2,
                 1e-14 );
}

TEST( Quadrature, BreakpointsHandleKinks )
{
    const double v = integrate( []( double x ) { return std::abs( x - 0.3 ); }, 0.0, 1.0, {}, { 0.3 } );
    EXPECT_NEAR( v, 0.5 * ( 0.09 + 0.49 ), 1e-13 );
}

TEST( Quadrature, ThrowsWhenToleranceUnreachable )
{
    QuadratureOptions o;
    o.rel_tol = 1e-16;
    o.max_depth = 2;
    o.min_depth = 1;
    EXPECT_THROW( (void)integrate( []( double x ) { return std::sin( 50 * x ); }, 0.0, 3.0, o ),
                  QuadratureError );
}

TEST( Abamo, Cases )
{
    for ( unsigned l = 1; l <= 6; ++l )
        EXPECT_DOUBLE_EQ( abamo( 1.0, l ), 1.0 );
    for ( double q : { 0.0, 0.2, 0.7 } )
        EXPECT_DOUBLE_EQ( abamo( q, 1 ), 1.0 );
    EXPECT_DOUBLE_EQ( abamo( 0.5, 2 ), 0.75 );
    EXPECT_THROW( (void)abamo( 1.5, 2 ), std::domain_error );
}

TEST( FixedPoint, ClosedFormBinaryCase )
{
    const auto p = params_for( 2, 3 );
    EXPECT_NEAR( solve_R( 1.0 / 3.0, p ), 0.5, 1e-12 );
    EXPECT_NEAR( solve_Q( 1.0 / 3.0, p ), 0.25, 1e-12 );
}

TEST( FixedPoint, Endpoints )
{
    for ( auto [ d, k ] : kPairs )
    {
        const auto p = params_for( d, k );
        EXPECT_EQ( solve_R( 0.0, p ), 0.0 );
        EXPECT_EQ( solve_Q( 0.0, p ), 0.0 );
        EXPECT_EQ( solve_R( p.critical_p(), p ), 1.0 );
        EXPECT_EQ( solve_Q( 0.99, p ), 1.0 );
    }
}

TEST( FixedPoint, ResidualMonotoneAndAboveP )
{
    for ( auto [ d, k ] : kPairs )
    {
        const auto p = params_for( d, k );
        double prev = 0.0;
        for ( int i = 0; i <= 400; ++i )
        {
            const double x = i / 400.0;
            const double r = solve_R( x, p );
            EXPECT_LE( std::abs( fixed_point_residual( r, x, p ) ), p.fixed_point_tolerance );
            EXPECT_GE( r, x );
            EXPECT_GE( r, prev );
            EXPECT_DOUBLE_EQ( solve_Q( x, p ), std::pow( r, k - 1 ) );
            prev = r;
        }
    }
}

TEST( FixedPoint, FourPLBound )
{
    for ( auto [ d, k ] : kPairs )
    {
        const auto p = params_for( d, k );
        const unsigned L = p.L();
        for ( int i = 0; i <= 2000; ++i )
        {
            const double x = p.critical_p() * i / 2000.0;
            EXPECT_LE( solve_R( x, p ), x + 4 * std::pow( x, L ) + 1e-15 ) << d << k << ' ' << x;
        }
    }
}

TEST( WCurve, ThetaZeroEqualsR )
{
    const auto p = params_for( 3, 3 );
    for ( int i = 0; i <= 50; ++i )
        EXPECT_DOUBLE_EQ( w_curve( i / 50.0, p ), solve_R( i / 50.0, p ) );
}

TEST( WCurve, ContinuousAtThetaAndAboveR )
{
    for ( auto [ d, k ] : kPairs )
        for ( double theta : { 0.01, 0.1, 0.3 } )
        {
            const auto p = params_for( d, k, theta );
            const double below = w_curve( std::nextafter( theta, 0.0 ), p );
            EXPECT_NEAR( below, w_curve( theta, p ), 1e-9 );
            double prev = 0.0;
            for ( int i = 0; i <= 200; ++i )
            {
                const double x = i / 200.0;
                const double w = w_curve( x, p );
                EXPECT_GE( w, solve_R( x, p ) - 1e-15 );
                EXPECT_GE( w, prev - 1e-12 );
                EXPECT_LE( w, 1.0 + 1e-15 );
                prev = w;
            }
        }
}

TEST( WCurve, Envelope )
{
    for ( auto [ d, k ] : kPairs )
        for ( double theta : { 0.001, 0.01, 0.05 } )
        {
            const auto p = params_for( d, k, theta );
            for ( int i = 0; i <= 200; ++i )
            {
                const double x = p.critical_p() * i / 200.0;
                EXPECT_LE( w_curve( x, p ), w_envelope( x, p ) + 1e-15 );
            }
        }
}

TEST( Sdk, BinaryClosedForm )
{
    EXPECT_NEAR( s_dk( params_for( 2, 3 ) ), 2 * std::log( 2.0 ) - 1, 1e-6 );
}

TEST( Sdk, FullCutGivesZero )
{
    for ( unsigned d : { 2U, 3U, 5U } )
        EXPECT_EQ( s_dk( params_for( d, 3 ), []( double ) { return 1.0; } ), 0.0 );
}

TEST( Sdk, BoundsAndMonotoneInK )
{
    for ( unsigned d : { 3U, 4U, 5U } )
    {
        double prev = 0.0;
        for ( unsigned k = 2; k <= 6; ++k )
        {
            const double s = s_dk( params_for( d, k ) );
            EXPECT_GT( s, 0.0 );
            EXPECT_LT( s, std::log2( d ) );
            // Larger clauses make each cut harder, so the exponent grows.
            EXPECT_GT( s, prev );
            prev = s;
        }
    }
}

TEST( Loss, ZeroAtThetaZero )
{
    const auto r = loss_integral( params_for( 3, 3 ) );
    EXPECT_EQ( r.exact, 0.0 );
    EXPECT_EQ( r.leading_order, 0.0 );
}

TEST( Loss, LeadingOrderRatio )
{
    const auto wide = loss_integral( params_for( 3, 3, 1e-2 ) );
    const auto near = loss_integral( params_for( 3, 3, 1e-3 ) );
    const double ratio = near.exact / near.leading_order;
    EXPECT_GE( ratio, 0.95 );
    EXPECT_LE( ratio, 1.05 );
    EXPECT_LE( std::abs( ratio - 1 ), std::abs( wide.exact / wide.leading_order - 1 ) + 1e-12 );
}

TEST( Loss, BoundedByEndpoint )
{
    for ( double theta : { 1e-3, 0.05, 0.2 } )
    {
        const auto p = params_for( 3, 3, theta );
        EXPECT_LE( loss_integral( p ).exact,
                   p.eligibility * theta * std::pow( w_curve( theta, p ), p.L() ) * ( 1 + 1e-12 ) );
    }
}

TEST( Gain, ZeroAtThetaZero )
{
    EXPECT_EQ( gain_integral( params_for( 3, 3 ) ).exact, 0.0 );
}

TEST( Gain, NonPositiveOnGrid )
{
    for ( auto [ d, k ] : std::vector< std::pair< unsigned, unsigned > >{ { 3, 2 }, { 3, 3 }, { 4, 3 } } )
        for ( int i = 0; i <= 20; ++i )
            EXPECT_LE( gain_integral( params_for( d, k, 0.2 * i / 20 ) ).exact, 0.0 );
}

TEST( Gain, LeadingOrderRatio )
{
    const auto g = gain_integral( params_for( 3, 3, 1e-3 ) );
    const double ratio = g.exact / g.leading_order;
    EXPECT_GE( ratio, 0.9 );
    EXPECT_LE( ratio, 1.1 );
}

TEST( ImpatientBound, ThetaZeroIsSdk )
{
    const auto p = params_for( 3, 3 );
    EXPECT_NEAR( impatient_bound( p ), s_dk( p ), 1e-12 );
}

TEST( ImpatientBound, ContinuousInTheta )
{
    const auto base = params_for( 3, 3 );
    double prev = impatient_bound( base );
    for ( int i = 1; i <= 200; ++i )
    {
        const double v = impatient_bound( params_for( 3, 3, 0.3 * i / 200 ) );
        EXPECT_LT( std::abs( v - prev ), 5e-3 );
        prev = v;
    }
}

TEST( Multiplier, NegativeFromThree )
{
    for ( unsigned d = 3; d <= 64; ++d )
        EXPECT_LT( gain_multiplier( d ), 0.0 );
    EXPECT_NEAR( gain_multiplier( 3 ), 3 - 2 * std::log2( 3.0 ), 1e-15 );
    EXPECT_NEAR( gain_multiplier( 3 ), -0.16993, 1e-5 );
    EXPECT_DOUBLE_EQ( gain_multiplier( 2 ), 0.0 );
}

TEST( Privileged, PositiveForDefaultCounts )
{
    for ( unsigned d = 3; d <= 5; ++d )
        for ( unsigned k = 2; k <= 5; ++k )
            EXPECT_GT( epsilon_privileged( params_for( d, k ) ), 0.0 );
}

TEST( Privileged, ZeroCountsIsEnvelope )
{
    const auto p = params_for( 3, 3 );
    const double eps0 = epsilon_privileged( p, { 0, 0 } );
    EXPECT_GE( eps0, epsilon_privileged( p ) );
    const double direct = std::numbers::log2e / 3 * integrate(
                                                         [ & ]( double x ) {
                                                             const double q = solve_Q( x, p );
                                                             const double m = 1 - q * q;
                                                             return ( x - x * x ) * m * m * ( 1 - x ) * ( 1 - x );
                                                         },
                                                         0.0, p.critical_p() );
    EXPECT_NEAR( eps0, direct, 1e-9 * direct );
}

TEST( Optimize, ThreeThreeImproves )
{
    const auto r = optimize_theta( params_for( 3, 3 ) );
    EXPECT_GT( r.theta, 0.0 );
    EXPECT_TRUE( r.improves() );
    EXPECT_TRUE( r.in_theorem_scope );
    EXPECT_LT( r.loss + r.gain, 0.0 );
    EXPECT_GT( r.epsilon_privileged, r.eligibility * r.theta );
    EXPECT_LE( r.final_bound, r.s_dk );
}

TEST( Optimize, BinaryDomainOutOfScope )
{
    const auto r = optimize_theta( params_for( 2, 3 ) );
    EXPECT_FALSE( r.in_theorem_scope );
    EXPECT_FALSE( r.improves() );
}

TEST( Optimize, DegenerateGrid )
{
    const auto r = optimize_theta( params_for( 3, 3 ), { 0.0 } );
    EXPECT_EQ( r.theta, 0.0 );
    EXPECT_EQ( r.final_bound, r.s_dk );
    EXPECT_FALSE( r.improves() );
    EXPECT_THROW( (void)optimize_theta( params_for( 3, 3 ), {} ), std::invalid_argument );
}

TEST( Optimize, RefinementBeatsGrid )
{
    const auto p = params_for( 3, 3 );
    const auto grid = default_theta_grid();
    const auto r = optimize_theta( p, grid );
    for ( double t : grid )
        EXPECT_GE( r.improvement, evaluate_exponent( params_for( 3, 3, t ) ).improvement );
}

TEST( Grid, Geometric )
{
    const auto g = geometric_grid( 1e-4, 1.0, 5 );
    ASSERT_EQ( g.size(), 5U );
    EXPECT_DOUBLE_EQ( g.front(), 1e-4 );
    EXPECT_DOUBLE_EQ( g.back(), 1.0 );
    EXPECT_NEAR( g[ 2 ], 1e-2, 1e-15 );
    EXPECT_THROW( (void)geometric_grid( 0.0, 1.0, 3 ), std::invalid_argument );
}

TEST( Curves, SampleShape )
{
    const auto s = sample_curves( params_for( 3, 3, 0.1 ), 11 );
    ASSERT_EQ( s.size(), 11U );
    EXPECT_EQ( s.front().p, 0.0 );
    EXPECT_EQ( s.back().p, 1.0 );
    for ( const auto& c : s )
    {
        EXPECT_DOUBLE_EQ( c.Q, c.R * c.R );
        EXPECT_GE( c.W, c.R );
    }
}

TEST( Params, Validation )
{
    EXPECT_THROW( params_for( 1, 3 ).validate(), std::invalid_argument );
    EXPECT_THROW( params_for( 3, 3, 1.5 ).validate(), std::invalid_argument );
    EXPECT_THROW( (void)s_dk( params_for( 3, 1 ) ), std::invalid_argument );
}
