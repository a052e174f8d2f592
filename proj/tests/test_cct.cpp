#include "ippsz/cct.hpp"
#include "ippsz/exponent.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace ippsz;
using namespace ippsz::testing;

namespace
{

ClauseTree example_tree()
{
    return build_cct( ex::formula(), ex::solution(), ex::x, 1, 3 );
}

Placement example_placement( const std::vector< Var >& order, bool marked )
{
    std::vector< std::uint8_t > marks( ex::n, 0 );
    if ( marked )
        for ( std::size_t i = 0; i < ex::below_theta; ++i )
            marks[ order[ i ] ] = 1;
    return placement_from_order( order, 0.5, ex::below_theta, marks );
}

std::vector< Var > random_labels( std::size_t count, Var pool, Rng& rng )
{
    std::vector< Var > out( count );
    for ( auto& l : out )
        l = static_cast< Var >( rng.below( pool ) );
    return out;
}

std::vector< double > random_positions( Var n, Rng& rng )
{
    std::vector< double > out( n );
    for ( auto& x : out )
        x = rng.uniform();
    return out;
}

std::size_t variable_nodes( unsigned d, unsigned k, unsigned h )
{
    std::size_t total = 0;
    std::size_t level = k - 1;
    for ( unsigned l = 1; l <= h; l += 2 )
    {
        total += level;
        level *= ( d - 1 ) * ( k - 1 );
    }
    return total;
}

} // namespace

TEST( BuildCct, ExampleTree )
{
    const auto t = example_tree();
    const auto& f = ex::formula();
    ASSERT_TRUE( t.node( 0 ).clause.has_value() );
    EXPECT_EQ( *t.node( 0 ).clause, 0U );
    EXPECT_EQ( t.node( 0 ).children.size(), 2U );
    std::vector< std::size_t > level2;
    for ( std::size_t i = 0; i < t.size(); ++i )
        if ( t.node( i ).kind == NodeKind::clause && t.node( i ).level == 2 )
            level2.push_back( *t.node( i ).clause );
    std::sort( level2.begin(), level2.end() );
    EXPECT_EQ( level2, ( std::vector< std::size_t >{ 1, 2, 3, 4 } ) );
    EXPECT_EQ( t.count( NodeKind::variable, 3 ), 8U );
    EXPECT_EQ( t.safe_leaves().size(), 8U );
    EXPECT_TRUE( t.unsafe_leaves().empty() );
    for ( std::size_t i = 0; i < t.size(); ++i )
    {
        const auto& n = t.node( i );
        if ( n.kind == NodeKind::clause && n.level == 2 )
        {
            const Var parent = t.node( n.parent ).label;
            const auto& c = f[ *n.clause ];
            EXPECT_TRUE( std::find( c.literals.begin(), c.literals.end(),
                                    Literal{ parent, n.edge_color } ) != c.literals.end() );
        }
    }
    EXPECT_NO_THROW( t.check_path_labels() );
    EXPECT_FALSE( privilege_of( t ).has_value() );
}

TEST( BuildCct, HeightOneIsRootAndLeaves )
{
    const auto t = build_cct( ex::formula(), ex::solution(), ex::x, 1, 1 );
    EXPECT_EQ( t.size(), 3U );
    EXPECT_EQ( t.safe_leaves().size(), 2U );
}

TEST( BuildCct, ShapeInvariantsOnRandomInstances )
{
    for ( const auto& f : unique_formulas( 6, 3, 3, 7, 110, 3 ) )
    {
        const auto inst = UniqueInstance::verify( f );
        for ( Var x = 0; x < f.n(); ++x )
            for ( Color c = 1; c < 3; ++c )
            {
                const auto t = build_cct( inst, x, c, 5 );
                EXPECT_NO_THROW( t.check_path_labels() );
                const auto& root = f[ *t.node( 0 ).clause ].literals;
                const bool critical = root.size() == 3 &&
                                      std::count_if( root.begin(), root.end(), []( const Literal& l ) {
                                          return l.color == 3;
                                      } ) == 2;
                if ( critical )
                    EXPECT_EQ( t.node( 0 ).children.size(), 2U );
                for ( const auto& n : t.nodes() )
                {
                    if ( n.kind == NodeKind::clause )
                        EXPECT_LE( n.children.size(), 2U );
                    else if ( n.level < 5 )
                    {
                        ASSERT_EQ( n.children.size(), 2U );
                        EXPECT_EQ( t.node( n.children[ 0 ] ).edge_color, 1U );
                        EXPECT_EQ( t.node( n.children[ 1 ] ).edge_color, 2U );
                    }
                }
            }
    }
}

TEST( BuildCct, RejectsBadArguments )
{
    EXPECT_THROW( (void)build_cct( ex::formula(), ex::solution(), ex::x, 3, 3 ), std::invalid_argument );
    EXPECT_THROW( (void)build_cct( ex::formula(), ex::solution(), ex::x, 1, 2 ), std::invalid_argument );
    EXPECT_THROW( (void)build_cct( ex::formula(), Assignment( ex::n, 1 ), ex::x, 2, 3 ), std::logic_error );
}

TEST( ChooseHeight, Cases )
{
    EXPECT_EQ( choose_height( 1, 3, 3 ), 1U );
    EXPECT_EQ( choose_height( 5, 3, 3 ), 3U );
    EXPECT_EQ( choose_height( 4, 3, 3 ), 1U );
    EXPECT_EQ( choose_height( 20, 3, 3 ), 3U );
    EXPECT_EQ( choose_height( 21, 3, 3 ), 5U );
    EXPECT_THROW( (void)choose_height( 0, 3, 3 ), std::invalid_argument );
}

TEST( Privilege, MissingChildIsPrivileged )
{
    using namespace ex;
    // (y x u != 1 1 3): only u points at the solution, so the clause node
    // under y has a single child.
    const Formula f{ 3,
                     3,
                     n,
                     { clause( { { x, 1 }, { y, 3 }, { z, 3 } } ),
                       clause( { { y, 1 }, { x, 1 }, { u, 3 } } ),
                       clause( { { y, 2 }, { a, 3 }, { b, 3 } } ),
                       clause( { { z, 1 }, { e, 3 }, { w, 3 } } ),
                       clause( { { z, 2 }, { x, 1 }, { r, 3 } } ) } };
    const auto t = build_cct( f, solution(), x, 1, 3 );
    const auto p = privilege_of( t );
    ASSERT_TRUE( p.has_value() );
    EXPECT_EQ( p->kind, PrivilegeKind::short_clause_node );
    EXPECT_FALSE( p->reason.empty() );
    EXPECT_FALSE( is_critical_shape( t ) );
}

TEST( Privilege, RepeatedLabelIsPrivileged )
{
    std::vector< Var > labels( variable_nodes( 3, 3, 3 ) );
    std::iota( labels.begin(), labels.end(), Var{ 0 } );
    labels[ 5 ] = labels[ 0 ];
    const auto t = make_abstract_tree( 3, 3, 3, labels );
    const auto p = privilege_of( t );
    ASSERT_TRUE( p.has_value() );
    EXPECT_EQ( p->kind, PrivilegeKind::repeated_label );
}

TEST( Privilege, FullDistinctTreeNotPrivileged )
{
    EXPECT_FALSE( privilege_of( make_abstract_tree( 3, 3, 3 ) ).has_value() );
    EXPECT_FALSE( privilege_of( make_abstract_tree( 4, 2, 5 ) ).has_value() );
    EXPECT_THROW( (void)privilege_of( make_abstract_tree( 3, 3, 1 ) ), std::invalid_argument );
}

namespace
{

// Critical clauses for both wrong colors of x, followed by units that pin
// every variable to 3. `repeat` reuses u inside y's second clause.
UniqueInstance critical_instance( bool repeat )
{
    using namespace ex;
    Formula f{ 3,
               3,
               n,
               { clause( { { x, 1 }, { y, 3 }, { z, 3 } } ),
                 clause( { { x, 2 }, { y, 3 }, { z, 3 } } ),
                 clause( { { y, 1 }, { u, 3 }, { v, 3 } } ),
                 clause( { { y, 2 }, { a, 3 }, { repeat ? u : b, 3 } } ),
                 clause( { { z, 1 }, { e, 3 }, { w, 3 } } ),
                 clause( { { z, 2 }, { r, 3 }, { s, 3 } } ) } };
    for ( Var t = 0; t < n; ++t )
        for ( Color c : { 1U, 2U } )
            f.add( clause( { { t, c } } ) );
    return UniqueInstance::verify( f );
}

} // namespace

TEST( Privilege, FullTreesWithDistinctLabelsNotPrivileged )
{
    const auto inst = critical_instance( false );
    for ( Color c : { 1U, 2U } )
    {
        const auto t = build_cct( inst, ex::x, c, 3 );
        EXPECT_EQ( t.count( NodeKind::variable, 3 ), 8U );
        EXPECT_TRUE( is_critical_shape( t ) );
    }
    EXPECT_FALSE( is_privileged( inst, ex::x ).has_value() );
}

TEST( Privilege, InstanceWithRepeatedLabel )
{
    const auto p = is_privileged( critical_instance( true ), ex::x );
    ASSERT_TRUE( p.has_value() );
    EXPECT_EQ( p->kind, PrivilegeKind::repeated_label );
    EXPECT_EQ( p->color, 1U );
}

TEST( CutEvent, EverythingBelowP )
{
    const auto t = example_tree();
    const std::vector< double > pos( ex::n, 0.1 );
    EXPECT_TRUE( cut_event( t, pos, 1.0 ) );
    EXPECT_TRUE( cut_event( t, pos, 0.2 ) );
    EXPECT_FALSE( cut_event( t, pos, 0.05 ) );
}

TEST( CutEvent, ExamplePlacementNotCut )
{
    const auto order = ex::order();
    const auto pl = example_placement( order, true );
    const auto t = example_tree();
    const double p = pl.positions[ ex::x ];
    EXPECT_FALSE( cut_event( t, pl.positions, p ) );
    // The path through y and b is the one left open.
    auto pos = pl.positions;
    pos[ ex::b ] = 0.0;
    EXPECT_FALSE( cut_event( t, pos, p ) );
    pos[ ex::y ] = 0.0;
    EXPECT_FALSE( cut_event( t, pos, p ) );
    pos[ ex::e ] = 0.0;
    EXPECT_FALSE( cut_event( t, pos, p ) );
    pos[ ex::w ] = 0.0;
    EXPECT_TRUE( cut_event( t, pos, p ) );
}

TEST( CutEvent, EarlyYAndZCut )
{
    using namespace ex;
    const std::vector< Var > order{ y, z, r, s, u, v, x, e, w, a, b };
    const auto pl = example_placement( order, false );
    EXPECT_TRUE( cut_event( example_tree(), pl.positions, pl.positions[ x ] ) );
}

TEST( CutEvent, UnsafeLeafOnlyBranch )
{
    // A clause node without children is cut vacuously: no safe path runs
    // through it, so only the remaining branches matter.
    ClauseTree t{ 3, 3, 3 };
    t.add( TreeNode{} );
    TreeNode y;
    y.kind = NodeKind::variable;
    y.level = 1;
    y.label = 0;
    y.parent = 0;
    const auto yid = t.add( y );
    TreeNode leaf;
    leaf.level = 2;
    leaf.parent = yid;
    leaf.edge_color = 1;
    t.add( leaf );
    const std::vector< double > pos{ 0.9 };
    EXPECT_EQ( t.unsafe_leaves().size(), 1U );
    EXPECT_TRUE( t.safe_leaves().empty() );
    EXPECT_TRUE( cut_event( t, pos, 0.5 ) );
    EXPECT_FALSE( cut_event( t, pos, 0.5, 1 ) );
}

TEST( CutEvent, MonotoneInPAndPositions )
{
    Rng rng{ 17 };
    for ( int it = 0; it < 400; ++it )
    {
        const unsigned h = it % 2 ? 3 : 5;
        const auto t = make_abstract_tree( 3, 3, h, random_labels( variable_nodes( 3, 3, h ), 30, rng ) );
        auto pos = random_positions( 30, rng );
        const double p = rng.uniform();
        const bool cut = cut_event( t, pos, p );
        if ( cut )
        {
            EXPECT_TRUE( cut_event( t, pos, std::min( 1.0, p + 0.1 ) ) );
            pos[ rng.below( 30 ) ] = 0.0;
            EXPECT_TRUE( cut_event( t, pos, p ) );
        }
        else
        {
            EXPECT_FALSE( cut_event( t, pos, p * 0.9 ) );
            pos[ rng.below( 30 ) ] = 1.0;
            EXPECT_FALSE( cut_event( t, pos, p ) );
        }
        if ( h == 5 )
            EXPECT_LE( cut_event( t, pos, p, 3 ), cut_event( t, pos, p, 5 ) );
    }
}

TEST( ImpCut, AllBelowP )
{
    const auto t = example_tree();
    const std::vector< double > pos( ex::n, 0.1 );
    const std::vector< std::uint8_t > marks( ex::n, 0 );
    EXPECT_TRUE( imp_cut_event( t, pos, marks, 0.5 ) );
}

TEST( ImpCut, ExamplePlacementCutImpatiently )
{
    const auto pl = example_placement( ex::order(), true );
    const auto t = example_tree();
    const double p = pl.positions[ ex::x ];
    EXPECT_TRUE( imp_cut_event( t, pl.positions, pl.marks, p ) );
    const auto& root = t.node( 0 );
    for ( std::size_t v : root.children )
        EXPECT_TRUE( local_imp_cut( t, v, pl.positions, pl.marks, p ) );
    const auto unmarked = example_placement( ex::order(), false );
    EXPECT_FALSE( imp_cut_event( t, unmarked.positions, unmarked.marks, p ) );
}

TEST( ImpCut, ContainsCut )
{
    Rng rng{ 5 };
    for ( int it = 0; it < 500; ++it )
    {
        const unsigned h = 3 + 2 * ( it % 2 );
        const auto t = make_abstract_tree( 3, 3, h, random_labels( variable_nodes( 3, 3, h ), 25, rng ) );
        const auto pos = random_positions( 25, rng );
        std::vector< std::uint8_t > marks( 25 );
        for ( auto& m : marks )
            m = rng.bernoulli( 0.5 );
        const double p = rng.uniform();
        if ( cut_event( t, pos, p ) )
            EXPECT_TRUE( imp_cut_event( t, pos, marks, p ) );
    }
}

TEST( ImpCut, NoMarksEqualsCut )
{
    Rng rng{ 6 };
    for ( int it = 0; it < 500; ++it )
    {
        const unsigned d = 3 + it % 2;
        const unsigned h = 3 + 2 * ( it % 3 == 0 );
        const auto t = make_abstract_tree( d, 3, h, random_labels( variable_nodes( d, 3, h ), 40, rng ) );
        const auto pos = random_positions( 40, rng );
        const std::vector< std::uint8_t > marks( 40, 0 );
        const double p = rng.uniform();
        EXPECT_EQ( imp_cut_event( t, pos, marks, p ), cut_event( t, pos, p ) );
    }
}

TEST( ImpCut, MonotoneInMarksAndPositions )
{
    Rng rng{ 8 };
    for ( int it = 0; it < 500; ++it )
    {
        const auto t = make_abstract_tree( 3, 3, 3, random_labels( variable_nodes( 3, 3, 3 ), 12, rng ) );
        auto pos = random_positions( 12, rng );
        std::vector< std::uint8_t > marks( 12 );
        for ( auto& m : marks )
            m = rng.bernoulli( 0.5 );
        const double p = rng.uniform();
        const bool before = imp_cut_event( t, pos, marks, p );
        marks[ rng.below( 12 ) ] = 1;
        pos[ rng.below( 12 ) ] = 0.0;
        if ( before )
            EXPECT_TRUE( imp_cut_event( t, pos, marks, p ) );
    }
}

TEST( ImpCut, RequiresCriticalShape )
{
    const auto t = build_cct( ex::formula(), ex::solution(), ex::x, 1, 1 );
    const std::vector< double > pos( ex::n, 0.1 );
    const std::vector< std::uint8_t > marks( ex::n, 0 );
    EXPECT_THROW( (void)imp_cut_event( t, pos, marks, 0.5 ), std::invalid_argument );
}

TEST( Dot, RendersLabels )
{
    const auto f = ex::formula();
    const auto dot = to_dot( example_tree(), &f );
    EXPECT_NE( dot.find( "digraph" ), std::string::npos );
    EXPECT_NE( dot.find( "->" ), std::string::npos );
    EXPECT_EQ( std::count( dot.begin(), dot.end(), '{' ), std::count( dot.begin(), dot.end(), '}' ) );
}

TEST( TruncatedOracle, ConvergesToQ )
{
    ExponentParams params;
    for ( double p : { 0.1, 0.3, 0.5 } )
    {
        double prev = 0.0;
        for ( unsigned h = 1; h <= 41; h += 2 )
        {
            const double v = truncated_cut_probability( p, 3, 3, h );
            EXPECT_GE( v, prev - 1e-15 );
            prev = v;
        }
        EXPECT_NEAR( prev, solve_Q( p, params ), 1e-9 );
    }
}

TEST( MonteCarlo, ZeroAtPZero )
{
    const auto e = mc_cut_probability( { 3, 3, 5 }, 0.0, 2000, 1 );
    EXPECT_EQ( e.mean, 0.0 );
}

TEST( MonteCarlo, BinaryCaseMatchesClosedForm )
{
    // d = 2, k = 3: R = p / (1 - p) = 1/2 at p = 1/3, Q = R^2 = 1/4.
    const unsigned h = 61;
    const double p = 1.0 / 3.0;
    const auto e = mc_cut_probability( { 2, 3, h }, p, 40000, 3 );
    const double exact = truncated_cut_probability( p, 2, 3, h );
    EXPECT_NEAR( e.mean, exact, 3 * e.std_error + 1e-12 );
    EXPECT_NEAR( exact, 0.25, 0.01 );
}

TEST( MonteCarlo, MatchesTruncatedRecursion )
{
    for ( double p : { 0.2, 0.5, 0.8 } )
    {
        const auto e = mc_cut_probability( { 3, 3, 7 }, p, 20000, 11 );
        EXPECT_NEAR( e.mean, truncated_cut_probability( p, 3, 3, 7 ), 3 * e.std_error + 1e-12 );
    }
}

TEST( MonteCarlo, AboveCriticalNearOne )
{
    const auto e = mc_cut_probability( { 3, 3, 15 }, 0.9, 5000, 4 );
    EXPECT_GT( e.mean, 0.99 );
    EXPECT_NEAR( truncated_cut_probability( 0.9, 3, 3, 41 ), 1.0, 1e-6 );
}

TEST( MonteCarlo, NondecreasingInHeightPerTrial )
{
    double prev = 0.0;
    for ( unsigned h = 3; h <= 9; h += 2 )
    {
        const auto e = mc_cut_probability( { 3, 3, h }, 0.4, 20000, 8 );
        EXPECT_GE( e.mean, prev );
        prev = e.mean;
    }
}

TEST( MonteCarlo, ImpatientAtLeastRegular )
{
    AbstractTreeSpec spec{ 3, 3, 5 };
    spec.theta = 0.6;
    const auto regular = mc_cut_probability( spec, 0.3, 20000, 2 );
    spec.impatient = true;
    const auto imp = mc_cut_probability( spec, 0.3, 20000, 2 );
    EXPECT_GE( imp.mean, regular.mean );
    spec.theta = 0.0;
    EXPECT_EQ( mc_cut_probability( spec, 0.3, 20000, 2 ).mean, regular.mean );
}

TEST( MonteCarlo, SerialMatchesOpenMp )
{
    AbstractTreeSpec spec{ 3, 3, 7 };
    spec.impatient = true;
    spec.theta = 0.5;
    const auto a = mc_cut_probability( spec, 0.35, 30000, 9, Exec::serial );
    const auto b = mc_cut_probability( spec, 0.35, 30000, 9, Exec::openmp );
    EXPECT_EQ( a.mean, b.mean );
    const auto s1 = mc_s_dk( 3, 3, 5, 4, 5000, 1, Exec::serial );
    const auto s2 = mc_s_dk( 3, 3, 5, 4, 5000, 1, Exec::openmp );
    EXPECT_EQ( s1.mean, s2.mean );
    EXPECT_EQ( s1.std_error, s2.std_error );
}

TEST( MonteCarlo, SdkBinaryCase )
{
    const unsigned h = 41;
    const auto e = mc_s_dk( 2, 3, h, 8, 20000, 5 );
    ExponentParams params;
    params.d = 2;
    const double truncated =
        s_dk( params, [ & ]( double p ) { return truncated_cut_probability( p, 2, 3, h ); } );
    EXPECT_NEAR( e.mean, truncated, 3 * e.std_error );
    EXPECT_GT( truncated, 2 * std::log( 2.0 ) - 1 );
    EXPECT_LT( truncated, 2 * std::log( 2.0 ) - 1 + 0.02 );
}

TEST( CutImpliesRuledOut, VacuousWhenXFirst )
{
    for ( const auto& f : unique_formulas( 3, 3, 3, 6, 60, 9 ) )
    {
        const auto inst = UniqueInstance::verify( f );
        ExactOracle oracle{ inst, 3 };
        auto pl = sample_placement( 6, 0.5, 1 );
        pl.positions[ 0 ] = 0.0;
        std::fill( pl.marks.begin(), pl.marks.end(), 0 );
        const auto check = verify_cut_implies_ruled_out( oracle, 0, pl );
        EXPECT_TRUE( check.ok() );
        for ( const auto& c : check.colors )
            EXPECT_FALSE( c.cut );
    }
}

TEST( CutImpliesRuledOut, RandomPlacements )
{
    for ( const auto& f : unique_formulas( 5, 3, 3, 6, 60, 13 ) )
    {
        const auto inst = UniqueInstance::verify( f );
        ExactOracle oracle{ inst, 3 };
        for ( std::uint64_t s = 0; s < 200; ++s )
        {
            const auto pl = sample_placement( 6, 0.6, s, 0.8 );
            for ( Var x = 0; x < 6; ++x )
            {
                const auto check = verify_cut_implies_ruled_out( oracle, x, pl );
                EXPECT_TRUE( check.ok() ) << check.counterexample( pl );
            }
        }
    }
}
