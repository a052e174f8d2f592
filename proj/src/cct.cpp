#include "ippsz/cct.hpp"

#include "ippsz/rng.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace ippsz
{

ClauseTree::ClauseTree( unsigned d, unsigned k, unsigned height ) : _d{ d }, _k{ k }, _height{ height }
{
    if ( d < 2 || k < 2 )
        throw std::invalid_argument( "ClauseTree: need d, k >= 2" );
    if ( height % 2 == 0 )
        throw std::invalid_argument( "ClauseTree: height must be odd" );
}

std::size_t ClauseTree::add( TreeNode n )
{
    _nodes.push_back( std::move( n ) );
    const std::size_t id = _nodes.size() - 1;
    if ( _nodes[ id ].parent != kNoParent )
        _nodes[ _nodes[ id ].parent ].children.push_back( id );
    return id;
}

Var ClauseTree::label_bound() const
{
    Var top = 0;
    for ( const auto& n : _nodes )
        if ( n.kind == NodeKind::variable )
            top = std::max( top, n.label + 1 );
    return top;
}

std::size_t ClauseTree::count( NodeKind kind, unsigned level ) const
{
    return static_cast< std::size_t >( std::count_if( _nodes.begin(), _nodes.end(), [ & ]( const TreeNode& n ) {
        return n.kind == kind && n.level == level;
    } ) );
}

std::vector< std::size_t > ClauseTree::safe_leaves() const
{
    std::vector< std::size_t > out;
    for ( std::size_t i = 0; i < _nodes.size(); ++i )
        if ( _nodes[ i ].kind == NodeKind::variable && _nodes[ i ].children.empty() )
            out.push_back( i );
    return out;
}

std::vector< std::size_t > ClauseTree::unsafe_leaves() const
{
    std::vector< std::size_t > out;
    for ( std::size_t i = 0; i < _nodes.size(); ++i )
        if ( _nodes[ i ].kind == NodeKind::clause && _nodes[ i ].children.empty() )
            out.push_back( i );
    return out;
}

void ClauseTree::check_path_labels() const
{
    for ( std::size_t i = 0; i < _nodes.size(); ++i )
    {
        if ( _nodes[ i ].kind != NodeKind::variable )
            continue;
        for ( std::size_t a = _nodes[ i ].parent; a != kNoParent; a = _nodes[ a ].parent )
            if ( _nodes[ a ].kind == NodeKind::variable && _nodes[ a ].label == _nodes[ i ].label )
                throw std::logic_error( "ClauseTree: label " + std::to_string( _nodes[ i ].label ) +
                                        " repeats on a root path" );
    }
}

ClauseTree build_cct( const Formula& f, const Assignment& alpha_star, Var x, Color c, unsigned h )
{
    if ( alpha_star.size() != f.n() || x >= f.n() )
        throw std::invalid_argument( "build_cct: variable or assignment out of range" );
    if ( c < 1 || c > f.d() || c == alpha_star[ x ] )
        throw std::invalid_argument( "build_cct: c must be a color other than alpha*(x)" );
    if ( !satisfies( alpha_star, f ) )
        throw std::invalid_argument( "build_cct: alpha* does not satisfy the formula" );

    ClauseTree t{ f.d(), f.k(), h };
    TreeNode root;
    root.beta = PartialAssignment( f.n() );
    for ( Var v = 0; v < f.n(); ++v )
        root.beta.bind( v, v == x ? c : alpha_star[ v ] );
    t.add( std::move( root ) );

    std::deque< std::size_t > open{ 0 };
    while ( !open.empty() )
    {
        const std::size_t u = open.front();
        open.pop_front();
        const PartialAssignment beta = t.node( u ).beta;
        const unsigned level = t.node( u ).level;

        std::size_t found = f.size();
        for ( std::size_t i = 0; i < f.size() && found == f.size(); ++i )
            if ( std::all_of( f[ i ].literals.begin(), f[ i ].literals.end(),
                              [ & ]( const Literal& l ) { return beta[ l.var ] == l.color; } ) )
                found = i;
        if ( found == f.size() )
            throw std::logic_error( "build_cct: assignment label violates no clause" );
        t.set_clause( u, found );

        for ( const Literal& lit : f[ found ].literals )
        {
            if ( lit.color != alpha_star[ lit.var ] )
                continue;
            TreeNode v;
            v.kind = NodeKind::variable;
            v.level = level + 1;
            v.parent = u;
            v.label = lit.var;
            const std::size_t vid = t.add( std::move( v ) );
            if ( level + 1 >= h )
                continue;
            for ( Color i = 1; i <= f.d(); ++i )
            {
                if ( i == alpha_star[ lit.var ] )
                    continue;
                TreeNode w;
                w.level = level + 2;
                w.parent = vid;
                w.edge_color = i;
                w.beta = beta;
                w.beta.unbind( lit.var );
                w.beta.bind( lit.var, i );
                open.push_back( t.add( std::move( w ) ) );
            }
        }
    }
    t.check_path_labels();
    return t;
}

ClauseTree build_cct( const UniqueInstance& inst, Var x, Color c, unsigned h )
{
    return build_cct( inst.formula(), inst.solution(), x, c, h );
}

unsigned choose_height( unsigned strength, unsigned d, unsigned k )
{
    if ( strength < 1 )
        throw std::invalid_argument( "choose_height: D must be >= 1" );
    const std::uint64_t L = static_cast< std::uint64_t >( d - 1 ) * ( k - 1 );
    unsigned ht = 0;
    std::uint64_t term = 1;
    std::uint64_t sum = 1;
    for ( ;; )
    {
        term *= L;
        if ( sum + term > strength )
            break;
        sum += term;
        ++ht;
    }
    return 2 * ht + 1;
}

std::optional< Privilege > privilege_of( const ClauseTree& t )
{
    if ( t.height() < 3 )
        throw std::invalid_argument( "privilege_of: tree must have height >= 3" );
    const unsigned d = t.d();
    const unsigned k = t.k();
    const std::size_t full = static_cast< std::size_t >( k - 1 ) * ( k - 1 ) * ( d - 1 );
    const std::size_t level3 = t.count( NodeKind::variable, 3 );
    if ( level3 < full )
    {
        std::ostringstream why;
        why << level3 << " of " << full << " variable nodes on level 3";
        for ( std::size_t i = 0; i < t.size(); ++i )
        {
            const auto& n = t.node( i );
            if ( n.kind == NodeKind::clause && n.level <= 2 && n.children.size() < k - 1 )
            {
                why << "; clause node " << i << " on level " << n.level;
                if ( n.clause )
                    why << " (clause " << *n.clause << ")";
                why << " has " << n.children.size() << " children";
                break;
            }
        }
        return Privilege{ 0, PrivilegeKind::short_clause_node, why.str() };
    }
    for ( std::size_t i = 0; i < t.size(); ++i )
    {
        const auto& a = t.node( i );
        if ( a.kind != NodeKind::variable || a.level > 3 )
            continue;
        for ( std::size_t j = i + 1; j < t.size(); ++j )
        {
            const auto& b = t.node( j );
            if ( b.kind == NodeKind::variable && b.level <= 3 && b.label == a.label )
            {
                std::ostringstream why;
                why << "variable " << a.label << " labels nodes " << i << " (level " << a.level
                    << ") and " << j << " (level " << b.level << ")";
                return Privilege{ 0, PrivilegeKind::repeated_label, why.str() };
            }
        }
    }
    return std::nullopt;
}

std::optional< Privilege > is_privileged( const UniqueInstance& inst, Var x )
{
    const auto& f = inst.formula();
    for ( Color c = 1; c <= f.d(); ++c )
    {
        if ( c == inst.solution()[ x ] )
            continue;
        if ( auto p = privilege_of( build_cct( inst, x, c, 3 ) ) )
        {
            p->color = c;
            return p;
        }
    }
    return std::nullopt;
}

ClauseTree make_abstract_tree( unsigned d, unsigned k, unsigned h, const std::vector< Var >& labels )
{
    ClauseTree t{ d, k, h };
    t.add( TreeNode{} );
    Var next = 0;
    std::deque< std::size_t > open{ 0 };
    while ( !open.empty() )
    {
        const std::size_t u = open.front();
        open.pop_front();
        const unsigned level = t.node( u ).level;
        for ( unsigned j = 0; j + 1 < k; ++j )
        {
            TreeNode v;
            v.kind = NodeKind::variable;
            v.level = level + 1;
            v.parent = u;
            if ( labels.empty() )
                v.label = next++;
            else
            {
                if ( next >= labels.size() )
                    throw std::invalid_argument( "make_abstract_tree: label map too short" );
                v.label = labels[ next++ ];
            }
            const std::size_t vid = t.add( std::move( v ) );
            if ( level + 1 >= h )
                continue;
            for ( Color i = 1; i < d; ++i )
            {
                TreeNode w;
                w.level = level + 2;
                w.parent = vid;
                w.edge_color = i;
                open.push_back( t.add( std::move( w ) ) );
            }
        }
    }
    return t;
}

bool cut_event_at( const ClauseTree& t, std::size_t v, std::span< const double > positions, double p,
                   unsigned height )
{
    const TreeNode& n = t.node( v );
    if ( n.kind == NodeKind::clause )
    {
        for ( std::size_t w : n.children )
            if ( !cut_event_at( t, w, positions, p, height ) )
                return false;
        return true;
    }
    if ( positions[ n.label ] < p )
        return true;
    if ( n.level >= height || n.children.empty() )
        return false;
    for ( std::size_t w : n.children )
        if ( !cut_event_at( t, w, positions, p, height ) )
            return false;
    return true;
}

bool cut_event( const ClauseTree& t, std::span< const double > positions, double p,
                std::optional< unsigned > height )
{
    const unsigned h = height.value_or( t.height() );
    if ( h > t.height() || h % 2 == 0 )
        throw std::invalid_argument( "cut_event: truncation height must be odd and <= tree height" );
    if ( positions.size() < t.label_bound() )
        throw std::invalid_argument( "cut_event: positions do not cover every label" );
    return cut_event_at( t, ClauseTree::root(), positions, p, h );
}

bool local_imp_cut( const ClauseTree& t, std::size_t v, std::span< const double > positions,
                    std::span< const std::uint8_t > marks, double p )
{
    const TreeNode& n = t.node( v );
    if ( n.level == 2 )
    {
        for ( std::size_t w : n.children )
            if ( !( positions[ t.node( w ).label ] < p ) )
                return false;
        return true;
    }
    if ( n.level != 1 )
        throw std::invalid_argument( "local_imp_cut: node must be on level 1 or 2" );
    if ( positions[ n.label ] < p )
        return true;
    if ( !marks[ n.label ] )
        return false;
    std::size_t cut = 0;
    for ( std::size_t w : n.children )
        cut += local_imp_cut( t, w, positions, marks, p ) ? 1 : 0;
    return cut + 2 >= t.d();
}

bool is_critical_shape( const ClauseTree& t )
{
    if ( t.height() < 3 )
        return false;
    for ( const auto& n : t.nodes() )
    {
        if ( n.kind == NodeKind::clause && n.level == 2 && n.children.size() != t.k() - 1 )
            return false;
        if ( n.kind == NodeKind::variable && n.level == 1 && n.children.size() != t.d() - 1 )
            return false;
    }
    return true;
}

bool imp_cut_event( const ClauseTree& t, std::span< const double > positions,
                    std::span< const std::uint8_t > marks, double p,
                    std::optional< unsigned > cut_height )
{
    if ( !is_critical_shape( t ) )
        throw std::invalid_argument( "imp_cut_event: level-2 clause labels must be critical" );
    const unsigned h = cut_height.value_or( t.height() );
    if ( h > t.height() || h % 2 == 0 )
        throw std::invalid_argument( "imp_cut_event: cut height must be odd and <= tree height" );
    if ( positions.size() < t.label_bound() || marks.size() < t.label_bound() )
        throw std::invalid_argument( "imp_cut_event: positions or marks do not cover every label" );
    for ( std::size_t v : t.node( ClauseTree::root() ).children )
        if ( !cut_event_at( t, v, positions, p, h ) && !local_imp_cut( t, v, positions, marks, p ) )
            return false;
    return true;
}

std::string to_dot( const ClauseTree& t, const Formula* f )
{
    std::ostringstream out;
    out << "digraph cct {\n  node [fontname=\"monospace\"];\n";
    for ( std::size_t i = 0; i < t.size(); ++i )
    {
        const auto& n = t.node( i );
        out << "  n" << i << " [";
        if ( n.kind == NodeKind::variable )
            out << "shape=circle,label=\"x" << n.label + 1 << "\"";
        else
        {
            out << "shape=box,label=\"";
            if ( n.clause && f )
            {
                const auto& lits = ( *f )[ *n.clause ].literals;
                for ( std::size_t j = 0; j < lits.size(); ++j )
                    out << ( j ? " | " : "" ) << "x" << lits[ j ].var + 1 << "!=" << lits[ j ].color;
            }
            else if ( n.clause )
                out << "C" << *n.clause;
            out << "\"";
            if ( n.children.empty() )
                out << ",style=dashed";
        }
        out << "];\n";
    }
    for ( std::size_t i = 0; i < t.size(); ++i )
        for ( std::size_t w : t.node( i ).children )
        {
            out << "  n" << i << " -> n" << w;
            if ( t.node( w ).edge_color )
                out << " [label=\"" << t.node( w ).edge_color << "\"]";
            out << ";\n";
        }
    out << "}\n";
    return out.str();
}

double truncated_cut_probability( double p, unsigned d, unsigned k, unsigned h )
{
    if ( h % 2 == 0 )
        throw std::invalid_argument( "truncated_cut_probability: h must be odd" );
    double v = p; // variable node on level h
    for ( unsigned level = h; level > 1; level -= 2 )
    {
        const double clause = std::pow( v, k - 1 );
        v = p + ( 1.0 - p ) * std::pow( clause, d - 1 );
    }
    return std::pow( v, k - 1 );
}

namespace
{

constexpr std::uint64_t kMarkSalt = 0x6a09e667f3bcc909ULL;

std::uint64_t child_id( std::uint64_t parent, unsigned j )
{
    return mix64( parent * 0x9e3779b97f4a7c15ULL + j + 1 );
}

double hashed_uniform( std::uint64_t seed, std::uint64_t id )
{
    return static_cast< double >( mix64( seed ^ id ) >> 11 ) * 0x1.0p-53;
}

// Lazy evaluation on the infinite all-distinct tree, identified by node ids.
struct LazyTree
{
    unsigned d;
    unsigned k;
    double p;
    std::uint64_t seed;

    double position( std::uint64_t id ) const { return hashed_uniform( seed, id ); }

    bool cut_var( std::uint64_t id, unsigned level, unsigned h ) const
    {
        if ( position( id ) < p )
            return true;
        if ( level >= h )
            return false;
        for ( unsigned j = 0; j + 1 < d; ++j )
            if ( !cut_clause( child_id( id, j ), level + 1, h ) )
                return false;
        return true;
    }

    bool cut_clause( std::uint64_t id, unsigned level, unsigned h ) const
    {
        for ( unsigned j = 0; j + 1 < k; ++j )
            if ( !cut_var( child_id( id, j ), level + 1, h ) )
                return false;
        return true;
    }

    bool local_imp_cut( std::uint64_t y, double theta, double eligibility ) const
    {
        const double py = position( y );
        if ( py < p )
            return true;
        const bool marked = py < theta && hashed_uniform( seed ^ kMarkSalt, y ) < eligibility;
        if ( !marked )
            return false;
        unsigned cut = 0;
        for ( unsigned j = 0; j + 1 < d; ++j )
        {
            const std::uint64_t w = child_id( y, j );
            bool all = true;
            for ( unsigned i = 0; i + 1 < k && all; ++i )
                all = position( child_id( w, i ) ) < p;
            cut += all ? 1 : 0;
        }
        return cut + 2 >= d;
    }

    bool imp_cut( std::uint64_t root, unsigned h, double theta, double eligibility ) const
    {
        for ( unsigned j = 0; j + 1 < k; ++j )
        {
            const std::uint64_t y = child_id( root, j );
            if ( !cut_var( y, 1, h ) && !local_imp_cut( y, theta, eligibility ) )
                return false;
        }
        return true;
    }
};

constexpr std::uint64_t kRootId = 0x243f6a8885a308d3ULL;

template < class Body >
std::uint64_t count_trials( std::uint64_t trials, Exec exec, Body&& body )
{
    std::uint64_t hits = 0;
    const auto n = static_cast< std::int64_t >( trials );
    if ( exec == Exec::openmp )
    {
#pragma omp parallel for schedule( static ) reduction( + : hits )
        for ( std::int64_t t = 0; t < n; ++t )
            hits += body( static_cast< std::uint64_t >( t ) );
    }
    else
    {
        for ( std::int64_t t = 0; t < n; ++t )
            hits += body( static_cast< std::uint64_t >( t ) );
    }
    return hits;
}

template < class Body >
std::vector< std::uint64_t > histogram_trials( std::uint64_t trials, unsigned bins, Exec exec,
                                               Body&& body )
{
    std::vector< std::uint64_t > hist( bins, 0 );
    const auto n = static_cast< std::int64_t >( trials );
    if ( exec == Exec::openmp )
    {
#pragma omp parallel
        {
            std::vector< std::uint64_t > local( bins, 0 );
#pragma omp for schedule( static )
            for ( std::int64_t t = 0; t < n; ++t )
                ++local[ body( static_cast< std::uint64_t >( t ) ) ];
#pragma omp critical
            for ( unsigned b = 0; b < bins; ++b )
                hist[ b ] += local[ b ];
        }
    }
    else
    {
        for ( std::int64_t t = 0; t < n; ++t )
            ++hist[ body( static_cast< std::uint64_t >( t ) ) ];
    }
    return hist;
}

} // namespace

Estimate mc_cut_probability( const AbstractTreeSpec& spec, double p, std::uint64_t trials,
                             std::uint64_t seed, Exec exec )
{
    if ( trials < 1 )
        throw std::invalid_argument( "mc_cut_probability: trials must be >= 1" );
    if ( spec.height % 2 == 0 || spec.d < 2 || spec.k < 2 )
        throw std::invalid_argument( "mc_cut_probability: bad tree spec" );
    const unsigned h = spec.cut_height.value_or( spec.height );
    const std::uint64_t hits = count_trials( trials, exec, [ & ]( std::uint64_t t ) -> std::uint64_t {
        const LazyTree tree{ spec.d, spec.k, p, derive_seed( seed, t ) };
        return spec.impatient ? tree.imp_cut( kRootId, h, spec.theta, spec.eligibility )
                              : tree.cut_clause( kRootId, 0, spec.height );
    } );
    Estimate e;
    e.trials = trials;
    e.mean = static_cast< double >( hits ) / trials;
    e.std_error = std::sqrt( e.mean * ( 1.0 - e.mean ) / static_cast< double >( trials ) );
    return e;
}

Estimate mc_s_dk( unsigned d, unsigned k, unsigned h, unsigned strata,
                  std::uint64_t trials_per_stratum, std::uint64_t seed, Exec exec )
{
    if ( strata < 1 || trials_per_stratum < 2 )
        throw std::invalid_argument( "mc_s_dk: need strata >= 1 and >= 2 trials per stratum" );
    Estimate out;
    double variance = 0.0;
    for ( unsigned s = 0; s < strata; ++s )
    {
        // Histogram of J_1 + ... + J_{d-1}; integer counts keep the parallel
        // reduction exact.
        const auto hist = histogram_trials( trials_per_stratum, d, exec, [ & ]( std::uint64_t t ) {
            const std::uint64_t ts = derive_seed( seed, s, t );
            const double p = ( s + hashed_uniform( ts, 0x13198a2e03707344ULL ) ) / strata;
            const LazyTree tree{ d, k, p, ts };
            unsigned alive = 0;
            for ( unsigned c = 0; c + 1 < d; ++c )
                alive += tree.cut_clause( child_id( kRootId, 1000 + c ), 0, h ) ? 0 : 1;
            return alive;
        } );
        const double n = static_cast< double >( trials_per_stratum );
        double mean = 0.0;
        for ( unsigned j = 0; j < d; ++j )
            mean += hist[ j ] * std::log2( j + 1.0 ) / n;
        double var = 0.0;
        for ( unsigned j = 0; j < d; ++j )
        {
            const double dev = std::log2( j + 1.0 ) - mean;
            var += hist[ j ] * dev * dev;
        }
        var /= ( n - 1.0 );
        out.mean += mean / strata;
        variance += var / n / ( static_cast< double >( strata ) * strata );
    }
    out.trials = static_cast< std::uint64_t >( strata ) * trials_per_stratum;
    out.std_error = std::sqrt( variance );
    return out;
}

bool CutCheck::ok() const
{
    return std::all_of( colors.begin(), colors.end(), []( const auto& c ) { return c.ok(); } );
}

std::string CutCheck::counterexample( const Placement& placement ) const
{
    std::ostringstream out;
    for ( const auto& c : colors )
    {
        if ( c.ok() )
            continue;
        out << "x=" << x << " c=" << c.color << ( c.cut && c.regular_plausible ? " Cut but plausible" : "" )
            << ( c.imp_checked && c.imp_cut && c.impatient_plausible ? " ImpCut but plausible" : "" )
            << "; positions:";
        for ( Var v = 0; v < placement.size(); ++v )
            out << ' ' << placement.positions[ v ] << ( placement.marked( v ) ? "*" : "" );
        out << '\n';
    }
    return out.str();
}

CutCheck verify_cut_implies_ruled_out( const ExactOracle& oracle, Var x, const Placement& placement )
{
    const auto& inst = oracle.instance();
    const auto& f = inst.formula();
    const unsigned h = choose_height( oracle.plausibility().strength(), f.d(), f.k() );
    const auto ind = oracle.indicators( placement, x );
    const double p = placement.positions[ x ];

    CutCheck out;
    out.x = x;
    for ( Color c = 1; c <= f.d(); ++c )
    {
        if ( c == inst.solution()[ x ] )
            continue;
        const auto t = build_cct( inst, x, c, std::max( h, 3U ) );
        ColorCutCheck r;
        r.color = c;
        r.regular_plausible = ind.regular.contains( c );
        r.impatient_plausible = ind.impatient.contains( c );
        r.cut = cut_event( t, placement.positions, p, h );
        r.imp_checked = is_critical_shape( t );
        if ( r.imp_checked )
            r.imp_cut = imp_cut_event( t, placement.positions, placement.marks, p, h );
        out.colors.push_back( r );
    }
    return out;
}

} // namespace ippsz
