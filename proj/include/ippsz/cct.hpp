#pragma once

// Critical clause trees T^h_{x,c}, abstract labeled trees, and the cut
// events evaluated on them.
//
// Levels alternate: clause nodes on even levels (root at 0), variable nodes
// on odd levels. A variable node at the height bound is a safe leaf; a clause
// node without children is an unsafe leaf.

#include "ippsz/csp.hpp"
#include "ippsz/parallel.hpp"
#include "ippsz/solver.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ippsz
{

enum class NodeKind
{
    clause,
    variable,
};

inline constexpr std::size_t kNoParent = static_cast< std::size_t >( -1 );

struct TreeNode
{
    NodeKind kind = NodeKind::clause;
    unsigned level = 0;
    std::size_t parent = kNoParent;
    std::vector< std::size_t > children;

    // Variable nodes.
    Var label = 0;
    // Clause nodes below the root: color of the edge from the parent.
    Color edge_color = 0;
    // Clause nodes of a critical clause tree.
    std::optional< std::size_t > clause;
    PartialAssignment beta;
};

class ClauseTree
{
public:
    ClauseTree( unsigned d, unsigned k, unsigned height );

    [[nodiscard]] unsigned d() const { return _d; }
    [[nodiscard]] unsigned k() const { return _k; }
    [[nodiscard]] unsigned height() const { return _height; }
    [[nodiscard]] std::size_t size() const { return _nodes.size(); }
    [[nodiscard]] const TreeNode& node( std::size_t i ) const { return _nodes[ i ]; }
    [[nodiscard]] const std::vector< TreeNode >& nodes() const { return _nodes; }
    [[nodiscard]] static constexpr std::size_t root() { return 0; }

    // One past the largest variable label.
    [[nodiscard]] Var label_bound() const;
    [[nodiscard]] std::size_t count( NodeKind kind, unsigned level ) const;
    [[nodiscard]] std::vector< std::size_t > safe_leaves() const;
    [[nodiscard]] std::vector< std::size_t > unsafe_leaves() const;

    // Throws std::logic_error if a label repeats along a root-to-leaf path.
    void check_path_labels() const;

    std::size_t add( TreeNode n );
    void set_clause( std::size_t i, std::size_t clause ) { _nodes[ i ].clause = clause; }

private:
    unsigned _d;
    unsigned _k;
    unsigned _height;
    std::vector< TreeNode > _nodes;
};

// BuildCCT against a known satisfying assignment. Clause nodes on levels up
// to h-1 are labeled with the lowest-index clause violated by their
// assignment label; each literal (y != alpha*(y)) of it becomes a variable
// child, and below level h each variable child gets one clause child per
// color other than alpha*(y). Throws std::invalid_argument on bad arguments
// and std::logic_error if some assignment label violates no clause.
[[nodiscard]] ClauseTree build_cct( const Formula& f, const Assignment& alpha_star, Var x, Color c,
                                    unsigned h );
[[nodiscard]] ClauseTree build_cct( const UniqueInstance& inst, Var x, Color c, unsigned h );

// h = 2 h~ + 1 with h~ maximal such that 1 + L + ... + L^h~ <= D.
[[nodiscard]] unsigned choose_height( unsigned strength, unsigned d, unsigned k );

enum class PrivilegeKind
{
    short_clause_node,
    repeated_label,
};

struct Privilege
{
    Color color = 0;
    PrivilegeKind kind = PrivilegeKind::short_clause_node;
    std::string reason;
};

// Checks one tree of height >= 3: fewer than (k-1)^2 (d-1) variable nodes on
// level 3, or a variable label used twice within levels 0..3.
[[nodiscard]] std::optional< Privilege > privilege_of( const ClauseTree& t3 );

// Privileged if some color other than the solution's has a tree T^3 passing
// privilege_of.
[[nodiscard]] std::optional< Privilege > is_privileged( const UniqueInstance& inst, Var x );

// The full (k-1, d-1)-branching tree of the given height. Labels are fresh
// (0, 1, 2, ... in creation order) unless `labels` maps each variable node,
// in creation order, to a label.
[[nodiscard]] ClauseTree make_abstract_tree( unsigned d, unsigned k, unsigned h,
                                             const std::vector< Var >& labels = {} );

// Cut_p on the tree truncated at `height` (default: the tree's own height).
[[nodiscard]] bool cut_event( const ClauseTree& t, std::span< const double > positions, double p,
                              std::optional< unsigned > height = std::nullopt );

// Cut_p of the subtree rooted at node `v`, truncated at absolute `height`.
[[nodiscard]] bool cut_event_at( const ClauseTree& t, std::size_t v,
                                 std::span< const double > positions, double p, unsigned height );

// LocalImpCut_p at a level-1 or level-2 node.
[[nodiscard]] bool local_imp_cut( const ClauseTree& t, std::size_t v,
                                  std::span< const double > positions,
                                  std::span< const std::uint8_t > marks, double p );

// Conjunction over the root's children v_i of Cut_p(T_i) or LocalImpCut_p(v_i),
// with Cut_p taken on the tree truncated at `cut_height`. Requires height >= 3
// and k-1 children at every level-2 clause node (critical clauses); throws
// std::invalid_argument otherwise.
[[nodiscard]] bool imp_cut_event( const ClauseTree& t, std::span< const double > positions,
                                  std::span< const std::uint8_t > marks, double p,
                                  std::optional< unsigned > cut_height = std::nullopt );

[[nodiscard]] bool is_critical_shape( const ClauseTree& t );

// Graphviz rendering; clause labels are printed when `f` is given.
[[nodiscard]] std::string to_dot( const ClauseTree& t, const Formula* f = nullptr );

// Cut probability of the full tree truncated at h: var leaves V_h = p,
// V_l = p + (1-p) C_{l+1}^(d-1), C_l = V_{l+1}^(k-1).
[[nodiscard]] double truncated_cut_probability( double p, unsigned d, unsigned k, unsigned h );

struct AbstractTreeSpec
{
    unsigned d = 3;
    unsigned k = 3;
    unsigned height = 9;
    bool impatient = false;
    double theta = 0.0;
    double eligibility = kEligibility;
    // Height used for the Cut part of ImpCut; defaults to `height`.
    std::optional< unsigned > cut_height;
};

struct Estimate
{
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t trials = 0;
};

// Monte-Carlo estimate of Pr[Cut_p] (or Pr[ImpCut_p]) on the all-distinct
// abstract tree. Positions and marks are drawn lazily from a hash of (trial
// seed, node), so a trial sees the same placement at every height and only
// the nodes the short-circuit evaluation visits are ever drawn.
[[nodiscard]] Estimate mc_cut_probability( const AbstractTreeSpec& spec, double p,
                                           std::uint64_t trials, std::uint64_t seed,
                                           Exec exec = Exec::openmp );

// Stratified estimate of E[log2(1 + J_1 + ... + J_{d-1})] with J_c = 1 iff
// Cut_p fails on the c-th independent tree, p uniform on [0, 1].
[[nodiscard]] Estimate mc_s_dk( unsigned d, unsigned k, unsigned h, unsigned strata,
                                std::uint64_t trials_per_stratum, std::uint64_t seed,
                                Exec exec = Exec::openmp );

struct ColorCutCheck
{
    Color color = 0;
    bool cut = false;
    bool imp_cut = false;
    bool imp_checked = false; // tree met imp_cut_event's precondition
    bool regular_plausible = false;
    bool impatient_plausible = false;

    [[nodiscard]] bool ok() const
    {
        return !( cut && regular_plausible ) && !( imp_checked && imp_cut && impatient_plausible );
    }
};

struct CutCheck
{
    Var x = 0;
    std::vector< ColorCutCheck > colors;

    [[nodiscard]] bool ok() const;
    // Human-readable description of every violation, empty when ok().
    [[nodiscard]] std::string counterexample( const Placement& placement ) const;
};

[[nodiscard]] CutCheck verify_cut_implies_ruled_out( const ExactOracle& oracle, Var x,
                                                     const Placement& placement );

} // namespace ippsz
