#pragma once

// Fixed points and integrals behind the PPSZ exponent S_{d,k} and its
// ImpatientPPSZ improvement.
//
//   R(p)  smallest root in [0,1] of R = p + (1-p) R^L,  L = (d-1)(k-1)
//   Q(p)  R(p)^(k-1)
//   W(p)  impatient analogue of R below theta
//   S_dk  E[log2(J_1 + ... + J_{d-1} + 1)],  J_c ~ Bernoulli(1 - Q(p)), p ~ U[0,1]

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ippsz
{

// 2 - log2(3): probability that a variable placed below theta is marked.
inline constexpr double kEligibility = 0.41503749927884381855;

struct ExponentParams
{
    unsigned d = 3;
    unsigned k = 3;
    double theta = 0.0;
    double eligibility = kEligibility;
    double tolerance = 1e-9;            // relative quadrature tolerance
    double fixed_point_tolerance = 1e-12; // bound checked on every returned R

    [[nodiscard]] unsigned L() const { return ( d - 1 ) * ( k - 1 ); }
    // Above this, R = Q = 1.
    [[nodiscard]] double critical_p() const { return 1.0 - 1.0 / L(); }
    void validate() const;
};

// All or all but one of l independent probability-q events.
[[nodiscard]] double abamo( double q, unsigned l );

[[nodiscard]] double solve_R( double p, const ExponentParams& params );
[[nodiscard]] double solve_Q( double p, const ExponentParams& params );
[[nodiscard]] double fixed_point_residual( double R, double p, const ExponentParams& params );

[[nodiscard]] double w_curve( double p, const ExponentParams& params );

// p + (d-1) theta p^((d-2)(k-1)) + (p + 4 p^L)^L, an explicit upper bound on W
// for p <= 1 - 1/L.
[[nodiscard]] double w_envelope( double p, const ExponentParams& params );

// E[log2(1 + Binomial(d-1, s))].
[[nodiscard]] double expected_log_count( double s, unsigned d );

// Cut probability of one color's tree as a function of p; Q by default.
using CutCurve = std::function< double( double ) >;

[[nodiscard]] double s_dk( const ExponentParams& params );
[[nodiscard]] double s_dk( const ExponentParams& params, const CutCurve& cut );

struct IntegralWithLeadingOrder
{
    double exact = 0.0;
    double leading_order = 0.0;
};

// c * int_0^theta W^L dp; leading order c theta^(L+1) / (L+1).
[[nodiscard]] IntegralWithLeadingOrder loss_integral( const ExponentParams& params );

// E[log2(J^imp)] - S_dk, with J^imp_c ~ Bernoulli(1 - W^(k-1)) given p;
// leading order (d-1) log2(1-1/d) c theta^(L+1) / (L+1).
[[nodiscard]] IntegralWithLeadingOrder gain_integral( const ExponentParams& params );

[[nodiscard]] double impatient_bound( const ExponentParams& params );

struct PrivilegedCase
{
    unsigned uncles = 0;
    unsigned aunts = 0;

    // Both repeated labels at level 3 with the root as lowest common ancestor.
    [[nodiscard]] static PrivilegedCase standard( unsigned d, unsigned k );
};

[[nodiscard]] double epsilon_privileged( const ExponentParams& params, PrivilegedCase counts );
[[nodiscard]] double epsilon_privileged( const ExponentParams& params );

// 1 + (d-1) log2(1 - 1/d).
[[nodiscard]] double gain_multiplier( unsigned d );

struct ExponentReport
{
    unsigned d = 0;
    unsigned k = 0;
    unsigned L = 0;
    double theta = 0.0;
    double eligibility = kEligibility;
    double s_dk = 0.0;
    double loss = 0.0;
    double loss_leading_order = 0.0;
    double gain = 0.0;
    double gain_leading_order = 0.0;
    double impatient_bound = 0.0;
    double epsilon_privileged = 0.0;
    double privileged_bound = 0.0;
    double final_bound = 0.0;
    // s_dk - final_bound, computed without forming final_bound so that
    // margins far below the spacing of doubles near s_dk stay visible.
    double improvement = 0.0;
    bool in_theorem_scope = false;

    [[nodiscard]] bool improves() const { return improvement > 0.0; }
};

[[nodiscard]] ExponentReport evaluate_exponent( const ExponentParams& params );

// Geometric grid of `points` values in [lo, hi].
[[nodiscard]] std::vector< double > geometric_grid( double lo, double hi, unsigned points );
[[nodiscard]] std::vector< double > default_theta_grid();

// Minimizes max(loss + gain, c theta - eps_priv) over the grid, then refines
// by golden-section search between the grid neighbours of the minimum.
[[nodiscard]] ExponentReport optimize_theta( const ExponentParams& params,
                                             const std::vector< double >& grid );
[[nodiscard]] ExponentReport optimize_theta( const ExponentParams& params );

struct CurveSample
{
    double p = 0.0;
    double R = 0.0;
    double Q = 0.0;
    double W = 0.0;
};

[[nodiscard]] std::vector< CurveSample > sample_curves( const ExponentParams& params,
                                                        unsigned points );

} // namespace ippsz
