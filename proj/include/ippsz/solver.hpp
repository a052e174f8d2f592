#pragma once

// PPSZ and ImpatientPPSZ for (d,k)-CSP, plus exact success-probability
// oracles for instances with a unique solution.
//
// Both algorithms walk the variables in ascending order of a random
// placement pi : V -> [0,1] and give each variable a color drawn uniformly
// from its plausible set. ImpatientPPSZ additionally assigns, before every
// regular step, any variable marked eligible whose plausible set has shrunk
// to at most two colors.

#include "ippsz/csp.hpp"
#include "ippsz/exponent.hpp"
#include "ippsz/implication.hpp"
#include "ippsz/parallel.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace ippsz
{

struct Placement
{
    std::vector< double > positions;
    std::vector< std::uint8_t > marks;
    double theta = 0.0;
    double eligibility = kEligibility;

    [[nodiscard]] Var size() const { return static_cast< Var >( positions.size() ); }
    [[nodiscard]] bool marked( Var v ) const { return marks[ v ] != 0; }

    // Variables sorted by ascending position.
    [[nodiscard]] std::vector< Var > order() const;

    // Throws std::invalid_argument if positions repeat, leave [0,1], or a
    // variable at or above theta carries a mark.
    void validate() const;
};

// Positions i.i.d. uniform on [0,1) (collisions resampled); each variable
// below theta is marked with probability `eligibility`.
[[nodiscard]] Placement sample_placement( Var n, double theta, std::uint64_t seed,
                                          double eligibility = kEligibility );

// Deterministic placement realizing a given order, with the first
// `below_theta` variables of the order placed below theta.
[[nodiscard]] Placement placement_from_order( const std::vector< Var >& order, double theta,
                                              std::size_t below_theta,
                                              const std::vector< std::uint8_t >& marks );

struct AssignmentEvent
{
    Var var = 0;
    Color color = 0;
    unsigned choices = 0; // |Plaus| when the color was drawn
    bool impatient = false;

    friend bool operator==( const AssignmentEvent&, const AssignmentEvent& ) = default;
};

struct RunTrace
{
    std::vector< AssignmentEvent > events;

    [[nodiscard]] std::size_t impatient_count() const;
    friend bool operator==( const RunTrace&, const RunTrace& ) = default;
};

enum class RunFailure
{
    none,
    empty_plausible,
    unsatisfied,
};

struct RunResult
{
    std::optional< Assignment > assignment;
    RunTrace trace;
    RunFailure failure = RunFailure::none;

    [[nodiscard]] bool success() const { return assignment.has_value(); }
};

inline constexpr unsigned kDefaultStrength = 3;
inline constexpr unsigned kDefaultCutoff = 2;

[[nodiscard]] RunResult ppsz_run( const PlausibilityOracle& oracle, const Placement& placement,
                                  std::uint64_t seed );
[[nodiscard]] RunResult ppsz_run( const Formula& f, const Placement& placement, unsigned strength,
                                  std::uint64_t seed );

// `cutoff` is the impatient threshold on |Plaus| (2 in the analyzed algorithm).
[[nodiscard]] RunResult impatient_run( const PlausibilityOracle& oracle, const Placement& placement,
                                       std::uint64_t seed, unsigned cutoff = kDefaultCutoff );
[[nodiscard]] RunResult impatient_run( const Formula& f, const Placement& placement,
                                       unsigned strength, std::uint64_t seed );

// Per-color plausibility of a focal variable x on the all-correct run:
// regular uses V_x (everything placed before x), impatient uses V_x^imp
// (everything ImpatientPPSZ has assigned when it reaches x, minus x).
struct ColorIndicators
{
    ColorSet regular;
    ColorSet impatient;

    [[nodiscard]] unsigned regular_count() const { return regular.size(); }
    [[nodiscard]] unsigned impatient_count() const { return impatient.size(); }
};

// The all-correct ImpatientPPSZ run for one placement.
struct CorrectRun
{
    std::vector< AssignmentEvent > events;
    // For each variable x: the assigned set when x's loop iteration reaches
    // the regular step, with x itself removed.
    std::vector< PartialAssignment > at_regular_step;
};

[[nodiscard]] CorrectRun correct_impatient_run( const PlausibilityOracle& oracle,
                                                const Placement& placement,
                                                const Assignment& solution,
                                                unsigned cutoff = kDefaultCutoff );

class ExactOracle
{
public:
    ExactOracle( const UniqueInstance& instance, unsigned strength, bool cache = true,
                 unsigned cutoff = kDefaultCutoff );

    [[nodiscard]] const UniqueInstance& instance() const { return _instance; }
    [[nodiscard]] const PlausibilityOracle& plausibility() const { return _oracle; }

    // Pr[PPSZ(F, pi) finds the solution] = prod_x 1 / A_x(pi).
    [[nodiscard]] double ppsz_success( const Placement& placement ) const;

    // Product over assignment events of the all-correct run of 1 / (size of
    // the set the color was drawn from).
    [[nodiscard]] double impatient_success( const Placement& placement ) const;

    [[nodiscard]] ColorIndicators indicators( const Placement& placement, Var x ) const;
    [[nodiscard]] std::vector< ColorIndicators > all_indicators( const Placement& placement ) const;

    // Success probability averaged over uniformly random placements and
    // marks, by enumerating orders, the number of variables below theta and
    // the mark patterns. Limited to n <= kExpectedVarLimit.
    [[nodiscard]] double expected_ppsz_success() const;
    [[nodiscard]] double expected_impatient_success( double theta,
                                                     double eligibility = kEligibility ) const;

    static constexpr Var kExpectedVarLimit = 7;

private:
    const UniqueInstance& _instance;
    PlausibilityOracle _oracle;
    unsigned _cutoff;
};

[[nodiscard]] double success_probability_exact( const Formula& f, const Placement& placement,
                                                unsigned strength );
[[nodiscard]] double impatient_success_probability_exact( const Formula& f,
                                                          const Placement& placement,
                                                          unsigned strength );

enum class Algorithm
{
    ppsz,
    impatient,
};

[[nodiscard]] const char* to_string( Algorithm a );

struct SolveParams
{
    unsigned strength = kDefaultStrength;
    std::optional< double > theta;                 // default: optimized for (d,k)
    std::optional< std::uint64_t > max_repetitions; // default: ceil(2^((S+0.1) n)), capped
    Algorithm algorithm = Algorithm::impatient;
    std::uint64_t seed = 0;
    unsigned cutoff = kDefaultCutoff;
    bool cache = false;
    Exec exec = Exec::openmp;
};

inline constexpr std::uint64_t kRepetitionCap = 10'000'000;

struct SolveResult
{
    std::optional< Assignment > assignment;
    std::uint64_t repetitions = 0; // runs consumed, including the successful one
    std::uint64_t budget = 0;
    double theta = 0.0;
    RunTrace trace; // of the successful run

    [[nodiscard]] bool success() const { return assignment.has_value(); }
};

[[nodiscard]] SolveResult solve( const Formula& f, const SolveParams& params );

[[nodiscard]] std::uint64_t default_repetition_budget( const Formula& f );

} // namespace ippsz
