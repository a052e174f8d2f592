#pragma once

// Core (d,k)-CSP representation. A clause forbids exactly one tuple: the
// clause (x1 != c1 v ... v xk != ck) is violated only by x1=c1, ..., xk=ck.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ippsz
{

using Var = std::uint32_t;   // 0-based variable index
using Color = std::uint32_t; // 1-based color in [1, d]; 0 means "unbound"

inline constexpr Color kUnbound = 0;
inline constexpr unsigned kMaxDomain = 64;

struct Literal
{
    Var var = 0;
    Color color = 1;

    friend auto operator<=>( const Literal&, const Literal& ) = default;
};

struct Clause
{
    std::vector< Literal > literals;

    [[nodiscard]] std::size_t width() const { return literals.size(); }
    friend bool operator==( const Clause&, const Clause& ) = default;
};

// A complete assignment: one color per variable.
using Assignment = std::vector< Color >;

class PartialAssignment
{
public:
    PartialAssignment() = default;
    explicit PartialAssignment( Var n ) : _colors( n, kUnbound ) {}

    [[nodiscard]] Var size() const { return static_cast< Var >( _colors.size() ); }
    [[nodiscard]] bool is_bound( Var v ) const { return _colors[ v ] != kUnbound; }
    [[nodiscard]] Color operator[]( Var v ) const { return _colors[ v ]; }
    [[nodiscard]] std::size_t bound_count() const;
    [[nodiscard]] std::vector< Var > bound_vars() const;
    [[nodiscard]] std::span< const Color > raw() const { return _colors; }

    void bind( Var v, Color c );
    void unbind( Var v ) { _colors[ v ] = kUnbound; }

    friend bool operator==( const PartialAssignment&, const PartialAssignment& ) = default;

private:
    std::vector< Color > _colors;
};

class Formula
{
public:
    Formula() = default;

    // Validates ranges. Clauses may be shorter than k (the parser is the
    // place that insists on width exactly k), never longer, and may not
    // mention a variable twice.
    Formula( unsigned d, unsigned k, Var n, std::vector< Clause > clauses = {} );

    [[nodiscard]] unsigned d() const { return _d; }
    [[nodiscard]] unsigned k() const { return _k; }
    [[nodiscard]] Var n() const { return _n; }
    [[nodiscard]] unsigned L() const { return ( _d - 1 ) * ( _k - 1 ); }
    [[nodiscard]] std::size_t size() const { return _clauses.size(); }
    [[nodiscard]] const std::vector< Clause >& clauses() const { return _clauses; }
    [[nodiscard]] const Clause& operator[]( std::size_t i ) const { return _clauses[ i ]; }

    void add( Clause c );

    friend bool operator==( const Formula&, const Formula& ) = default;

private:
    void check( const Clause& c ) const;

    unsigned _d = 2;
    unsigned _k = 2;
    Var _n = 0;
    std::vector< Clause > _clauses;
};

// A clause of a simplified formula, remembering which input clause it came
// from so that implication witnesses can be reported against the input.
struct ResidualClause
{
    std::size_t source = 0;
    std::vector< Literal > literals;

    [[nodiscard]] bool empty() const { return literals.empty(); }
    friend bool operator==( const ResidualClause&, const ResidualClause& ) = default;
};

class Residual
{
public:
    Residual() = default;
    Residual( unsigned d, Var n, std::vector< ResidualClause > clauses )
        : _d{ d }, _n{ n }, _clauses{ std::move( clauses ) } {}

    [[nodiscard]] unsigned d() const { return _d; }
    [[nodiscard]] Var n() const { return _n; }
    [[nodiscard]] std::size_t size() const { return _clauses.size(); }
    [[nodiscard]] const std::vector< ResidualClause >& clauses() const { return _clauses; }
    [[nodiscard]] bool has_empty_clause() const;

    friend bool operator==( const Residual&, const Residual& ) = default;

private:
    unsigned _d = 2;
    Var _n = 0;
    std::vector< ResidualClause > _clauses;
};

[[nodiscard]] bool satisfies( std::span< const Color > assignment, const Formula& f );

// Residual clauses mention only the variables left unbound by the
// simplification, so any extension of the partial assignment is accepted.
[[nodiscard]] bool satisfies( std::span< const Color > assignment, const Residual& f );

[[nodiscard]] Residual simplify( const Formula& f, const PartialAssignment& alpha );
[[nodiscard]] Residual simplify( const Residual& f, const PartialAssignment& alpha );

struct SolutionSet
{
    std::uint64_t count = 0;
    std::vector< Assignment > witnesses;
};

inline constexpr Var kOracleVarLimit = 20;
inline constexpr std::uint64_t kEnumerationGuard = 10'000'000;

// Exact model count by exhaustive search; refuses instances with more than
// `cap_n` variables or with d^n above the enumeration guard.
[[nodiscard]] SolutionSet count_solutions( const Formula& f, Var cap_n = kOracleVarLimit,
                                           std::size_t witness_cap = 16 );

// A formula together with its (verified) unique satisfying assignment. The
// success-probability oracles and critical clause trees are only defined for
// such instances.
class UniqueInstance
{
public:
    // Throws std::invalid_argument unless `f` has exactly one solution.
    static UniqueInstance verify( Formula f, Var cap_n = kOracleVarLimit );

    [[nodiscard]] const Formula& formula() const { return _f; }
    [[nodiscard]] const Assignment& solution() const { return _solution; }

private:
    UniqueInstance( Formula f, Assignment solution )
        : _f{ std::move( f ) }, _solution{ std::move( solution ) } {}

    Formula _f;
    Assignment _solution;
};

// Saturating d^e, clamped to UINT64_MAX.
[[nodiscard]] std::uint64_t saturating_pow( std::uint64_t base, std::uint64_t e );

class ParseError : public std::runtime_error
{
public:
    ParseError( std::size_t line, const std::string& what );
    [[nodiscard]] std::size_t line() const { return _line; }

private:
    std::size_t _line;
};

// .mvcsp text format:
//   c <comment>
//   p mvcsp d=<d> k=<k> n=<n> m=<m>
//   <var>:<color> ... <var>:<color> 0      (k tokens, 1-based var)
[[nodiscard]] Formula parse_mvcsp( std::string_view text );
[[nodiscard]] Formula read_mvcsp( const std::string& path );
[[nodiscard]] std::string serialize_mvcsp( const Formula& f );
void write_mvcsp( const std::string& path, const Formula& f );

} // namespace ippsz
