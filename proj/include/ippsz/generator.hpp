#pragma once

// Planted random (d,k)-CSP instances. Every clause avoids the planted tuple
// on its variables, so the planted assignment always satisfies the result.

#include "ippsz/csp.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>

namespace ippsz
{

enum class Uniqueness
{
    verified,
    best_effort,
};

struct GeneratorSpec
{
    unsigned d = 3;
    unsigned k = 3;
    Var n = 5;
    std::size_t m = 0;
    std::optional< Assignment > planted; // default (d, ..., d)
    std::uint64_t seed = 0;
    Uniqueness mode = Uniqueness::verified;
    unsigned max_repairs = 2000;
};

class GenerationError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// In verified mode, clauses are replaced one at a time by clauses that
// forbid a second solution until count_solutions reports exactly one; m is
// kept fixed. Fails up front when m clauses cannot remove d^n - 1
// assignments (each removes at most d^(n-k)), and after max_repairs
// replacements otherwise.
[[nodiscard]] Formula generate( const GeneratorSpec& spec );

[[nodiscard]] Assignment planted_solution( const GeneratorSpec& spec );

} // namespace ippsz
