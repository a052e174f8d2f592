#pragma once

// Adaptive Simpson quadrature with explicit breakpoints.

#include <functional>
#include <stdexcept>
#include <vector>

namespace ippsz
{

class QuadratureError : public std::runtime_error
{
public:
    QuadratureError( const std::string& what, double estimate )
        : std::runtime_error{ what }, _estimate{ estimate } {}

    // Best value reached before giving up.
    [[nodiscard]] double estimate() const { return _estimate; }

private:
    double _estimate;
};

struct QuadratureOptions
{
    double rel_tol = 1e-9;
    double abs_tol = 1e-300;
    int max_depth = 48;
    int min_depth = 4;
};

// Integral of f over [a, b]; each interval between consecutive breakpoints
// (those inside (a, b)) is integrated separately so kinks and jumps there
// never fall inside a Simpson panel. Throws QuadratureError when some panel
// cannot meet the tolerance within max_depth bisections.
[[nodiscard]] double integrate( const std::function< double( double ) >& f, double a, double b,
                                const QuadratureOptions& opts = {},
                                const std::vector< double >& breakpoints = {} );

// n-point Gauss-Legendre rule on [a, b], n in [1, 16].
[[nodiscard]] double gauss_legendre( const std::function< double( double ) >& f, double a, double b,
                                     unsigned n = 8 );

} // namespace ippsz
