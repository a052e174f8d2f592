#pragma once

// Paired head-to-head runs of PPSZ and ImpatientPPSZ on a set of instances.

#include "ippsz/csp.hpp"
#include "ippsz/parallel.hpp"
#include "ippsz/solver.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ippsz
{

struct NamedInstance
{
    std::string name;
    Formula formula;
};

struct ExperimentParams
{
    unsigned strength = kDefaultStrength;
    double theta = 0.0;
    unsigned cutoff = kDefaultCutoff;
    std::uint64_t trials = 1000;
    std::uint64_t seed = 0;
    Exec exec = Exec::openmp;
    bool cache = true;
    Var exact_limit = 6; // exact oracle values only for n <= this
    bool keep_outcomes = false;
};

struct AlgorithmStats
{
    Algorithm algorithm = Algorithm::ppsz;
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    std::optional< double > exact; // placement-averaged success probability
    std::vector< std::uint8_t > outcomes;

    [[nodiscard]] double rate() const;
    [[nodiscard]] double std_error() const;
};

struct InstanceResult
{
    std::string name;
    unsigned d = 0;
    unsigned k = 0;
    Var n = 0;
    std::size_t m = 0;
    bool unique = false;
    std::vector< AlgorithmStats > algorithms; // ppsz, then impatient
    std::optional< std::string > error;
    double wall_seconds = 0.0;
};

struct ExperimentResult
{
    ExperimentParams params;
    std::vector< InstanceResult > instances;
};

// Trial t of instance i uses placement seed derive_seed(seed, i, 2t) and run
// seed derive_seed(seed, i, 2t+1) for both algorithms. Failures of one
// instance are recorded in its `error` and do not stop the others.
[[nodiscard]] ExperimentResult run_experiment( const std::vector< NamedInstance >& instances,
                                               const ExperimentParams& params );

} // namespace ippsz
