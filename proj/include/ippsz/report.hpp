#pragma once

// Serialization of experiment results and exponent reports.
//
// CSV / markdown columns, one row per (instance, algorithm):
//   instance,d,k,n,m,algorithm,trials,successes,rate,stderr,exact,s_dk,bound
// where s_dk and bound (the final exponent bound at the experiment's theta)
// come from the exponent module. JSON carries "schema": 1.

#include "ippsz/exponent.hpp"
#include "ippsz/experiment.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace ippsz
{

enum class Format
{
    json,
    csv,
    markdown,
};

inline constexpr int kSchemaVersion = 1;

[[nodiscard]] Format parse_format( std::string_view name );
[[nodiscard]] const char* to_string( Format f );

[[nodiscard]] const std::vector< std::string >& csv_columns();

[[nodiscard]] std::string to_json( const ExperimentResult& r );
[[nodiscard]] std::string to_csv( const ExperimentResult& r );
[[nodiscard]] std::string to_markdown( const ExperimentResult& r );
[[nodiscard]] std::string render( const ExperimentResult& r, Format f );

// Inverse of to_json (outcome vectors are not serialized).
[[nodiscard]] ExperimentResult experiment_from_json( std::string_view text );

[[nodiscard]] std::string to_json( const ExponentReport& r );
[[nodiscard]] std::string curves_csv( const std::vector< CurveSample >& samples );

} // namespace ippsz
