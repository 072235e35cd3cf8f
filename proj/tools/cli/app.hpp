#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cssd/types.hpp"

namespace cssd {
namespace cli {

/// Exit codes of the tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDataError = 3;
inline constexpr int kExitNumericalError = 4;

struct ParsedCsv {
    std::vector<double> xs;
    std::vector<std::vector<double>> rows;
    std::vector<double> deltas;  // empty when the file has no delta column
    std::size_t dims = 0;
};

/// Parses the input CSV (header row; columns `x`, `y` or `y1..yD`,
/// optional `delta`; comma separator, '.' decimal point).
ParsedCsv read_csv(std::istream& in);

/// Serializes a solution to the versioned JSON document (schema 1).
std::string solution_to_json(const CssdSolution& solution);

/// Runs the tool. argv follows main() conventions (argv[0] = program
/// name). Writes results to the paths given by flags, diagnostics to the
/// given streams.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cli
}  // namespace cssd
