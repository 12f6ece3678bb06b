#pragma once

#include <string>

#include "frc/mild_solver.hpp"

namespace frc {

// A parsed problem file: the instance plus the solver options it carries.
struct ProblemFile {
    ProblemSpec problem;
    MildOptions solver;
};

/* JSON problem descriptions.  Matrices are nested row-major arrays, vectors
 * flat arrays; absent optional sections mean "zero" (no dynamics coupling,
 * local initial condition, default solver).  Parsing throws SchemaError
 * with the offending field path; the parsed instance is then validated,
 * so hypothesis violations surface as HypothesisError naming the clause.
 */
ProblemFile load_problem(const std::string& path);
ProblemFile parse_problem(const std::string& text);

// Inverse of parse_problem up to JSON formatting: parsing the output yields
// an identical instance.
std::string serialize_problem(const ProblemFile& file);

} // namespace frc
