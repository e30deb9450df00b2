#pragma once

#include "mscap/core.hpp"
#include "mscap/record.hpp"

namespace mscap {

/// Classic differential evolution (rand/1/bin, F = 0.5, CR = 0.9) used as
/// the reference algorithm in comparisons.  Same bounds handling, budget
/// accounting, and trend sampling as the main optimizer; algorithm id
/// "de-rand1-bin".
RunRecord run_de(const Problem& problem, const RunConfig& config);

} // namespace mscap
