#pragma once

#include "rsfog/ao_solver.hpp"

namespace rsfog {

/// Runs the AO pipeline under the named scheme from its standard initializer.
Solution solve_scheme(const Scenario& sc, SchemeKind kind, const AoOptions& opts = {});

Solution solve_sdma(const Scenario& sc, const AoOptions& opts = {});
Solution solve_noma(const Scenario& sc, const AoOptions& opts = {});
Solution solve_cloud(const Scenario& sc, const AoOptions& opts = {});

/// Lifts an SDMA state into the rate-splitting variable shape (second splits
/// and the common stream zeroed) for warm-started nesting comparisons.
TransmitState embed_sdma_state(const Scenario& sc, const TransmitState& sdma);

} // namespace rsfog
