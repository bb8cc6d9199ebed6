#pragma once

#include <cstdint>

#include "nkma/budget.hpp"
#include "nkma/genome.hpp"
#include "nkma/nk_landscape.hpp"
#include "nkma/rng.hpp"

namespace nkma {

struct FihcOptions {
    /// Whether the random bit order is drawn once per call or freshly
    /// per sweep. Once matches the published procedure.
    enum class Shuffle { Once, PerSweep };
    Shuffle shuffle = Shuffle::Once;
};

struct FihcResult {
    Genome genome;                 // 1-flip local optimum (unless exhausted)
    double fitness = 0.0;
    std::uint64_t evaluations_used = 0;
    bool improved = false;         // any flip accepted
    bool budget_exhausted = false; // search was cut off mid-climb
};

/// First Improvement Hill Climber. Scans bit positions in a randomized
/// order; a strictly improving flip is kept, everything else reverted.
/// A position is re-tried only if some flip was accepted after its last
/// trial, so converged positions cost no evaluations. Terminates at a
/// 1-flip local optimum or on budget exhaustion (progress is kept, a
/// tentative flip under evaluation is reverted).
FihcResult fihc(const NkInstance& inst, const Genome& start, Rng& rng,
                EvaluationBudget& budget,
                const FihcOptions& options = {});

}  // namespace nkma
