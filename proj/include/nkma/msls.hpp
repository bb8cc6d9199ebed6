#pragma once

#include <cstdint>

#include "nkma/local_search.hpp"
#include "nkma/nk_landscape.hpp"
#include "nkma/run_record.hpp"

namespace nkma {

/// Multi-start local search: FIHC from fresh uniform-random genomes
/// until the budget runs out, tracking the best result. A start cut off
/// by exhaustion still contributes its best-so-far.
RunRecord run_msls(const NkInstance& inst, std::uint64_t seed,
                   std::uint64_t budget_max,
                   const FihcOptions& fihc_options = {});

}  // namespace nkma
