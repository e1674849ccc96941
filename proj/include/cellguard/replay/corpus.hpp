#pragma once

#include "cellguard/replay/session.hpp"

#include <cstdint>
#include <vector>

namespace cellguard::replay {

    struct corpus_params {
        // Distinct cells each session ends with.
        int cells{20};
        // Chance that a step revisits an existing cell instead of adding one.
        double edit_rate{0.5};
        // Chance that a revisit changes the cell text before rerunning it.
        double edit_text_rate{0.8};
        // Chance that each operand of a new cell reads an earlier cell's result.
        double dependency_density{0.6};
        // Chance that a revisit is followed by rerunning a cell that reads
        // the revisited one; otherwise a uniformly chosen cell is rerun.
        double refresher_rerun{0.7};
        // Trip count of loop cells.
        int loop_iterations{40};
    };

    // Deterministic for a given seed and parameters. Every log replays
    // without runtime errors and its identity inference recovers exactly
    // `cells` distinct cells.
    std::vector<session_log> generate_corpus(std::uint64_t seed, int sessions, const corpus_params& params = {});

}  // namespace cellguard::replay
