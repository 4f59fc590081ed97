#pragma once

#include <vector>

#include "cutsel/milp.hpp"
#include "cutsel/simplex.hpp"

namespace cutsel {

// Derives one Gomory cut per fractional basic integer variable from the
// simplex tableau of an optimal LP solution. Nonbasic variables are shifted
// to their active bounds; integer nonbasics get the fractional-part
// coefficients and continuous ones (including row slacks) the mixed-integer
// form, so every cut is valid for arbitrary (also non-integral) row data.
// Each returned cut is violated by the LP optimum by exactly 1 in its own
// scaling. The pool is deduplicated (normalized max-norm distance < 1e-9,
// earliest id kept) and ids are assigned from `first_id` upward.
std::vector<Cut> generate_cuts(const MilpInstance& instance, const LpSolution& lp,
                               int round = 0, long first_id = 0);

}  // namespace cutsel
