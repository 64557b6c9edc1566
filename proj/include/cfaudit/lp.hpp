#pragma once

#include <vector>

namespace cfaudit {

// Decides strict linear separability of labeled points: does some (w, b)
// satisfy sign(w.p + b) agreeing with every label, with positive margin?
// Solved exactly as the phase-1 LP for the system y_i (w.p_i + b) >= 1,
// which is feasible iff a strictly separating hyperplane exists (any such
// hyperplane can be rescaled to margin 1).
struct SeparationResult {
    bool feasible = false;
    std::vector<double> weights;  // per input dimension, valid when feasible
    double bias = 0.0;
};

// labels are in {0,1}; eps is the numerical zero tolerance of the solver.
SeparationResult strict_separation(const std::vector<std::vector<double>>& points,
                                   const std::vector<int>& labels, double eps = 1e-9);

}  // namespace cfaudit
