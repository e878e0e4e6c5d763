#pragma once

#include <cstddef>
#include <vector>

namespace cscore {

enum class ScheduleKind {
    constant,
    triangular,         // linear 0 -> base over the first warmup_fraction of
                        // steps, then linear base -> 0
    stagewise,          // base * decay^(milestones passed)
    rampup_piecewise,   // linear warmup, then stagewise decay
};

struct ScheduleSpec {
    ScheduleKind kind = ScheduleKind::constant;
    double warmup_fraction = 0.15;   // for triangular / rampup_piecewise
    std::vector<double> milestones;  // fractions of total steps, strictly increasing, in (0,1)
    double decay = 0.1;

    void validate() const;
};

// Learning rate for one optimizer step. A milestone is counted as passed once
// step >= milestone * total_steps.
double lr_at(const ScheduleSpec& spec, std::size_t step, std::size_t total_steps, double base);

}  // namespace cscore
