#include "cscore/schedule.hpp"

#include <cmath>
#include <string>

#include "cscore/error.hpp"

namespace cscore {

void ScheduleSpec::validate() const {
    const bool uses_warmup =
        kind == ScheduleKind::triangular || kind == ScheduleKind::rampup_piecewise;
    if (uses_warmup && (warmup_fraction <= 0.0 || warmup_fraction >= 1.0))
        throw ValidationError("warmup_fraction must be in (0, 1)");
    const bool uses_milestones =
        kind == ScheduleKind::stagewise || kind == ScheduleKind::rampup_piecewise;
    if (uses_milestones) {
        double prev = 0.0;
        for (double m : milestones) {
            if (m <= prev || m >= 1.0)
                throw ValidationError("milestones must be strictly increasing fractions in (0, 1)");
            prev = m;
        }
        if (decay <= 0.0) throw ValidationError("decay must be positive");
    }
}

namespace {

double decayed_rate(const ScheduleSpec& spec, double step, double total, double base) {
    std::size_t passed = 0;
    for (double m : spec.milestones)
        if (m * total <= step) ++passed;
    return base * std::pow(spec.decay, static_cast<double>(passed));
}

}  // namespace

double lr_at(const ScheduleSpec& spec, std::size_t step, std::size_t total_steps, double base) {
    spec.validate();
    if (total_steps == 0) throw ValidationError("total_steps must be positive");
    if (step >= total_steps) throw ValidationError("step must be < total_steps");

    const double s = static_cast<double>(step);
    const double total = static_cast<double>(total_steps);

    switch (spec.kind) {
        case ScheduleKind::constant:
            return base;
        case ScheduleKind::triangular: {
            const double warm = spec.warmup_fraction * total;
            if (s <= warm) return base * s / warm;
            return base * (total - s) / (total - warm);
        }
        case ScheduleKind::stagewise:
            return decayed_rate(spec, s, total, base);
        case ScheduleKind::rampup_piecewise: {
            const double warm = spec.warmup_fraction * total;
            if (s < warm) return base * s / warm;
            return decayed_rate(spec, s, total, base);
        }
    }
    throw ValidationError("unknown schedule kind");
}

}  // namespace cscore
