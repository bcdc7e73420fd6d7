#pragma once

#include "memlens/infotheory.hpp"

#include <span>
#include <string>

namespace memlens {

struct LabeledProfile {
    std::string label;
    MemoryProfile profile;
};

/// One row per (profile, lag):
///   [label,]lag,estimate_nats,estimate_bits,threshold_nats,significant,
///   degenerate_null,n_samples,n_distinct_contexts
/// The label column is present only when `with_label` is set. Reals use 12
/// decimals; threshold is empty for untested lags.
std::string format_csv(std::span<const LabeledProfile> profiles, bool with_label);

/// Stacked bar charts, one panel per lag and one bar slot per profile.
/// Bars are drawn only for significant, non-degenerate, positive estimates.
std::string render_svg(std::span<const LabeledProfile> profiles);

/// Fixed 12-decimal rendering used in all reports.
std::string format_real(double v);

}  // namespace memlens
