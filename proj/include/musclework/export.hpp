#pragma once

#include "musclework/pipeline.hpp"

#include <string>

namespace musclework {

/// summary.json: duration, frame counts, skipped DOFs and the accumulated
/// work per muscle, group (with peak window median) and limb.
std::string summary_json(const SessionResult& r, const MusculoskeletalModel& model);

/// groups.csv: t_ms, 16 group columns, 5 limb columns (per-frame increments).
std::string groups_csv(const SessionResult& r);

/// heatmap.json: per group the final display frame (window median,
/// normalised, rgb) and the whole-session view normalised by the largest
/// accumulated group.
std::string heatmap_json(const SessionResult& r, const ColorAnchors& anchors = {});

/// Bar chart of the accumulated limb values, 800x400.
std::string limbs_svg(const LimbWork& limbs);

/// "overall N*s; top groups: a (x), b (y), c (z)".
std::string summary_line(const SessionSummary& s);

} // namespace musclework
