#pragma once

#include <span>
#include <string>

#include "handrv/manifest.hpp"
#include "handrv/trajdata.hpp"

namespace handrv {

/// Query path (thick) with every matched span drawn on top of it. Each span
/// is translated so that its first point sits on the query's first point;
/// stroke opacity follows the match weight.
/// Throws Error(validation) when a match names a trajectory not in `play`.
std::string overlay_svg(const Trajectory& query, const RetrievalManifest& manifest,
                        std::span<const Trajectory> play);

}  // namespace handrv
