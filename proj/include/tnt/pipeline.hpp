#pragma once

#include <filesystem>

#include "tnt/dataset.hpp"
#include "tnt/train.hpp"
#include "tnt/transform.hpp"
#include "tnt/volume.hpp"

namespace tnt {

// prepare() followed by build_volume(). An empty stream, or one whose events
// are all dropped, gives an all-zero volume.
EventVolume event_volume(const EventStream& raw, const TntOptions& opts, Variant variant);

// Loads every manifest entry (paths relative to manifest_dir) and turns it
// into a network input for the given preprocessing variant.
nn::LabeledSet load_labeled_set(const Manifest& manifest, const std::filesystem::path& manifest_dir,
                                const TntOptions& opts, Variant variant, double input_scale = 1.0,
                                nn::InputNorm norm = nn::InputNorm::per_bin);

}  // namespace tnt
