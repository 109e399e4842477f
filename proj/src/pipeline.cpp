#include "tnt/pipeline.hpp"

#include "tnt/event_io.hpp"
#include "tnt/errors.hpp"

namespace tnt {

EventVolume event_volume(const EventStream& raw, const TntOptions& opts, Variant variant) {
  validate(opts);
  if (raw.empty()) return EventVolume(raw.geometry, opts.bins);
  const EventStream prepared = prepare(raw, opts, variant);
  return build_volume(prepared, raw.geometry, opts.bins);
}

nn::LabeledSet load_labeled_set(const Manifest& manifest, const std::filesystem::path& manifest_dir,
                                const TntOptions& opts, Variant variant, double input_scale,
                                nn::InputNorm norm) {
  nn::LabeledSet set;
  set.classes = manifest.classes.size();
  set.inputs.reserve(manifest.samples.size());
  for (const ManifestEntry& entry : manifest.samples) {
    const EventStream stream = read_evt1(manifest_dir / entry.path);
    if (stream.geometry != manifest.geometry) {
      throw FormatError(entry.path + ": geometry differs from the manifest");
    }
    set.inputs.push_back(nn::to_network_input(event_volume(stream, opts, variant), input_scale, norm));
    set.labels.push_back(entry.label);
  }
  return set;
}

}  // namespace tnt
