#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ascnet/datapipe/slice.hpp"

namespace ascnet::datapipe {

// One subject's files, paths resolved relative to the manifest location.
struct SubjectRecord {
  std::string subject_id;
  std::string modality;
  std::vector<std::string> slice_paths;
  std::optional<std::vector<std::string>> mask_paths;
};

// Parses {"subject_id", "modality", "slices": [...], "masks": [...]},
// verifies every referenced file exists and that masks (when present) match
// the slice count.
SubjectRecord load_subject(const std::string& manifest_path);

void save_subject_manifest(const std::string& manifest_path, const SubjectRecord& record);

// All slices of a subject, loaded in manifest order.
std::vector<Slice> load_subject_slices(const SubjectRecord& record);
std::vector<Mask> load_subject_masks(const SubjectRecord& record);

}  // namespace ascnet::datapipe
