#include "ascnet/datapipe/manifest.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "ascnet/core/error.hpp"
#include "ascnet/datapipe/png_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ascnet::datapipe {

namespace {

std::string resolve(const fs::path& base_dir, const std::string& rel) {
  fs::path p(rel);
  if (p.is_absolute()) return p.string();
  return (base_dir / p).lexically_normal().string();
}

}  // namespace

SubjectRecord load_subject(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw io_error("cannot open manifest: " + manifest_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw data_error("invalid manifest JSON in " + manifest_path + ": " + e.what());
  }

  SubjectRecord rec;
  try {
    rec.subject_id = j.at("subject_id").get<std::string>();
    rec.modality = j.value("modality", std::string("unknown"));
    fs::path base = fs::path(manifest_path).parent_path();
    for (const auto& p : j.at("slices")) {
      rec.slice_paths.push_back(resolve(base, p.get<std::string>()));
    }
    if (j.contains("masks")) {
      std::vector<std::string> masks;
      for (const auto& p : j.at("masks")) {
        masks.push_back(resolve(base, p.get<std::string>()));
      }
      rec.mask_paths = std::move(masks);
    }
  } catch (const json::exception& e) {
    throw data_error("invalid manifest " + manifest_path + ": " + e.what());
  }

  if (rec.slice_paths.empty()) {
    throw data_error("manifest lists no slices: " + manifest_path);
  }
  if (rec.mask_paths && rec.mask_paths->size() != rec.slice_paths.size()) {
    throw data_error("manifest " + manifest_path + " lists " +
                     std::to_string(rec.slice_paths.size()) + " slices but " +
                     std::to_string(rec.mask_paths->size()) + " masks");
  }
  for (const auto& p : rec.slice_paths) {
    if (!fs::exists(p)) throw io_error("missing slice file: " + p);
  }
  if (rec.mask_paths) {
    for (const auto& p : *rec.mask_paths) {
      if (!fs::exists(p)) throw io_error("missing mask file: " + p);
    }
  }
  return rec;
}

void save_subject_manifest(const std::string& manifest_path, const SubjectRecord& record) {
  fs::path base = fs::path(manifest_path).parent_path();
  auto relativize = [&](const std::string& p) {
    std::error_code ec;
    fs::path rel = fs::relative(p, base, ec);
    return ec ? p : rel.string();
  };
  json j;
  j["subject_id"] = record.subject_id;
  j["modality"] = record.modality;
  json slices = json::array();
  for (const auto& p : record.slice_paths) slices.push_back(relativize(p));
  j["slices"] = slices;
  if (record.mask_paths) {
    json masks = json::array();
    for (const auto& p : *record.mask_paths) masks.push_back(relativize(p));
    j["masks"] = masks;
  }
  std::ofstream out(manifest_path);
  if (!out) throw io_error("cannot write manifest: " + manifest_path);
  out << j.dump(2) << "\n";
}

std::vector<Slice> load_subject_slices(const SubjectRecord& record) {
  std::vector<Slice> slices;
  slices.reserve(record.slice_paths.size());
  for (size_t i = 0; i < record.slice_paths.size(); ++i) {
    slices.push_back(load_slice_png(record.slice_paths[i], record.subject_id,
                                    static_cast<int>(i)));
  }
  return slices;
}

std::vector<Mask> load_subject_masks(const SubjectRecord& record) {
  if (!record.mask_paths) throw data_error("subject " + record.subject_id + " has no masks");
  std::vector<Mask> masks;
  masks.reserve(record.mask_paths->size());
  for (const auto& p : *record.mask_paths) masks.push_back(load_mask_png(p));
  return masks;
}

}  // namespace ascnet::datapipe
