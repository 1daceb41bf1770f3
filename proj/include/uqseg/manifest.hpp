#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uqseg/ndimage.hpp"

namespace uqseg {

struct ManifestCase {
  std::string id;
  std::filesystem::path image_path;
  std::optional<std::filesystem::path> label_path;
  Spacing spacing; // empty means 1.0 per axis
};

/// JSON list of cases. Relative paths resolve against the manifest's directory.
struct DatasetManifest {
  std::vector<ManifestCase> cases;

  /// Parses and validates: unique ids, referenced files exist.
  static DatasetManifest load(const std::filesystem::path &path);

  /// Paths are written relative to `path`'s directory when they live under it.
  void save(const std::filesystem::path &path) const;
};

/// Loads a case image and applies the manifest spacing.
FloatImage load_case_image(const ManifestCase &c);
LabelMap load_case_labels(const ManifestCase &c);

} // namespace uqseg
