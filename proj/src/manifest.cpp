#include "uqseg/manifest.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "uqseg/npy.hpp"

namespace uqseg {

namespace fs = std::filesystem;
using nlohmann::json;

DatasetManifest DatasetManifest::load(const fs::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ManifestError("cannot open manifest '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception &e) {
    throw ManifestError("manifest '" + path.string() + "': " + e.what());
  }
  if (!doc.contains("cases") || !doc["cases"].is_array())
    throw ManifestError("manifest '" + path.string() + "': missing 'cases' array");

  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string &p) {
    fs::path candidate(p);
    return candidate.is_absolute() ? candidate : base / candidate;
  };

  DatasetManifest manifest;
  std::set<std::string> seen;
  for (const auto &entry : doc["cases"]) {
    ManifestCase c;
    try {
      c.id = entry.at("id").get<std::string>();
      c.image_path = resolve(entry.at("image_path").get<std::string>());
      if (entry.contains("label_path") && !entry["label_path"].is_null())
        c.label_path = resolve(entry["label_path"].get<std::string>());
      if (entry.contains("spacing"))
        c.spacing = entry["spacing"].get<Spacing>();
    } catch (const json::exception &e) {
      throw ManifestError("manifest '" + path.string() + "': bad case entry: " + e.what());
    }
    if (!seen.insert(c.id).second)
      throw ManifestError("manifest '" + path.string() + "': duplicate case id '" +
                          c.id + "'");
    if (!fs::exists(c.image_path))
      throw ManifestError("case '" + c.id + "': image '" + c.image_path.string() +
                          "' does not exist");
    if (c.label_path && !fs::exists(*c.label_path))
      throw ManifestError("case '" + c.id + "': label '" + c.label_path->string() +
                          "' does not exist");
    for (double s : c.spacing)
      if (!(s > 0.0))
        throw ManifestError("case '" + c.id + "': spacing entries must be positive");
    manifest.cases.push_back(std::move(c));
  }
  return manifest;
}

void DatasetManifest::save(const fs::path &path) const {
  const fs::path base = path.parent_path();
  auto relative = [&](const fs::path &p) {
    if (!base.empty()) {
      auto rel = p.lexically_relative(base);
      if (!rel.empty() && *rel.begin() != "..")
        return rel.generic_string();
    }
    return p.generic_string();
  };

  json doc;
  doc["cases"] = json::array();
  for (const auto &c : cases) {
    json entry;
    entry["id"] = c.id;
    entry["image_path"] = relative(c.image_path);
    entry["label_path"] = c.label_path ? json(relative(*c.label_path)) : json(nullptr);
    entry["spacing"] = c.spacing;
    doc["cases"].push_back(std::move(entry));
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out)
    throw IoError("cannot write manifest '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

FloatImage load_case_image(const ManifestCase &c) {
  auto image = npy::read_float(c.image_path);
  if (!c.spacing.empty())
    image.set_spacing(c.spacing);
  return image;
}

LabelMap load_case_labels(const ManifestCase &c) {
  if (!c.label_path)
    throw ManifestError("case '" + c.id + "' has no label_path");
  auto labels = npy::read_labels(*c.label_path);
  if (!c.spacing.empty())
    labels.set_spacing(c.spacing);
  return labels;
}

} // namespace uqseg
