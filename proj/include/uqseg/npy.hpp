#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "uqseg/ndimage.hpp"

namespace uqseg::npy {

// NPY v1.0 subset: '<f4' or '|u1', C order, little-endian host.

Tensor read(const std::filesystem::path &path);
Tensor read(std::istream &in);

FloatImage read_float(const std::filesystem::path &path);
LabelMap read_labels(const std::filesystem::path &path);

void write(const FloatImage &image, std::ostream &out);
void write(const LabelMap &labels, std::ostream &out);
void write(const Tensor &tensor, const std::filesystem::path &path);

/// Writes to a sibling temp file and renames it into place.
void write_atomic(const Tensor &tensor, const std::filesystem::path &path);

/// The header dictionary text (without magic/length/padding) for a shape.
std::string header_dict(const char *descr, const Shape &shape);

} // namespace uqseg::npy
