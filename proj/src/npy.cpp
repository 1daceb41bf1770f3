#include "uqseg/npy.hpp"

#include <array>
#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <unistd.h>

namespace uqseg::npy {

static_assert(std::endian::native == std::endian::little,
              "NPY I/O assumes a little-endian host");

namespace {

constexpr std::array<char, 6> kMagic = {'\x93', 'N', 'U', 'M', 'P', 'Y'};
constexpr std::size_t kPreludeSize = 10; // magic + version + u16 length
constexpr std::size_t kAlignment = 64;

struct Header {
  std::string descr;
  bool fortran_order = false;
  Shape shape;
};

// Tiny scanner for the Python dict literal numpy writes.
class DictScanner {
public:
  explicit DictScanner(std::string_view text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }
  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }
  std::optional<std::string> quoted() {
    skip_ws();
    if (pos_ >= text_.size() || (text_[pos_] != '\'' && text_[pos_] != '"'))
      return std::nullopt;
    const char quote = text_[pos_++];
    const auto end = text_.find(quote, pos_);
    if (end == std::string_view::npos)
      return std::nullopt;
    std::string out(text_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return out;
  }
  std::optional<std::string> word() {
    skip_ws();
    const auto start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (start == pos_)
      return std::nullopt;
    return std::string(text_.substr(start, pos_ - start));
  }

private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

Shape parse_shape(DictScanner &scan) {
  if (!scan.consume('('))
    throw NpyError("shape", "expected a tuple");
  Shape shape;
  while (!scan.consume(')')) {
    auto token = scan.word();
    if (!token)
      throw NpyError("shape", "expected an integer extent");
    std::size_t extent = 0;
    try {
      std::size_t used = 0;
      extent = std::stoull(*token, &used);
      if (used != token->size())
        throw std::invalid_argument(*token);
    } catch (const std::exception &) {
      throw NpyError("shape", "invalid extent '" + *token + "'");
    }
    shape.push_back(extent);
    if (!scan.consume(',')) {
      if (!scan.consume(')'))
        throw NpyError("shape", "unterminated tuple");
      break;
    }
  }
  return shape;
}

Header parse_header(std::string_view text) {
  DictScanner scan(text);
  if (!scan.consume('{'))
    throw NpyError("header", "expected a dict literal");
  std::optional<std::string> descr;
  std::optional<bool> fortran;
  std::optional<Shape> shape;
  while (!scan.consume('}')) {
    auto key = scan.quoted();
    if (!key)
      throw NpyError("header", "expected a quoted key");
    if (!scan.consume(':'))
      throw NpyError("header", "expected ':' after key '" + *key + "'");
    if (*key == "descr") {
      descr = scan.quoted();
      if (!descr)
        throw NpyError("descr", "expected a quoted dtype string");
    } else if (*key == "fortran_order") {
      auto value = scan.word();
      if (value == "False")
        fortran = false;
      else if (value == "True")
        fortran = true;
      else
        throw NpyError("fortran_order", "expected True or False");
    } else if (*key == "shape") {
      shape = parse_shape(scan);
    } else {
      throw NpyError("header", "unexpected key '" + *key + "'");
    }
    if (!scan.consume(',')) {
      if (!scan.consume('}'))
        throw NpyError("header", "unterminated dict");
      break;
    }
  }
  if (!descr)
    throw NpyError("descr", "missing");
  if (!fortran)
    throw NpyError("fortran_order", "missing");
  if (!shape)
    throw NpyError("shape", "missing");
  return Header{*descr, *fortran, *shape};
}

template <typename T>
Image<T> read_payload(std::istream &in, const Shape &shape) {
  std::vector<T> data(element_count(shape));
  const auto bytes = static_cast<std::streamsize>(data.size() * sizeof(T));
  in.read(reinterpret_cast<char *>(data.data()), bytes);
  if (in.gcount() != bytes)
    throw NpyError("payload", "expected " + std::to_string(bytes) + " bytes, got " +
                                  std::to_string(in.gcount()));
  return Image<T>(shape, std::move(data));
}

template <typename T>
void write_impl(const Image<T> &image, const char *descr, std::ostream &out) {
  std::string dict = header_dict(descr, image.shape());
  const std::size_t unpadded = kPreludeSize + dict.size() + 1;
  const std::size_t padding = (kAlignment - unpadded % kAlignment) % kAlignment;
  dict.append(padding, ' ');
  dict.push_back('\n');

  out.write(kMagic.data(), kMagic.size());
  const char version[2] = {1, 0};
  out.write(version, 2);
  const auto len = static_cast<std::uint16_t>(dict.size());
  const char len_bytes[2] = {static_cast<char>(len & 0xff), static_cast<char>(len >> 8)};
  out.write(len_bytes, 2);
  out.write(dict.data(), static_cast<std::streamsize>(dict.size()));
  const auto payload = image.data();
  out.write(reinterpret_cast<const char *>(payload.data()),
            static_cast<std::streamsize>(payload.size() * sizeof(T)));
  if (!out)
    throw IoError("npy write failed");
}

} // namespace

std::string header_dict(const char *descr, const Shape &shape) {
  return std::string("{'descr': '") + descr + "', 'fortran_order': False, 'shape': " +
         shape_string(shape) + ", }";
}

Tensor read(std::istream &in) {
  std::array<char, kPreludeSize> prelude{};
  in.read(prelude.data(), prelude.size());
  if (in.gcount() != static_cast<std::streamsize>(prelude.size()))
    throw NpyError("magic", "file too short");
  if (std::memcmp(prelude.data(), kMagic.data(), kMagic.size()) != 0)
    throw NpyError("magic", "not an NPY file");
  if (prelude[6] != 1 || prelude[7] != 0)
    throw NpyError("version", "only format version 1.0 is supported, got " +
                                  std::to_string(int(prelude[6])) + "." +
                                  std::to_string(int(prelude[7])));
  const std::size_t header_len = static_cast<unsigned char>(prelude[8]) |
                                 (static_cast<unsigned char>(prelude[9]) << 8);
  std::string text(header_len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(header_len));
  if (in.gcount() != static_cast<std::streamsize>(header_len))
    throw NpyError("header", "truncated header");

  const Header header = parse_header(text);
  if (header.descr != "<f4" && header.descr != "|u1" && header.descr != "u1")
    throw UnsupportedDtypeError(header.descr);
  if (header.fortran_order)
    throw FortranOrderError();
  if (header.shape.empty())
    throw NpyError("shape", "scalar arrays are not supported");
  for (auto extent : header.shape)
    if (extent == 0)
      throw NpyError("shape", "zero-sized extent in " + shape_string(header.shape));
  if (header.shape.size() > 4)
    throw NpyError("shape", "rank above 4 is not supported");

  if (header.descr == "<f4")
    return read_payload<float>(in, header.shape);
  return read_payload<std::uint8_t>(in, header.shape);
}

Tensor read(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open '" + path.string() + "' for reading");
  return read(in);
}

FloatImage read_float(const std::filesystem::path &path) {
  auto tensor = read(path);
  if (auto *image = std::get_if<FloatImage>(&tensor))
    return std::move(*image);
  throw UnsupportedDtypeError("|u1 (expected <f4 in " + path.string() + ")");
}

LabelMap read_labels(const std::filesystem::path &path) {
  auto tensor = read(path);
  if (auto *labels = std::get_if<LabelMap>(&tensor))
    return std::move(*labels);
  throw UnsupportedDtypeError("<f4 (expected |u1 in " + path.string() + ")");
}

void write(const FloatImage &image, std::ostream &out) { write_impl(image, "<f4", out); }
void write(const LabelMap &labels, std::ostream &out) { write_impl(labels, "|u1", out); }

void write(const Tensor &tensor, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot open '" + path.string() + "' for writing");
  std::visit([&](const auto &image) { write(image, out); }, tensor);
  out.close();
  if (!out)
    throw IoError("failed writing '" + path.string() + "'");
}

void write_atomic(const Tensor &tensor, const std::filesystem::path &path) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  write(tensor, tmp);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() +
                  "': " + ec.message());
}

} // namespace uqseg::npy
