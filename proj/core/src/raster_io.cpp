#include "canopy/raster_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "canopy/error.hpp"

namespace canopy {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

class ByteReader {
 public:
  explicit ByteReader(std::istream& in) : in_(in) {}

  std::size_t offset() const { return offset_; }

  void read(void* dst, std::size_t n, const char* what) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    const auto got = static_cast<std::size_t>(in_.gcount());
    if (got != n) throw FormatError(std::string("truncated ") + what, offset_ + got);
    offset_ += n;
  }

  template <typename T>
  T read_le(const char* what) {
    unsigned char b[sizeof(T)];
    read(b, sizeof(T), what);
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
  }

  int peek() { return in_.peek(); }
  int get() {
    const int c = in_.get();
    if (c != std::char_traits<char>::eof()) ++offset_;
    return c;
  }

 private:
  std::istream& in_;
  std::size_t offset_ = 0;
};

template <typename T>
void write_le(std::ostream& out, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

// PPM header tokens are whitespace separated; '#' starts a comment to end of line.
std::size_t read_ppm_int(ByteReader& r) {
  int c = r.peek();
  for (;;) {
    if (c == '#') {
      while (c != '\n' && c != std::char_traits<char>::eof()) c = r.get();
      c = r.peek();
    } else if (c != std::char_traits<char>::eof() && std::isspace(c)) {
      r.get();
      c = r.peek();
    } else {
      break;
    }
  }
  if (c == std::char_traits<char>::eof() || !std::isdigit(c))
    throw FormatError("malformed PPM header: expected integer", r.offset());
  std::size_t v = 0;
  while (c != std::char_traits<char>::eof() && std::isdigit(c)) {
    v = v * 10 + static_cast<std::size_t>(r.get() - '0');
    if (v > (1u << 30)) throw FormatError("PPM header value too large", r.offset());
    c = r.peek();
  }
  return v;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return in;
}

}  // namespace

Raster read_ppm(std::istream& in) {
  ByteReader r(in);
  char magic[2];
  r.read(magic, 2, "PPM magic");
  if (magic[0] != 'P' || magic[1] != '6') throw FormatError("not a binary P6 PPM", 0);
  const std::size_t width = read_ppm_int(r);
  const std::size_t height = read_ppm_int(r);
  const std::size_t maxval_offset = r.offset();
  const std::size_t maxval = read_ppm_int(r);
  if (maxval != 255) throw FormatError("unsupported PPM maxval " + std::to_string(maxval), maxval_offset);
  const int sep = r.get();
  if (sep == std::char_traits<char>::eof() || !std::isspace(sep))
    throw FormatError("malformed PPM header: missing separator before payload", r.offset());
  if (width == 0 || height == 0) throw FormatError("PPM has zero dimension", r.offset());

  std::vector<unsigned char> payload(width * height * 3);
  r.read(payload.data(), payload.size(), "PPM payload");

  Raster out(width, height, {BandRole::red, BandRole::green, BandRole::blue});
  for (std::size_t i = 0; i < width * height; ++i)
    for (std::size_t b = 0; b < 3; ++b)
      out.band(b)[i] = static_cast<float>(payload[i * 3 + b]) / 255.0f;
  return out;
}

Raster read_ppm(const std::string& path) {
  auto in = open_in(path);
  return read_ppm(in);
}

GeoRaster read_fbr(std::istream& in) {
  ByteReader r(in);
  char magic[4];
  r.read(magic, 4, "FBR magic");
  if (std::memcmp(magic, "FBR1", 4) != 0) throw FormatError("bad FBR magic", 0);
  const auto width = r.read_le<std::uint32_t>("FBR width");
  const auto height = r.read_le<std::uint32_t>("FBR height");
  const auto bands = r.read_le<std::uint32_t>("FBR band count");
  if (bands == 0) throw FormatError("FBR band count is zero", r.offset() - 4);
  if (bands > 255) throw FormatError("FBR band count implausible", r.offset() - 4);

  std::vector<BandRole> roles;
  for (std::uint32_t b = 0; b < bands; ++b) {
    const auto len = r.read_le<std::uint8_t>("FBR role length");
    std::string tag(len, '\0');
    r.read(tag.data(), len, "FBR role tag");
    try {
      roles.push_back(band_role_from_string(tag));
    } catch (const ValidationError& e) {
      throw FormatError(e.what(), r.offset() - len);
    }
  }

  GeoTransform geo;
  geo.origin_x = r.read_le<double>("FBR origin_x");
  geo.origin_y = r.read_le<double>("FBR origin_y");
  geo.pixel_width = r.read_le<double>("FBR pixel_width");
  geo.pixel_height = r.read_le<double>("FBR pixel_height");
  const auto has_nodata = r.read_le<std::uint8_t>("FBR nodata flag");
  const auto nodata = r.read_le<float>("FBR nodata");
  try {
    geo.validate();
  } catch (const ValidationError& e) {
    throw FormatError(e.what(), r.offset());
  }

  const std::size_t count = std::size_t{width} * height * bands;
  std::vector<float> data(count);
  const std::size_t payload_offset = r.offset();
  {
    std::vector<unsigned char> raw(count * 4);
    r.read(raw.data(), raw.size(), "FBR payload");
    for (std::size_t i = 0; i < count; ++i) {
      unsigned char* p = raw.data() + i * 4;
      if constexpr (std::endian::native == std::endian::big) std::reverse(p, p + 4);
      std::memcpy(&data[i], p, 4);
    }
  }
  if (in.peek() != std::char_traits<char>::eof())
    throw FormatError("FBR payload size mismatch: trailing bytes", payload_offset + count * 4);

  std::optional<float> nd;
  if (has_nodata) nd = nodata;
  Raster raster;
  try {
    raster = Raster(width, height, std::move(roles), std::move(data), nd);
  } catch (const ValidationError& e) {
    throw FormatError(std::string("FBR band roles: ") + e.what(), 16);
  }
  return {std::move(raster), geo};
}

GeoRaster read_fbr(const std::string& path) {
  auto in = open_in(path);
  return read_fbr(in);
}

void write_fbr(const Raster& raster, const GeoTransform& geo, std::ostream& out) {
  geo.validate();
  out.write("FBR1", 4);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(raster.width()));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(raster.height()));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(raster.band_count()));
  for (BandRole role : raster.roles()) {
    const auto tag = to_string(role);
    write_le<std::uint8_t>(out, static_cast<std::uint8_t>(tag.size()));
    out.write(tag.data(), static_cast<std::streamsize>(tag.size()));
  }
  write_le(out, geo.origin_x);
  write_le(out, geo.origin_y);
  write_le(out, geo.pixel_width);
  write_le(out, geo.pixel_height);
  write_le<std::uint8_t>(out, raster.nodata() ? 1 : 0);
  write_le<float>(out, raster.nodata().value_or(0.0f));
  for (float v : raster.data()) write_le(out, v);
  if (!out) throw Error("FBR write failed");
}

void write_fbr(const Raster& raster, const GeoTransform& geo, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot create '" + path + "'");
  write_fbr(raster, geo, out);
}

}  // namespace canopy
