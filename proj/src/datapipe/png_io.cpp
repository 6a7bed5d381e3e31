#include "ascnet/datapipe/png_io.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdio>
#include <cstring>

#include "ascnet/core/error.hpp"

namespace ascnet::datapipe {

namespace {

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v >> 24));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

uint32_t read_u32(const uint8_t* p) {
  return (static_cast<uint32_t>(p[0]) << 24) | (static_cast<uint32_t>(p[1]) << 16) |
         (static_cast<uint32_t>(p[2]) << 8) | static_cast<uint32_t>(p[3]);
}

void append_chunk(std::vector<uint8_t>& out, const char type[4],
                  const uint8_t* data, size_t len) {
  put_u32(out, static_cast<uint32_t>(len));
  size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  if (len) out.insert(out.end(), data, data + len);
  uint32_t crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, out.data() + start, static_cast<uInt>(4 + len));
  put_u32(out, crc);
}

int paeth(int a, int b, int c) {
  int p = a + b - c;
  int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

std::vector<uint8_t> read_file(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (f == nullptr) throw io_error("cannot open file: " + path);
  std::fseek(f, 0, SEEK_END);
  long size = std::ftell(f);
  std::fseek(f, 0, SEEK_SET);
  std::vector<uint8_t> buf(size > 0 ? static_cast<size_t>(size) : 0);
  if (!buf.empty() && std::fread(buf.data(), 1, buf.size(), f) != buf.size()) {
    std::fclose(f);
    throw io_error("short read: " + path);
  }
  std::fclose(f);
  return buf;
}

void write_file(const std::string& path, const std::vector<uint8_t>& data) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) throw io_error("cannot write file: " + path);
  if (!data.empty() && std::fwrite(data.data(), 1, data.size(), f) != data.size()) {
    std::fclose(f);
    throw io_error("short write: " + path);
  }
  std::fclose(f);
}

const uint8_t kSignature[8] = {137, 80, 78, 71, 13, 10, 26, 10};

}  // namespace

void write_png_gray8(const std::string& path, const uint8_t* data, int width, int height) {
  if (width <= 0 || height <= 0) throw config_error("png: non-positive dimensions");

  // Raw scanlines, filter byte 0 per row.
  std::vector<uint8_t> raw(static_cast<size_t>(height) * (width + 1));
  for (int y = 0; y < height; ++y) {
    uint8_t* row = raw.data() + static_cast<size_t>(y) * (width + 1);
    row[0] = 0;
    std::memcpy(row + 1, data + static_cast<size_t>(y) * width, width);
  }

  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<uint8_t> compressed(bound);
  if (compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK) {
    throw io_error("png: deflate failed for " + path);
  }
  compressed.resize(bound);

  std::vector<uint8_t> out;
  out.insert(out.end(), kSignature, kSignature + 8);
  uint8_t ihdr[13];
  ihdr[0] = static_cast<uint8_t>(width >> 24);
  ihdr[1] = static_cast<uint8_t>(width >> 16);
  ihdr[2] = static_cast<uint8_t>(width >> 8);
  ihdr[3] = static_cast<uint8_t>(width);
  ihdr[4] = static_cast<uint8_t>(height >> 24);
  ihdr[5] = static_cast<uint8_t>(height >> 16);
  ihdr[6] = static_cast<uint8_t>(height >> 8);
  ihdr[7] = static_cast<uint8_t>(height);
  ihdr[8] = 8;   // bit depth
  ihdr[9] = 0;   // grayscale
  ihdr[10] = 0;  // compression
  ihdr[11] = 0;  // filter
  ihdr[12] = 0;  // no interlace
  append_chunk(out, "IHDR", ihdr, sizeof(ihdr));
  append_chunk(out, "IDAT", compressed.data(), compressed.size());
  append_chunk(out, "IEND", nullptr, 0);
  write_file(path, out);
}

std::vector<uint8_t> read_png_gray8(const std::string& path, int& width, int& height) {
  std::vector<uint8_t> bytes = read_file(path);
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kSignature, 8) != 0) {
    throw data_error("not a PNG file: " + path);
  }

  width = height = 0;
  std::vector<uint8_t> idat;
  size_t pos = 8;
  bool seen_end = false;
  while (pos + 12 <= bytes.size() && !seen_end) {
    uint32_t len = read_u32(bytes.data() + pos);
    if (pos + 12 + len > bytes.size()) throw data_error("truncated PNG: " + path);
    const char* type = reinterpret_cast<const char*>(bytes.data() + pos + 4);
    const uint8_t* data = bytes.data() + pos + 8;
    if (std::memcmp(type, "IHDR", 4) == 0) {
      if (len != 13) throw data_error("bad IHDR: " + path);
      width = static_cast<int>(read_u32(data));
      height = static_cast<int>(read_u32(data + 4));
      if (data[8] != 8 || data[9] != 0) {
        throw data_error("unsupported PNG (need 8-bit grayscale): " + path);
      }
      if (data[12] != 0) throw data_error("interlaced PNG unsupported: " + path);
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), data, data + len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      seen_end = true;
    }
    pos += 12 + len;
  }
  if (width <= 0 || height <= 0 || idat.empty()) throw data_error("incomplete PNG: " + path);

  std::vector<uint8_t> raw(static_cast<size_t>(height) * (width + 1));
  uLongf raw_len = static_cast<uLongf>(raw.size());
  if (uncompress(raw.data(), &raw_len, idat.data(), static_cast<uLong>(idat.size())) != Z_OK ||
      raw_len != raw.size()) {
    throw data_error("png: inflate failed for " + path);
  }

  std::vector<uint8_t> pixels(static_cast<size_t>(height) * width);
  for (int y = 0; y < height; ++y) {
    const uint8_t* row = raw.data() + static_cast<size_t>(y) * (width + 1);
    uint8_t filter = row[0];
    uint8_t* cur = pixels.data() + static_cast<size_t>(y) * width;
    const uint8_t* up = y > 0 ? pixels.data() + static_cast<size_t>(y - 1) * width : nullptr;
    for (int x = 0; x < width; ++x) {
      int a = x > 0 ? cur[x - 1] : 0;
      int b = up != nullptr ? up[x] : 0;
      int c = (x > 0 && up != nullptr) ? up[x - 1] : 0;
      int v = row[1 + x];
      switch (filter) {
        case 0: break;
        case 1: v += a; break;
        case 2: v += b; break;
        case 3: v += (a + b) / 2; break;
        case 4: v += paeth(a, b, c); break;
        default: throw data_error("png: unknown filter type: " + path);
      }
      cur[x] = static_cast<uint8_t>(v & 0xff);
    }
  }
  return pixels;
}

void save_slice_png(const std::string& path, const Slice& slice) {
  std::vector<uint8_t> bytes(slice.pixels.size());
  for (size_t i = 0; i < bytes.size(); ++i) {
    bytes[i] = static_cast<uint8_t>(intensity_bin(slice.pixels[i]));
  }
  write_png_gray8(path, bytes.data(), slice.width, slice.height);
}

Slice load_slice_png(const std::string& path, const std::string& subject_id, int index) {
  Slice s;
  std::vector<uint8_t> bytes = read_png_gray8(path, s.width, s.height);
  s.pixels.resize(bytes.size());
  for (size_t i = 0; i < bytes.size(); ++i) s.pixels[i] = bytes[i] / 255.0;
  s.subject_id = subject_id;
  s.index = index;
  return s;
}

void save_mask_png(const std::string& path, const Mask& mask) {
  std::vector<uint8_t> bytes(mask.pixels.size());
  for (size_t i = 0; i < bytes.size(); ++i) bytes[i] = mask.pixels[i] ? 255 : 0;
  write_png_gray8(path, bytes.data(), mask.width, mask.height);
}

Mask load_mask_png(const std::string& path) {
  Mask m;
  std::vector<uint8_t> bytes = read_png_gray8(path, m.width, m.height);
  m.pixels.resize(bytes.size());
  for (size_t i = 0; i < bytes.size(); ++i) m.pixels[i] = bytes[i] ? 1 : 0;
  return m;
}

}  // namespace ascnet::datapipe
