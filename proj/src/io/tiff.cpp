#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "gcops/error.hpp"
#include "gcops/io/image_io.hpp"

namespace gcops::io {

namespace {

enum Tag : std::uint16_t {
  ImageWidth = 256,
  ImageLength = 257,
  BitsPerSample = 258,
  Compression = 259,
  Photometric = 262,
  ImageDescription = 270,
  StripOffsets = 273,
  SamplesPerPixel = 277,
  RowsPerStrip = 278,
  StripByteCounts = 279,
  PlanarConfig = 284,
  TileWidth = 322,
  SampleFormat = 339,
};

enum FieldType : std::uint16_t { Byte = 1, Ascii = 2, Short = 3, Long = 4 };

class Reader {
 public:
  Reader(std::vector<std::uint8_t> bytes, const std::string& name)
      : data_(std::move(bytes)), name_(name) {
    if (data_.size() < 8) fail("file too short");
    if (data_[0] == 'I' && data_[1] == 'I') big_ = false;
    else if (data_[0] == 'M' && data_[1] == 'M') big_ = true;
    else fail("not a TIFF file");
    if (u16(2) != 42) fail("unsupported TIFF variant (BigTIFF?)");
  }

  std::uint16_t u16(std::size_t at) const {
    need(at, 2);
    return big_ ? std::uint16_t(data_[at] << 8 | data_[at + 1])
                : std::uint16_t(data_[at + 1] << 8 | data_[at]);
  }
  std::uint32_t u32(std::size_t at) const {
    need(at, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      const std::uint32_t b = data_[at + std::size_t(i)];
      v |= big_ ? b << (8 * (3 - i)) : b << (8 * i);
    }
    return v;
  }
  void need(std::size_t at, std::size_t n) const {
    if (at + n > data_.size()) fail("truncated file");
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::Io, name_ + ": " + what);
  }
  const std::vector<std::uint8_t>& data() const { return data_; }
  bool big_endian() const { return big_; }

  // All values of one IFD entry, widened to 32 bits.
  std::vector<std::uint32_t> values(std::size_t entry) const {
    const std::uint16_t type = u16(entry + 2);
    const std::uint32_t count = u32(entry + 4);
    const std::size_t width = type == Short ? 2 : type == Long ? 4 : 1;
    const std::size_t bytes = width * count;
    const std::size_t at = bytes <= 4 ? entry + 8 : u32(entry + 8);
    std::vector<std::uint32_t> out(count);
    for (std::uint32_t i = 0; i < count; ++i) {
      const std::size_t p = at + i * width;
      out[i] = width == 2 ? u16(p) : width == 4 ? u32(p) : (need(p, 1), data_[p]);
    }
    return out;
  }

 private:
  std::vector<std::uint8_t> data_;
  std::string name_;
  bool big_ = false;
};

struct Page {
  std::uint32_t width = 0, height = 0, bits = 8, format = 1, compression = 1, samples = 1;
  std::uint32_t rows_per_strip = 0xffffffff;
  std::vector<std::uint32_t> offsets, counts;
  bool tiled = false;
};

double decode(const std::uint8_t* p, const Page& pg, bool big) {
  auto load = [&](int n) {
    std::uint32_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint32_t(p[i]) << (8 * (big ? n - 1 - i : i));
    return v;
  };
  switch (pg.bits) {
    case 8: return pg.format == 2 ? double(std::int8_t(p[0])) : double(p[0]);
    case 16: {
      const auto v = std::uint16_t(load(2));
      return pg.format == 2 ? double(std::int16_t(v)) : double(v);
    }
    case 32: {
      const std::uint32_t v = load(4);
      if (pg.format == 3) return double(std::bit_cast<float>(v));
      return pg.format == 2 ? double(std::int32_t(v)) : double(v);
    }
  }
  return 0.0;
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(std::uint8_t(v));
  out.push_back(std::uint8_t(v >> 8));
}
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}
void set_u32(std::vector<std::uint8_t>& out, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out[at + std::size_t(i)] = std::uint8_t(v >> (8 * i));
}

}  // namespace

Stack read_tiff(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  Reader r(std::move(bytes), path.string());

  std::vector<Page> pages;
  std::size_t ifd = r.u32(4);
  while (ifd != 0) {
    if (pages.size() > 1000000) r.fail("IFD chain does not terminate");
    Page pg;
    const std::uint16_t n = r.u16(ifd);
    for (std::uint16_t e = 0; e < n; ++e) {
      const std::size_t entry = ifd + 2 + 12 * std::size_t(e);
      const std::uint16_t tag = r.u16(entry);
      switch (tag) {
        case ImageWidth: pg.width = r.values(entry).at(0); break;
        case ImageLength: pg.height = r.values(entry).at(0); break;
        case BitsPerSample: pg.bits = r.values(entry).at(0); break;
        case Compression: pg.compression = r.values(entry).at(0); break;
        case SamplesPerPixel: pg.samples = r.values(entry).at(0); break;
        case RowsPerStrip: pg.rows_per_strip = r.values(entry).at(0); break;
        case StripOffsets: pg.offsets = r.values(entry); break;
        case StripByteCounts: pg.counts = r.values(entry); break;
        case SampleFormat: pg.format = r.values(entry).at(0); break;
        case TileWidth: pg.tiled = true; break;
        default: break;
      }
    }
    pages.push_back(pg);
    ifd = r.u32(ifd + 2 + 12 * std::size_t(n));
  }
  if (pages.empty()) r.fail("no image directories");

  Stack st;
  st.width = pages[0].width;
  st.height = pages[0].height;
  st.pages = pages.size();
  st.values.resize(st.width * st.height * st.pages);
  for (std::size_t k = 0; k < pages.size(); ++k) {
    const Page& pg = pages[k];
    if (pg.width != st.width || pg.height != st.height) r.fail("pages differ in size");
    if (pg.compression != 1) r.fail("compressed TIFF is not supported");
    if (pg.tiled) r.fail("tiled TIFF is not supported");
    if (pg.samples != 1) r.fail("only single-sample (grayscale) TIFF is supported");
    if (pg.bits != 8 && pg.bits != 16 && pg.bits != 32) r.fail("unsupported bit depth");
    if (pg.offsets.empty() || pg.offsets.size() != pg.counts.size()) r.fail("bad strip table");
    if (k == 0)
      st.type = pg.format == 3 ? SampleType::F32 : pg.bits == 16 ? SampleType::U16 : SampleType::U8;

    const std::size_t bpp = pg.bits / 8;
    const std::size_t rows = std::min<std::size_t>(pg.rows_per_strip, pg.height);
    double* dst = st.values.data() + k * st.width * st.height;
    std::size_t row = 0;
    for (std::size_t s = 0; s < pg.offsets.size() && row < pg.height; ++s) {
      const std::size_t nrows = std::min(rows, pg.height - row);
      const std::size_t bytes = nrows * pg.width * bpp;
      r.need(pg.offsets[s], bytes);
      const std::uint8_t* src = r.data().data() + pg.offsets[s];
      for (std::size_t i = 0; i < nrows * pg.width; ++i)
        dst[row * pg.width + i] = decode(src + i * bpp, pg, r.big_endian());
      row += nrows;
    }
    if (row != pg.height) r.fail("strips do not cover the image");
  }
  return st;
}

void write_tiff(const std::filesystem::path& path, const Stack& stack, SampleType type,
                const std::string& description) {
  if (stack.values.size() != stack.width * stack.height * stack.pages || stack.pages == 0)
    throw Error(ErrorCode::InvalidArgument, "stack size does not match its dimensions");
  const std::size_t bpp = type == SampleType::U8 ? 1 : type == SampleType::U16 ? 2 : 4;
  const std::size_t page_bytes = stack.width * stack.height * bpp;

  std::vector<std::uint8_t> out = {'I', 'I'};
  put_u16(out, 42);
  put_u32(out, 8);

  std::string desc = description;
  if (!desc.empty()) desc.push_back('\0');

  for (std::size_t k = 0; k < stack.pages; ++k) {
    struct Entry {
      std::uint16_t tag, type;
      std::uint32_t count, value;
    };
    const bool with_desc = k == 0 && !desc.empty();
    const std::uint16_t n_entries = with_desc ? 12 : 11;
    const std::size_t ifd_at = out.size();
    const std::size_t ifd_size = 2 + 12 * std::size_t(n_entries) + 4;
    const std::size_t desc_at = ifd_at + ifd_size;
    const std::size_t pixels_at = desc_at + (with_desc ? desc.size() : 0);
    const std::uint16_t bits = std::uint16_t(bpp * 8);
    const std::uint16_t format = type == SampleType::F32 ? 3 : 1;

    std::vector<Entry> entries = {
        {ImageWidth, Long, 1, std::uint32_t(stack.width)},
        {ImageLength, Long, 1, std::uint32_t(stack.height)},
        {BitsPerSample, Short, 1, bits},
        {Compression, Short, 1, 1},
        {Photometric, Short, 1, 1},
    };
    if (with_desc)
      entries.push_back({ImageDescription, Ascii, std::uint32_t(desc.size()),
                         std::uint32_t(desc.size() <= 4 ? 0 : desc_at)});
    entries.insert(entries.end(), {
                                      {StripOffsets, Long, 1, std::uint32_t(pixels_at)},
                                      {SamplesPerPixel, Short, 1, 1},
                                      {RowsPerStrip, Long, 1, std::uint32_t(stack.height)},
                                      {StripByteCounts, Long, 1, std::uint32_t(page_bytes)},
                                      {PlanarConfig, Short, 1, 1},
                                      {SampleFormat, Short, 1, format},
                                  });
    put_u16(out, n_entries);
    for (const Entry& e : entries) {
      put_u16(out, e.tag);
      put_u16(out, e.type);
      put_u32(out, e.count);
      if (e.tag == ImageDescription && desc.size() <= 4) {
        std::uint8_t inline_bytes[4] = {0, 0, 0, 0};
        std::memcpy(inline_bytes, desc.data(), desc.size());
        out.insert(out.end(), inline_bytes, inline_bytes + 4);
      } else if (e.type == Short) {
        put_u16(out, std::uint16_t(e.value));
        put_u16(out, 0);
      } else {
        put_u32(out, e.value);
      }
    }
    const std::size_t next_at = out.size();
    put_u32(out, 0);
    if (with_desc && desc.size() > 4) out.insert(out.end(), desc.begin(), desc.end());

    const double* src = stack.values.data() + k * stack.width * stack.height;
    for (std::size_t i = 0; i < stack.width * stack.height; ++i) {
      const double v = src[i];
      if (type == SampleType::F32) {
        put_u32(out, std::bit_cast<std::uint32_t>(float(v)));
      } else if (type == SampleType::U16) {
        put_u16(out, std::uint16_t(std::clamp(std::lround(v), 0L, 65535L)));
      } else {
        out.push_back(std::uint8_t(std::clamp(std::lround(v), 0L, 255L)));
      }
    }
    if (out.size() % 2) out.push_back(0);  // IFDs start on a word boundary
    if (k + 1 < stack.pages) set_u32(out, next_at, std::uint32_t(out.size()));
  }

  write_file_atomic(path, std::string(out.begin(), out.end()));
}

}  // namespace gcops::io
