#include "gcops/io/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <sstream>

#include "gcops/error.hpp"

namespace gcops::io {

Stack read_image(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return char(std::tolower(c)); });
  if (ext == ".png") return read_png(path);
  if (ext == ".tif" || ext == ".tiff") return read_tiff(path);
  throw Error(ErrorCode::Io, path.string() + ": unsupported image extension '" + ext + "'");
}

std::filesystem::path sidecar_path(const std::filesystem::path& image) {
  return std::filesystem::path(image.string() + ".meta");
}

Sidecar read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  Sidecar out;
  std::string line;
  auto trim = [](std::string v) {
    const auto b = v.find_first_not_of(" \t\r"), e = v.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

std::optional<Sidecar> read_sidecar(const std::filesystem::path& image) {
  if (!std::filesystem::exists(sidecar_path(image))) return std::nullopt;
  return read_key_values(sidecar_path(image));
}

void write_sidecar(const std::filesystem::path& image, const Sidecar& values) {
  std::ostringstream os;
  for (const auto& [k, v] : values) os << k << '=' << v << '\n';
  write_file_atomic(sidecar_path(image), os.str());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  static thread_local std::mt19937_64 salt{std::random_device{}()};
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(salt() % 1000000);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out.write(content.data(), std::streamsize(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error(ErrorCode::Io, "write failed for " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::Io, "cannot rename into " + path.string() + ": " + ec.message());
  }
}

std::vector<ScalarField> split_frames(const Stack& stack, std::size_t depth) {
  if (depth == 0 || stack.pages % depth != 0)
    throw Error(ErrorCode::InvalidArgument,
                std::to_string(stack.pages) + " pages do not split into volumes of depth " +
                    std::to_string(depth));
  const std::size_t frames = stack.pages / depth;
  const std::size_t per = stack.width * stack.height * depth;
  std::vector<ScalarField> out;
  out.reserve(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    ScalarField field;
    field.shape = depth == 1 ? Shape(stack.width, stack.height)
                             : Shape(stack.width, stack.height, depth);
    field.values.assign(stack.values.begin() + std::ptrdiff_t(f * per),
                        stack.values.begin() + std::ptrdiff_t((f + 1) * per));
    out.push_back(std::move(field));
  }
  return out;
}

ScalarField to_field(const Stack& stack) {
  return split_frames(stack, stack.pages).front();
}

Stack from_field(const ScalarField& field) {
  Stack st;
  st.width = field.shape.nx();
  st.height = field.shape.ny();
  st.pages = field.shape.nz();
  st.values = field.values;
  st.type = SampleType::F32;
  return st;
}

Stack from_mask(const BinaryField& field) {
  Stack st;
  st.width = field.shape().nx();
  st.height = field.shape().ny();
  st.pages = field.shape().nz();
  const auto m = field.mask();
  st.values.assign(m.begin(), m.end());
  for (double& v : st.values) v *= 255.0;
  st.type = SampleType::U8;
  return st;
}

}  // namespace gcops::io
