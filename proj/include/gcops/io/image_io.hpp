#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gcops/lattice.hpp"
#include "gcops/simulators.hpp"

namespace gcops::io {

enum class SampleType { U8, U16, F32 };

// Pages of equal size, x-fastest within a page, pages consecutive.
struct Stack {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t pages = 0;
  std::vector<double> values;
  // Sample type found on disk (reading) or requested (writing).
  SampleType type = SampleType::U8;
};

/// Baseline TIFF: uncompressed strips, one sample per pixel, 8/16/32-bit
/// unsigned or 32-bit float, either byte order, any number of pages.
Stack read_tiff(const std::filesystem::path& path);

// Little-endian, one strip per page. Integer types are rounded and clamped.
// Written to a temporary file and renamed into place.
void write_tiff(const std::filesystem::path& path, const Stack& stack, SampleType type,
                const std::string& description = {});

// 8- or 16-bit PNG; colour images are converted to luminance.
Stack read_png(const std::filesystem::path& path);
void write_png_gray(const std::filesystem::path& path, const Stack& stack, SampleType type);
void write_png_rgb(const std::filesystem::path& path, std::size_t width, std::size_t height,
                   const std::vector<std::uint8_t>& rgb);

// Dispatch on extension (.png, .tif, .tiff).
Stack read_image(const std::filesystem::path& path);

// key=value sidecar "<image>.meta" describing page layout.
using Sidecar = std::map<std::string, std::string>;
std::filesystem::path sidecar_path(const std::filesystem::path& image);
// key=value lines; blank lines and lines starting with '#' are skipped.
Sidecar read_key_values(const std::filesystem::path& path);
std::optional<Sidecar> read_sidecar(const std::filesystem::path& image);
void write_sidecar(const std::filesystem::path& image, const Sidecar& values);

// Writes `content` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Stack of depth-`depth` volumes (depth 1 = planes) split into frames.
// Throws InvalidArgument when pages is not a multiple of depth.
std::vector<ScalarField> split_frames(const Stack& stack, std::size_t depth);

// One 2D plane or 3D volume from a whole stack (pages > 1 -> 3D).
ScalarField to_field(const Stack& stack);

Stack from_field(const ScalarField& field);
Stack from_mask(const BinaryField& field);

}  // namespace gcops::io
