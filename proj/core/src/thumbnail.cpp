// Copyright 2026 The Afford Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "afford/thumbnail.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "afford/error.hpp"

namespace afford::thumbnail {

namespace {

constexpr int kChannels = 3;

std::optional<std::string> encode_rgb(int width, int height, const png_byte* pixels,
                                      png_int_32 row_stride) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels, row_stride, nullptr)) {
    return std::nullopt;
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels, row_stride, nullptr)) {
    return std::nullopt;
  }
  out.resize(size);
  return out;
}

}  // namespace

std::optional<std::string> crop_png(const std::filesystem::path& image_path,
                                    const BoundingBox& box) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(image_path, ec)) return std::nullopt;

  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, image_path.c_str())) return std::nullopt;
  image.format = PNG_FORMAT_RGB;
  std::vector<png_byte> pixels(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
    png_image_free(&image);
    return std::nullopt;
  }
  const int width = static_cast<int>(image.width);
  const int height = static_cast<int>(image.height);
  const int x0 = std::clamp(static_cast<int>(std::floor(box.x_min)), 0, width);
  const int x1 = std::clamp(static_cast<int>(std::ceil(box.x_max)), 0, width);
  const int y0 = std::clamp(static_cast<int>(std::floor(box.y_min)), 0, height);
  const int y1 = std::clamp(static_cast<int>(std::ceil(box.y_max)), 0, height);
  if (x1 <= x0 || y1 <= y0) return std::nullopt;

  const png_int_32 stride = static_cast<png_int_32>(width * kChannels);
  const png_byte* origin = pixels.data() + static_cast<std::size_t>(y0) * stride + x0 * kChannels;
  return encode_rgb(x1 - x0, y1 - y0, origin, stride);
}

void write_png(const std::filesystem::path& path, int width, int height,
               const std::string& rgb) {
  if (width <= 0 || height <= 0 ||
      rgb.size() != static_cast<std::size_t>(width) * height * kChannels) {
    throw Error(ErrorCode::kIoError, "RGB buffer does not match " + std::to_string(width) + "x" +
                                         std::to_string(height));
  }
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, rgb.data(), 0, nullptr)) {
    throw Error(ErrorCode::kIoError, "cannot write PNG " + path.string() + ": " + image.message);
  }
}

}  // namespace afford::thumbnail
