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

#ifndef AFFORD_THUMBNAIL_HPP_
#define AFFORD_THUMBNAIL_HPP_

#include <filesystem>
#include <optional>
#include <string>

#include "afford/box.hpp"

namespace afford::thumbnail {

// PNG bytes of `box` cut out of the PNG at `image_path`, the box clamped to
// the image. nullopt when the file is missing or unreadable, or the box lies
// outside the image.
std::optional<std::string> crop_png(const std::filesystem::path& image_path,
                                    const BoundingBox& box);

// Writes an RGB image; used for fixtures and the synthetic generator.
void write_png(const std::filesystem::path& path, int width, int height,
               const std::string& rgb);

}  // namespace afford::thumbnail

#endif  // AFFORD_THUMBNAIL_HPP_
