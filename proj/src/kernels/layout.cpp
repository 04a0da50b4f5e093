#include <algorithm>

#include "covergen/kernels.hpp"
#include "covergen/rng.hpp"

namespace covergen::kernels {

CoverLayout make_cover_layout(std::uint64_t key, std::size_t title_length, int width, int height) {
  SplitMix rng(key);
  auto color = [&](std::uint8_t* out) {
    for (int c = 0; c < 3; ++c) out[c] = static_cast<std::uint8_t>(rng.below(256));
  };
  CoverLayout l{};
  color(l.top);
  color(l.bottom);
  for (auto& r : l.rects) {
    const int w = static_cast<int>(rng.below(static_cast<std::uint64_t>(width) / 2 + 1)) + 1;
    const int h = static_cast<int>(rng.below(static_cast<std::uint64_t>(height) / 2 + 1)) + 1;
    r.x0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(width)));
    r.y0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(height)));
    r.x1 = std::min(width, r.x0 + w);
    r.y1 = std::min(height, r.y0 + h);
    color(r.color);
  }
  // Title band: a strip where a cover would print its title, taller for
  // longer titles.
  const int band_height = std::max(1, static_cast<int>((title_length % 32 + 1) * height / 96));
  l.band_y0 = height / 8;
  l.band_y1 = std::min(height, l.band_y0 + band_height);
  color(l.band);
  return l;
}

}  // namespace covergen::kernels
