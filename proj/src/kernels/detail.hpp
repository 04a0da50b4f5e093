#pragma once

// Per-element bodies shared by the serial and OpenMP kernels.

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "covergen/kernels.hpp"
#include "covergen/rng.hpp"

namespace covergen::kernels::detail {

inline std::uint8_t noisy_byte(std::uint8_t value, double sigma, std::uint64_t key, std::uint64_t index) {
  const double v = value / 255.0 + sigma * counter_normal(key, index);
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

inline void cover_pixel(const CoverLayout& l, int x, int y, int height, std::uint8_t* px) {
  const int span = std::max(1, height - 1);
  for (int c = 0; c < 3; ++c) px[c] = static_cast<std::uint8_t>(l.top[c] + ((l.bottom[c] - l.top[c]) * y) / span);
  for (const auto& r : l.rects) {
    if (x >= r.x0 && x < r.x1 && y >= r.y0 && y < r.y1)
      for (int c = 0; c < 3; ++c) px[c] = r.color[c];
  }
  if (y >= l.band_y0 && y < l.band_y1)
    for (int c = 0; c < 3; ++c) px[c] = l.band[c];
}

inline double kl_term(double p, double q) { return p > 0.0 ? p * std::log(p / q) : 0.0; }

}  // namespace covergen::kernels::detail
