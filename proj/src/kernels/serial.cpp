#include <vector>

#include "covergen/kernels.hpp"
#include "detail.hpp"

namespace covergen::kernels::serial {

void column_means(ConstMatrixView x, std::span<double> mean) {
  for (std::size_t c = 0; c < x.cols; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < x.rows; ++r) s += x(r, c);
    mean[c] = s / static_cast<double>(x.rows);
  }
}

void column_moments(ConstMatrixView x, std::span<double> mean, MatrixView cov) {
  column_means(x, mean);
  const std::size_t n = x.rows, d = x.cols;
  std::vector<double> centered(n * d);
  for (std::size_t c = 0; c < d; ++c)
    for (std::size_t r = 0; r < n; ++r) centered[c * n + r] = x(r, c) - mean[c];
  const double denom = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < d; ++i) {
    const double* ci = &centered[i * n];
    for (std::size_t j = i; j < d; ++j) {
      const double* cj = &centered[j * n];
      double s = 0.0;
      for (std::size_t r = 0; r < n; ++r) s += ci[r] * cj[r];
      cov(i, j) = cov(j, i) = s / denom;
    }
  }
}

void row_kl_to(ConstMatrixView x, std::span<const double> marginal, std::span<double> kl) {
  for (std::size_t r = 0; r < x.rows; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < x.cols; ++c) s += detail::kl_term(x(r, c), marginal[c]);
    kl[r] = s;
  }
}

void add_noise(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, double sigma, std::uint64_t key) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = detail::noisy_byte(in[i], sigma, key, i);
}

ChannelSums channel_sums(std::span<const std::uint8_t> rgb) {
  ChannelSums s;
  for (std::size_t i = 0; i + 2 < rgb.size(); i += 3) {
    for (int c = 0; c < 3; ++c) {
      const std::uint64_t v = rgb[i + c];
      s.sum[c] += v;
      s.sum_sq[c] += v * v;
    }
    ++s.pixels;
  }
  return s;
}

void render_cover(const CoverLayout& layout, int width, int height, std::span<std::uint8_t> rgb) {
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      detail::cover_pixel(layout, x, y, height, &rgb[(static_cast<std::size_t>(y) * width + x) * 3]);
}

}  // namespace covergen::kernels::serial
