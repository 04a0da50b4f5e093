#include <vector>

#include "covergen/kernels.hpp"
#include "detail.hpp"

namespace covergen::kernels::parallel {

namespace {
using index_t = std::int64_t;
}

void column_means(ConstMatrixView x, std::span<double> mean) {
  const index_t d = static_cast<index_t>(x.cols);
#pragma omp parallel for schedule(static)
  for (index_t c = 0; c < d; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < x.rows; ++r) s += x(r, static_cast<std::size_t>(c));
    mean[static_cast<std::size_t>(c)] = s / static_cast<double>(x.rows);
  }
}

void column_moments(ConstMatrixView x, std::span<double> mean, MatrixView cov) {
  column_means(x, mean);
  const std::size_t n = x.rows;
  const index_t d = static_cast<index_t>(x.cols);
  std::vector<double> centered(n * x.cols);
#pragma omp parallel for schedule(static)
  for (index_t c = 0; c < d; ++c)
    for (std::size_t r = 0; r < n; ++r)
      centered[static_cast<std::size_t>(c) * n + r] = x(r, static_cast<std::size_t>(c)) - mean[static_cast<std::size_t>(c)];

  const double denom = static_cast<double>(n - 1);
  // Row i of the upper triangle has d - i entries.
#pragma omp parallel for schedule(dynamic, 1)
  for (index_t i = 0; i < d; ++i) {
    const double* ci = &centered[static_cast<std::size_t>(i) * n];
    for (index_t j = i; j < d; ++j) {
      const double* cj = &centered[static_cast<std::size_t>(j) * n];
      double s = 0.0;
      for (std::size_t r = 0; r < n; ++r) s += ci[r] * cj[r];
      cov(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = s / denom;
      cov(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = s / denom;
    }
  }
}

void row_kl_to(ConstMatrixView x, std::span<const double> marginal, std::span<double> kl) {
  const index_t rows = static_cast<index_t>(x.rows);
#pragma omp parallel for schedule(static)
  for (index_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < x.cols; ++c) s += detail::kl_term(x(static_cast<std::size_t>(r), c), marginal[c]);
    kl[static_cast<std::size_t>(r)] = s;
  }
}

void add_noise(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, double sigma, std::uint64_t key) {
  const index_t n = static_cast<index_t>(in.size());
#pragma omp parallel for schedule(static)
  for (index_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] =
        detail::noisy_byte(in[static_cast<std::size_t>(i)], sigma, key, static_cast<std::uint64_t>(i));
}

ChannelSums channel_sums(std::span<const std::uint8_t> rgb) {
  const index_t pixels = static_cast<index_t>(rgb.size() / 3);
  std::uint64_t s0 = 0, s1 = 0, s2 = 0, q0 = 0, q1 = 0, q2 = 0;
  // Integer sums are exact, so the reduction order does not matter.
#pragma omp parallel for schedule(static) reduction(+ : s0, s1, s2, q0, q1, q2)
  for (index_t p = 0; p < pixels; ++p) {
    const std::uint64_t r = rgb[3 * p], g = rgb[3 * p + 1], b = rgb[3 * p + 2];
    s0 += r;
    s1 += g;
    s2 += b;
    q0 += r * r;
    q1 += g * g;
    q2 += b * b;
  }
  ChannelSums s;
  s.sum[0] = s0;
  s.sum[1] = s1;
  s.sum[2] = s2;
  s.sum_sq[0] = q0;
  s.sum_sq[1] = q1;
  s.sum_sq[2] = q2;
  s.pixels = static_cast<std::uint64_t>(pixels);
  return s;
}

void render_cover(const CoverLayout& layout, int width, int height, std::span<std::uint8_t> rgb) {
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      detail::cover_pixel(layout, x, y, height, &rgb[(static_cast<std::size_t>(y) * width + x) * 3]);
}

}  // namespace covergen::kernels::parallel
