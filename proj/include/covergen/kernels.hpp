#pragma once

// Data-parallel inner loops. Every kernel exists twice: `serial` is the
// reference implementation, `parallel` is the OpenMP version used by the
// library. Each parallel kernel partitions work so that every output element
// is accumulated in the same order as the serial loop, which makes the two
// bit-identical regardless of thread count.

#include <cstdint>
#include <span>
#include <string_view>

namespace covergen::kernels {

/// Row-major view of a rows x cols matrix.
struct ConstMatrixView {
  std::span<const double> data;
  std::size_t rows = 0;
  std::size_t cols = 0;

  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

struct MatrixView {
  std::span<double> data;
  std::size_t rows = 0;
  std::size_t cols = 0;

  double& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// Integer per-channel sums over an RGB buffer.
struct ChannelSums {
  std::uint64_t sum[3] = {0, 0, 0};
  std::uint64_t sum_sq[3] = {0, 0, 0};
  std::uint64_t pixels = 0;
};

/// Procedural cover layout derived from a 64-bit key.
struct CoverLayout {
  std::uint8_t top[3];
  std::uint8_t bottom[3];
  struct Rect {
    int x0, y0, x1, y1;
    std::uint8_t color[3];
  } rects[3];
  int band_y0, band_y1;
  std::uint8_t band[3];
};

CoverLayout make_cover_layout(std::uint64_t key, std::size_t title_length, int width, int height);

namespace serial {

/// mean[c] = column mean; cov = sample covariance with divisor rows - 1.
void column_moments(ConstMatrixView x, std::span<double> mean, MatrixView cov);
/// Column means of a rows x cols matrix.
void column_means(ConstMatrixView x, std::span<double> mean);
/// kl[r] = KL(x_r || marginal) with natural log and 0 log 0 = 0.
void row_kl_to(ConstMatrixView x, std::span<const double> marginal, std::span<double> kl);
/// out = clamp(in + 255 * sigma * N(0,1)), one counter-based normal per byte.
void add_noise(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, double sigma, std::uint64_t key);
ChannelSums channel_sums(std::span<const std::uint8_t> rgb);
void render_cover(const CoverLayout& layout, int width, int height, std::span<std::uint8_t> rgb);

}  // namespace serial

namespace parallel {

void column_moments(ConstMatrixView x, std::span<double> mean, MatrixView cov);
void column_means(ConstMatrixView x, std::span<double> mean);
void row_kl_to(ConstMatrixView x, std::span<const double> marginal, std::span<double> kl);
void add_noise(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, double sigma, std::uint64_t key);
ChannelSums channel_sums(std::span<const std::uint8_t> rgb);
void render_cover(const CoverLayout& layout, int width, int height, std::span<std::uint8_t> rgb);

}  // namespace parallel

}  // namespace covergen::kernels
