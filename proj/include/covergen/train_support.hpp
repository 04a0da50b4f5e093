#pragma once

// Training-loop modifications shared with the trainer through JSON presets:
// step learning-rate decay, periodic discriminator skipping and Gaussian
// noise on discriminator inputs.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "covergen/image.hpp"

namespace covergen {

struct LrSchedule {
  double initial_lr = 0.0002;
  double decay_factor = 1.0;
  /// No interval means a constant schedule.
  std::optional<int> decay_interval_epochs;

  friend bool operator==(const LrSchedule&, const LrSchedule&) = default;
};

/// initial_lr * decay_factor^floor(epoch / interval).
double lr_at(const LrSchedule& schedule, int epoch);

struct SkipSchedule {
  int period = 1;
  int train_on_phase = 0;

  friend bool operator==(const SkipSchedule&, const SkipSchedule&) = default;
};

bool should_train_discriminator(const SkipSchedule& schedule, int epoch);

enum class DiscriminatorVariant { standard, one_way };

std::string_view to_string(DiscriminatorVariant v);

/// Noise level used by presets that enable noise; no value is published for it.
inline constexpr double kDefaultNoiseSigma = 0.05;

struct TrainPreset {
  std::string name;
  LrSchedule generator_lr;
  DiscriminatorVariant discriminator = DiscriminatorVariant::standard;
  SkipSchedule skip;
  double noise_sigma = 0.0;

  friend bool operator==(const TrainPreset&, const TrainPreset&) = default;
};

/// Throws ContractError on out-of-range fields.
void validate(const TrainPreset& preset);

/// The six published training configurations, `table1-row-1` .. `table1-row-6`.
const std::vector<TrainPreset>& table1_presets();
/// Throws InputError for an unknown name.
const TrainPreset& find_preset(std::string_view name);

/// `{name, g_lr:{initial,factor,interval}, d_variant, skip:{period,phase}, noise_sigma}`
/// with `interval` null for constant schedules.
std::string export_train_config(const TrainPreset& preset);
/// Inverse of export_train_config; throws InputError on schema violations.
TrainPreset parse_train_config(std::string_view json);

/// Adds independent N(0, sigma^2) noise per channel on the [0, 1] pixel scale,
/// clamps and re-quantizes. sigma 0 returns the input unchanged.
CoverImage add_gaussian_noise(const CoverImage& image, double sigma, std::uint64_t seed);

}  // namespace covergen
