#include "covergen/train_support.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "covergen/errors.hpp"
#include "covergen/kernels.hpp"
#include "covergen/rng.hpp"

namespace covergen {

double lr_at(const LrSchedule& schedule, int epoch) {
  if (epoch < 0) throw ContractError("lr_at: epoch must be >= 0");
  if (!schedule.decay_interval_epochs) return schedule.initial_lr;
  const int steps = epoch / *schedule.decay_interval_epochs;
  return schedule.initial_lr * std::pow(schedule.decay_factor, steps);
}

bool should_train_discriminator(const SkipSchedule& schedule, int epoch) {
  if (epoch < 0) throw ContractError("should_train_discriminator: epoch must be >= 0");
  if (schedule.period <= 1) return true;
  return epoch % schedule.period == schedule.train_on_phase;
}

std::string_view to_string(DiscriminatorVariant v) {
  return v == DiscriminatorVariant::one_way ? "one-way" : "standard";
}

void validate(const TrainPreset& p) {
  const auto& lr = p.generator_lr;
  if (!(lr.initial_lr > 0.0) || !std::isfinite(lr.initial_lr)) throw ContractError("initial lr must be > 0");
  if (!(lr.decay_factor > 0.0 && lr.decay_factor <= 1.0)) throw ContractError("decay factor must be in (0, 1]");
  if (lr.decay_interval_epochs && *lr.decay_interval_epochs < 1) throw ContractError("decay interval must be >= 1");
  if (p.skip.period < 1) throw ContractError("skip period must be >= 1");
  if (p.skip.train_on_phase < 0 || p.skip.train_on_phase >= p.skip.period)
    throw ContractError("skip phase must be in [0, period)");
  if (!(p.noise_sigma >= 0.0) || !std::isfinite(p.noise_sigma)) throw ContractError("noise sigma must be >= 0");
}

const std::vector<TrainPreset>& table1_presets() {
  using DV = DiscriminatorVariant;
  static const std::vector<TrainPreset> presets = {
      {"table1-row-1", {0.002, 1.0, std::nullopt}, DV::standard, {1, 0}, 0.0},
      {"table1-row-2", {0.0002, 1.0, std::nullopt}, DV::standard, {1, 0}, 0.0},
      {"table1-row-3", {0.0002, 0.5, 100}, DV::standard, {2, 0}, 0.0},
      {"table1-row-4", {0.0002, 0.5, 50}, DV::one_way, {1, 0}, 0.0},
      {"table1-row-5", {0.0002, 1.0, std::nullopt}, DV::standard, {1, 0}, kDefaultNoiseSigma},
      {"table1-row-6", {0.002, 1.0, std::nullopt}, DV::standard, {1, 0}, kDefaultNoiseSigma},
  };
  return presets;
}

const TrainPreset& find_preset(std::string_view name) {
  for (const auto& p : table1_presets())
    if (p.name == name) return p;
  throw InputError("unknown preset '" + std::string(name) + "'");
}

std::string export_train_config(const TrainPreset& p) {
  validate(p);
  nlohmann::json j;
  j["name"] = p.name;
  j["g_lr"] = {{"initial", p.generator_lr.initial_lr},
               {"factor", p.generator_lr.decay_factor},
               {"interval", p.generator_lr.decay_interval_epochs ? nlohmann::json(*p.generator_lr.decay_interval_epochs)
                                                                 : nlohmann::json(nullptr)}};
  j["d_variant"] = to_string(p.discriminator);
  j["skip"] = {{"period", p.skip.period}, {"phase", p.skip.train_on_phase}};
  j["noise_sigma"] = p.noise_sigma;
  return j.dump(2);
}

TrainPreset parse_train_config(std::string_view text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw InputError("train config: not a JSON object");
  try {
    TrainPreset p;
    p.name = j.at("name").get<std::string>();
    const auto& lr = j.at("g_lr");
    p.generator_lr.initial_lr = lr.at("initial").get<double>();
    p.generator_lr.decay_factor = lr.at("factor").get<double>();
    if (!lr.at("interval").is_null()) p.generator_lr.decay_interval_epochs = lr.at("interval").get<int>();
    const auto variant = j.at("d_variant").get<std::string>();
    if (variant == "standard")
      p.discriminator = DiscriminatorVariant::standard;
    else if (variant == "one-way")
      p.discriminator = DiscriminatorVariant::one_way;
    else
      throw InputError("train config: unknown d_variant '" + variant + "'");
    p.skip.period = j.at("skip").at("period").get<int>();
    p.skip.train_on_phase = j.at("skip").at("phase").get<int>();
    p.noise_sigma = j.at("noise_sigma").get<double>();
    validate(p);
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("train config: ") + e.what());
  } catch (const ContractError& e) {
    throw InputError(std::string("train config: ") + e.what());
  }
}

CoverImage add_gaussian_noise(const CoverImage& image, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ContractError("noise sigma must be >= 0");
  if (sigma == 0.0) return image;
  CoverImage out = image;
  kernels::parallel::add_noise(image.rgb, out.rgb, sigma, splitmix64(seed));
  return out;
}

}  // namespace covergen
