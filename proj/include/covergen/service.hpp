#pragma once

// HTTP front end over run_pipeline and the run store.

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "covergen/genai.hpp"

namespace covergen {

struct ServiceConfig {
  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;
  std::filesystem::path run_root = "runs";
  std::filesystem::path lexicon_dir;
  /// Titles file or vocabulary JSON.
  std::filesystem::path vocabulary;
  std::optional<HttpEndpoint> generator;
  std::optional<HttpEndpoint> discriminator;
  bool stub = false;
  int default_num_variants = 9;
  int default_top_k = 6;
  std::string cors_origin = "*";

  /// Relative paths resolve against the config file's directory.
  static ServiceConfig load(const std::filesystem::path& file);
  static ServiceConfig from_json(std::string_view text, const std::filesystem::path& base = {});
  std::string to_json() const;
};

/// Throws InputError when a path is missing or, outside stub mode, an
/// endpoint is unset.
void validate(const ServiceConfig& config);

/// `COVERGEN_CONFIG` when set, else `fallback`.
std::filesystem::path resolve_config_path(const std::filesystem::path& fallback);

class Service {
 public:
  /// Loads the lexicon and vocabulary; throws on any startup failure.
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds (port 0 picks a free one), serves on a background thread and
  /// returns the bound port.
  int start();
  /// Blocks until stop() is called from another thread.
  void listen();
  void stop();

  const ServiceConfig& config() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace covergen
