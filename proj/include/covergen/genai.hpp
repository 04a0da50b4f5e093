#pragma once

// Generator / discriminator clients. Backends speak the JSON wire protocol
// below; the stub backend renders and scores covers in process so the
// pipeline runs without any model.
//
//   POST /generate  {"titles":[s], "seed":u64, "width":i, "height":i}
//                -> {"images":[{"title_index":i, "png_base64":s}]}
//   POST /score     {"images":[{"png_base64":s}], "titles":[s]?}
//                -> {"unconditional":[x], "conditional":[x]?}
//   GET  /health -> {"status":"ok", "model":s}
//   errors: HTTP 400 {"error":s}

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "covergen/image.hpp"

namespace covergen {

struct ScoreReport {
  std::vector<double> unconditional;
  std::optional<std::vector<double>> conditional;

  friend bool operator==(const ScoreReport&, const ScoreReport&) = default;
};

namespace protocol {

struct GenerateRequest {
  std::vector<std::string> titles;
  std::uint64_t seed = 0;
  int width = kDefaultCoverSize;
  int height = kDefaultCoverSize;

  friend bool operator==(const GenerateRequest&, const GenerateRequest&) = default;
};

struct GeneratedImage {
  int title_index = 0;
  std::string png_base64;

  friend bool operator==(const GeneratedImage&, const GeneratedImage&) = default;
};

struct GenerateResponse {
  std::vector<GeneratedImage> images;

  friend bool operator==(const GenerateResponse&, const GenerateResponse&) = default;
};

struct ScoreRequest {
  std::vector<std::string> images_png_base64;
  std::optional<std::vector<std::string>> titles;

  friend bool operator==(const ScoreRequest&, const ScoreRequest&) = default;
};

struct Health {
  std::string status = "ok";
  std::string model;

  friend bool operator==(const Health&, const Health&) = default;
};

// Encoders emit compact JSON; decoders throw ProtocolError naming the first
// offending field.
std::string encode(const GenerateRequest& r);
std::string encode(const GenerateResponse& r);
std::string encode(const ScoreRequest& r);
std::string encode(const ScoreReport& r);
std::string encode(const Health& r);
std::string encode_error(std::string_view message);

GenerateRequest decode_generate_request(std::string_view body);
GenerateResponse decode_generate_response(std::string_view body);
ScoreRequest decode_score_request(std::string_view body);
ScoreReport decode_score_response(std::string_view body);
Health decode_health(std::string_view body);

/// Orders images by title_index and checks that indices 0..expected-1 each
/// appear once.
std::vector<CoverImage> images_in_order(const GenerateResponse& r, std::size_t expected);

}  // namespace protocol

std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Throws DecodeError on malformed input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

class GeneratorBackend {
 public:
  virtual ~GeneratorBackend() = default;
  /// One image per title, order-aligned.
  virtual std::vector<CoverImage> generate(std::span<const std::string> titles, std::uint64_t seed, int width,
                                           int height) = 0;
  virtual std::string identity() const = 0;
};

class ScorerBackend {
 public:
  virtual ~ScorerBackend() = default;
  virtual ScoreReport score(std::span<const CoverImage> images,
                            std::optional<std::span<const std::string>> titles) = 0;
  virtual std::string identity() const = 0;
};

/// Validates inputs, calls the backend and checks that it answered with one
/// image per title.
std::vector<CoverImage> generate_covers(GeneratorBackend& backend, std::span<const std::string> titles,
                                        std::uint64_t seed, int width = kDefaultCoverSize,
                                        int height = kDefaultCoverSize);

ScoreReport score_covers(ScorerBackend& backend, std::span<const CoverImage> images,
                         std::optional<std::span<const std::string>> titles = std::nullopt);

/// Procedural cover seeded by hash64(title) ^ seed: vertical gradient, three
/// rectangles and a title band whose height follows the title length.
CoverImage stub_generate(std::string_view title, std::uint64_t seed, int width = kDefaultCoverSize,
                         int height = kDefaultCoverSize);

/// Mean per-channel variance over the maximum possible variance (127.5^2).
/// 0 for a flat image, strictly increasing in per-channel variance.
double stub_score(const CoverImage& image);
/// Decodes first; throws DecodeError on bad PNG bytes.
double stub_score_png(std::span<const std::uint8_t> png);

/// In-process generator and scorer. Conditional score (when titles are given)
/// is the unconditional score scaled by a title-dependent factor.
class StubBackend final : public GeneratorBackend, public ScorerBackend {
 public:
  std::vector<CoverImage> generate(std::span<const std::string> titles, std::uint64_t seed, int width,
                                   int height) override;
  ScoreReport score(std::span<const CoverImage> images, std::optional<std::span<const std::string>> titles) override;
  std::string identity() const override { return "stub"; }
};

struct HttpEndpoint {
  std::string host = "127.0.0.1";
  int port = 8700;
  /// Titles / images per request.
  std::size_t batch_cap = 16;
  double timeout_seconds = 60.0;

  /// "http://host:port" or "host:port".
  static HttpEndpoint parse(std::string_view url);
  std::string url() const;
};

/// Client for a remote backend. Batches requests at `batch_cap` and retries
/// once on transport failure. Stateless, safe to share between threads.
class HttpBackend final : public GeneratorBackend, public ScorerBackend {
 public:
  explicit HttpBackend(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

  std::vector<CoverImage> generate(std::span<const std::string> titles, std::uint64_t seed, int width,
                                   int height) override;
  ScoreReport score(std::span<const CoverImage> images, std::optional<std::span<const std::string>> titles) override;
  std::string identity() const override { return "http:" + endpoint_.url(); }

  protocol::Health health() const;

 private:
  std::string post(const std::string& path, const std::string& body) const;

  HttpEndpoint endpoint_;
};

/// Serves the wire protocol backed by the stub functions. Used for end-to-end
/// tests of HttpBackend and as a stand-in model server.
class StubBackendServer {
 public:
  StubBackendServer();
  ~StubBackendServer();
  StubBackendServer(const StubBackendServer&) = delete;
  StubBackendServer& operator=(const StubBackendServer&) = delete;

  /// Binds (port 0 picks a free port) and serves on a background thread.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Blocks in the calling thread.
  void listen(const std::string& host, int port);
  void stop();

  std::size_t generate_calls() const;
  std::size_t score_calls() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace covergen
