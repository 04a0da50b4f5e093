#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <nlohmann/json.hpp>
#include <charconv>
#include <thread>

#include "covergen/errors.hpp"
#include "covergen/genai.hpp"
#include "covergen/kernels.hpp"
#include "covergen/rng.hpp"

namespace covergen {

// ---------------------------------------------------------------------------
// Checked entry points

std::vector<CoverImage> generate_covers(GeneratorBackend& backend, std::span<const std::string> titles,
                                        std::uint64_t seed, int width, int height) {
  if (titles.empty()) throw InputError("generate_covers: no titles");
  auto images = backend.generate(titles, seed, width, height);
  if (images.size() != titles.size())
    throw ProtocolError("images", "expected " + std::to_string(titles.size()) + " images, got " +
                                      std::to_string(images.size()));
  for (std::size_t i = 0; i < images.size(); ++i)
    if (!images[i].valid()) throw ProtocolError("images[" + std::to_string(i) + "]", "invalid image");
  return images;
}

ScoreReport score_covers(ScorerBackend& backend, std::span<const CoverImage> images,
                         std::optional<std::span<const std::string>> titles) {
  if (images.empty()) throw InputError("score_covers: no images");
  if (titles && titles->size() != images.size()) throw InputError("score_covers: titles must align with images");
  ScoreReport r = backend.score(images, titles);
  if (r.unconditional.size() != images.size())
    throw ProtocolError("unconditional", "expected " + std::to_string(images.size()) + " scores, got " +
                                             std::to_string(r.unconditional.size()));
  for (std::size_t i = 0; i < r.unconditional.size(); ++i)
    if (!std::isfinite(r.unconditional[i]))
      throw ProtocolError("unconditional[" + std::to_string(i) + "]", "not finite");
  if (!titles) r.conditional.reset();
  if (r.conditional && r.conditional->size() != images.size())
    throw ProtocolError("conditional", "length differs from images");
  return r;
}

// ---------------------------------------------------------------------------
// Stub model

CoverImage stub_generate(std::string_view title, std::uint64_t seed, int width, int height) {
  CoverImage img(width, height);
  const auto layout = kernels::make_cover_layout(hash64(title) ^ seed, title.size(), width, height);
  kernels::parallel::render_cover(layout, width, height, img.rgb);
  return img;
}

double stub_score(const CoverImage& image) {
  if (!image.valid()) throw DecodeError("stub_score: invalid image");
  const auto sums = kernels::parallel::channel_sums(image.rgb);
  const double n = static_cast<double>(sums.pixels);
  double total = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double mean = static_cast<double>(sums.sum[c]) / n;
    total += std::max(0.0, static_cast<double>(sums.sum_sq[c]) / n - mean * mean);
  }
  return std::clamp(total / 3.0 / (127.5 * 127.5), 0.0, 1.0);
}

double stub_score_png(std::span<const std::uint8_t> png) { return stub_score(decode_png(png)); }

std::vector<CoverImage> StubBackend::generate(std::span<const std::string> titles, std::uint64_t seed, int width,
                                              int height) {
  std::vector<CoverImage> out;
  out.reserve(titles.size());
  for (const auto& t : titles) out.push_back(stub_generate(t, seed, width, height));
  return out;
}

namespace {

double title_affinity(std::string_view title) { return 0.5 + 0.5 * to_unit(splitmix64(hash64(title))); }

}  // namespace

ScoreReport StubBackend::score(std::span<const CoverImage> images, std::optional<std::span<const std::string>> titles) {
  ScoreReport r;
  for (const auto& img : images) r.unconditional.push_back(stub_score(img));
  if (titles) {
    r.conditional.emplace();
    for (std::size_t i = 0; i < images.size(); ++i)
      r.conditional->push_back(r.unconditional[i] * title_affinity((*titles)[i]));
  }
  return r;
}

// ---------------------------------------------------------------------------
// HTTP client

HttpEndpoint HttpEndpoint::parse(std::string_view url) {
  if (url.starts_with("http://")) url.remove_prefix(7);
  while (!url.empty() && url.back() == '/') url.remove_suffix(1);
  HttpEndpoint e;
  const auto colon = url.rfind(':');
  if (colon == std::string_view::npos) throw InputError("endpoint '" + std::string(url) + "' needs host:port");
  e.host = std::string(url.substr(0, colon));
  if (e.host.empty()) e.host = "127.0.0.1";
  const auto port = url.substr(colon + 1);
  const auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), e.port);
  if (ec != std::errc{} || ptr != port.data() + port.size() || e.port <= 0 || e.port > 65535)
    throw InputError("endpoint '" + std::string(url) + "' has an invalid port");
  return e;
}

std::string HttpEndpoint::url() const { return "http://" + host + ":" + std::to_string(port); }

std::string HttpBackend::post(const std::string& path, const std::string& body) const {
  std::string last_error;
  for (int attempt = 0; attempt < 2; ++attempt) {
    httplib::Client cli(endpoint_.host, endpoint_.port);
    const auto secs = static_cast<time_t>(endpoint_.timeout_seconds);
    cli.set_connection_timeout(secs, 0);
    cli.set_read_timeout(secs, 0);
    cli.set_write_timeout(secs, 0);
    auto res = cli.Post(path, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) return res->body;
    if (res->status == 400) {
      std::string message = res->body;
      const auto j = nlohmann::json::parse(res->body, nullptr, false);
      if (!j.is_discarded() && j.is_object() && j.contains("error") && j["error"].is_string())
        message = j["error"].get<std::string>();
      throw ProtocolError("error", "backend rejected request: " + message);
    }
    last_error = "HTTP " + std::to_string(res->status);
  }
  throw TransportError(endpoint_.url() + path + ": " + last_error);
}

std::vector<CoverImage> HttpBackend::generate(std::span<const std::string> titles, std::uint64_t seed, int width,
                                              int height) {
  std::vector<CoverImage> out;
  const std::size_t cap = std::max<std::size_t>(1, endpoint_.batch_cap);
  for (std::size_t begin = 0; begin < titles.size(); begin += cap) {
    const auto batch = titles.subspan(begin, std::min(cap, titles.size() - begin));
    protocol::GenerateRequest req{{batch.begin(), batch.end()}, seed, width, height};
    const auto resp = protocol::decode_generate_response(post("/generate", protocol::encode(req)));
    auto images = protocol::images_in_order(resp, batch.size());
    for (auto& img : images) {
      if (img.width != width || img.height != height)
        throw ProtocolError("images", "image size differs from requested " + std::to_string(width) + "x" +
                                          std::to_string(height));
      out.push_back(std::move(img));
    }
  }
  return out;
}

ScoreReport HttpBackend::score(std::span<const CoverImage> images,
                               std::optional<std::span<const std::string>> titles) {
  ScoreReport out;
  if (titles) out.conditional.emplace();
  const std::size_t cap = std::max<std::size_t>(1, endpoint_.batch_cap);
  for (std::size_t begin = 0; begin < images.size(); begin += cap) {
    const std::size_t n = std::min(cap, images.size() - begin);
    protocol::ScoreRequest req;
    for (std::size_t i = begin; i < begin + n; ++i) req.images_png_base64.push_back(base64_encode(encode_png(images[i])));
    if (titles) req.titles = std::vector<std::string>(titles->begin() + begin, titles->begin() + begin + n);
    const auto resp = protocol::decode_score_response(post("/score", protocol::encode(req)));
    if (resp.unconditional.size() != n)
      throw ProtocolError("unconditional", "expected " + std::to_string(n) + " scores, got " +
                                               std::to_string(resp.unconditional.size()));
    out.unconditional.insert(out.unconditional.end(), resp.unconditional.begin(), resp.unconditional.end());
    if (titles) {
      if (!resp.conditional) throw ProtocolError("conditional", "missing although titles were sent");
      out.conditional->insert(out.conditional->end(), resp.conditional->begin(), resp.conditional->end());
    }
  }
  return out;
}

protocol::Health HttpBackend::health() const {
  httplib::Client cli(endpoint_.host, endpoint_.port);
  cli.set_connection_timeout(static_cast<time_t>(endpoint_.timeout_seconds), 0);
  auto res = cli.Get("/health");
  if (!res) throw TransportError(endpoint_.url() + "/health: " + httplib::to_string(res.error()));
  if (res->status != 200) throw TransportError(endpoint_.url() + "/health: HTTP " + std::to_string(res->status));
  return protocol::decode_health(res->body);
}

// ---------------------------------------------------------------------------
// Stub model server

struct StubBackendServer::Impl {
  httplib::Server server;
  std::thread thread;
  std::atomic<std::size_t> generate_calls{0};
  std::atomic<std::size_t> score_calls{0};

  Impl() {
    auto bad_request = [](httplib::Response& res, const std::string& msg) {
      res.status = 400;
      res.set_content(protocol::encode_error(msg), "application/json");
    };
    server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(protocol::encode(protocol::Health{"ok", "stub-procedural"}), "application/json");
    });
    server.Post("/generate", [this, bad_request](const httplib::Request& req, httplib::Response& res) {
      ++generate_calls;
      try {
        const auto r = protocol::decode_generate_request(req.body);
        protocol::GenerateResponse out;
        for (std::size_t i = 0; i < r.titles.size(); ++i)
          out.images.push_back({static_cast<int>(i),
                                base64_encode(encode_png(stub_generate(r.titles[i], r.seed, r.width, r.height)))});
        res.set_content(protocol::encode(out), "application/json");
      } catch (const Error& e) {
        bad_request(res, e.what());
      }
    });
    server.Post("/score", [this, bad_request](const httplib::Request& req, httplib::Response& res) {
      ++score_calls;
      try {
        const auto r = protocol::decode_score_request(req.body);
        std::vector<CoverImage> images;
        for (std::size_t i = 0; i < r.images_png_base64.size(); ++i) {
          try {
            images.push_back(decode_png(base64_decode(r.images_png_base64[i])));
          } catch (const DecodeError& e) {
            throw ProtocolError("images[" + std::to_string(i) + "].png_base64", e.what());
          }
        }
        StubBackend stub;
        std::optional<std::span<const std::string>> titles;
        if (r.titles) titles = std::span<const std::string>(*r.titles);
        res.set_content(protocol::encode(stub.score(images, titles)), "application/json");
      } catch (const Error& e) {
        bad_request(res, e.what());
      }
    });
  }
};

StubBackendServer::StubBackendServer() : impl_(std::make_unique<Impl>()) {}

StubBackendServer::~StubBackendServer() { stop(); }

int StubBackendServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) throw TransportError("stub backend: cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void StubBackendServer::listen(const std::string& host, int port) {
  if (!impl_->server.listen(host, port))
    throw TransportError("stub backend: cannot listen on " + host + ":" + std::to_string(port));
}

void StubBackendServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::size_t StubBackendServer::generate_calls() const { return impl_->generate_calls; }
std::size_t StubBackendServer::score_calls() const { return impl_->score_calls; }

}  // namespace covergen
