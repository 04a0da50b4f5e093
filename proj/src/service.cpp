#include "covergen/service.hpp"

#include <httplib.h>

#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "covergen/errors.hpp"
#include "covergen/lexicon.hpp"
#include "covergen/pipeline.hpp"
#include "covergen/title_augmenter.hpp"

namespace covergen {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration

ServiceConfig ServiceConfig::from_json(std::string_view text, const fs::path& base) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw InputError("service config: not a JSON object");
  auto path = [&](const char* key) -> fs::path {
    fs::path p = j.at(key).get<std::string>();
    return p.is_relative() && !base.empty() ? base / p : p;
  };
  try {
    ServiceConfig c;
    if (j.contains("listen")) {
      const auto listen = j.at("listen").get<std::string>();
      const auto colon = listen.rfind(':');
      if (colon == std::string::npos) throw InputError("service config: listen must be host:port");
      c.listen_host = listen.substr(0, colon);
      c.listen_port = std::stoi(listen.substr(colon + 1));
    }
    if (j.contains("run_root")) c.run_root = path("run_root");
    if (j.contains("lexicon_dir")) c.lexicon_dir = path("lexicon_dir");
    if (j.contains("vocabulary")) c.vocabulary = path("vocabulary");
    if (j.contains("generator") && !j.at("generator").is_null())
      c.generator = HttpEndpoint::parse(j.at("generator").get<std::string>());
    if (j.contains("discriminator") && !j.at("discriminator").is_null())
      c.discriminator = HttpEndpoint::parse(j.at("discriminator").get<std::string>());
    c.stub = j.value("stub", false);
    c.default_num_variants = j.value("default_num_variants", c.default_num_variants);
    c.default_top_k = j.value("default_top_k", c.default_top_k);
    c.cors_origin = j.value("cors_origin", c.cors_origin);
    return c;
  } catch (const json::exception& e) {
    throw InputError(std::string("service config: ") + e.what());
  } catch (const std::logic_error& e) {
    throw InputError(std::string("service config: ") + e.what());
  }
}

ServiceConfig ServiceConfig::load(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw InputError("service config: cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str(), file.parent_path());
}

std::string ServiceConfig::to_json() const {
  json j{{"listen", listen_host + ":" + std::to_string(listen_port)},
         {"run_root", run_root.string()},
         {"lexicon_dir", lexicon_dir.string()},
         {"vocabulary", vocabulary.string()},
         {"generator", generator ? json(generator->url()) : json(nullptr)},
         {"discriminator", discriminator ? json(discriminator->url()) : json(nullptr)},
         {"stub", stub},
         {"default_num_variants", default_num_variants},
         {"default_top_k", default_top_k},
         {"cors_origin", cors_origin}};
  return j.dump(2);
}

void validate(const ServiceConfig& c) {
  if (!fs::is_directory(c.lexicon_dir)) throw InputError("service config: lexicon_dir " + c.lexicon_dir.string() + " not found");
  if (!fs::is_regular_file(c.vocabulary)) throw InputError("service config: vocabulary " + c.vocabulary.string() + " not found");
  if (!c.stub && (!c.generator || !c.discriminator))
    throw InputError("service config: generator and discriminator endpoints are required unless stub is set");
  if (c.default_num_variants < 0 || c.default_top_k < 1) throw InputError("service config: invalid run defaults");
  if (c.listen_port < 0 || c.listen_port > 65535) throw InputError("service config: invalid listen port");
}

fs::path resolve_config_path(const fs::path& fallback) {
  if (const char* env = std::getenv("COVERGEN_CONFIG"); env && *env) return env;
  return fallback;
}

// ---------------------------------------------------------------------------
// Server

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(2), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, json{{"error", message}});
}

std::string run_url(const std::string& id) { return "/api/runs/" + id; }

json manifest_response(const RunManifest& m) {
  json j = json::parse(m.to_json());
  json urls = json::array();
  for (std::size_t i = 0; i < m.covers.size(); ++i)
    urls.push_back(m.status == RunStatus::complete ? json(run_url(m.run_id) + "/images/" + std::to_string(i))
                                                   : json(nullptr));
  j["image_urls"] = urls;
  return j;
}

json candidate_json(const CandidateTitle& c) {
  json provenance = json::array();
  for (Provenance p : c.provenance) provenance.push_back(to_string(p));
  return {{"title", c.text()}, {"tokens", c.tokens}, {"provenance", provenance}};
}

// Optional integer field; throws InputError naming the field when present
// but out of range.
template <typename T>
T optional_int(const json& body, const char* field, T fallback, long long min) {
  const auto it = body.find(field);
  if (it == body.end() || it->is_null()) return fallback;
  if (!it->is_number_integer() || (it->is_number_unsigned() ? false : it->get<long long>() < min))
    throw InputError(std::string(field) + " must be an integer >= " + std::to_string(min));
  return it->get<T>();
}

std::string required_title(const json& body) {
  const auto it = body.find("title");
  if (it == body.end() || !it->is_string()) throw InputError("title must be a string");
  auto title = it->get<std::string>();
  if (tokenize_title(title).empty()) throw InputError("title must not be empty");
  return title;
}

json parse_body(const httplib::Request& req) {
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) throw InputError("request body must be a JSON object");
  return body;
}

}  // namespace

struct Service::Impl {
  ServiceConfig config;
  Lexicon lexicon;
  Vocabulary vocabulary;
  std::unique_ptr<GeneratorBackend> generator;
  std::unique_ptr<ScorerBackend> scorer;
  httplib::Server server;
  std::thread thread;

  explicit Impl(ServiceConfig c)
      : config(std::move(c)),
        lexicon(Lexicon::load(config.lexicon_dir, LoadMode::strict)),
        vocabulary(Vocabulary::load(config.vocabulary)) {
    if (config.stub) {
      generator = std::make_unique<StubBackend>();
      scorer = std::make_unique<StubBackend>();
    } else {
      generator = std::make_unique<HttpBackend>(*config.generator);
      scorer = std::make_unique<HttpBackend>(*config.discriminator);
    }
    fs::create_directories(config.run_root);
    routes();
  }

  void routes() {
    server.set_post_routing_handler([this](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Origin", config.cors_origin);
    });
    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        send_error(res, 500, e.what());
      } catch (...) {
        send_error(res, 500, "unknown error");
      }
    });

    server.Get("/api/health", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200,
                {{"status", "ok"},
                 {"stub", config.stub},
                 {"backend", generator->identity()},
                 {"lexicon_synsets", lexicon.size()},
                 {"vocabulary_words", vocabulary.size()}});
    });

    server.Post("/api/runs", [this](const httplib::Request& req, httplib::Response& res) { create_run(req, res); });

    server.Get("/api/runs", [this](const httplib::Request&, httplib::Response& res) {
      json runs = json::array();
      for (const auto& id : list_runs(config.run_root)) {
        try {
          const auto m = load_run(config.run_root, id);
          runs.push_back({{"run_id", m.run_id},
                          {"created_at", m.created_at},
                          {"input_title", m.params.input_title},
                          {"status", m.status == RunStatus::complete ? "complete" : "failed"},
                          {"url", run_url(m.run_id)}});
        } catch (const Error&) {
          // Unreadable runs are skipped in the listing; GET on the id reports why.
        }
      }
      send_json(res, 200, {{"runs", runs}});
    });

    server.Get(R"(/api/runs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      const auto m = find_run(req.matches[1], res);
      if (m) send_json(res, 200, manifest_response(*m));
    });

    server.Get(R"(/api/runs/([^/]+)/images/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
      const auto m = find_run(req.matches[1], res);
      if (!m) return;
      const std::string n = req.matches[2];
      const std::size_t index = n.size() > 6 ? m->covers.size() : std::stoul(n);
      if (index >= m->covers.size()) return send_error(res, 404, "image index out of range");
      std::ifstream in(config.run_root / m->run_id / m->covers[index].file, std::ios::binary);
      if (!in) return send_error(res, 404, "image not stored for this run");
      std::ostringstream buf;
      buf << in.rdbuf();
      res.status = 200;
      res.set_content(buf.str(), "image/png");
    });

    server.Post("/api/titles/augment", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        const json body = parse_body(req);
        const auto title = required_title(body);
        const auto count = optional_int<int>(body, "count", config.default_num_variants, 1);
        const auto seed = optional_int<std::uint64_t>(body, "seed", 0, 0);
        json candidates = json::array();
        for (const auto& c : generate_new_titles(title, static_cast<std::size_t>(count), lexicon, vocabulary, seed))
          candidates.push_back(candidate_json(c));
        send_json(res, 200, {{"title", title}, {"original", candidate_json(original_candidate(title))},
                             {"candidates", candidates}});
      } catch (const InputError& e) {
        send_error(res, 400, e.what());
      }
    });
  }

  std::optional<RunManifest> find_run(const std::string& id, httplib::Response& res) {
    if (!is_valid_run_id(id)) {
      send_error(res, 404, "no such run");
      return std::nullopt;
    }
    try {
      return load_run(config.run_root, id);
    } catch (const PersistenceError&) {
      send_error(res, 404, "no such run");
    } catch (const IntegrityError& e) {
      send_error(res, 500, e.what());
    }
    return std::nullopt;
  }

  void create_run(const httplib::Request& req, httplib::Response& res) {
    RunParams params;
    try {
      const json body = parse_body(req);
      params.input_title = required_title(body);
      params.num_variants = optional_int<int>(body, "num_variants", config.default_num_variants, 0);
      params.top_k = optional_int<int>(body, "top_k", config.default_top_k, 1);
      params.seed = optional_int<std::uint64_t>(body, "seed", 0, 0);
      validate(params);
    } catch (const InputError& e) {
      return send_error(res, 400, e.what());
    }
    try {
      const auto m = run_pipeline(params, {lexicon, vocabulary, *generator, *scorer, config.run_root});
      res.set_header("Location", run_url(m.run_id));
      send_json(res, 201, manifest_response(m));
    } catch (const RunFailed& e) {
      send_json(res, 502,
                {{"error", e.what()}, {"run_id", e.manifest().run_id}, {"manifest_url", run_url(e.manifest().run_id)}});
    }
  }
};

Service::Service(ServiceConfig config) {
  validate(config);
  impl_ = std::make_unique<Impl>(std::move(config));
}

Service::~Service() { stop(); }

const ServiceConfig& Service::config() const noexcept { return impl_->config; }

int Service::start() {
  auto& c = impl_->config;
  const int port = c.listen_port == 0 ? impl_->server.bind_to_any_port(c.listen_host)
                                      : (impl_->server.bind_to_port(c.listen_host, c.listen_port) ? c.listen_port : -1);
  if (port <= 0) throw TransportError("service: cannot bind " + c.listen_host + ":" + std::to_string(c.listen_port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void Service::listen() {
  const auto& c = impl_->config;
  if (!impl_->server.listen(c.listen_host, c.listen_port))
    throw TransportError("service: cannot listen on " + c.listen_host + ":" + std::to_string(c.listen_port));
}

void Service::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace covergen
