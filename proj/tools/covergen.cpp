// covergen: command line front end.

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "covergen/errors.hpp"
#include "covergen/lexicon.hpp"
#include "covergen/metrics.hpp"
#include "covergen/pipeline.hpp"
#include "covergen/service.hpp"
#include "covergen/train_support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace covergen;

namespace {

// Exit codes: 1 unexpected, 2 bad input, 3 run failed, 4 backend or I/O.
constexpr int kInputExit = 2;
constexpr int kRunFailedExit = 3;
constexpr int kBackendExit = 4;

struct DataPaths {
  fs::path config;
  fs::path lexicon = fs::path(COVERGEN_DEFAULT_DATA_DIR) / "wordnet-fixture";
  fs::path vocabulary = fs::path(COVERGEN_DEFAULT_DATA_DIR) / "fixture-titles.txt";
  fs::path runs = "runs";
  std::string generator;
  std::string discriminator;
};

void add_data_options(CLI::App* cmd, DataPaths& p) {
  cmd->add_option("--config", p.config, "Service config JSON (COVERGEN_CONFIG wins when set)");
  cmd->add_option("--lexicon", p.lexicon, "WNDB directory");
  cmd->add_option("--vocab", p.vocabulary, "Titles file or vocabulary JSON");
  cmd->add_option("--runs", p.runs, "Run store root");
  cmd->add_option("--generator", p.generator, "Generator endpoint, http://host:port");
  cmd->add_option("--discriminator", p.discriminator, "Discriminator endpoint, http://host:port");
}

// A config file, when given, replaces the individual path flags.
ServiceConfig resolve_config(const DataPaths& p, bool stub) {
  const fs::path file = resolve_config_path(p.config);
  ServiceConfig c;
  if (!file.empty()) {
    c = ServiceConfig::load(file);
  } else {
    c.lexicon_dir = p.lexicon;
    c.vocabulary = p.vocabulary;
    c.run_root = p.runs;
    if (!p.generator.empty()) c.generator = HttpEndpoint::parse(p.generator);
    if (!p.discriminator.empty()) c.discriminator = HttpEndpoint::parse(p.discriminator);
  }
  c.stub = c.stub || stub;
  validate(c);
  return c;
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

Service* g_service = nullptr;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Book cover generation from titles"};
  app.require_subcommand(1);

  DataPaths paths;

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  fs::path serve_config = "covergen.json";
  serve->add_option("--config", serve_config, "Service config JSON (COVERGEN_CONFIG wins when set)");

  auto* run = app.add_subcommand("run", "Generate, score and persist covers for one title");
  RunParams params;
  bool stub = false;
  run->add_option("--title", params.input_title)->required();
  run->add_option("--variants", params.num_variants)->check(CLI::NonNegativeNumber);
  run->add_option("--top-k", params.top_k)->check(CLI::PositiveNumber);
  run->add_option("--seed", params.seed);
  run->add_flag("--stub", stub, "Use the procedural stub generator and scorer");
  add_data_options(run, paths);

  auto* augment = app.add_subcommand("augment", "Print candidate titles");
  std::string aug_title;
  int aug_count = 9;
  std::uint64_t aug_seed = 0;
  augment->add_option("--title", aug_title)->required();
  augment->add_option("--count", aug_count)->check(CLI::PositiveNumber);
  augment->add_option("--seed", aug_seed);
  augment->add_option("--lexicon", paths.lexicon);
  augment->add_option("--vocab", paths.vocabulary);

  auto* vocab = app.add_subcommand("vocab", "Vocabulary tools");
  vocab->require_subcommand(1);
  auto* vocab_build = vocab->add_subcommand("build", "Count words of a titles file");
  fs::path vocab_in, vocab_out;
  vocab_build->add_option("--in", vocab_in)->required()->check(CLI::ExistingFile);
  vocab_build->add_option("--out", vocab_out)->required();

  auto* metrics = app.add_subcommand("metrics", "Image quality metrics");
  metrics->require_subcommand(1);
  auto* fid_cmd = metrics->add_subcommand("fid", "Frechet distance between two feature sets");
  fs::path real_file, fake_file;
  fid_cmd->add_option("--real", real_file)->required()->check(CLI::ExistingFile);
  fid_cmd->add_option("--fake", fake_file)->required()->check(CLI::ExistingFile);
  auto* is_cmd = metrics->add_subcommand("is", "Inception score of class probabilities");
  fs::path probs_file;
  int splits = 1;
  is_cmd->add_option("--probs", probs_file)->required()->check(CLI::ExistingFile);
  is_cmd->add_option("--splits", splits)->check(CLI::PositiveNumber);

  auto* presets = app.add_subcommand("presets", "Training presets");
  presets->require_subcommand(1);
  auto* presets_export = presets->add_subcommand("export", "Write preset configs as JSON");
  fs::path presets_out;
  std::string preset_name;
  presets_export->add_option("--name", preset_name, "Single preset; default all");
  presets_export->add_option("--out", presets_out, "Directory for <name>.json files; default stdout");

  auto* stub_backend = app.add_subcommand("stub-backend", "Serve the stub model over the wire protocol");
  std::string stub_listen = "127.0.0.1:8700";
  stub_backend->add_option("--listen", stub_listen);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) {
      auto config = ServiceConfig::load(resolve_config_path(serve_config));
      Service service(std::move(config));
      g_service = &service;
      std::signal(SIGINT, [](int) {
        if (g_service) g_service->stop();
      });
      std::cerr << "listening on " << service.config().listen_host << ':' << service.config().listen_port << '\n';
      service.listen();
      return 0;
    }

    if (*run) {
      const auto config = resolve_config(paths, stub);
      const auto lexicon = Lexicon::load(config.lexicon_dir, LoadMode::strict);
      const auto vocabulary = Vocabulary::load(config.vocabulary);
      std::unique_ptr<GeneratorBackend> gen;
      std::unique_ptr<ScorerBackend> scorer;
      if (config.stub) {
        gen = std::make_unique<StubBackend>();
        scorer = std::make_unique<StubBackend>();
      } else {
        gen = std::make_unique<HttpBackend>(*config.generator);
        scorer = std::make_unique<HttpBackend>(*config.discriminator);
      }
      try {
        const auto m = run_pipeline(params, {lexicon, vocabulary, *gen, *scorer, config.run_root});
        std::cout << m.to_json() << '\n';
        std::cerr << "run stored in " << (config.run_root / m.run_id).string() << '\n';
        return 0;
      } catch (const RunFailed& e) {
        std::cout << e.manifest().to_json() << '\n';
        std::cerr << e.what() << '\n';
        return kRunFailedExit;
      }
    }

    if (*augment) {
      const auto lexicon = Lexicon::load(paths.lexicon, LoadMode::strict);
      const auto vocabulary = Vocabulary::load(paths.vocabulary);
      json out = json::array();
      for (const auto& c : generate_new_titles(aug_title, static_cast<std::size_t>(aug_count), lexicon, vocabulary, aug_seed)) {
        json prov = json::array();
        for (auto p : c.provenance) prov.push_back(to_string(p));
        out.push_back({{"title", c.text()}, {"provenance", prov}});
      }
      print(out);
      return 0;
    }

    if (*vocab_build) {
      const auto v = Vocabulary::from_titles_file(vocab_in);
      std::ofstream out(vocab_out);
      out << v.to_json() << '\n';
      if (!out) throw PersistenceError("cannot write " + vocab_out.string());
      std::cerr << v.size() << " words\n";
      return 0;
    }

    if (*fid_cmd) {
      const auto real = read_matrix(real_file);
      const auto fake = read_matrix(fake_file);
      print({{"metric", "fid"},
             {"value", fid(gaussian_stats(real), gaussian_stats(fake))},
             {"n_real", real.rows()},
             {"n_fake", fake.rows()}});
      return 0;
    }

    if (*is_cmd) {
      const auto probs = read_matrix(probs_file);
      const auto s = inception_score(probs, splits);
      print({{"metric", "is"}, {"value", s.mean}, {"std", s.std}, {"n", probs.rows()}, {"splits", splits}});
      return 0;
    }

    if (*presets_export) {
      std::vector<TrainPreset> chosen;
      if (preset_name.empty())
        chosen = table1_presets();
      else
        chosen.push_back(find_preset(preset_name));
      json all = json::array();
      for (const auto& p : chosen) {
        const auto text = export_train_config(p);
        if (presets_out.empty()) {
          all.push_back(json::parse(text));
          continue;
        }
        fs::create_directories(presets_out);
        std::ofstream out(presets_out / (p.name + ".json"));
        out << text << '\n';
        if (!out) throw PersistenceError("cannot write preset " + p.name);
      }
      if (presets_out.empty()) print(all);
      return 0;
    }

    if (*stub_backend) {
      const auto e = HttpEndpoint::parse(stub_listen);
      StubBackendServer server;
      std::cerr << "stub backend on " << e.url() << '\n';
      server.listen(e.host, e.port);
      return 0;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputExit;
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputExit;
  } catch (const LookupError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputExit;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBackendExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
