// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <Eigen/Dense>
// After Eigen: httplib pulls in headers whose macros break Eigen templates.
#include <httplib.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <nlohmann/json.hpp>
#include <random>
#include <set>
#include <sstream>

#include "covergen/lexicon.hpp"
#include "covergen/metrics.hpp"
#include "covergen/pipeline.hpp"
#include "covergen/service.hpp"
#include "covergen/train_support.hpp"
#include "json_schema.hpp"
#include "test_util.hpp"

using namespace covergen;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

// Collects failed checks for one criterion.
class Check {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  bool ok() const { return failures_.empty(); }
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  std::vector<std::string> failures_;
};

std::set<std::string> head_lemmas(const std::vector<const Synset*>& synsets) {
  std::set<std::string> out;
  for (const auto* s : synsets) out.insert(s->lemmas.front());
  return out;
}

const Synset& noun(const Lexicon& lex, std::string_view word) {
  const auto found = lex.synsets_of(word, PartOfSpeech::noun);
  if (found.empty()) throw std::runtime_error("fixture lacks noun " + std::string(word));
  return *found.front();
}

double ms_since(Clock::time_point t) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

// 1. Lexical graph on the fixture.
void lexical_graph(Check& c) {
  const auto t0 = Clock::now();
  const auto lex = Lexicon::load(testutil::kFixtureDir, LoadMode::strict);
  const auto& dog = noun(lex, "dog");
  const auto dog_parents = head_lemmas(lex.relation(dog.id, Relation::hypernym));
  const auto co = head_lemmas(lex.co_hyponyms(dog.id));
  const auto animal_children = head_lemmas(lex.relation(noun(lex, "animal").id, Relation::hyponym));
  const double ms = ms_since(t0);
  c.require(dog_parents == std::set<std::string>{"canine"}, "hypernyms(dog) == {canine}");
  c.require(co == std::set<std::string>{"wolf", "fox"}, "co_hyponyms(dog) == {wolf, fox}");
  c.require(animal_children == std::set<std::string>{"herbivore", "canine"}, "hyponyms(animal) == {herbivore, canine}");
  c.require(ms < 1000.0, "load and queries under 1 s (took " + std::to_string(ms) + " ms)");
}

// Brute-force product of per-token option lists, minus the original.
std::set<std::string> reachable_titles(const std::string& title, const Lexicon& lex, const Vocabulary& vocab) {
  std::set<std::string> prefixes{""};
  for (const auto& tok : tokenize_title(title)) {
    std::vector<std::string> options{tok};
    if (!is_closed_class(token_key(tok)))
      for (const auto& r : get_related_words(token_key(tok), lex, vocab)) options.push_back(r.word);
    std::set<std::string> next;
    for (const auto& p : prefixes)
      for (const auto& o : options) next.insert(p.empty() ? o : p + " " + o);
    prefixes = std::move(next);
  }
  prefixes.erase(title);
  return prefixes;
}

// 2. Title generation example and oracle.
void title_generation(Check& c) {
  const auto lex = Lexicon::load(testutil::kFixtureDir, LoadMode::strict);
  const auto vocab = Vocabulary::from_titles_file(testutil::kFixtureTitles);
  const std::string title = "Adventure in a forest";
  const auto t0 = Clock::now();
  const auto titles = generate_new_titles(title, 2, lex, vocab, 7);
  const auto reachable = reachable_titles(title, lex, vocab);
  std::set<std::string> enumerated;
  for (const auto& t : generate_new_titles(title, reachable.size(), lex, vocab, 7)) enumerated.insert(t.text());
  const double ms = ms_since(t0);

  c.require(titles.size() == 2, "two titles returned");
  for (const auto& t : titles) {
    c.require(t.tokens.size() == 4 && t.tokens[1] == "in" && t.tokens[2] == "a", "tokens 2-3 are [in, a]: " + t.text());
    for (std::size_t i = 0; i < t.tokens.size(); ++i)
      if (t.provenance[i] != Provenance::original)
        c.require(vocab.contains(t.tokens[i]), "replacement in vocabulary: " + t.tokens[i]);
    c.require(reachable.contains(t.text()), "title inside oracle product: " + t.text());
  }
  c.require(reachable.contains("chance in a wood"), "oracle set contains 'chance in a wood'");
  c.require(reachable.contains("hazard in a timber"), "oracle set contains 'hazard in a timber'");
  c.require(enumerated == reachable, "full enumeration equals oracle product");
  c.require(ms < 1000.0, "under 1 s (took " + std::to_string(ms) + " ms)");
}

json comparable_manifest(const RunManifest& m) {
  json j = json::parse(m.to_json());
  j.erase("run_id");
  j.erase("created_at");
  return j;
}

// 3. Determinism of the stub pipeline.
void determinism(Check& c) {
  const auto lex = Lexicon::load(testutil::kFixtureDir, LoadMode::strict);
  const auto vocab = Vocabulary::from_titles_file(testutil::kFixtureTitles);
  testutil::TempDir dir;
  StubBackend a, b;
  RunParams p;
  p.input_title = "Lost at sea";
  p.seed = 2024;
  for (int trial = 0; trial < 10; ++trial) {
    const auto m1 = run_pipeline(p, {lex, vocab, a, a, dir.path()});
    const auto m2 = run_pipeline(p, {lex, vocab, b, b, dir.path()});
    c.require(m1.run_id != m2.run_id, "distinct run ids");
    c.require(comparable_manifest(m1) == comparable_manifest(m2), "trial " + std::to_string(trial) + " manifests equal");
    for (const auto& cover : m1.covers)
      c.require(testutil::read_file(dir.path() / m1.run_id / cover.file) ==
                    testutil::read_file(dir.path() / m2.run_id / cover.file),
                "trial " + std::to_string(trial) + " image " + cover.file + " identical");
  }
}

// 4. Ranking rules.
void ranking(Check& c) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> scores(10);
    for (auto& s : scores) s = n(rng);
    if (trial % 2 == 0) scores[0] = *std::min_element(scores.begin(), scores.end()) - 0.5;
    std::vector<std::pair<CandidateTitle, double>> plain, transformed;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      CandidateTitle t = i == 0 ? original_candidate("orig") : original_candidate("v" + std::to_string(i));
      t.is_original = i == 0;
      plain.emplace_back(t, scores[i]);
      transformed.emplace_back(t, std::exp(scores[i]));
    }
    const auto r1 = rank_covers(plain, 6);
    const auto r2 = rank_covers(transformed, 6);
    const auto kept = std::count_if(r1.begin(), r1.end(), [](const auto& x) { return x.kept; });
    const std::string at = "trial " + std::to_string(trial);
    c.require(kept == 6, at + ": exactly 6 kept");
    c.require(r1[0].candidate.is_original && r1[0].rank == 0 && r1[0].kept, at + ": original rank 0 and kept");
    bool same = r1.size() == r2.size();
    for (std::size_t i = 0; same && i < r1.size(); ++i) same = r1[i].candidate == r2[i].candidate;
    c.require(same, at + ": ranking invariant under exp");
    if (c.failures().size() > 10) return;
  }
}

double inf_norm(const Eigen::MatrixXd& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

// 5. FID.
void fid_checks(Check& c) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 3.0);

  FeatureMatrix f(300, 6);
  for (Eigen::Index i = 0; i < f.rows(); ++i)
    for (Eigen::Index j = 0; j < f.cols(); ++j) f(i, j) = g(rng) * (1 + j);
  const auto s = gaussian_stats(f);
  const double self = fid(s, s);
  c.require(self <= 1e-6, "fid(S,S) <= 1e-6 (got " + std::to_string(self) + ")");

  const GaussianStats a{Eigen::VectorXd::Constant(1, 0.0), Eigen::MatrixXd::Constant(1, 1, 1.0)};
  const GaussianStats b{Eigen::VectorXd::Constant(1, 1.0), Eigen::MatrixXd::Constant(1, 1, 1.0)};
  c.require(std::abs(fid(a, b) - 1.0) <= 1e-9, "1-D (0,1) vs (1,1) == 1 within 1e-9");

  double worst_diag = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 8;
    GaussianStats x{Eigen::VectorXd(d), Eigen::MatrixXd::Zero(d, d)};
    GaussianStats y{Eigen::VectorXd(d), Eigen::MatrixXd::Zero(d, d)};
    double oracle = 0;
    for (int i = 0; i < d; ++i) {
      x.mu(i) = g(rng);
      y.mu(i) = g(rng);
      x.cov(i, i) = u(rng);
      y.cov(i, i) = u(rng);
      const double dm = x.mu(i) - y.mu(i), ds = std::sqrt(x.cov(i, i)) - std::sqrt(y.cov(i, i));
      oracle += dm * dm + ds * ds;
    }
    worst_diag = std::max(worst_diag, std::abs(fid(x, y) - oracle));
  }
  c.require(worst_diag <= 1e-6, "diagonal oracle within 1e-6 over 200 cases (worst " + std::to_string(worst_diag) + ")");

  double worst_ratio = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 16;
    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = g(rng);
    m = m * m.transpose() + 1e-3 * Eigen::MatrixXd::Identity(d, d);
    const auto r = matrix_sqrt_psd(m);
    worst_ratio = std::max(worst_ratio, inf_norm(r * r - m) / (1e-6 * (1.0 + inf_norm(m))));
  }
  c.require(worst_ratio <= 1.0, "sqrt reconstruction within bound on 100 SPD matrices (worst ratio " +
                                    std::to_string(worst_ratio) + ")");
}

// 6. Inception score.
void is_checks(Check& c) {
  const auto uniform = inception_score(ProbMatrix::Constant(50, 7, 1.0 / 7.0));
  c.require(std::abs(uniform.mean - 1.0) <= 1e-9, "uniform rows -> 1 within 1e-9");
  ProbMatrix hot = ProbMatrix::Zero(400, 4);
  for (int i = 0; i < 400; ++i) hot(i, i % 4) = 1.0;
  c.require(std::abs(inception_score(hot).mean - 4.0) <= 1e-6, "balanced one-hot C=4 -> 4 within 1e-6");

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int classes = 2 + trial % 10, rows = 5 + trial % 40;
    ProbMatrix p(rows, classes);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < classes; ++j) p(i, j) = std::pow(u(rng), 1 + trial % 6) + (j == i % classes ? 1e-9 : 0.0);
      p.row(i) /= p.row(i).sum();
    }
    const auto s = inception_score(p, 1 + trial % 5);
    c.require(s.mean >= 1.0 - 1e-9 && s.mean <= classes + 1e-9, "trial " + std::to_string(trial) + " within [1, C]");
  }
}

// 7. Training schedules.
void schedules(Check& c) {
  for (const auto& p : table1_presets()) {
    const auto parsed = parse_train_config(export_train_config(p));
    c.require(parsed == p, p.name + " export/parse lossless");
  }
  const int epochs[] = {0, 49, 50, 100, 250};
  const double row3[] = {0.0002, 0.0002, 0.0002, 0.0001, 0.00005};
  const double row4[] = {0.0002, 0.0002, 0.0001, 0.00005, 0.00000625};
  const auto& s3 = find_preset("table1-row-3").generator_lr;
  const auto& s4 = find_preset("table1-row-4").generator_lr;
  for (int i = 0; i < 5; ++i) {
    c.require(lr_at(s3, epochs[i]) == row3[i], "row 3 epoch " + std::to_string(epochs[i]));
    c.require(lr_at(s4, epochs[i]) == row4[i], "row 4 epoch " + std::to_string(epochs[i]));
  }
}

// 8. Discriminator input noise.
void noise(Check& c) {
  CoverImage img(64, 64);
  for (std::size_t i = 0; i < img.rgb.size(); ++i) img.rgb[i] = static_cast<std::uint8_t>(i * 37 + 11);
  c.require(add_gaussian_noise(img, 0.0, 9) == img, "sigma 0 is byte identity");

  CoverImage gray(64, 64);
  std::fill(gray.rgb.begin(), gray.rgb.end(), 128);
  const auto noisy = add_gaussian_noise(gray, 0.1, 1);
  const double n = static_cast<double>(noisy.rgb.size());
  double sum = 0, sum_sq = 0;
  for (auto b : noisy.rgb) {
    sum += b / 255.0;
    sum_sq += (b / 255.0) * (b / 255.0);
  }
  const double mean = sum / n;
  const double sd = std::sqrt((sum_sq - n * mean * mean) / (n - 1));
  c.require(sd >= 0.095 && sd <= 0.105, "mid-gray sigma 0.1 std in [0.095, 0.105] (got " + std::to_string(sd) + ")");
}

// 9. HTTP service in stub mode.
void service(Check& c) {
  testutil::TempDir dir;
  ServiceConfig config;
  config.listen_port = 0;
  config.run_root = dir.path() / "runs";
  config.lexicon_dir = testutil::kFixtureDir;
  config.vocabulary = testutil::kFixtureTitles;
  config.stub = true;
  Service svc(config);
  const int port = svc.start();
  httplib::Client cli("127.0.0.1", port);
  cli.set_read_timeout(30, 0);

  const auto t0 = Clock::now();
  auto res = cli.Post("/api/runs", R"({"title":"Lost at sea","num_variants":9,"top_k":6})", "application/json");
  const double ms = ms_since(t0);
  if (!res) {
    c.require(false, "request failed: " + httplib::to_string(res.error()));
    return;
  }
  c.require(res->status == 201, "status 201 (got " + std::to_string(res->status) + ")");
  c.require(ms < 5000.0, "under 5 s (took " + std::to_string(ms) + " ms)");
  const auto body = json::parse(res->body, nullptr, false);
  for (const auto& e : testing_schema::validate(body, "run_response.schema.json")) c.require(false, "schema: " + e);
  if (body.is_discarded() || !body.contains("covers")) return;
  c.require(body["covers"].size() == 10, "10 covers");
  int kept = 0;
  for (const auto& cover : body["covers"]) kept += cover["kept"].get<bool>();
  c.require(kept == 6, "6 kept");
  for (const auto& url : body["image_urls"]) {
    auto img = cli.Get(url.get<std::string>());
    c.require(img && img->status == 200, "GET " + url.get<std::string>() + " -> 200");
  }
  auto health = cli.Get("/api/health");
  c.require(health && health->status == 200, "health 200");
  if (health)
    for (const auto& e : testing_schema::validate(json::parse(health->body), "service_health.schema.json"))
      c.require(false, "health schema: " + e);
  svc.stop();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"1 lexical graph relations on fixture", lexical_graph},
      {"2 title generation example and brute-force oracle", title_generation},
      {"3 stub pipeline determinism, 10 trials", determinism},
      {"4 ranking rules, 1000 random score vectors", ranking},
      {"5 FID identity, 1-D, diagonal oracle, sqrt reconstruction", fid_checks},
      {"6 inception score bounds and closed forms", is_checks},
      {"7 training presets round trip and lr values", schedules},
      {"8 discriminator noise identity and spread", noise},
      {"9 HTTP service stub run", service},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Check c;
    const auto t0 = Clock::now();
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    std::ostringstream line;
    line << (c.ok() ? "PASS" : "FAIL") << "  criterion " << name << "  (" << static_cast<long>(ms_since(t0)) << " ms)";
    std::cout << line.str() << '\n';
    for (std::size_t i = 0; i < c.failures().size() && i < 5; ++i) std::cout << "      " << c.failures()[i] << '\n';
    failed += !c.ok();
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << '\n';
  return failed == 0 ? 0 : 1;
}
