#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "covergen/errors.hpp"
#include "covergen/pipeline.hpp"

namespace covergen {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string_view to_string(CombinationMode m) { return m == CombinationMode::round_robin ? "round-robin" : "sampled"; }

CombinationMode parse_mode(const std::string& s) {
  if (s == "sampled") return CombinationMode::sampled;
  if (s == "round-robin") return CombinationMode::round_robin;
  throw IntegrityError("manifest: unknown mode '" + s + "'");
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string RunManifest::to_json() const {
  json covers_json = json::array();
  for (const auto& c : covers) {
    json provenance = json::array();
    for (Provenance p : c.candidate.provenance) provenance.push_back(covergen::to_string(p));
    json entry{{"title", c.candidate.text()},
               {"tokens", c.candidate.tokens},
               {"provenance", provenance},
               {"file", c.file},
               {"unconditional", optional_number(c.unconditional)},
               {"rank", c.rank >= 0 ? json(c.rank) : json(nullptr)},
               {"kept", c.kept},
               {"original", c.candidate.is_original}};
    if (c.conditional) entry["conditional"] = *c.conditional;
    covers_json.push_back(std::move(entry));
  }
  json j{{"run_id", run_id},
         {"created_at", created_at},
         {"params",
          {{"input_title", params.input_title},
           {"num_variants", params.num_variants},
           {"top_k", params.top_k},
           {"seed", params.seed},
           {"mode", to_string(params.mode)},
           {"width", params.width},
           {"height", params.height},
           {"batch_size", params.batch_size},
           {"max_parallel", params.max_parallel}}},
         {"backend", backend},
         {"covers", covers_json},
         {"status", status == RunStatus::complete ? "complete" : "failed"},
         {"warnings", warnings}};
  if (!error.empty()) j["error"] = error;
  return j.dump(2);
}

RunManifest RunManifest::from_json(std::string_view text) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw IntegrityError("manifest: not a JSON object");
  try {
    RunManifest m;
    m.run_id = j.at("run_id").get<std::string>();
    m.created_at = j.at("created_at").get<std::string>();
    const json& p = j.at("params");
    m.params.input_title = p.at("input_title").get<std::string>();
    m.params.num_variants = p.at("num_variants").get<int>();
    m.params.top_k = p.at("top_k").get<int>();
    m.params.seed = p.at("seed").get<std::uint64_t>();
    m.params.mode = parse_mode(p.value("mode", "sampled"));
    m.params.width = p.value("width", kDefaultCoverSize);
    m.params.height = p.value("height", kDefaultCoverSize);
    m.params.batch_size = p.value("batch_size", RunParams{}.batch_size);
    m.params.max_parallel = p.value("max_parallel", RunParams{}.max_parallel);
    m.backend = j.at("backend").get<std::string>();
    for (const json& c : j.at("covers")) {
      ScoredCover sc;
      sc.candidate.tokens = c.contains("tokens") ? c.at("tokens").get<std::vector<std::string>>()
                                                 : tokenize_title(c.at("title").get<std::string>());
      for (const json& label : c.at("provenance")) sc.candidate.provenance.push_back(parse_provenance(label.get<std::string>()));
      if (sc.candidate.provenance.size() != sc.candidate.tokens.size())
        throw IntegrityError("manifest: provenance length differs from token count");
      sc.candidate.is_original = c.at("original").get<bool>();
      sc.file = c.at("file").get<std::string>();
      if (!c.at("unconditional").is_null()) sc.unconditional = c.at("unconditional").get<double>();
      if (c.contains("conditional") && !c.at("conditional").is_null()) sc.conditional = c.at("conditional").get<double>();
      sc.rank = c.at("rank").is_null() ? -1 : c.at("rank").get<int>();
      sc.kept = c.at("kept").get<bool>();
      m.covers.push_back(std::move(sc));
    }
    const auto status = j.at("status").get<std::string>();
    if (status != "complete" && status != "failed") throw IntegrityError("manifest: unknown status '" + status + "'");
    m.status = status == "complete" ? RunStatus::complete : RunStatus::failed;
    m.warnings = j.value("warnings", std::vector<std::string>{});
    m.error = j.value("error", std::string{});
    return m;
  } catch (const json::exception& e) {
    throw IntegrityError(std::string("manifest: ") + e.what());
  } catch (const InputError& e) {
    throw IntegrityError(std::string("manifest: ") + e.what());
  }
}

fs::path persist_run(const RunManifest& manifest, const std::vector<CoverImage>& images, const fs::path& root) {
  if (!is_valid_run_id(manifest.run_id)) throw PersistenceError("invalid run id '" + manifest.run_id + "'");
  const fs::path dir = root / manifest.run_id;
  std::error_code ec;
  fs::create_directories(root, ec);
  if (!fs::create_directory(dir, ec)) {
    throw PersistenceError("cannot create run directory " + dir.string() +
                           (ec ? ": " + ec.message() : ": already exists"));
  }
  for (std::size_t i = 0; i < images.size() && i < manifest.covers.size(); ++i) {
    const auto png = encode_png(images[i]);
    std::ofstream out(dir / manifest.covers[i].file, std::ios::binary);
    out.write(reinterpret_cast<const char*>(png.data()), static_cast<std::streamsize>(png.size()));
    if (!out) throw PersistenceError("cannot write " + (dir / manifest.covers[i].file).string());
  }
  // The manifest goes last and by rename, so a visible manifest implies its
  // images are on disk.
  const fs::path tmp = dir / "manifest.json.tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << manifest.to_json() << '\n';
    if (!out) throw PersistenceError("cannot write " + tmp.string());
  }
  fs::rename(tmp, dir / "manifest.json", ec);
  if (ec) throw PersistenceError("cannot finalize manifest in " + dir.string() + ": " + ec.message());
  return dir;
}

RunManifest load_run(const fs::path& root, std::string_view run_id) {
  if (!is_valid_run_id(run_id)) throw PersistenceError("invalid run id '" + std::string(run_id) + "'");
  const fs::path dir = root / std::string(run_id);
  std::ifstream in(dir / "manifest.json", std::ios::binary);
  if (!in) throw PersistenceError("no run " + std::string(run_id) + " under " + root.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  RunManifest m = RunManifest::from_json(buf.str());
  if (m.run_id != run_id) throw IntegrityError("manifest run_id " + m.run_id + " does not match directory " + std::string(run_id));
  for (const auto& c : m.covers) {
    if (c.file.find('/') != std::string::npos || c.file.find("..") != std::string::npos)
      throw IntegrityError("manifest references file outside the run directory: " + c.file);
    if (m.status == RunStatus::complete && !fs::exists(dir / c.file))
      throw IntegrityError("run " + m.run_id + " is missing image file " + c.file);
  }
  return m;
}

std::vector<std::string> list_runs(const fs::path& root) {
  std::vector<std::pair<fs::file_time_type, std::string>> found;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(root, ec)) {
    const auto name = entry.path().filename().string();
    if (!entry.is_directory() || !is_valid_run_id(name) || !fs::exists(entry.path() / "manifest.json")) continue;
    found.emplace_back(fs::last_write_time(entry.path() / "manifest.json"), name);
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<std::string> out;
  for (auto& f : found) out.push_back(std::move(f.second));
  return out;
}

}  // namespace covergen
