#pragma once

// Title -> candidate titles -> covers -> discriminator scores -> ranked,
// persisted selection. The cover for the input title is always pinned to
// rank 0 and always kept; variants are ordered by unconditional score.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "covergen/errors.hpp"
#include "covergen/genai.hpp"
#include "covergen/image.hpp"
#include "covergen/title_augmenter.hpp"

namespace covergen {

struct RunParams {
  std::string input_title;
  int num_variants = 9;
  int top_k = 6;
  std::uint64_t seed = 0;
  CombinationMode mode = CombinationMode::sampled;
  int width = kDefaultCoverSize;
  int height = kDefaultCoverSize;
  /// Titles per generate call and number of calls in flight.
  std::size_t batch_size = 16;
  std::size_t max_parallel = 4;

  friend bool operator==(const RunParams&, const RunParams&) = default;
};

/// Throws InputError on an empty title, negative variant count or top_k < 1.
void validate(const RunParams& params);

struct ScoredCover {
  CandidateTitle candidate;
  /// Image file name inside the run directory, "NNN.png".
  std::string file;
  std::optional<double> unconditional;
  /// Stored when the backend returns it; never used for ranking.
  std::optional<double> conditional;
  /// -1 when the run failed before ranking.
  int rank = -1;
  bool kept = false;

  friend bool operator==(const ScoredCover&, const ScoredCover&) = default;
};

/// Pins the single original candidate to rank 0, sorts the others by score
/// descending (stable on input order) and keeps rank < top_k. Returned in
/// rank order. Throws ContractError unless exactly one entry is original.
std::vector<ScoredCover> rank_covers(const std::vector<std::pair<CandidateTitle, double>>& scored, int top_k);

enum class RunStatus { complete, failed };

struct RunManifest {
  std::string run_id;
  std::string created_at;
  RunParams params;
  std::string backend;
  /// Candidate order: index 0 is the original title.
  std::vector<ScoredCover> covers;
  RunStatus status = RunStatus::complete;
  std::vector<std::string> warnings;
  std::string error;

  std::string to_json() const;
  static RunManifest from_json(std::string_view text);

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

/// Thrown by run_pipeline after the partial manifest has been persisted.
class RunFailed : public Error {
 public:
  explicit RunFailed(RunManifest manifest)
      : Error("run " + manifest.run_id + " failed: " + manifest.error), manifest_(std::move(manifest)) {}
  const RunManifest& manifest() const noexcept { return manifest_; }

 private:
  RunManifest manifest_;
};

std::string new_run_id();
bool is_valid_run_id(std::string_view id);

/// Layout: <root>/<run_id>/manifest.json and <root>/<run_id>/NNN.png.
std::filesystem::path persist_run(const RunManifest& manifest, const std::vector<CoverImage>& images,
                                  const std::filesystem::path& root);
/// Throws PersistenceError for an unknown or unreadable run and
/// IntegrityError when a referenced image file is missing.
RunManifest load_run(const std::filesystem::path& root, std::string_view run_id);
/// Run ids under `root`, newest first.
std::vector<std::string> list_runs(const std::filesystem::path& root);

struct PipelineContext {
  const Lexicon& lexicon;
  const Vocabulary& vocabulary;
  GeneratorBackend& generator;
  ScorerBackend& scorer;
  std::filesystem::path run_root;
};

RunManifest run_pipeline(const RunParams& params, const PipelineContext& ctx);

}  // namespace covergen
