#include "covergen/pipeline.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <future>
#include <numeric>
#include <random>

#include "covergen/errors.hpp"

namespace covergen {

void validate(const RunParams& p) {
  if (tokenize_title(p.input_title).empty()) throw InputError("title must not be empty");
  if (p.num_variants < 0) throw InputError("num_variants must be >= 0");
  if (p.top_k < 1) throw InputError("top_k must be >= 1");
  if (p.width <= 0 || p.height <= 0) throw InputError("image size must be positive");
}

std::vector<ScoredCover> rank_covers(const std::vector<std::pair<CandidateTitle, double>>& scored, int top_k) {
  if (top_k < 1) throw ContractError("rank_covers: top_k must be >= 1");
  const auto originals = std::count_if(scored.begin(), scored.end(), [](const auto& e) { return e.first.is_original; });
  if (originals != 1)
    throw ContractError("rank_covers: expected exactly one original candidate, got " + std::to_string(originals));

  std::vector<std::size_t> order;
  std::size_t original = 0;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    if (scored[i].first.is_original)
      original = i;
    else
      order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scored[a].second > scored[b].second; });
  order.insert(order.begin(), original);

  std::vector<ScoredCover> out;
  out.reserve(order.size());
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    ScoredCover c;
    c.candidate = scored[order[rank]].first;
    c.unconditional = scored[order[rank]].second;
    c.rank = static_cast<int>(rank);
    c.kept = rank < static_cast<std::size_t>(top_k);
    out.push_back(std::move(c));
  }
  return out;
}

std::string new_run_id() {
  std::random_device rd;
  std::array<std::uint8_t, 16> b{};
  for (std::size_t i = 0; i < b.size(); i += 4) {
    const std::uint32_t v = rd();
    for (std::size_t k = 0; k < 4; ++k) b[i + k] = static_cast<std::uint8_t>(v >> (8 * k));
  }
  b[6] = static_cast<std::uint8_t>((b[6] & 0x0f) | 0x40);
  b[8] = static_cast<std::uint8_t>((b[8] & 0x3f) | 0x80);
  static constexpr char hex[] = "0123456789abcdef";
  std::string id;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (i == 4 || i == 6 || i == 8 || i == 10) id += '-';
    id += hex[b[i] >> 4];
    id += hex[b[i] & 15];
  }
  return id;
}

bool is_valid_run_id(std::string_view id) {
  if (id.size() != 36) return false;
  for (std::size_t i = 0; i < id.size(); ++i) {
    const char c = id[i];
    if (i == 8 || i == 13 || i == 18 || i == 23) {
      if (c != '-') return false;
    } else if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) {
      return false;
    }
  }
  return true;
}

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string image_file_name(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu.png", index);
  return buf;
}

struct Generated {
  std::vector<std::optional<CoverImage>> images;
  std::vector<std::string> warnings;
};

// Batches run with at most `max_parallel` calls in flight. A failed batch is
// retried title by title so one bad title only drops itself.
Generated generate_all(GeneratorBackend& backend, const std::vector<std::string>& titles, const RunParams& p) {
  Generated out;
  out.images.resize(titles.size());
  const std::size_t batch = std::max<std::size_t>(1, p.batch_size);
  const std::size_t lanes = std::max<std::size_t>(1, p.max_parallel);

  std::vector<std::pair<std::size_t, std::size_t>> batches;
  for (std::size_t b = 0; b < titles.size(); b += batch) batches.emplace_back(b, std::min(titles.size(), b + batch));

  auto run_batch = [&](std::size_t begin, std::size_t end) {
    const std::span<const std::string> slice(titles.data() + begin, end - begin);
    return generate_covers(backend, slice, p.seed, p.width, p.height);
  };

  for (std::size_t wave = 0; wave < batches.size(); wave += lanes) {
    const std::size_t wave_end = std::min(batches.size(), wave + lanes);
    std::vector<std::future<std::vector<CoverImage>>> inflight;
    for (std::size_t b = wave; b < wave_end; ++b)
      inflight.push_back(std::async(std::launch::async, run_batch, batches[b].first, batches[b].second));

    for (std::size_t b = wave; b < wave_end; ++b) {
      const auto [begin, end] = batches[b];
      try {
        auto images = inflight[b - wave].get();
        for (std::size_t i = begin; i < end; ++i) out.images[i] = std::move(images[i - begin]);
        continue;
      } catch (const TransportError&) {
      } catch (const ProtocolError&) {
      }
      for (std::size_t i = begin; i < end; ++i) {
        try {
          out.images[i] = std::move(run_batch(i, i + 1).front());
        } catch (const Error& e) {
          out.warnings.push_back("generation failed for '" + titles[i] + "': " + e.what());
        }
      }
    }
  }
  return out;
}

}  // namespace

RunManifest run_pipeline(const RunParams& params, const PipelineContext& ctx) {
  validate(params);

  RunManifest m;
  m.run_id = new_run_id();
  m.created_at = utc_timestamp();
  m.params = params;
  m.backend = ctx.generator.identity() == ctx.scorer.identity()
                  ? ctx.generator.identity()
                  : ctx.generator.identity() + "+" + ctx.scorer.identity();

  std::vector<CandidateTitle> candidates{original_candidate(params.input_title)};
  if (params.num_variants > 0) {
    auto variants = generate_new_titles(params.input_title, static_cast<std::size_t>(params.num_variants),
                                        ctx.lexicon, ctx.vocabulary, params.seed, params.mode);
    if (variants.empty()) m.warnings.push_back("no variant titles: nothing in the title is replaceable");
    else if (variants.size() < static_cast<std::size_t>(params.num_variants))
      m.warnings.push_back("only " + std::to_string(variants.size()) + " distinct variant titles exist");
    for (auto& v : variants) candidates.push_back(std::move(v));
  }

  std::vector<std::string> titles;
  for (const auto& c : candidates) titles.push_back(c.text());

  auto fail = [&](std::string error, std::vector<CandidateTitle> cands, std::vector<CoverImage> images) -> RunFailed {
    m.status = RunStatus::failed;
    m.error = std::move(error);
    for (std::size_t i = 0; i < cands.size(); ++i) {
      ScoredCover c;
      c.candidate = std::move(cands[i]);
      c.file = image_file_name(i);
      m.covers.push_back(std::move(c));
    }
    persist_run(m, images, ctx.run_root);
    return RunFailed(m);
  };

  Generated gen = generate_all(ctx.generator, titles, params);
  m.warnings.insert(m.warnings.end(), gen.warnings.begin(), gen.warnings.end());
  if (!gen.images[0]) throw fail("generation failed for the input title", {}, {});

  std::vector<CandidateTitle> kept_candidates;
  std::vector<std::string> kept_titles;
  std::vector<CoverImage> images;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!gen.images[i]) continue;
    kept_candidates.push_back(candidates[i]);
    kept_titles.push_back(titles[i]);
    images.push_back(std::move(*gen.images[i]));
  }

  ScoreReport report;
  try {
    report = score_covers(ctx.scorer, images, std::span<const std::string>(kept_titles));
  } catch (const Error& e) {
    throw fail(std::string("scoring failed: ") + e.what(), kept_candidates, images);
  }

  std::vector<std::pair<CandidateTitle, double>> scored;
  for (std::size_t i = 0; i < kept_candidates.size(); ++i) scored.emplace_back(kept_candidates[i], report.unconditional[i]);
  auto ranked = rank_covers(scored, params.top_k);

  // Back to candidate order; candidates are pairwise distinct.
  m.covers.resize(kept_candidates.size());
  for (auto& c : ranked) {
    const auto it = std::find(kept_candidates.begin(), kept_candidates.end(), c.candidate);
    const auto index = static_cast<std::size_t>(it - kept_candidates.begin());
    c.file = image_file_name(index);
    if (report.conditional) c.conditional = (*report.conditional)[index];
    m.covers[index] = std::move(c);
  }

  persist_run(m, images, ctx.run_root);
  return m;
}

}  // namespace covergen
