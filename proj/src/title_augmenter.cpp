#include "covergen/title_augmenter.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <limits>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "covergen/errors.hpp"
#include "covergen/rng.hpp"

namespace covergen {

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_ascii_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

}  // namespace

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary Vocabulary::from_titles(std::istream& titles) {
  Vocabulary v;
  std::string line;
  while (std::getline(titles, line)) {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && !is_ascii_letter(line[i])) ++i;
      std::size_t j = i;
      while (j < line.size() && is_ascii_letter(line[j])) ++j;
      if (j > i) v.add(lowercase(std::string_view(line).substr(i, j - i)));
      i = j;
    }
  }
  if (titles.bad()) throw InputError("vocabulary source: read failure");
  return v;
}

Vocabulary Vocabulary::from_titles_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InputError("vocabulary source: cannot open " + file.string());
  return from_titles(in);
}

Vocabulary Vocabulary::from_words(const std::vector<std::string>& words) {
  Vocabulary v;
  for (const auto& w : words) v.add(lowercase(w));
  return v;
}

void Vocabulary::add(std::string_view word, std::uint64_t count) {
  if (word.empty() || count == 0) return;
  counts_[std::string(word)] += count;
}

std::uint64_t Vocabulary::count(std::string_view word) const {
  const auto it = counts_.find(std::string(word));
  return it == counts_.end() ? 0 : it->second;
}

std::string Vocabulary::to_json() const {
  nlohmann::json j;
  j["counts"] = counts_;
  return j.dump(2);
}

Vocabulary Vocabulary::from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("counts") || !j["counts"].is_object())
    throw InputError("vocabulary json: expected {\"counts\": {...}}");
  Vocabulary v;
  for (const auto& [word, n] : j["counts"].items()) {
    if (!n.is_number_unsigned() || n.get<std::uint64_t>() == 0)
      throw InputError("vocabulary json: count for '" + word + "' must be a positive integer");
    v.add(lowercase(word), n.get<std::uint64_t>());
  }
  return v;
}

Vocabulary Vocabulary::load(const std::filesystem::path& file) {
  if (file.extension() != ".json") return from_titles_file(file);
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InputError("vocabulary source: cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

// ---------------------------------------------------------------------------
// Provenance and closed-class words

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::original: return "original";
    case Provenance::synonym: return "synonym";
    case Provenance::hyponym: return "hyponym";
    case Provenance::hypernym: return "hypernym";
    case Provenance::co_hyponym: return "co-hyponym";
  }
  return "original";
}

Provenance parse_provenance(std::string_view label) {
  for (Provenance p : {Provenance::original, Provenance::synonym, Provenance::hyponym, Provenance::hypernym,
                       Provenance::co_hyponym}) {
    if (to_string(p) == label) return p;
  }
  throw InputError("unknown provenance label '" + std::string(label) + "'");
}

const std::set<std::string, std::less<>>& builtin_closed_class() {
  static const std::set<std::string, std::less<>> words = {
#include "closed_class.inc"
  };
  return words;
}

std::set<std::string, std::less<>> load_closed_class(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InputError("closed-class list: cannot open " + file.string());
  std::set<std::string, std::less<>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    out.insert(lowercase(std::string_view(line).substr(b, e - b + 1)));
  }
  return out;
}

bool is_closed_class(std::string_view word) {
  if (word.empty()) return true;
  return builtin_closed_class().contains(lowercase(word));
}

// ---------------------------------------------------------------------------
// Related words

std::vector<RelatedWord> get_related_words(std::string_view word, const Lexicon& lexicon,
                                           const Vocabulary& vocabulary) {
  std::vector<RelatedWord> gathered;
  for (const std::string& s : lexicon.synonyms(word)) gathered.push_back({s, Provenance::synonym});

  auto append_lemmas = [&](const std::vector<const Synset*>& synsets, Provenance relation) {
    for (const Synset* s : synsets)
      for (const std::string& lemma : s->lemmas) gathered.push_back({surface_form(lemma), relation});
  };
  for (const Synset* synset : lexicon.synsets_of(word)) {
    append_lemmas(lexicon.relation(synset->id, Relation::hyponym), Provenance::hyponym);
    append_lemmas(lexicon.relation(synset->id, Relation::hypernym), Provenance::hypernym);
    append_lemmas(lexicon.co_hyponyms(synset->id), Provenance::co_hyponym);
  }

  const std::string self = lowercase(word);
  std::unordered_set<std::string> seen;
  std::vector<RelatedWord> out;
  for (auto& candidate : gathered) {
    if (!seen.insert(candidate.word).second) continue;
    if (candidate.word == self) continue;
    if (candidate.word.find(' ') != std::string::npos) continue;
    if (!vocabulary.contains(candidate.word)) continue;
    out.push_back(std::move(candidate));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Titles

std::string CandidateTitle::text() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::vector<std::string> tokenize_title(std::string_view title) {
  std::vector<std::string> out;
  std::istringstream in{std::string(title)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string token_key(std::string_view token) {
  std::size_t b = 0, e = token.size();
  while (b < e && !std::isalnum(static_cast<unsigned char>(token[b]))) ++b;
  while (e > b && !std::isalnum(static_cast<unsigned char>(token[e - 1]))) --e;
  return lowercase(token.substr(b, e - b));
}

std::vector<TitleToken> analyze_title(std::string_view title, const Lexicon& lexicon, const Vocabulary& vocabulary) {
  std::vector<TitleToken> out;
  for (std::string& surface : tokenize_title(title)) {
    TitleToken t;
    const std::string key = token_key(surface);
    t.surface = std::move(surface);
    t.replaceable = !is_closed_class(key);
    if (t.replaceable) t.replacements = get_related_words(key, lexicon, vocabulary);
    out.push_back(std::move(t));
  }
  return out;
}

CandidateTitle original_candidate(std::string_view title) {
  CandidateTitle c;
  c.tokens = tokenize_title(title);
  c.provenance.assign(c.tokens.size(), Provenance::original);
  c.is_original = true;
  return c;
}

namespace {

// Mixed-radix view of the option product. Digit 0 at every position is the
// original title; digit d > 0 selects replacements[d - 1].
class OptionSpace {
 public:
  explicit OptionSpace(const std::vector<TitleToken>& tokens) : tokens_(tokens) {
    for (const auto& t : tokens_) radix_.push_back(t.replacements.size() + 1);
    for (std::uint64_t r : radix_) {
      if (total_ > std::numeric_limits<std::uint64_t>::max() / r) {
        overflow_ = true;
        total_ = std::numeric_limits<std::uint64_t>::max();
        break;
      }
      total_ *= r;
    }
  }

  bool overflow() const { return overflow_; }
  /// Number of non-original combinations (saturating).
  std::uint64_t variants() const { return total_ - 1; }
  const std::vector<std::uint64_t>& radix() const { return radix_; }

  std::vector<std::uint64_t> digits_of(std::uint64_t index) const {
    std::vector<std::uint64_t> d(radix_.size());
    for (std::size_t i = radix_.size(); i-- > 0;) {
      d[i] = index % radix_[i];
      index /= radix_[i];
    }
    return d;
  }

  CandidateTitle build(const std::vector<std::uint64_t>& digits) const {
    CandidateTitle c;
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (digits[i] == 0) {
        c.tokens.push_back(tokens_[i].surface);
        c.provenance.push_back(Provenance::original);
      } else {
        const auto& r = tokens_[i].replacements[digits[i] - 1];
        c.tokens.push_back(r.word);
        c.provenance.push_back(r.relation);
      }
    }
    c.is_original = std::all_of(digits.begin(), digits.end(), [](std::uint64_t d) { return d == 0; });
    return c;
  }

 private:
  const std::vector<TitleToken>& tokens_;
  std::vector<std::uint64_t> radix_;
  std::uint64_t total_ = 1;
  bool overflow_ = false;
};

constexpr std::uint64_t kDenseSamplingLimit = 1u << 16;

std::vector<CandidateTitle> sample_titles(const OptionSpace& space, std::size_t number, SplitMix& rng) {
  std::vector<CandidateTitle> out;
  const std::uint64_t available = space.variants();
  if (!space.overflow() && available <= number) {
    for (std::uint64_t i = 1; i <= available; ++i) out.push_back(space.build(space.digits_of(i)));
    return out;
  }
  if (!space.overflow() && available <= kDenseSamplingLimit) {
    std::vector<std::uint64_t> pool(available);
    std::iota(pool.begin(), pool.end(), 1);
    for (std::size_t k = 0; k < number; ++k) {
      std::swap(pool[k], pool[k + rng.below(available - k)]);
      out.push_back(space.build(space.digits_of(pool[k])));
    }
    return out;
  }
  // Independent uniform digits are uniform over the product; reject the
  // original and repeats.
  std::set<std::vector<std::uint64_t>> seen;
  while (out.size() < number) {
    std::vector<std::uint64_t> digits;
    digits.reserve(space.radix().size());
    for (std::uint64_t r : space.radix()) digits.push_back(rng.below(r));
    if (std::all_of(digits.begin(), digits.end(), [](std::uint64_t d) { return d == 0; })) continue;
    if (!seen.insert(digits).second) continue;
    out.push_back(space.build(digits));
  }
  return out;
}

std::vector<CandidateTitle> round_robin_titles(const OptionSpace& space, std::size_t number) {
  std::vector<CandidateTitle> out;
  std::set<std::vector<std::uint64_t>> seen;
  for (std::size_t i = 0; i < number; ++i) {
    std::vector<std::uint64_t> digits;
    for (std::uint64_t r : space.radix()) digits.push_back(r == 1 ? 0 : 1 + i % (r - 1));
    if (seen.insert(digits).second) out.push_back(space.build(digits));
  }
  return out;
}

}  // namespace

std::vector<CandidateTitle> generate_new_titles(std::string_view title, std::size_t number, const Lexicon& lexicon,
                                                const Vocabulary& vocabulary, std::uint64_t seed,
                                                CombinationMode mode) {
  if (number == 0) throw InputError("number of titles must be at least 1");
  const auto tokens = analyze_title(title, lexicon, vocabulary);
  if (tokens.empty()) throw InputError("title has no tokens");

  const OptionSpace space(tokens);
  if (space.variants() == 0) return {};
  if (mode == CombinationMode::round_robin) return round_robin_titles(space, number);

  std::string normalized;
  for (const auto& t : tokens) normalized += t.surface + ' ';
  SplitMix rng(splitmix64(seed) ^ hash64(normalized));
  return sample_titles(space, number, rng);
}

}  // namespace covergen
