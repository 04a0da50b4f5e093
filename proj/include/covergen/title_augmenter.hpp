#pragma once

// Knowledge-graph title expansion: related words per open-class title word,
// filtered by the training vocabulary, recombined into new candidate titles.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "covergen/lexicon.hpp"

namespace covergen {

class Vocabulary {
 public:
  Vocabulary() = default;

  /// One title per line; tokens are maximal runs of ASCII letters, case-folded.
  static Vocabulary from_titles(std::istream& titles);
  static Vocabulary from_titles_file(const std::filesystem::path& file);
  /// Explicit word list, each with count 1.
  static Vocabulary from_words(const std::vector<std::string>& words);

  void add(std::string_view word, std::uint64_t count = 1);

  bool contains(std::string_view word) const { return counts_.contains(std::string(word)); }
  std::uint64_t count(std::string_view word) const;
  std::size_t size() const noexcept { return counts_.size(); }
  bool empty() const noexcept { return counts_.empty(); }
  const std::map<std::string, std::uint64_t>& counts() const noexcept { return counts_; }

  /// `{"counts": {word: n, ...}}`
  std::string to_json() const;
  static Vocabulary from_json(std::string_view text);
  /// `.json` files are read as `to_json` output, anything else as titles.
  static Vocabulary load(const std::filesystem::path& file);

  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;

 private:
  std::map<std::string, std::uint64_t> counts_;
};

enum class Provenance { original, synonym, hyponym, hypernym, co_hyponym };

std::string_view to_string(Provenance p);
/// Throws InputError on an unknown label.
Provenance parse_provenance(std::string_view label);

struct RelatedWord {
  std::string word;
  Provenance relation;

  friend bool operator==(const RelatedWord&, const RelatedWord&) = default;
};

/// Built-in list of prepositions, pronouns, articles, conjunctions and
/// auxiliaries that are never replaced.
const std::set<std::string, std::less<>>& builtin_closed_class();

/// One word per line, `#` starts a comment.
std::set<std::string, std::less<>> load_closed_class(const std::filesystem::path& file);

/// True for the empty string and for any case-folded member of the built-in list.
bool is_closed_class(std::string_view word);

/// Related words in generation order: synonyms, then for each synset its
/// hyponyms, hypernyms and co-hyponyms. First occurrence wins, then words
/// outside `vocabulary`, multiword lemmas and `word` itself are dropped.
std::vector<RelatedWord> get_related_words(std::string_view word, const Lexicon& lexicon,
                                           const Vocabulary& vocabulary);

struct TitleToken {
  std::string surface;
  bool replaceable = false;
  std::vector<RelatedWord> replacements;
};

struct CandidateTitle {
  std::vector<std::string> tokens;
  std::vector<Provenance> provenance;
  bool is_original = false;

  std::string text() const;

  friend bool operator==(const CandidateTitle&, const CandidateTitle&) = default;
};

/// Whitespace tokenization of a title.
std::vector<std::string> tokenize_title(std::string_view title);

/// Lookup key for a title token: lowercase with surrounding punctuation removed.
std::string token_key(std::string_view token);

std::vector<TitleToken> analyze_title(std::string_view title, const Lexicon& lexicon, const Vocabulary& vocabulary);

CandidateTitle original_candidate(std::string_view title);

enum class CombinationMode {
  /// Seeded uniform sampling without replacement over the option product.
  sampled,
  /// Title i takes option (i mod |options|) at every replaceable token.
  round_robin,
};

/// Up to `number` distinct candidates, none equal to the original. Fewer come
/// back when the option product is smaller. Throws InputError for a title
/// without tokens or `number` == 0.
std::vector<CandidateTitle> generate_new_titles(std::string_view title, std::size_t number, const Lexicon& lexicon,
                                                const Vocabulary& vocabulary, std::uint64_t seed,
                                                CombinationMode mode = CombinationMode::sampled);

}  // namespace covergen
