#pragma once

// Immutable lexical graph loaded from WordNet database (WNDB 3.x) files.
//
// Only hypernym (@, @i) and hyponym (~, ~i) pointers become edges. All other
// pointer types are parsed for well-formedness and dropped. Adjective
// satellites (ss_type 's') are folded into adjectives.

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace covergen {

enum class PartOfSpeech : std::uint8_t { noun, verb, adj, adv };

inline constexpr PartOfSpeech all_parts_of_speech[] = {PartOfSpeech::noun, PartOfSpeech::verb,
                                                       PartOfSpeech::adj, PartOfSpeech::adv};

/// Suffix used by WNDB file names: "noun", "verb", "adj", "adv".
std::string_view file_suffix(PartOfSpeech pos);
/// WNDB single-letter code: n, v, a, r.
char pos_code(PartOfSpeech pos);
/// Accepts n, v, a, s, r. Throws std::invalid_argument otherwise.
PartOfSpeech parse_pos_code(char code);

struct SynsetId {
  std::uint64_t offset = 0;
  PartOfSpeech pos = PartOfSpeech::noun;

  friend auto operator<=>(const SynsetId&, const SynsetId&) = default;
};

/// "00001740-n"
std::string to_string(const SynsetId& id);

struct Synset {
  SynsetId id;
  /// Lowercase, underscores for multiword lemmas.
  std::vector<std::string> lemmas;
  std::vector<SynsetId> hypernyms;
  std::vector<SynsetId> hyponyms;
  std::string gloss;

  friend bool operator==(const Synset&, const Synset&) = default;
};

enum class LoadMode { strict, lenient };

enum class Relation { hypernym, hyponym };

class Lexicon {
 public:
  Lexicon() = default;

  /// Reads every (index.pos, data.pos) pair present in `directory`.
  static Lexicon load(const std::filesystem::path& directory, LoadMode mode);

  std::size_t size() const noexcept { return synsets_.size(); }
  bool contains(const SynsetId& id) const { return synsets_.contains(id); }

  /// Throws LookupError for an unknown id.
  const Synset& at(const SynsetId& id) const;

  /// Synsets whose lemma list contains `word`; empty when unknown. Spaces in
  /// `word` are looked up as underscores. Order: noun, verb, adj, adv, then
  /// index (sense) order.
  std::vector<const Synset*> synsets_of(std::string_view word,
                                        std::optional<PartOfSpeech> pos = std::nullopt) const;

  /// Lemmas of all synsets of `word`, minus `word`, first occurrence kept.
  /// Multiword lemmas come back with spaces.
  std::vector<std::string> synonyms(std::string_view word) const;

  std::vector<const Synset*> relation(const SynsetId& id, Relation kind) const;

  /// Hyponyms of every hypernym of `id`, excluding `id`, deduplicated.
  std::vector<const Synset*> co_hyponyms(const SynsetId& id) const;

  /// Writes the graph back out as WNDB files that `load` accepts. Offsets are
  /// preserved as ids; they are not byte positions in the written files.
  void write_wndb(const std::filesystem::path& directory) const;

  const std::map<SynsetId, Synset>& synsets() const noexcept { return synsets_; }

  friend bool operator==(const Lexicon&, const Lexicon&) = default;

 private:
  struct IndexKey {
    std::string lemma;
    PartOfSpeech pos;
    friend auto operator<=>(const IndexKey&, const IndexKey&) = default;
  };

  std::map<SynsetId, Synset> synsets_;
  std::map<IndexKey, std::vector<SynsetId>> index_;

  friend class LexiconLoader;
};

/// Surface form of a lemma: underscores become spaces.
std::string surface_form(std::string_view lemma);

}  // namespace covergen
