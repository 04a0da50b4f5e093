#include "covergen/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "covergen/errors.hpp"

namespace covergen {

namespace fs = std::filesystem;

std::string_view file_suffix(PartOfSpeech pos) {
  switch (pos) {
    case PartOfSpeech::noun: return "noun";
    case PartOfSpeech::verb: return "verb";
    case PartOfSpeech::adj: return "adj";
    case PartOfSpeech::adv: return "adv";
  }
  return "noun";
}

char pos_code(PartOfSpeech pos) {
  switch (pos) {
    case PartOfSpeech::noun: return 'n';
    case PartOfSpeech::verb: return 'v';
    case PartOfSpeech::adj: return 'a';
    case PartOfSpeech::adv: return 'r';
  }
  return 'n';
}

PartOfSpeech parse_pos_code(char code) {
  switch (code) {
    case 'n': return PartOfSpeech::noun;
    case 'v': return PartOfSpeech::verb;
    case 'a':
    case 's': return PartOfSpeech::adj;
    case 'r': return PartOfSpeech::adv;
    default: throw std::invalid_argument(std::string("unknown part-of-speech code '") + code + "'");
  }
}

std::string to_string(const SynsetId& id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%08llu-%c", static_cast<unsigned long long>(id.offset), pos_code(id.pos));
  return buf;
}

std::string surface_form(std::string_view lemma) {
  std::string out(lemma);
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

namespace {

std::string lookup_key(std::string_view word) {
  std::string key;
  key.reserve(word.size());
  for (unsigned char c : word) key.push_back(c == ' ' ? '_' : static_cast<char>(std::tolower(c)));
  return key;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

// Cursor over the space-separated fields of one line; every read failure is
// reported with file and line number.
class FieldReader {
 public:
  FieldReader(std::string_view body, const fs::path& file, std::size_t line_no)
      : fields_(split_fields(body)), file_(file), line_no_(line_no) {}

  bool done() const { return pos_ == fields_.size(); }

  std::string_view next(const char* what) {
    if (pos_ >= fields_.size()) fail(std::string("truncated line, missing ") + what);
    return fields_[pos_++];
  }

  std::uint64_t next_number(const char* what, int base = 10) {
    const std::string_view tok = next(what);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value, base);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
      fail(std::string("bad ") + what + " '" + std::string(tok) + "'");
    return value;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw LoadError(file_.string() + ":" + std::to_string(line_no_) + ": " + msg);
  }

 private:
  std::vector<std::string_view> fields_;
  std::size_t pos_ = 0;
  const fs::path& file_;
  std::size_t line_no_;
};

std::optional<PartOfSpeech> try_pos(std::string_view code) {
  if (code.size() != 1) return std::nullopt;
  try {
    return parse_pos_code(code[0]);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

// Adjective lemmas may carry a syntactic marker: "galore(ip)".
std::string normalize_lemma(std::string_view raw) {
  if (const auto paren = raw.find('('); paren != std::string_view::npos && raw.back() == ')')
    raw = raw.substr(0, paren);
  return lookup_key(raw);
}

template <typename Fn>
void for_each_record(const fs::path& file, Fn&& fn) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw LoadError(file.string() + ": cannot open");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.starts_with("  ")) continue;  // license header
    if (line.find_first_not_of(' ') == std::string::npos) continue;
    fn(std::string_view(line), line_no);
  }
  if (in.bad()) throw LoadError(file.string() + ": read failure");
}

void push_unique(std::vector<SynsetId>& v, const SynsetId& id) {
  if (std::find(v.begin(), v.end(), id) == v.end()) v.push_back(id);
}

}  // namespace

class LexiconLoader {
 public:
  LexiconLoader(const fs::path& dir, LoadMode mode) : dir_(dir), mode_(mode) {}

  Lexicon run() {
    bool any = false;
    for (PartOfSpeech pos : all_parts_of_speech) {
      const fs::path index = dir_ / ("index." + std::string(file_suffix(pos)));
      const fs::path data = dir_ / ("data." + std::string(file_suffix(pos)));
      const bool has_index = fs::exists(index), has_data = fs::exists(data);
      if (!has_index && !has_data) continue;
      if (!has_data) throw LoadError(data.string() + ": missing (index file present)");
      if (!has_index) throw LoadError(index.string() + ": missing (data file present)");
      any = true;
      read_data(data, pos);
      pending_index_.push_back({index, pos});
    }
    if (!any) throw LoadError(dir_.string() + ": no WNDB index/data pair found");

    link_edges();
    for (const auto& [file, pos] : pending_index_) read_index(file, pos);
    add_unindexed_lemmas();
    return std::move(lex_);
  }

 private:
  void read_data(const fs::path& file, PartOfSpeech file_pos) {
    for_each_record(file, [&](std::string_view line, std::size_t line_no) {
      const auto bar = line.find('|');
      FieldReader r(line.substr(0, bar), file, line_no);
      if (bar == std::string_view::npos) r.fail("truncated line, missing gloss separator '|'");

      Synset s;
      s.id.offset = r.next_number("synset offset");
      r.next_number("lex_filenum");
      const std::string_view ss_type = r.next("ss_type");
      const auto ss_pos = try_pos(ss_type);
      if (!ss_pos) r.fail("bad ss_type '" + std::string(ss_type) + "'");
      s.id.pos = *ss_pos;
      if (s.id.pos != file_pos) r.fail("ss_type '" + std::string(ss_type) + "' in " + file.filename().string());

      const auto w_cnt = r.next_number("w_cnt", 16);
      if (w_cnt == 0) r.fail("synset without lemmas");
      for (std::uint64_t i = 0; i < w_cnt; ++i) {
        std::string lemma = normalize_lemma(r.next("lemma"));
        r.next_number("lex_id", 16);
        if (std::find(s.lemmas.begin(), s.lemmas.end(), lemma) == s.lemmas.end())
          s.lemmas.push_back(std::move(lemma));
      }

      const auto p_cnt = r.next_number("p_cnt");
      for (std::uint64_t i = 0; i < p_cnt; ++i) {
        const std::string_view symbol = r.next("pointer symbol");
        SynsetId target;
        target.offset = r.next_number("pointer offset");
        const std::string_view tpos = r.next("pointer pos");
        const auto target_pos = try_pos(tpos);
        if (!target_pos) r.fail("bad pointer pos '" + std::string(tpos) + "'");
        target.pos = *target_pos;
        r.next_number("source/target", 16);
        if (symbol == "@" || symbol == "@i")
          s.hypernyms.push_back(target);
        else if (symbol == "~" || symbol == "~i")
          s.hyponyms.push_back(target);
      }

      std::string_view gloss = line.substr(bar + 1);
      while (!gloss.empty() && gloss.front() == ' ') gloss.remove_prefix(1);
      while (!gloss.empty() && gloss.back() == ' ') gloss.remove_suffix(1);
      s.gloss = std::string(gloss);

      const SynsetId id = s.id;
      if (!lex_.synsets_.emplace(id, std::move(s)).second) r.fail("duplicate synset offset " + to_string(id));
      data_order_.push_back(id);
    });
  }

  void read_index(const fs::path& file, PartOfSpeech pos) {
    std::vector<std::string> dangling;
    for_each_record(file, [&](std::string_view line, std::size_t line_no) {
      FieldReader r(line, file, line_no);
      const std::string lemma = lookup_key(r.next("lemma"));
      const std::string_view code = r.next("pos");
      if (try_pos(code) != pos) r.fail("pos '" + std::string(code) + "' in " + file.filename().string());
      const auto synset_cnt = r.next_number("synset_cnt");
      const auto p_cnt = r.next_number("p_cnt");
      for (std::uint64_t i = 0; i < p_cnt; ++i) r.next("pointer symbol");
      r.next_number("sense_cnt");
      r.next_number("tagsense_cnt");
      auto& ids = lex_.index_[{lemma, pos}];
      for (std::uint64_t i = 0; i < synset_cnt; ++i) {
        const SynsetId id{r.next_number("synset offset"), pos};
        if (!lex_.synsets_.contains(id)) {
          dangling.push_back(lemma + "->" + to_string(id));
          continue;
        }
        push_unique(ids, id);
      }
      if (ids.empty()) lex_.index_.erase({lemma, pos});
    });
    if (!dangling.empty() && mode_ == LoadMode::strict)
      throw IntegrityError(file.string() + ": index entries reference missing synsets: " + join(dangling));
  }

  // Index files in the wild occasionally omit a lemma; the data file is the
  // ground truth, so anything missing is appended after the indexed senses.
  void add_unindexed_lemmas() {
    for (const SynsetId& id : data_order_) {
      for (const std::string& lemma : lex_.synsets_.at(id).lemmas) push_unique(lex_.index_[{lemma, id.pos}], id);
    }
  }

  void link_edges() {
    std::vector<std::string> problems;
    auto check = [&](Synset& s, std::vector<SynsetId>& edges, const char* kind) {
      std::vector<SynsetId> kept;
      for (const SynsetId& t : edges) {
        if (t == s.id) {
          problems.push_back(to_string(s.id) + " lists itself as " + kind);
        } else if (!lex_.synsets_.contains(t)) {
          problems.push_back(to_string(s.id) + " " + kind + " " + to_string(t) + " does not resolve");
        } else {
          push_unique(kept, t);
        }
      }
      edges = std::move(kept);
    };
    for (auto& [id, s] : lex_.synsets_) {
      check(s, s.hypernyms, "hypernym");
      check(s, s.hyponyms, "hyponym");
    }

    // Collect missing inverses first so the repair pass cannot observe its own
    // insertions.
    std::vector<std::pair<SynsetId, SynsetId>> need_hyponym, need_hypernym;
    for (const auto& [id, s] : lex_.synsets_) {
      for (const SynsetId& h : s.hypernyms) {
        const auto& back = lex_.synsets_.at(h).hyponyms;
        if (std::find(back.begin(), back.end(), id) == back.end()) need_hyponym.emplace_back(h, id);
      }
      for (const SynsetId& h : s.hyponyms) {
        const auto& back = lex_.synsets_.at(h).hypernyms;
        if (std::find(back.begin(), back.end(), id) == back.end()) need_hypernym.emplace_back(h, id);
      }
    }
    for (const auto& [target, source] : need_hyponym)
      problems.push_back(to_string(source) + " has hypernym " + to_string(target) + " without inverse hyponym");
    for (const auto& [target, source] : need_hypernym)
      problems.push_back(to_string(source) + " has hyponym " + to_string(target) + " without inverse hypernym");

    if (!problems.empty() && mode_ == LoadMode::strict)
      throw IntegrityError("lexicon integrity violations: " + join(problems));

    for (const auto& [target, source] : need_hyponym) lex_.synsets_.at(target).hyponyms.push_back(source);
    for (const auto& [target, source] : need_hypernym) lex_.synsets_.at(target).hypernyms.push_back(source);
  }

  static std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += "; ";
      out += items[i];
    }
    return out;
  }

  fs::path dir_;
  LoadMode mode_;
  Lexicon lex_;
  std::vector<SynsetId> data_order_;
  std::vector<std::pair<fs::path, PartOfSpeech>> pending_index_;
};

Lexicon Lexicon::load(const fs::path& directory, LoadMode mode) {
  return LexiconLoader(directory, mode).run();
}

const Synset& Lexicon::at(const SynsetId& id) const {
  const auto it = synsets_.find(id);
  if (it == synsets_.end()) throw LookupError("unknown synset " + to_string(id));
  return it->second;
}

std::vector<const Synset*> Lexicon::synsets_of(std::string_view word, std::optional<PartOfSpeech> pos) const {
  std::vector<const Synset*> out;
  if (word.empty()) return out;
  const std::string key = lookup_key(word);
  for (PartOfSpeech p : all_parts_of_speech) {
    if (pos && *pos != p) continue;
    const auto it = index_.find({key, p});
    if (it == index_.end()) continue;
    for (const SynsetId& id : it->second) out.push_back(&synsets_.at(id));
  }
  return out;
}

std::vector<std::string> Lexicon::synonyms(std::string_view word) const {
  const std::string key = lookup_key(word);
  std::vector<std::string> out;
  std::set<std::string> seen{key};
  for (const Synset* s : synsets_of(word)) {
    for (const std::string& lemma : s->lemmas) {
      if (seen.insert(lemma).second) out.push_back(surface_form(lemma));
    }
  }
  return out;
}

std::vector<const Synset*> Lexicon::relation(const SynsetId& id, Relation kind) const {
  const Synset& s = at(id);
  const auto& edges = kind == Relation::hypernym ? s.hypernyms : s.hyponyms;
  std::vector<const Synset*> out;
  out.reserve(edges.size());
  for (const SynsetId& t : edges) out.push_back(&synsets_.at(t));
  return out;
}

std::vector<const Synset*> Lexicon::co_hyponyms(const SynsetId& id) const {
  const Synset& s = at(id);
  std::vector<const Synset*> out;
  std::set<SynsetId> seen{id};
  for (const SynsetId& h : s.hypernyms) {
    for (const SynsetId& sibling : synsets_.at(h).hyponyms) {
      if (seen.insert(sibling).second) out.push_back(&synsets_.at(sibling));
    }
  }
  return out;
}

void Lexicon::write_wndb(const fs::path& directory) const {
  fs::create_directories(directory);
  for (PartOfSpeech pos : all_parts_of_speech) {
    std::ostringstream data, index;
    bool any = false;
    for (const auto& [id, s] : synsets_) {
      if (id.pos != pos) continue;
      any = true;
      char head[64];
      std::snprintf(head, sizeof head, "%08llu 00 %c %02zx", static_cast<unsigned long long>(id.offset),
                    pos_code(pos), s.lemmas.size());
      data << head;
      for (const auto& lemma : s.lemmas) data << ' ' << lemma << " 0";
      char count[16];
      std::snprintf(count, sizeof count, " %03zu", s.hypernyms.size() + s.hyponyms.size());
      data << count;
      auto emit = [&](const char* symbol, const SynsetId& t) {
        char ptr[48];
        std::snprintf(ptr, sizeof ptr, " %s %08llu %c 0000", symbol, static_cast<unsigned long long>(t.offset),
                      pos_code(t.pos));
        data << ptr;
      };
      for (const auto& t : s.hypernyms) emit("@", t);
      for (const auto& t : s.hyponyms) emit("~", t);
      if (pos == PartOfSpeech::verb) data << " 00";
      data << " | " << s.gloss << "  \n";
    }
    for (const auto& [key, ids] : index_) {
      if (key.pos != pos) continue;
      any = true;
      index << key.lemma << ' ' << pos_code(pos) << ' ' << ids.size() << " 0 " << ids.size() << " 0";
      for (const auto& id : ids) {
        char off[16];
        std::snprintf(off, sizeof off, " %08llu", static_cast<unsigned long long>(id.offset));
        index << off;
      }
      index << "  \n";
    }
    if (!any) continue;
    const std::string suffix(file_suffix(pos));
    std::ofstream(directory / ("data." + suffix), std::ios::binary) << data.str();
    std::ofstream(directory / ("index." + suffix), std::ios::binary) << index.str();
  }
}

}  // namespace covergen
