#pragma once

// Token streams mapped to dense integer ids. Ids are stored as char32_t so an
// n-gram is just a std::u32string_view into its document: hashable, comparable
// and allocation-free.

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "textdiv/corpus.hpp"
#include "textdiv/tokenizer.hpp"

namespace textdiv::detail {

class Interner {
 public:
  char32_t id(std::string_view token) {
    auto it = ids_.find(token);
    if (it != ids_.end()) return it->second;
    const std::string& stored = storage_.emplace_back(token);  // deque: no reference invalidation
    const auto id = static_cast<char32_t>(storage_.size() - 1);
    ids_.emplace(stored, id);
    return id;
  }

  std::size_t size() const noexcept { return storage_.size(); }
  const std::string& token(char32_t id) const { return storage_[id]; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
  };
  std::deque<std::string> storage_;
  std::unordered_map<std::string_view, char32_t, Hash, std::equal_to<>> ids_;
};

/// Per-document id sequences sharing one vocabulary.
struct InternedCorpus {
  std::vector<std::u32string> docs;
  std::size_t vocabulary = 0;

  std::size_t token_count() const {
    std::size_t total = 0;
    for (const auto& d : docs) total += d.size();
    return total;
  }

  std::u32string joined() const {
    std::u32string out;
    out.reserve(token_count());
    for (const auto& d : docs) out += d;
    return out;
  }
};

inline InternedCorpus intern_tokens(const Corpus& corpus, bool lowercase) {
  Interner interner;
  InternedCorpus out;
  out.docs.reserve(corpus.size());
  for (const Document& doc : corpus) {
    std::u32string ids;
    ids.reserve(doc.size());
    for (const std::string& token : doc.tokens()) {
      ids.push_back(lowercase ? interner.id(to_lower(token)) : interner.id(token));
    }
    out.docs.push_back(std::move(ids));
  }
  out.vocabulary = interner.size();
  return out;
}

inline InternedCorpus intern_sequences(std::span<const std::vector<std::string>> sequences) {
  Interner interner;
  InternedCorpus out;
  out.docs.reserve(sequences.size());
  for (const auto& seq : sequences) {
    std::u32string ids;
    ids.reserve(seq.size());
    for (const std::string& item : seq) ids.push_back(interner.id(item));
    out.docs.push_back(std::move(ids));
  }
  out.vocabulary = interner.size();
  return out;
}

}  // namespace textdiv::detail
