#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "crossloss/errors.hpp"
#include "crossloss/samples.hpp"

namespace crossloss {

/// Dense word <-> id map. Ids are 0..size()-1 in insertion order.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> words) {
    for (auto& w : words) add(std::move(w));
  }

  WordId add(std::string word) {
    if (auto it = index_.find(word); it != index_.end()) return it->second;
    const auto id = static_cast<WordId>(words_.size());
    index_.emplace(word, id);
    words_.push_back(std::move(word));
    return id;
  }

  std::optional<WordId> find(std::string_view word) const {
    auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  WordId id(std::string_view word) const {
    if (auto found = find(word)) return *found;
    throw VocabError("unknown word '" + std::string(word) + "'", {std::string(word)});
  }

  bool contains(std::string_view word) const { return find(word).has_value(); }
  const std::string& word(WordId id) const { return words_.at(id); }
  const std::vector<std::string>& words() const noexcept { return words_; }
  std::size_t size() const noexcept { return words_.size(); }

  bool operator==(const Vocabulary& other) const { return words_ == other.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId> index_;
};

}  // namespace crossloss
