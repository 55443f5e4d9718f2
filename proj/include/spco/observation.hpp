#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "spco/types.hpp"

namespace spco {

struct WordCount {
  int word = 0;
  int count = 0;
  friend bool operator==(const WordCount&, const WordCount&) = default;
};

// Sparse bag-of-words; entries sorted by word index, counts strictly positive.
class BagOfWords {
 public:
  BagOfWords() = default;

  static BagOfWords from_tokens(std::span<const int> tokens) {
    BagOfWords bag;
    for (int t : tokens) bag.add(t);
    return bag;
  }

  static BagOfWords single(int word) {
    BagOfWords bag;
    bag.add(word);
    return bag;
  }

  void add(int word, int count = 1) {
    if (word < 0 || count < 0) throw DimensionError("negative word index or count");
    if (count == 0) return;
    auto it = std::lower_bound(entries_.begin(), entries_.end(), word,
                               [](const WordCount& e, int w) { return e.word < w; });
    if (it != entries_.end() && it->word == word)
      it->count += count;
    else
      entries_.insert(it, WordCount{word, count});
    total_ += count;
  }

  const std::vector<WordCount>& entries() const { return entries_; }
  int total() const { return total_; }
  bool empty() const { return total_ == 0; }
  int max_word() const { return entries_.empty() ? -1 : entries_.back().word; }

  int count(int word) const {
    for (const auto& e : entries_)
      if (e.word == word) return e.count;
    return 0;
  }

  friend bool operator==(const BagOfWords&, const BagOfWords&) = default;

 private:
  std::vector<WordCount> entries_;
  int total_ = 0;
};

/// One answered query: where the robot stood and what it was told.
struct Observation {
  Vec2 position = Vec2::Zero();
  BagOfWords words;

  // Number of tokens in the utterance (logged, not used by the model).
  int word_count() const { return words.total(); }
};

}  // namespace spco
