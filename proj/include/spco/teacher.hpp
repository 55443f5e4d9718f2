#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "spco/grid.hpp"
#include "spco/observation.hpp"

namespace spco {

struct Rect {
  double xmin = 0, ymin = 0, xmax = 0, ymax = 0;
  // Half-open on the max side so that adjacent rectangles do not overlap.
  bool contains(const Vec2& p) const {
    return p.x() >= xmin && p.x() < xmax && p.y() >= ymin && p.y() < ymax;
  }
};

/// A labeled place: where it is and what people say about it.
struct Region {
  std::string label;
  std::vector<Rect> rects;
  std::vector<CellIndex> cells;  // alternative to rects, on the annotation's cell lattice
  std::vector<std::string> utterances;
};

struct Annotation {
  std::vector<Region> regions;
  // Cell lattice used by Region::cells.
  double resolution = 0.05;
  Vec2 origin = Vec2::Zero();

  // First region containing p.
  std::optional<int> lookup(const Vec2& p) const;
  int region_of(const Vec2& p) const;  // throws AnnotationGapError

  static Annotation from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Append-only word list; indices never change once assigned.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(const std::vector<std::string>& words) {
    for (const auto& w : words) add(w);
  }

  int add(const std::string& word);
  std::optional<int> find(const std::string& word) const;
  const std::string& word(int i) const { return words_.at(static_cast<std::size_t>(i)); }
  const std::vector<std::string>& words() const { return words_; }
  int size() const { return static_cast<int>(words_.size()); }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
};

enum class AnswerMode { single_word, sentence };

// Sentence pipeline: drop non-letters (spaces and hyphens kept), split on
// hyphens, lowercase, singularize, drop stop words.
std::vector<std::string> preprocess_sentence(std::string_view text);
// Single-word answers: lowercase, underscores kept.
std::vector<std::string> tokenize_label(std::string_view label);
std::string singularize(const std::string& word);
bool is_stop_word(const std::string& word);
const std::vector<std::string>& stop_words();

std::vector<std::string> tokenize(std::string_view text, AnswerMode mode);

// Words the annotation can produce in the given mode, in first-seen order.
Vocabulary annotation_vocabulary(const Annotation& annotation, AnswerMode mode);

// Unseen tokens are appended; returns the bag over the extended vocabulary.
BagOfWords extend_vocabulary(Vocabulary& vocab, const std::vector<std::string>& tokens);
// Tokens missing from the vocabulary are dropped.
BagOfWords to_bag(const Vocabulary& vocab, const std::vector<std::string>& tokens);

/// Deterministic answers from ground truth. In sentence mode the k-th visit
/// to a candidate gets utterance (offset(candidate) + k) mod n, so repeated
/// visits hear different sentences.
class ScriptedTeacher {
 public:
  ScriptedTeacher(const Annotation& annotation, AnswerMode mode, std::uint64_t seed)
      : annotation_(&annotation), mode_(mode), seed_(seed) {}

  std::vector<std::string> answer_tokens(int candidate, const Vec2& x, int visit) const;
  std::string answer_text(int candidate, const Vec2& x, int visit) const;
  AnswerMode mode() const { return mode_; }

 private:
  const Annotation* annotation_;
  AnswerMode mode_;
  std::uint64_t seed_;
};

BagOfWords answer_query(const Annotation& annotation, const Vocabulary& vocab, const Vec2& x,
                        AnswerMode mode, int candidate, int visit, std::uint64_t seed);

}  // namespace spco
