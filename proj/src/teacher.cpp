#include "spco/teacher.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_set>

#include "spco/rng.hpp"

namespace spco {

namespace detail {
extern const std::string_view kStopWordsText;
}

namespace {

bool is_letter(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool ends_with(const std::string& w, std::string_view suffix) {
  return w.size() >= suffix.size() && w.compare(w.size() - suffix.size(), suffix.size(), suffix) == 0;
}

const std::unordered_map<std::string, std::string>& irregular_plurals() {
  static const std::unordered_map<std::string, std::string> table = {
      {"children", "child"}, {"people", "person"}, {"men", "man"},       {"women", "woman"},
      {"feet", "foot"},      {"teeth", "tooth"},   {"mice", "mouse"},    {"shelves", "shelf"},
      {"knives", "knife"},   {"leaves", "leaf"},   {"wives", "wife"},    {"lives", "life"},
      {"movies", "movie"},   {"cookies", "cookie"}, {"clothes", "clothes"}, {"series", "series"},
      {"species", "species"}, {"news", "news"},    {"glasses", "glasses"}, {"stairs", "stairs"},
      {"dishes", "dish"},    {"christmas", "christmas"}, {"pants", "pants"}, {"scissors", "scissors"},
  };
  return table;
}

std::string singular_rules(const std::string& w) {
  if (const auto it = irregular_plurals().find(w); it != irregular_plurals().end())
    return it->second;
  if (w.size() <= 3) return w;
  if (ends_with(w, "ss") || ends_with(w, "us") || ends_with(w, "is")) return w;
  if (ends_with(w, "ies") && w.size() > 4) return w.substr(0, w.size() - 3) + "y";
  if (ends_with(w, "sses") || ends_with(w, "xes") || ends_with(w, "zes") ||
      ends_with(w, "ches") || ends_with(w, "shes"))
    return w.substr(0, w.size() - 2);
  if (ends_with(w, "s")) return w.substr(0, w.size() - 1);
  return w;
}

std::vector<std::string> split_spaces(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

}  // namespace

const std::vector<std::string>& stop_words() {
  static const std::vector<std::string> words = [] {
    std::vector<std::string> out;
    std::istringstream in{std::string(detail::kStopWordsText)};
    for (std::string line; std::getline(in, line);) {
      line.erase(std::remove_if(line.begin(), line.end(),
                                [](unsigned char c) { return std::isspace(c); }),
                 line.end());
      if (!line.empty() && line[0] != '#') out.push_back(line);
    }
    return out;
  }();
  return words;
}

bool is_stop_word(const std::string& word) {
  static const std::unordered_set<std::string> set(stop_words().begin(), stop_words().end());
  return set.count(word) > 0;
}

std::string singularize(const std::string& word) {
  if (is_stop_word(word)) return word;
  const std::string once = singular_rules(word);
  // Only accept a result that the rules leave alone, so the step is idempotent.
  if (singular_rules(once) != once) return word;
  return once;
}

std::vector<std::string> preprocess_sentence(std::string_view text) {
  std::string kept;
  kept.reserve(text.size());
  for (char c : text) {
    if (is_letter(c))
      kept.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    else if (c == '-' || std::isspace(static_cast<unsigned char>(c)))
      kept.push_back(' ');
  }
  std::vector<std::string> out;
  for (const auto& t : split_spaces(kept)) {
    const std::string s = singularize(t);
    if (!is_stop_word(s)) out.push_back(s);
  }
  return out;
}

std::vector<std::string> tokenize_label(std::string_view label) {
  std::string kept;
  for (char c : label) {
    if (is_letter(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '_')
      kept.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    else
      kept.push_back(' ');
  }
  return split_spaces(kept);
}

std::vector<std::string> tokenize(std::string_view text, AnswerMode mode) {
  return mode == AnswerMode::sentence ? preprocess_sentence(text) : tokenize_label(text);
}

std::optional<int> Annotation::lookup(const Vec2& p) const {
  const CellIndex c{static_cast<int>(std::floor((p.x() - origin.x()) / resolution + 1e-9)),
                    static_cast<int>(std::floor((p.y() - origin.y()) / resolution + 1e-9))};
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const Region& r = regions[i];
    for (const auto& rect : r.rects)
      if (rect.contains(p)) return static_cast<int>(i);
    for (const auto& cell : r.cells)
      if (cell == c) return static_cast<int>(i);
  }
  return std::nullopt;
}

int Annotation::region_of(const Vec2& p) const {
  const auto r = lookup(p);
  if (!r) {
    std::ostringstream msg;
    msg << "no annotated region contains (" << p.x() << ", " << p.y() << ")";
    throw AnnotationGapError(msg.str());
  }
  return *r;
}

Annotation Annotation::from_json(const nlohmann::json& j) {
  Annotation a;
  try {
    a.resolution = j.value("resolution", a.resolution);
    if (j.contains("origin")) a.origin = Vec2(j["origin"].at(0), j["origin"].at(1));
    for (const auto& jr : j.at("regions")) {
      Region r;
      r.label = jr.at("label").get<std::string>();
      for (const auto& rect : jr.value("rects", nlohmann::json::array()))
        r.rects.push_back({rect.at(0), rect.at(1), rect.at(2), rect.at(3)});
      for (const auto& cell : jr.value("cells", nlohmann::json::array()))
        r.cells.push_back({cell.at(0).get<int>(), cell.at(1).get<int>()});
      r.utterances = jr.value("utterances", std::vector<std::string>{});
      if (r.utterances.empty()) r.utterances.push_back(r.label);
      a.regions.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("annotation: ") + e.what());
  }
  if (!(a.resolution > 0)) throw FormatError("annotation: resolution must be > 0");
  return a;
}

nlohmann::json Annotation::to_json() const {
  nlohmann::json j;
  j["resolution"] = resolution;
  j["origin"] = {origin.x(), origin.y()};
  j["regions"] = nlohmann::json::array();
  for (const auto& r : regions) {
    nlohmann::json jr;
    jr["label"] = r.label;
    jr["rects"] = nlohmann::json::array();
    for (const auto& rect : r.rects) jr["rects"].push_back({rect.xmin, rect.ymin, rect.xmax, rect.ymax});
    if (!r.cells.empty()) {
      jr["cells"] = nlohmann::json::array();
      for (const auto& c : r.cells) jr["cells"].push_back({c.col, c.row});
    }
    jr["utterances"] = r.utterances;
    j["regions"].push_back(std::move(jr));
  }
  return j;
}

int Vocabulary::add(const std::string& word) {
  auto [it, inserted] = index_.emplace(word, size());
  if (inserted) words_.push_back(word);
  return it->second;
}

std::optional<int> Vocabulary::find(const std::string& word) const {
  const auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary annotation_vocabulary(const Annotation& annotation, AnswerMode mode) {
  Vocabulary v;
  for (const auto& r : annotation.regions) {
    if (mode == AnswerMode::single_word) {
      for (const auto& t : tokenize_label(r.label)) v.add(t);
    } else {
      for (const auto& u : r.utterances)
        for (const auto& t : preprocess_sentence(u)) v.add(t);
    }
  }
  return v;
}

BagOfWords extend_vocabulary(Vocabulary& vocab, const std::vector<std::string>& tokens) {
  BagOfWords bag;
  for (const auto& t : tokens) bag.add(vocab.add(t));
  return bag;
}

BagOfWords to_bag(const Vocabulary& vocab, const std::vector<std::string>& tokens) {
  BagOfWords bag;
  for (const auto& t : tokens)
    if (const auto i = vocab.find(t)) bag.add(*i);
  return bag;
}

std::string ScriptedTeacher::answer_text(int candidate, const Vec2& x, int visit) const {
  const Region& r = annotation_->regions[annotation_->region_of(x)];
  if (mode_ == AnswerMode::single_word) return r.label;
  const std::uint64_t n = r.utterances.size();
  const std::uint64_t offset =
      stream_seed(seed_, Stream::teacher, static_cast<std::uint64_t>(candidate)) % n;
  return r.utterances[(offset + static_cast<std::uint64_t>(visit)) % n];
}

std::vector<std::string> ScriptedTeacher::answer_tokens(int candidate, const Vec2& x,
                                                        int visit) const {
  return tokenize(answer_text(candidate, x, visit), mode_);
}

BagOfWords answer_query(const Annotation& annotation, const Vocabulary& vocab, const Vec2& x,
                        AnswerMode mode, int candidate, int visit, std::uint64_t seed) {
  return to_bag(vocab, ScriptedTeacher(annotation, mode, seed).answer_tokens(candidate, x, visit));
}

}  // namespace spco
