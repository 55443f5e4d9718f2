#include "spco/synth.hpp"

#include <cmath>
#include <map>
#include <numeric>

#include "spco/rng.hpp"

namespace spco {

namespace {

const std::map<std::string, std::vector<std::string>>& sentence_corpus() {
  static const std::map<std::string, std::vector<std::string>> corpus = {
      {"Living_room",
       {"This is the living room.",
        "We watch television on the sofa in the living room.",
        "The family relaxes in the living room after dinner.",
        "Guests sit on the couches in the living room.",
        "The living room has a big sofa and a low table.",
        "You can read magazines in the living room."}},
      {"Dining_room",
       {"This is the dining room.",
        "We eat dinner at the dining table.",
        "The family has meals together in the dining room.",
        "Plates and chairs are set around the dining table.",
        "Breakfast is served in the dining room.",
        "The dining room has a long table with six chairs."}},
      {"Kitchen",
       {"This is the kitchen.",
        "We cook meals in the kitchen.",
        "The refrigerator and the stove are in the kitchen.",
        "Dishes are washed in the kitchen sink.",
        "You can make coffee in the kitchen.",
        "The kitchen smells of fresh bread."}},
      {"Bedroom_A",
       {"This is the main bedroom.",
        "The room in which you sleep at night is called a bedroom.",
        "My parents sleep in the main bedroom.",
        "The big bed is in the main bedroom.",
        "Pillows and blankets are on the bed in the bedroom.",
        "The main bedroom has a wardrobe for clothes."}},
      {"Bedroom_B",
       {"This is the children's bedroom.",
        "The kids sleep in this bedroom.",
        "Toys are scattered around the children's bedroom.",
        "The bunk beds are in the children's bedroom.",
        "Children do homework at the desk in their bedroom.",
        "Stuffed animals sit on the shelf in the kids bedroom."}},
      {"Bedroom_C",
       {"This is the guest bedroom.",
        "Visitors sleep in the guest bedroom.",
        "The guest bedroom has a small bed and a lamp.",
        "Friends stay overnight in the guest bedroom.",
        "Fresh towels are left for guests in this bedroom.",
        "The guest bedroom is quiet at night."}},
      {"Corridor",
       {"This is the corridor.",
        "The corridor connects the rooms.",
        "People walk through the hallway corridor.",
        "Pictures hang on the walls of the corridor.",
        "The corridor is long and narrow.",
        "You pass through the corridor to reach the other rooms."}},
      {"Toilet",
       {"This is the toilet.",
        "The toilet is used many times a day.",
        "Please flush the toilet after use.",
        "Toilet paper is kept next to the toilet.",
        "The toilet room is small.",
        "Wash your hands after using the toilet."}},
      {"Bathroom",
       {"This is the bathroom.",
        "We take a bath in the bathroom.",
        "The shower and the bathtub are in the bathroom.",
        "Towels hang on the rack in the bathroom.",
        "You brush your teeth at the bathroom sink.",
        "The bathroom mirror gets foggy after a hot shower."}},
      {"Entrance",
       {"This is the entrance.",
        "Shoes are taken off at the entrance.",
        "Visitors ring the bell at the entrance.",
        "The front door is at the entrance.",
        "Umbrellas are stored near the entrance.",
        "You leave the house through the entrance."}},
      {"Study",
       {"This is the study.",
        "Books line the shelves in the study.",
        "I work on the computer in the study.",
        "The study has a desk and a reading lamp.",
        "Quiet work gets done in the study.",
        "Papers pile up on the study desk."}},
      {"Storage",
       {"This is the storage room.",
        "Boxes are kept in the storage room.",
        "Old furniture is stored in the storage room.",
        "Tools and spare parts sit on storage shelves.",
        "The storage room is full of cardboard boxes.",
        "Seasonal decorations are put away in storage."}},
      {"Laundry",
       {"This is the laundry room.",
        "The washing machine is in the laundry room.",
        "Clothes are dried in the laundry room.",
        "Detergent is kept on the laundry shelf.",
        "Ironing happens in the laundry room.",
        "Dirty clothes go into the laundry basket."}},
      {"Garage",
       {"This is the garage.",
        "The car is parked in the garage.",
        "Bicycles hang on the garage wall.",
        "Tools are stored in the garage.",
        "The garage door opens onto the street.",
        "Oil stains mark the garage floor."}},
  };
  return corpus;
}

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) { return parent[a] == a ? a : parent[a] = find(parent[a]); }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

}  // namespace

const std::vector<std::string>& room_words() {
  static const std::vector<std::string> words = {
      "Living_room", "Dining_room", "Kitchen",  "Bedroom_A", "Bedroom_B",
      "Bedroom_C",   "Corridor",    "Toilet",   "Bathroom",  "Entrance",
      "Study",       "Storage",     "Laundry",  "Garage"};
  return words;
}

std::vector<std::string> room_sentences(const std::string& room) {
  const auto it = sentence_corpus().find(room);
  if (it == sentence_corpus().end()) return {"This is the " + room + "."};
  return it->second;
}

Environment synth_environment(std::uint64_t seed, const SynthSpec& spec) {
  const int n = spec.rooms;
  if (n < 1 || n > static_cast<int>(room_words().size()))
    throw ConfigError("room count must be between 1 and " + std::to_string(room_words().size()));
  if (!(spec.resolution > 0) || !(spec.wall > 0) || !(spec.door > 0))
    throw ConfigError("resolution, wall and door must be > 0");
  if (!(spec.room_min <= spec.room_max)) throw ConfigError("room_min exceeds room_max");
  if (spec.room_min < spec.door + 0.6) throw ConfigError("rooms too small for a doorway");

  const double res = spec.resolution;
  const int rows = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n))));
  const int cols = (n + rows - 1) / rows;
  const int wc = std::max(1, static_cast<int>(std::lround(spec.wall / res)));
  const int dc = std::max(1, static_cast<int>(std::lround(spec.door / res)));
  const int margin = static_cast<int>(std::lround(0.3 / res));

  Rng rng(mix_seed(seed, {0x5e17ULL}));
  auto span = [&] {
    return static_cast<int>(
        std::lround((spec.room_min + rng.uniform() * (spec.room_max - spec.room_min)) / res));
  };
  std::vector<int> cw(cols), rh(rows), x0(cols), y0(rows);
  for (auto& w : cw) w = span();
  for (auto& h : rh) h = span();
  int width = wc, height = wc;
  for (int c = 0; c < cols; ++c) {
    x0[c] = width;
    width += cw[c] + wc;
  }
  for (int r = 0; r < rows; ++r) {
    y0[r] = height;
    height += rh[r] + wc;
  }

  Environment env;
  env.grid = OccupancyGrid(width, height, res, Vec2::Zero(), Cell::occupied);
  auto carve = [&](int cx, int cy, int w, int h) {
    for (int y = cy; y < cy + h; ++y)
      for (int x = cx; x < cx + w; ++x) env.grid.set({x, y}, Cell::free);
  };
  for (int i = 0; i < n; ++i) carve(x0[i % cols], y0[i / cols], cw[i % cols], rh[i / cols]);

  // Doorways: random spanning tree over adjacent rooms plus a few extra edges.
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    if (i % cols + 1 < cols && i + 1 < n) edges.emplace_back(i, i + 1);
    if (i + cols < n) edges.emplace_back(i, i + cols);
  }
  std::shuffle(edges.begin(), edges.end(), rng.engine());
  DisjointSets sets(n);
  std::vector<std::pair<int, int>> doors, spare;
  for (const auto& e : edges) (sets.unite(e.first, e.second) ? doors : spare).push_back(e);
  for (int i = 0; i < spec.extra_doors && i < static_cast<int>(spare.size()); ++i)
    doors.push_back(spare[i]);

  for (const auto& [a, b] : doors) {
    const int ca = a % cols, ra = a / cols;
    if (b == a + 1) {
      const int lo = y0[ra] + margin, hi = y0[ra] + rh[ra] - margin - dc;
      const int y = lo + rng.below(std::max(1, hi - lo + 1));
      carve(x0[ca] + cw[ca], y, wc, dc);
    } else {
      const int lo = x0[ca] + margin, hi = x0[ca] + cw[ca] - margin - dc;
      const int x = lo + rng.below(std::max(1, hi - lo + 1));
      carve(x, y0[ra] + rh[ra], dc, wc);
    }
  }

  // Regions extend half a wall past each interior so doorway cells belong to
  // exactly one room.
  const double half_wall = 0.5 * wc * res;
  env.annotation.resolution = res;
  for (int i = 0; i < n; ++i) {
    const int c = i % cols, r = i / cols;
    Region region;
    region.label = room_words()[i];
    region.rects.push_back({x0[c] * res - half_wall, y0[r] * res - half_wall,
                            (x0[c] + cw[c]) * res + half_wall, (y0[r] + rh[r]) * res + half_wall});
    region.utterances = room_sentences(region.label);
    env.annotation.regions.push_back(std::move(region));
  }
  return env;
}

}  // namespace spco
