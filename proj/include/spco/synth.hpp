#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spco/grid.hpp"
#include "spco/teacher.hpp"

namespace spco {

/// Floor-plan generator settings. Rooms sit on a rows x cols block layout
/// with random column widths and row heights.
struct SynthSpec {
  int rooms = 8;
  double room_min = 3.2;  // meters, interior
  double room_max = 4.6;
  double resolution = 0.05;
  double wall = 0.1;
  double door = 1.0;
  int extra_doors = 1;  // doors beyond the spanning tree
};

struct Environment {
  OccupancyGrid grid;
  Annotation annotation;
};

// Place names used for generated rooms, in assignment order.
const std::vector<std::string>& room_words();
// Descriptive sentences for a room name (sentence-mode answers).
std::vector<std::string> room_sentences(const std::string& room);

Environment synth_environment(std::uint64_t seed, const SynthSpec& spec);

}  // namespace spco
