#pragma once

#include <array>
#include <string_view>

namespace fdnoma {

enum class Direction { kUplink, kDownlink };

inline constexpr std::array<Direction, 2> kDirections = {Direction::kUplink, Direction::kDownlink};

constexpr std::string_view to_string(Direction d) {
  return d == Direction::kUplink ? "UL" : "DL";
}

}  // namespace fdnoma
