#include "flexduplex/common.hpp"

#include <string>

namespace flexduplex {

std::string_view to_string(Direction d) { return d == Direction::kDownlink ? "DL" : "UL"; }

std::string_view to_string(CellId c) { return c == CellId::kMeNB ? "MeNB" : "SeNB"; }

Direction parse_direction(std::string_view s) {
  if (s == "DL" || s == "dl") return Direction::kDownlink;
  if (s == "UL" || s == "ul") return Direction::kUplink;
  throw InvalidArgument("unknown direction '" + std::string(s) + "' (expected DL or UL)");
}

}  // namespace flexduplex
