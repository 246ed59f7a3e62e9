#pragma once

#include <set>
#include <string>
#include <vector>

#include "flexduplex/common.hpp"

namespace flexduplex::bandplanner {

enum class AccessScheme { kTma, kFma };

std::string_view to_string(AccessScheme s);
AccessScheme parse_access_scheme(std::string_view s);

// Rule identifiers attached to a verdict.
inline constexpr std::string_view kNotePucchEdge = "pucch_edge";
inline constexpr std::string_view kNoteReservedSubframes = "reserved_subframes";
inline constexpr std::string_view kNoteDlCentralSync = "dl_central_sync";
inline constexpr std::string_view kNoteCcAsymmetry = "cc_asymmetry";

struct ReuseVerdict {
  int band = 0;
  Direction direction = Direction::kUplink;
  AccessScheme scheme = AccessScheme::kFma;
  std::vector<int> tdd_bands;  // empty: not reusable
  /// Data subframes left to the guest when it shares the FDD-DL band in
  /// time; empty when that rule does not apply.
  std::set<int> usable_subframes;
  int stated_usable_count = 0;
  std::vector<std::string> constraint_notes;

  bool reusable() const { return !tdd_bands.empty(); }
};

/// Combines the band table with the subframe, PUCCH and carrier
/// aggregation rules. Notes are informative; only a missing TDD band blocks.
ReuseVerdict evaluate_reuse(int band, Direction direction, AccessScheme scheme);

/// Machine-readable form of a verdict.
std::string to_json(const ReuseVerdict& v, int indent = 2);

std::string to_text(const ReuseVerdict& v);

}  // namespace flexduplex::bandplanner
