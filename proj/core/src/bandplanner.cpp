#include "flexduplex/bandplanner.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "flexduplex/spectrum.hpp"

namespace flexduplex::bandplanner {

namespace {

// Carrier widths used for the CC check on DL-band reuse: the guest's UL
// aggregate would be the whole 10 MHz carrier while the host keeps a
// 7-RB (1.26 MHz) DL carrier.
constexpr double kReusedUlCcMhz = 10.0;
constexpr double kRemainingDlCcMhz = 7 * kRbBandwidthHz / 1e6;

}  // namespace

std::string_view to_string(AccessScheme s) { return s == AccessScheme::kTma ? "tma" : "fma"; }

AccessScheme parse_access_scheme(std::string_view s) {
  if (s == "tma" || s == "TMA") return AccessScheme::kTma;
  if (s == "fma" || s == "FMA") return AccessScheme::kFma;
  throw InvalidArgument(fmt::format("unknown access scheme '{}' (expected tma or fma)", s));
}

ReuseVerdict evaluate_reuse(int band, Direction direction, AccessScheme scheme) {
  ReuseVerdict v;
  v.band = band;
  v.direction = direction;
  v.scheme = scheme;
  v.tdd_bands = spectrum::tdd_reuse_lookup(band, direction);
  v.stated_usable_count = spectrum::ReusableSubframes{}.quoted_count;

  if (direction == Direction::kUplink) {
    // The host keeps its control channel on the band edges either way.
    v.constraint_notes.emplace_back(kNotePucchEdge);
  } else {
    if (scheme == AccessScheme::kTma) {
      v.usable_subframes = spectrum::reusable_subframes().computed;
      v.constraint_notes.emplace_back(kNoteReservedSubframes);
    } else {
      v.constraint_notes.emplace_back(kNoteDlCentralSync);
    }
    if (spectrum::validate_cc_plan(kReusedUlCcMhz, kRemainingDlCcMhz) == spectrum::CcVerdict::kViolation) {
      v.constraint_notes.emplace_back(kNoteCcAsymmetry);
    }
  }
  return v;
}

std::string to_json(const ReuseVerdict& v, int indent) {
  nlohmann::ordered_json j;
  j["band"] = v.band;
  j["direction"] = std::string(to_string(v.direction));
  j["scheme"] = std::string(to_string(v.scheme));
  j["reusable"] = v.reusable();
  j["tdd_bands"] = v.tdd_bands;
  j["usable_subframes"] = v.usable_subframes;
  j["stated_usable_count"] = v.stated_usable_count;
  j["constraint_notes"] = v.constraint_notes;
  return j.dump(indent);
}

std::string to_text(const ReuseVerdict& v) {
  std::string out = fmt::format("band {} {} ({}): ", v.band, to_string(v.direction), to_string(v.scheme));
  if (v.reusable()) {
    out += fmt::format("reusable via TDD band {}\n", fmt::join(v.tdd_bands, ", "));
  } else {
    out += "not reusable\n";
  }
  if (!v.usable_subframes.empty()) {
    out += fmt::format("  usable subframes {{{}}} (stated count {})\n", fmt::join(v.usable_subframes, ","),
                       v.stated_usable_count);
  }
  for (const auto& n : v.constraint_notes) out += fmt::format("  note: {}\n", n);
  return out;
}

}  // namespace flexduplex::bandplanner
