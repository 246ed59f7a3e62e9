#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "flexduplex/common.hpp"

namespace flexduplex::spectrum {

enum class Role { kDownlink, kUplink, kGuard, kReservedCtrl, kHost };
enum class Duplexing { kFdd, kTdd };

std::string_view to_string(Role r);

struct FramePattern {
  std::array<Role, kSubframesPerFrame> subframes{};
  CellId owner = CellId::kSeNB;

  Role at(long long subframe) const { return subframes[static_cast<std::size_t>(subframe % kSubframesPerFrame)]; }
  int count(Role r) const;
  void validate() const;
};

struct RbRange {
  int first = 0;
  int count = 0;

  int end() const { return first + count; }
  bool overlaps(RbRange o) const { return first < o.end() && o.first < end(); }
  bool contains(int rb) const { return rb >= first && rb < end(); }
};

struct Segment {
  CellId owner = CellId::kMeNB;
  /// Transmit direction of an FDD segment; ignored for TDD segments.
  Direction direction = Direction::kUplink;
  RbRange rbs;
  Duplexing duplexing = Duplexing::kFdd;
  std::optional<FramePattern> pattern;
  /// FDD cell that owns the HOST subframes of a time-shared TDD segment.
  std::optional<CellId> host;
};

/// Partition of one 10 MHz carrier of the FDD pair.
struct BandPlan {
  Direction carrier = Direction::kUplink;
  int total_rbs = 50;
  int guard_rbs = 0;
  std::vector<Segment> segments;
  /// Index pairs (i < j) of segments coupled through ACI.
  std::vector<std::pair<std::size_t, std::size_t>> adjacent_pairs;

  bool adjacent(std::size_t i, std::size_t j) const;
  /// RBs owned by `cell` in FDD segments with the given direction.
  int fdd_rbs(CellId cell, Direction d) const;
  void validate() const;
};

struct PlanOptions {
  int total_rbs = 50;
  int guard_rbs = 0;
  int pucch_edge_width = 2;
};

/// Frequency-multiplexed plan for the reused carrier.
BandPlan make_fma_plan(Direction reuse_direction, const PlanOptions& opts = {});

/// Time-multiplexed plan for the reused FDD-UL carrier.
BandPlan make_tma_plan(const PlanOptions& opts = {});

enum class SystemKind { kFddDownlink, kTdd };

std::set<int> reserved_subframes(SystemKind system);

struct ReusableSubframes {
  std::set<int> computed;
  /// Usable-subframe count quoted for in-band TMA on the FDD-DL band. It
  /// disagrees with `computed.size()`; both are surfaced.
  int quoted_count = 2;
};

ReusableSubframes reusable_subframes();

std::set<int> pucch_edge_rbs(int total_rbs, int edge_width);

struct FrequencyRange {
  double low_mhz = 0.0;
  double high_mhz = 0.0;
};

struct BandEntry {
  int band = 0;
  std::optional<FrequencyRange> ul;
  std::vector<int> ul_tdd_reuse;
  std::optional<FrequencyRange> dl;
  std::vector<int> dl_tdd_reuse;
};

/// The 30 candidate E-UTRA FDD operating bands.
std::span<const BandEntry> band_table();

const BandEntry& find_band(int band);

/// TDD band numbers able to reuse the given FDD band direction. Empty means
/// the direction cannot be reused.
std::vector<int> tdd_reuse_lookup(int band, Direction direction);

void write_band_csv(std::ostream& out);

enum class CcVerdict { kValid, kViolation };

/// The UL component carrier may not be wider than the DL one.
CcVerdict validate_cc_plan(double ul_cc_bandwidth_mhz, double dl_cc_bandwidth_mhz);

}  // namespace flexduplex::spectrum
