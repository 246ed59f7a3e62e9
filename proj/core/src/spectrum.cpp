#include "flexduplex/spectrum.hpp"

#include <algorithm>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fmt/ranges.h>

namespace flexduplex::spectrum {

std::string_view to_string(Role r) {
  switch (r) {
    case Role::kDownlink:
      return "DL";
    case Role::kUplink:
      return "UL";
    case Role::kGuard:
      return "GUARD";
    case Role::kReservedCtrl:
      return "RESERVED_CTRL";
    case Role::kHost:
      return "HOST";
  }
  return "?";
}

int FramePattern::count(Role r) const {
  return static_cast<int>(std::count(subframes.begin(), subframes.end(), r));
}

void FramePattern::validate() const {
  if (count(Role::kGuard) == kSubframesPerFrame) {
    throw InvalidArgument("frame pattern: every subframe is a guard");
  }
}

bool BandPlan::adjacent(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  return std::find(adjacent_pairs.begin(), adjacent_pairs.end(), std::pair{i, j}) != adjacent_pairs.end();
}

int BandPlan::fdd_rbs(CellId cell, Direction d) const {
  int n = 0;
  for (const auto& s : segments) {
    if (s.duplexing == Duplexing::kFdd && s.owner == cell && s.direction == d) n += s.rbs.count;
  }
  return n;
}

void BandPlan::validate() const {
  int used = 0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (s.rbs.count <= 0 || s.rbs.first < 0 || s.rbs.end() > total_rbs) {
      throw InvalidArgument(fmt::format("band plan: segment {} outside carrier", i));
    }
    if (s.duplexing == Duplexing::kTdd) {
      if (!s.pattern) throw InvalidArgument(fmt::format("band plan: TDD segment {} has no frame pattern", i));
      s.pattern->validate();
    }
    for (std::size_t j = i + 1; j < segments.size(); ++j) {
      if (s.rbs.overlaps(segments[j].rbs)) {
        throw InvalidArgument(fmt::format("band plan: segments {} and {} overlap", i, j));
      }
    }
    used += s.rbs.count;
  }
  for (auto [i, j] : adjacent_pairs) {
    if (i >= j || j >= segments.size()) throw InvalidArgument("band plan: malformed adjacency pair");
    const auto& a = segments[i].rbs;
    const auto& b = segments[j].rbs;
    const int gap = a.end() <= b.first ? b.first - a.end() : a.first - b.end();
    if (gap < guard_rbs) throw InvalidArgument("band plan: adjacent segments closer than the guard");
  }
  if (used > total_rbs) throw InvalidArgument("band plan: segments exceed the carrier");
}

namespace {

// DL subframes first, the remainder of the frame UL.
FramePattern tdd_pattern(int dl_subframes) {
  FramePattern p;
  p.owner = CellId::kSeNB;
  for (int i = 0; i < kSubframesPerFrame; ++i) {
    p.subframes[i] = i < dl_subframes ? Role::kDownlink : Role::kUplink;
  }
  return p;
}

}  // namespace

BandPlan make_fma_plan(Direction reuse_direction, const PlanOptions& opts) {
  BandPlan plan;
  plan.carrier = reuse_direction;
  plan.total_rbs = opts.total_rbs;
  plan.guard_rbs = opts.guard_rbs;
  const int g = opts.guard_rbs;

  if (reuse_direction == Direction::kUplink) {
    // 30% MeNB UL / 70% SeNB, TDD 7:3. The MeNB keeps both band edges so
    // its PUCCH region never falls inside the SeNB segment.
    const int menb = (opts.total_rbs * 3 + 5) / 10;
    const int low = (menb + 1) / 2;
    const int high = menb - low;
    const int senb = opts.total_rbs - menb - 2 * g;
    if (senb <= 0 || low < opts.pucch_edge_width || high < opts.pucch_edge_width) {
      throw InvalidArgument("make_fma_plan: carrier too narrow for the UL split");
    }
    Segment lo{CellId::kMeNB, Direction::kUplink, {0, low}, Duplexing::kFdd, {}, {}};
    Segment mid{CellId::kSeNB, Direction::kUplink, {low + g, senb}, Duplexing::kTdd, tdd_pattern(7), {}};
    Segment hi{CellId::kMeNB, Direction::kUplink, {opts.total_rbs - high, high}, Duplexing::kFdd, {}, {}};
    plan.segments = {lo, mid, hi};
    plan.adjacent_pairs = {{0, 1}, {1, 2}};
  } else {
    // 7 RBs MeNB DL / 43 RBs SeNB, TDD 1:9.
    const int menb = (opts.total_rbs * 14 + 50) / 100;
    const int senb = opts.total_rbs - menb - g;
    if (senb <= 0) throw InvalidArgument("make_fma_plan: carrier too narrow for the DL split");
    Segment lo{CellId::kMeNB, Direction::kDownlink, {0, menb}, Duplexing::kFdd, {}, {}};
    Segment hi{CellId::kSeNB, Direction::kDownlink, {menb + g, senb}, Duplexing::kTdd, tdd_pattern(1), {}};
    plan.segments = {lo, hi};
    plan.adjacent_pairs = {{0, 1}};
  }
  plan.validate();
  return plan;
}

BandPlan make_tma_plan(const PlanOptions& opts) {
  BandPlan plan;
  plan.carrier = Direction::kUplink;
  plan.total_rbs = opts.total_rbs;
  plan.guard_rbs = opts.guard_rbs;
  FramePattern p;
  p.owner = CellId::kSeNB;
  p.subframes = {Role::kHost,     Role::kHost,     Role::kHost,   Role::kDownlink, Role::kDownlink,
                 Role::kDownlink, Role::kDownlink, Role::kUplink, Role::kUplink,   Role::kGuard};
  Segment shared{CellId::kSeNB, Direction::kUplink, {0, opts.total_rbs}, Duplexing::kTdd, p, CellId::kMeNB};
  plan.segments = {shared};
  plan.validate();
  return plan;
}

std::set<int> reserved_subframes(SystemKind system) {
  // Synchronization, system information and paging subframes.
  if (system == SystemKind::kFddDownlink) return {0, 4, 5, 9};
  return {0, 1, 5, 6};
}

ReusableSubframes reusable_subframes() {
  const auto host = reserved_subframes(SystemKind::kFddDownlink);
  const auto guest = reserved_subframes(SystemKind::kTdd);
  ReusableSubframes out;
  for (int i = 0; i < kSubframesPerFrame; ++i) {
    if (!host.contains(i) && !guest.contains(i)) out.computed.insert(i);
  }
  return out;
}

std::set<int> pucch_edge_rbs(int total_rbs, int edge_width) {
  if (edge_width < 0 || 2 * edge_width >= total_rbs) {
    throw InvalidArgument(fmt::format("pucch_edge_rbs: edge width {} too large for {} RBs", edge_width, total_rbs));
  }
  std::set<int> out;
  for (int i = 0; i < edge_width; ++i) {
    out.insert(i);
    out.insert(total_rbs - 1 - i);
  }
  return out;
}

namespace {

using R = FrequencyRange;
constexpr std::nullopt_t kNone = std::nullopt;

// UL range, UL reuse, DL range, DL reuse. Band 21's DL lower edge is 1495.9 MHz.
const std::vector<BandEntry> kBands = {
    {1, R{1920, 1980}, {36}, R{2110, 2170}, {}},
    {2, R{1850, 1910}, {33, 35}, R{1930, 1990}, {36}},
    {3, R{1710, 1785}, {}, R{1805, 1880}, {35, 39}},
    {4, R{1710, 1755}, {}, R{2110, 2155}, {}},
    {5, R{824, 849}, {}, R{869, 894}, {}},
    {6, R{830, 840}, {}, R{875, 885}, {}},
    {7, R{2500, 2570}, {41}, R{2620, 2690}, {41}},
    {8, R{880, 915}, {}, R{925, 960}, {}},
    {9, R{1749.9, 1784.9}, {}, R{1844.9, 1879.9}, {35, 39}},
    {10, R{1710, 1770}, {}, R{2110, 2170}, {}},
    {11, R{1427.9, 1447.9}, {}, R{1475.9, 1495.9}, {32}},
    {12, R{699, 716}, {44}, R{729, 746}, {44}},
    {13, R{777, 787}, {44}, R{746, 756}, {44}},
    {14, R{788, 798}, {44}, R{758, 768}, {44}},
    {17, R{704, 716}, {44}, R{734, 746}, {44}},
    {18, R{815, 830}, {}, R{860, 875}, {}},
    {19, R{830, 845}, {}, R{875, 890}, {}},
    {20, R{832, 862}, {}, R{791, 821}, {44}},
    {21, R{1447.9, 1462.9}, {32}, R{1495.9, 1510.9}, {}},
    {22, R{3410, 3490}, {42}, R{3510, 3590}, {42}},
    {23, R{2000, 2020}, {34}, R{2180, 2200}, {}},
    {24, R{1626.5, 1660.5}, {}, R{1525, 1559}, {}},
    {25, R{1850, 1915}, {39}, R{1930, 1995}, {36}},
    {26, R{814, 849}, {}, R{859, 894}, {}},
    {27, R{807, 824}, {}, R{852, 869}, {}},
    {28, R{703, 748}, {44}, R{758, 803}, {44}},
    {29, kNone, {}, R{717, 728}, {44}},
    {30, R{2305, 2315}, {40}, R{2350, 2360}, {40}},
    {31, R{452.5, 457.5}, {}, R{462.5, 467.5}, {}},
    {32, kNone, {}, R{1452, 1496}, {}},
};

std::string format_reuse(const std::vector<int>& bands) {
  return bands.empty() ? std::string("x") : fmt::format("{}", fmt::join(bands, " "));
}

}  // namespace

std::span<const BandEntry> band_table() { return kBands; }

const BandEntry& find_band(int band) {
  auto it = std::find_if(kBands.begin(), kBands.end(), [band](const BandEntry& e) { return e.band == band; });
  if (it == kBands.end()) throw InvalidArgument(fmt::format("unknown E-UTRA FDD band {}", band));
  return *it;
}

std::vector<int> tdd_reuse_lookup(int band, Direction direction) {
  const BandEntry& e = find_band(band);
  return direction == Direction::kUplink ? e.ul_tdd_reuse : e.dl_tdd_reuse;
}

void write_band_csv(std::ostream& out) {
  out << "band,ul_low,ul_high,ul_tdd,dl_low,dl_high,dl_tdd\n";
  auto lo = [](const std::optional<FrequencyRange>& r) { return r ? fmt::format("{}", r->low_mhz) : std::string(); };
  auto hi = [](const std::optional<FrequencyRange>& r) { return r ? fmt::format("{}", r->high_mhz) : std::string(); };
  for (const auto& e : kBands) {
    fmt::print(out, "{},{},{},{},{},{},{}\n", e.band, lo(e.ul), hi(e.ul), format_reuse(e.ul_tdd_reuse), lo(e.dl),
               hi(e.dl), format_reuse(e.dl_tdd_reuse));
  }
}

CcVerdict validate_cc_plan(double ul_cc_bandwidth_mhz, double dl_cc_bandwidth_mhz) {
  if (!(ul_cc_bandwidth_mhz > 0.0 && dl_cc_bandwidth_mhz > 0.0)) {
    throw InvalidArgument("validate_cc_plan: bandwidths must be positive");
  }
  return ul_cc_bandwidth_mhz > dl_cc_bandwidth_mhz ? CcVerdict::kViolation : CcVerdict::kValid;
}

}  // namespace flexduplex::spectrum
