#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flexduplex/common.hpp"

namespace flexduplex::metrics {

struct PacketRecord {
  int ue = 0;
  Direction direction = Direction::kDownlink;
  long long arrival = 0;     // subframe
  long long completion = 0;  // subframe, >= arrival + 1
  double bits = 0.0;
};

/// Sum of allocated over sum of available resources.
double measured_ru(std::span<const int> allocated, std::span<const int> available);

/// Mean per-packet throughput in Mbit/s; empty input gives no value.
std::optional<double> mean_ut(std::span<const PacketRecord> records);

/// Mean over UEs of each UE's mean per-packet throughput.
std::optional<double> mean_ut_per_ue(std::span<const PacketRecord> records);

enum class UtAveraging { kPerPacket, kPerUe };

struct CellDirectionMetrics {
  CellId cell = CellId::kMeNB;
  Direction direction = Direction::kDownlink;
  double ru = 0.0;
  double ru_stderr = 0.0;
  std::optional<double> ut_mbps;
  double ut_stderr = 0.0;
  double queue_mean_bits = 0.0;
  long long packets_completed = 0;
  /// Served bits per allocated RB-second, the realized efficiency.
  double realized_c = 0.0;
  /// Utilization predicted from the offered load and `realized_c`.
  double analytic_ru = 0.0;
  /// Mean queue predicted from `analytic_ru`; absent when it is >= 1.
  std::optional<double> analytic_queue_bits;
};

struct RunMetadata {
  std::string scheme;
  double lambda_dl = 0.0;
  double ratio = 0.0;
  std::uint64_t seed = 0;
  int replications = 1;
};

struct MetricsReport {
  RunMetadata meta;
  std::vector<CellDirectionMetrics> rows;

  const CellDirectionMetrics* find(CellId cell, Direction d) const;
};

/// Unweighted mean (and standard error) of per-replication reports. The
/// reports must share metadata and row layout.
MetricsReport aggregate(std::span<const MetricsReport> replications);

/// Long-format CSV: one line per (run, cell, direction).
void write_report_csv(std::ostream& out, std::span<const MetricsReport> reports);
std::vector<MetricsReport> read_report_csv(std::istream& in);

/// Scheme-by-load table with RU and UT columns split by MeNB/SeNB.
std::string table2_text(std::span<const MetricsReport> reports);
void write_table2_csv(std::ostream& out, std::span<const MetricsReport> reports);

}  // namespace flexduplex::metrics
