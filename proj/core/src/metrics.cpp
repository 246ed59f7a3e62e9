#include "flexduplex/metrics.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "flexduplex/csv.hpp"

namespace flexduplex::metrics {

double measured_ru(std::span<const int> allocated, std::span<const int> available) {
  if (allocated.size() != available.size()) throw InvalidArgument("measured_ru: histories not aligned");
  long long used = 0, avail = 0;
  for (std::size_t i = 0; i < allocated.size(); ++i) {
    used += allocated[i];
    avail += available[i];
  }
  if (avail == 0) throw InvalidArgument("measured_ru: no resources available in the window");
  return static_cast<double>(used) / static_cast<double>(avail);
}

namespace {

double throughput_mbps(const PacketRecord& r) {
  const double seconds = static_cast<double>(r.completion - r.arrival) * kSubframeSeconds;
  return r.bits / seconds / 1e6;
}

struct MeanSe {
  double mean = 0.0;
  double stderr_ = 0.0;
};

MeanSe mean_and_stderr(const std::vector<double>& v) {
  MeanSe out;
  if (v.empty()) return out;
  double sum = 0.0;
  for (double x : v) sum += x;
  out.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.stderr_ = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return out;
}

}  // namespace

std::optional<double> mean_ut(std::span<const PacketRecord> records) {
  if (records.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& r : records) sum += throughput_mbps(r);
  return sum / static_cast<double>(records.size());
}

std::optional<double> mean_ut_per_ue(std::span<const PacketRecord> records) {
  if (records.empty()) return std::nullopt;
  std::map<int, std::pair<double, int>> per_ue;
  for (const auto& r : records) {
    auto& [sum, n] = per_ue[r.ue];
    sum += throughput_mbps(r);
    ++n;
  }
  double total = 0.0;
  for (const auto& [ue, acc] : per_ue) total += acc.first / acc.second;
  return total / static_cast<double>(per_ue.size());
}

const CellDirectionMetrics* MetricsReport::find(CellId cell, Direction d) const {
  for (const auto& r : rows) {
    if (r.cell == cell && r.direction == d) return &r;
  }
  return nullptr;
}

MetricsReport aggregate(std::span<const MetricsReport> replications) {
  if (replications.empty()) throw InvalidArgument("aggregate: no replications");
  MetricsReport out;
  out.meta = replications.front().meta;
  out.meta.replications = static_cast<int>(replications.size());
  for (const auto& proto : replications.front().rows) {
    std::vector<double> ru, ut, queue, c, aru, aq;
    long long packets = 0;
    for (const auto& rep : replications) {
      const auto* row = rep.find(proto.cell, proto.direction);
      if (!row) throw InvalidArgument("aggregate: replications disagree on row layout");
      ru.push_back(row->ru);
      if (row->ut_mbps) ut.push_back(*row->ut_mbps);
      queue.push_back(row->queue_mean_bits);
      c.push_back(row->realized_c);
      aru.push_back(row->analytic_ru);
      if (row->analytic_queue_bits) aq.push_back(*row->analytic_queue_bits);
      packets += row->packets_completed;
    }
    CellDirectionMetrics agg;
    agg.cell = proto.cell;
    agg.direction = proto.direction;
    const auto ru_s = mean_and_stderr(ru);
    agg.ru = ru_s.mean;
    agg.ru_stderr = ru_s.stderr_;
    if (!ut.empty()) {
      const auto ut_s = mean_and_stderr(ut);
      agg.ut_mbps = ut_s.mean;
      agg.ut_stderr = ut_s.stderr_;
    }
    agg.queue_mean_bits = mean_and_stderr(queue).mean;
    agg.packets_completed = packets;
    agg.realized_c = mean_and_stderr(c).mean;
    agg.analytic_ru = mean_and_stderr(aru).mean;
    if (aq.size() == replications.size()) agg.analytic_queue_bits = mean_and_stderr(aq).mean;
    out.rows.push_back(agg);
  }
  return out;
}

void write_report_csv(std::ostream& out, std::span<const MetricsReport> reports) {
  out << "scheme,lambda_dl,ratio,cell,direction,ru,ru_stderr,ut_mbps,ut_stderr,queue_bits,packets\n";
  for (const auto& rep : reports) {
    for (const auto& r : rep.rows) {
      fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{}\n", rep.meta.scheme, rep.meta.lambda_dl, rep.meta.ratio,
                 to_string(r.cell), to_string(r.direction), r.ru, r.ru_stderr,
                 r.ut_mbps ? fmt::format("{}", *r.ut_mbps) : std::string(), r.ut_stderr, r.queue_mean_bits,
                 r.packets_completed);
    }
  }
}

namespace {

CellId parse_cell(std::string_view s) {
  if (s == "MeNB") return CellId::kMeNB;
  if (s == "SeNB") return CellId::kSeNB;
  throw InvalidArgument(fmt::format("unknown cell '{}'", s));
}

}  // namespace

std::vector<MetricsReport> read_report_csv(std::istream& in) {
  std::vector<MetricsReport> out;
  std::string line;
  if (!std::getline(in, line)) return out;
  const auto header = csv::split(line);
  if (header.size() != 11 || header[0] != "scheme") throw InvalidArgument("report csv: unexpected header");
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 11) throw InvalidArgument(fmt::format("report csv line {}: expected 11 fields", line_no));
    RunMetadata meta;
    meta.scheme = f[0];
    meta.lambda_dl = csv::to_double(f[1]);
    meta.ratio = csv::to_double(f[2]);
    if (out.empty() || out.back().meta.scheme != meta.scheme || out.back().meta.lambda_dl != meta.lambda_dl ||
        out.back().meta.ratio != meta.ratio) {
      out.push_back({meta, {}});
    }
    CellDirectionMetrics r;
    r.cell = parse_cell(f[3]);
    r.direction = parse_direction(f[4]);
    r.ru = csv::to_double(f[5]);
    r.ru_stderr = csv::to_double(f[6]);
    if (!f[7].empty()) r.ut_mbps = csv::to_double(f[7]);
    r.ut_stderr = csv::to_double(f[8]);
    r.queue_mean_bits = csv::to_double(f[9]);
    r.packets_completed = csv::to_integer(f[10]);
    out.back().rows.push_back(r);
  }
  return out;
}

namespace {

struct Table2Cells {
  std::string label;
  std::array<std::string, 8> values;  // RU DL M/S, RU UL M/S, UT DL M/S, UT UL M/S
};

Table2Cells table2_row(const MetricsReport& rep) {
  Table2Cells row;
  row.label = fmt::format("lambda_dl={} ratio={} {}", rep.meta.lambda_dl, rep.meta.ratio, rep.meta.scheme);
  int col = 0;
  for (bool ut : {false, true}) {
    for (Direction d : {Direction::kDownlink, Direction::kUplink}) {
      for (CellId c : {CellId::kMeNB, CellId::kSeNB}) {
        const auto* r = rep.find(c, d);
        std::string cell;
        if (r && !ut) cell = fmt::format("{:.2f}", r->ru);
        if (r && ut && r->ut_mbps) cell = fmt::format("{:.2f}", *r->ut_mbps);
        row.values[col++] = cell;
      }
    }
  }
  return row;
}

}  // namespace

std::string table2_text(std::span<const MetricsReport> reports) {
  std::vector<Table2Cells> rows;
  std::size_t label_w = 4;
  for (const auto& rep : reports) {
    rows.push_back(table2_row(rep));
    label_w = std::max(label_w, rows.back().label.size());
  }
  constexpr int w = 7;
  std::string out;
  out += fmt::format("{:<{}} | {:^{}} | {:^{}} | {:^{}} | {:^{}}\n", "", label_w, "RU DL", 2 * w + 1, "RU UL",
                     2 * w + 1, "UT DL (Mbit/s)", 2 * w + 1, "UT UL (Mbit/s)", 2 * w + 1);
  out += fmt::format("{:<{}} |", "run", label_w);
  for (int i = 0; i < 4; ++i) out += fmt::format(" {:>{}} {:>{}} |", "MeNB", w, "SeNB", w);
  out.back() = '\n';
  for (const auto& row : rows) {
    out += fmt::format("{:<{}} |", row.label, label_w);
    for (int i = 0; i < 8; i += 2) {
      out += fmt::format(" {:>{}} {:>{}} |", row.values[i], w, row.values[i + 1], w);
    }
    out.back() = '\n';
  }
  return out;
}

void write_table2_csv(std::ostream& out, std::span<const MetricsReport> reports) {
  out << "scheme,lambda_dl,ratio,ru_dl_menb,ru_dl_senb,ru_ul_menb,ru_ul_senb,"
         "ut_dl_menb,ut_dl_senb,ut_ul_menb,ut_ul_senb\n";
  for (const auto& rep : reports) {
    fmt::print(out, "{},{},{}", rep.meta.scheme, rep.meta.lambda_dl, rep.meta.ratio);
    for (bool ut : {false, true}) {
      for (Direction d : {Direction::kDownlink, Direction::kUplink}) {
        for (CellId c : {CellId::kMeNB, CellId::kSeNB}) {
          const auto* r = rep.find(c, d);
          std::string v;
          if (r && !ut) v = fmt::format("{}", r->ru);
          if (r && ut && r->ut_mbps) v = fmt::format("{}", *r->ut_mbps);
          out << ',' << v;
        }
      }
    }
    out << '\n';
  }
}

}  // namespace flexduplex::metrics
