#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pcfit/error.hpp"
#include "pcfit/evolve.hpp"
#include "pcfit/text.hpp"

namespace pcfit {

/// One fit of one image under one seed.
struct RunRecord {
  std::string image;
  std::uint64_t seed = 0;
  std::string config_summary;  ///< informational; not part of the CSV
  EllipseParams params;
  double fitness = 0.0;
  Metrics metrics;
  int generations = 0;
  std::int64_t evaluations = 0;
  double time_s = 0.0;
};

inline RunRecord make_record(std::string image, std::uint64_t seed, std::string config_summary,
                             const FitResult& fit) {
  return {std::move(image), seed,          std::move(config_summary), fit.best.params, fit.best.fitness,
          fit.metrics,      fit.generations_run, fit.evaluations,     fit.elapsed};
}

inline constexpr const char* kCsvHeader =
    "image,seed,theta,xc,yc,a,b,fitness,pr,pg,pc,pb,gf,generations,evaluations,time_s";
inline constexpr std::size_t kCsvColumns = 16;
inline constexpr std::size_t kTimeColumn = 15;

inline std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

/// Splits one CSV line, honoring double-quoted fields.
inline std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw DecodeError("unterminated quote in CSV line");
  return fields;
}

inline std::string csv_row(const RunRecord& r) {
  const std::string cols[kCsvColumns] = {
      csv_quote(r.image),          std::to_string(r.seed),         format_double(r.params.theta),
      format_double(r.params.x_c), format_double(r.params.y_c),    format_double(r.params.a),
      format_double(r.params.b),   format_double(r.fitness),       format_double(r.metrics.pr),
      format_double(r.metrics.pg), format_double(r.metrics.pc),    format_double(r.metrics.pb),
      format_double(r.metrics.gf), std::to_string(r.generations),  std::to_string(r.evaluations),
      format_double(r.time_s)};
  std::string line;
  for (std::size_t i = 0; i < kCsvColumns; ++i) {
    if (i) line += ',';
    line += cols[i];
  }
  return line;
}

inline void write_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) out << csv_row(r) << '\n';
}

inline RunRecord parse_csv_row(const std::string& line) {
  const auto f = csv_split(line);
  if (f.size() != kCsvColumns) {
    throw DecodeError("CSV row has " + std::to_string(f.size()) + " columns, expected " + std::to_string(kCsvColumns));
  }
  RunRecord r;
  r.image = f[0];
  r.seed = parse_uint(f[1], "seed");
  r.params = {parse_double(f[2], "theta"), parse_double(f[3], "xc"), parse_double(f[4], "yc"),
              parse_double(f[5], "a"), parse_double(f[6], "b")};
  r.fitness = parse_double(f[7], "fitness");
  r.metrics = {parse_double(f[8], "pr"), parse_double(f[9], "pg"), parse_double(f[10], "pc"),
               parse_double(f[11], "pb"), parse_double(f[12], "gf")};
  r.generations = static_cast<int>(parse_int(f[13], "generations"));
  r.evaluations = parse_int(f[14], "evaluations");
  r.time_s = parse_double(f[15], "time_s");
  return r;
}

/// Reads records back; the header row is required.
inline std::vector<RunRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DecodeError("CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw DecodeError("unexpected CSV header: " + line);
  std::vector<RunRecord> records;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    records.push_back(parse_csv_row(line));
  }
  return records;
}

// ---------------------------------------------------------------------------
// Aggregation

struct Summary {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double median = std::numeric_limits<double>::quiet_NaN();
  double min = std::numeric_limits<double>::quiet_NaN();
  double max = std::numeric_limits<double>::quiet_NaN();
  std::size_t count = 0;
};

inline Summary summarize(std::vector<double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += v;
  s.mean = total / static_cast<double>(values.size());
  const std::size_t n = values.size();
  s.median = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  s.min = values.front();
  s.max = values.back();
  return s;
}

/// Mean/median/min/max of each index over a set of runs. GF is summarized
/// per run; runs whose GF is infinite are left out and counted.
struct AggregateReport {
  Summary pr, pg, pc, pb, gf, time;
  std::size_t runs = 0;
  std::size_t gf_infinite = 0;
};

inline AggregateReport aggregate(const std::vector<RunRecord>& records) {
  std::vector<double> pr, pg, pc, pb, gf, time;
  AggregateReport rep;
  rep.runs = records.size();
  for (const auto& r : records) {
    pr.push_back(r.metrics.pr);
    pg.push_back(r.metrics.pg);
    pc.push_back(r.metrics.pc);
    pb.push_back(r.metrics.pb);
    time.push_back(r.time_s);
    if (std::isinf(r.metrics.gf)) {
      ++rep.gf_infinite;
    } else {
      gf.push_back(r.metrics.gf);
    }
  }
  rep.pr = summarize(std::move(pr));
  rep.pg = summarize(std::move(pg));
  rep.pc = summarize(std::move(pc));
  rep.pb = summarize(std::move(pb));
  rep.gf = summarize(std::move(gf));
  rep.time = summarize(std::move(time));
  return rep;
}

/// Table with Mean/Median/Min/Max rows over PR, PG, PC, PB, GF and Time (s).
inline std::string format_report(const AggregateReport& rep) {
  auto cell = [](double v) {
    std::string s = std::isnan(v) ? std::string("-") : format_fixed(v, 2);
    return std::string(s.size() < 10 ? 10 - s.size() : 0, ' ') + s;
  };
  std::ostringstream out;
  out << "        " << "        PR" << "        PG" << "        PC" << "        PB" << "        GF" << "  Time (s)\n";
  const char* names[] = {"Mean    ", "Median  ", "Min     ", "Max     "};
  for (int row = 0; row < 4; ++row) {
    auto pick = [row](const Summary& s) {
      switch (row) {
        case 0: return s.mean;
        case 1: return s.median;
        case 2: return s.min;
        default: return s.max;
      }
    };
    out << names[row] << cell(pick(rep.pr)) << cell(pick(rep.pg)) << cell(pick(rep.pc)) << cell(pick(rep.pb))
        << cell(pick(rep.gf)) << cell(pick(rep.time)) << '\n';
  }
  out << "runs: " << rep.runs;
  if (rep.gf_infinite) out << " (" << rep.gf_infinite << " with infinite GF excluded from GF)";
  out << '\n';
  return out.str();
}

}  // namespace pcfit
