#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "pcfit/report.hpp"

namespace pcfit {
namespace {

RunRecord record_with(double pr, double gf, double time_s = 1.0) {
  RunRecord r;
  r.image = "img.png";
  r.metrics = {pr, 0.0, 0.0, 0.0, gf};
  r.time_s = time_s;
  return r;
}

TEST(Csv, HeaderColumnOrder) {
  EXPECT_STREQ(kCsvHeader, "image,seed,theta,xc,yc,a,b,fitness,pr,pg,pc,pb,gf,generations,evaluations,time_s");
}

TEST(Csv, RoundTripReproducesRecordsExactly) {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<RunRecord> records;
  const char* names[] = {"plain.png", "with,comma.png", "quote\"d.png", "dir/sub dir/x.ppm"};
  for (int i = 0; i < 40; ++i) {
    RunRecord r;
    r.image = names[i % 4];
    r.seed = gen();
    r.params = {u(gen) * 360, u(gen) * 512, u(gen) * 512, 1 + u(gen) * 300, 1 + u(gen) * 300};
    r.fitness = (u(gen) - 0.5) * 1e7;
    r.metrics = {u(gen) * 100, u(gen) * 100, u(gen) * 100, u(gen) * 100, u(gen) * 50};
    if (i % 7 == 0) r.metrics.gf = std::numeric_limits<double>::infinity();
    r.generations = static_cast<int>(gen() % 201);
    r.evaluations = 20 + 40 * r.generations;
    r.time_s = u(gen) * 10;
    records.push_back(r);
  }
  std::ostringstream out;
  write_csv(out, records);
  std::istringstream in(out.str());
  const auto back = read_csv(in);
  ASSERT_EQ(back.size(), records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(back[i].image, records[i].image);
    EXPECT_EQ(back[i].seed, records[i].seed);
    EXPECT_EQ(back[i].params, records[i].params);
    EXPECT_EQ(back[i].fitness, records[i].fitness);
    EXPECT_EQ(back[i].metrics.pr, records[i].metrics.pr);
    EXPECT_EQ(back[i].metrics.pg, records[i].metrics.pg);
    EXPECT_EQ(back[i].metrics.pc, records[i].metrics.pc);
    EXPECT_EQ(back[i].metrics.pb, records[i].metrics.pb);
    EXPECT_EQ(back[i].metrics.gf, records[i].metrics.gf);
    EXPECT_EQ(back[i].generations, records[i].generations);
    EXPECT_EQ(back[i].evaluations, records[i].evaluations);
    EXPECT_EQ(back[i].time_s, records[i].time_s);
  }
  std::ostringstream again;
  write_csv(again, back);
  EXPECT_EQ(again.str(), out.str());
}

TEST(Csv, RejectsBadInput) {
  std::istringstream empty("");
  EXPECT_THROW(read_csv(empty), DecodeError);
  std::istringstream wrong_header("a,b,c\n");
  EXPECT_THROW(read_csv(wrong_header), DecodeError);
  std::istringstream short_row(std::string(kCsvHeader) + "\nx,1,2\n");
  EXPECT_THROW(read_csv(short_row), DecodeError);
  EXPECT_THROW(csv_split("\"open"), DecodeError);
}

TEST(Aggregate, SimpleArithmetic) {
  const AggregateReport rep = aggregate({record_with(10, 1), record_with(20, 2), record_with(30, 3)});
  EXPECT_EQ(rep.gf.mean, 2.0);
  EXPECT_EQ(rep.gf.median, 2.0);
  EXPECT_EQ(rep.gf.min, 1.0);
  EXPECT_EQ(rep.gf.max, 3.0);
  EXPECT_EQ(rep.pr.mean, 20.0);
  EXPECT_EQ(rep.runs, 3u);
  EXPECT_EQ(rep.gf_infinite, 0u);
}

TEST(Aggregate, EvenCountMedianAveragesMiddlePair) {
  const Summary s = summarize({4, 1, 3, 2});
  EXPECT_EQ(s.median, 2.5);
}

TEST(Aggregate, InfiniteGfExcludedAndCounted) {
  const double inf = std::numeric_limits<double>::infinity();
  const AggregateReport rep = aggregate({record_with(100, inf), record_with(90, 4), record_with(80, 2)});
  EXPECT_EQ(rep.gf_infinite, 1u);
  EXPECT_EQ(rep.gf.count, 2u);
  EXPECT_EQ(rep.gf.max, 4.0);
  EXPECT_EQ(rep.pr.count, 3u);
  EXPECT_NE(format_report(rep).find("1 with infinite GF"), std::string::npos);
}

TEST(Aggregate, OrderingInvariant) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int n = 1; n < 30; ++n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(u(gen));
    const Summary s = summarize(v);
    EXPECT_LE(s.min, s.median);
    EXPECT_LE(s.median, s.max);
    EXPECT_LE(s.min, s.mean);
    EXPECT_LE(s.mean, s.max);
  }
}

TEST(Aggregate, RecomputedFromCsvMatches) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<RunRecord> records;
  for (int i = 0; i < 25; ++i) records.push_back(record_with(u(gen) * 100, u(gen) * 20, u(gen)));
  std::ostringstream out;
  write_csv(out, records);
  std::istringstream in(out.str());
  const AggregateReport a = aggregate(records);
  const AggregateReport b = aggregate(read_csv(in));
  for (auto [x, y] : {std::pair{a.pr, b.pr}, {a.gf, b.gf}, {a.time, b.time}}) {
    EXPECT_NEAR(x.mean, y.mean, 1e-9);
    EXPECT_NEAR(x.median, y.median, 1e-9);
    EXPECT_NEAR(x.min, y.min, 1e-9);
    EXPECT_NEAR(x.max, y.max, 1e-9);
  }
}

TEST(Report, TableLayout) {
  const std::string text = format_report(aggregate({record_with(10, 1, 0.5), record_with(30, 3, 1.5)}));
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "                PR        PG        PC        PB        GF  Time (s)");
  std::getline(in, line);
  EXPECT_EQ(line, "Mean         20.00      0.00      0.00      0.00      2.00      1.00");
  for (const char* row : {"Median", "Min", "Max"}) {
    std::getline(in, line);
    EXPECT_EQ(line.rfind(row, 0), 0u) << line;
  }
  std::getline(in, line);
  EXPECT_EQ(line, "runs: 2");
}

}  // namespace
}  // namespace pcfit
