#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>

#include "cojump/csv_io.hpp"
#include "cojump/manifest.hpp"

using namespace cojump;

namespace {

PathPair sample_path() {
  ModelSpec m;
  m.coefficients.corr = ConstantPath{0.3};
  m.fa_jumps[0] = FiniteActivityJumpSpec(4.0, NormalJumpSize{0.0, 0.3});
  m.ia_jumps[0] = InfiniteActivityJumpSpec(0.5, 0.7);
  m.ia_jumps[1] = InfiniteActivityJumpSpec(0.5, 1.1);
  m.copula = CopulaSpec(0.4);
  m.initial = {100.0, 50.0};
  SimConfig c;
  c.steps = 200;
  c.seed = 8;
  c.cutoff = ExplicitCutoff{1e-3};
  return assemble_paths(m, c);
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "cojump_csv_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Numbers, RoundTripAtFullPrecision) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint64_t> bits;
  int checked = 0;
  while (checked < 10000) {
    const double v = std::bit_cast<double>(bits(rng));
    if (!std::isfinite(v)) continue;
    EXPECT_EQ(std::bit_cast<std::uint64_t>(parse_number(format_number(v))),
              std::bit_cast<std::uint64_t>(v));
    ++checked;
  }
  for (double v : {0.0, -0.0, 1e-310, std::numeric_limits<double>::max(), 0.1}) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(parse_number(format_number(v))),
              std::bit_cast<std::uint64_t>(v));
  }
  EXPECT_THROW(parse_number("1.5x"), DataError);
  EXPECT_THROW(parse_number(""), DataError);
}

TEST(PathsCsv, RoundTripWithAndWithoutTruth) {
  const PathPair path = sample_path();
  for (bool truth : {false, true}) {
    const PathTable table = PathTable::from_path(path, truth);
    EXPECT_EQ(table.has_truth, truth);
    const std::string text = paths_to_csv(table);
    const PathTable back = paths_from_csv(text);
    EXPECT_EQ(back, table);
    EXPECT_EQ(paths_to_csv(back), text);
    EXPECT_EQ(back.increments(), increments_of(path));
  }
}

TEST(PathsCsv, HeaderCarriesMetadata) {
  const PathTable table = PathTable::from_path(sample_path(), false);
  const std::string text = paths_to_csv(table);
  EXPECT_EQ(text.rfind("# cojump paths v1", 0), 0u);
  EXPECT_EQ(table.meta.at("seed"), "8");
  EXPECT_EQ(table.meta.at("n"), "200");
  EXPECT_NE(text.find("\ntime,x1,x2\n"), std::string::npos);
}

TEST(PathsCsv, MalformedInput) {
  EXPECT_THROW(paths_from_csv(""), DataError);
  EXPECT_THROW(paths_from_csv("t,x1,x2\n0,1,2\n1,1,2\n"), DataError);
  EXPECT_THROW(paths_from_csv("time,x1,x2\n0,1,2\n"), DataError);
  EXPECT_THROW(paths_from_csv("time,x1,x2\n0,1,2\n1,1\n"), DataError);
  EXPECT_THROW(paths_from_csv("time,x1,x2\n0,1,2\n1,1,abc\n"), DataError);
  EXPECT_THROW(paths_from_csv("time,x1,x2,d1\n0,1,2,3\n1,1,2,3\n"), DataError);
  EXPECT_THROW(paths_from_csv("time,x1,x2\n0,1,2\n0,1,2\n"), DataError);
  EXPECT_NO_THROW(paths_from_csv("time,x1,x2\n0,1,2\n1,1,2\n"));
}

TEST(IncrementsCsv, RoundTrip) {
  const IncrementPair inc = increments_of(sample_path());
  const std::string text = increments_to_csv(inc);
  EXPECT_EQ(text.rfind("# h=", 0), 0u);
  EXPECT_EQ(increments_from_csv(text), inc);
  EXPECT_THROW(increments_from_csv("dx1,dx2\n1,2\n"), DataError);
  EXPECT_THROW(increments_from_csv("# h=0.1\ndx,dy\n1,2\n"), DataError);
  EXPECT_THROW(increments_from_csv("# h=0.1\ndx1,dx2\n1\n"), DataError);
  EXPECT_THROW(increments_from_csv("# h=-1\ndx1,dx2\n1,2\n"), DataError);
}

TEST(ReportCsv, ColumnsAndJson) {
  const IncrementPair inc(1.0, {3.0, 0.1, 0.2}, {4.0, 0.1, -0.3});
  EstimatorReport r = estimate_all(inc, TruncationLevels::shared(1.0), 0.0);
  r.extra = ExtraMoment{2, 0, threshold_stat(inc, 2, 0, TruncationLevels::shared(1.0))};
  const std::string csv = report_to_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "steps,step,threshold1,threshold2,realized_cov,v11,v22,w,cojump_sum,"
            "cojump_intervals,truth,nb,nb_degenerate,r,l,v_rl");
  const std::string json = report_to_json(r);
  EXPECT_NE(json.find("\"cojump_intervals\""), std::string::npos);
  EXPECT_NE(json.find("12"), std::string::npos);
  EXPECT_EQ(report_to_json(r), json);
}

TEST(ExperimentOutputs, SummaryListsEveryCheck) {
  ExperimentReport report;
  report.kind = ExperimentKind::Normality;
  RungResult row;
  row.steps = 64;
  row.step = 1.0 / 64;
  row.threshold = 0.1;
  row.replications = 10;
  row.set("ks", 0.05);
  report.rungs.push_back(row);
  report.checks.push_back({"first", true, false, "ok"});
  report.checks.push_back({"second", false, true, "meh"});
  const std::string summary = experiment_summary(report);
  EXPECT_NE(summary.find("PASS first"), std::string::npos);
  EXPECT_NE(summary.find("FAIL second [exploratory]"), std::string::npos);
  EXPECT_NE(summary.find("overall PASS"), std::string::npos);
  const std::string rungs = rungs_to_csv(report);
  EXPECT_EQ(rungs.substr(0, rungs.find('\n')), "steps,step,threshold,replications,ks");
}

TEST(Files, AtomicWriteAndRead) {
  const auto path = scratch("atomic.txt");
  write_file_atomic(path, "hello\n");
  EXPECT_EQ(read_text_file(path), "hello\n");
  write_file_atomic(path, "again\n");
  EXPECT_EQ(read_text_file(path), "again\n");
  for (const auto& entry : std::filesystem::directory_iterator(path.parent_path())) {
    EXPECT_EQ(entry.path().extension() == ".tmp", false) << entry.path();
  }
  EXPECT_THROW(read_text_file(scratch("absent.txt")), DataError);
  EXPECT_THROW(write_file_atomic(scratch("no/such/dir/file.txt"), "x"), DataError);
}

TEST(Manifest, JsonRoundTrip) {
  RunManifest m;
  m.config_hash = "00000000deadbeef";
  m.seed = 42;
  m.tool_version = std::string(tool_version());
  m.timestamp = utc_timestamp();
  m.command = "cojump simulate --config m.cfg";
  m.outputs = {"a.csv", "a.csv.config.ini"};
  const RunManifest back = RunManifest::from_json(m.to_json());
  EXPECT_EQ(back.config_hash, m.config_hash);
  EXPECT_EQ(back.seed, 42u);
  EXPECT_EQ(back.outputs, m.outputs);
  EXPECT_EQ(back.timestamp, m.timestamp);
  EXPECT_EQ(m.timestamp.size(), 20u);  // YYYY-MM-DDTHH:MM:SSZ
  EXPECT_THROW(RunManifest::from_json("{"), DataError);

  const auto out = scratch("run.csv");
  m.outputs = {out.string()};
  EXPECT_EQ(write_manifest(m), std::filesystem::path(out.string() + ".manifest.json"));
  EXPECT_THROW(write_manifest(RunManifest{}), std::invalid_argument);
}
