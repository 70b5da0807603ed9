#include "cojump/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace cojump {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

// "# cojump paths v1 key=value key=value"
std::map<std::string, std::string> parse_meta(const std::string& line) {
  std::map<std::string, std::string> meta;
  std::istringstream in(line.substr(1));
  for (std::string tok; in >> tok;) {
    const auto eq = tok.find('=');
    if (eq != std::string::npos) meta[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return meta;
}

const std::array<const char*, 6> kTruthColumns = {"d1", "d2", "j1a", "j1b", "j2a", "j2b"};

std::string optional_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string{};
}

}  // namespace

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

double parse_number(std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw DataError(fmt::format("'{}' is not a number", text));
  }
  return v;
}

PathTable PathTable::from_path(const PathPair& path, bool with_truth) {
  PathTable t;
  t.meta["seed"] = std::to_string(path.seed);
  t.meta["path_index"] = std::to_string(path.path_index);
  t.meta["n"] = std::to_string(path.steps);
  t.meta["T"] = format_number(path.horizon);
  t.meta["h"] = format_number(path.step);
  t.meta["integrated_cov"] = format_number(path.integrated_covariation);
  t.meta["cojump_sum"] = format_number(path.cojump_sum);
  t.meta["cutoff"] = path.cutoff ? format_number(*path.cutoff) : "none";
  t.time = path.time;
  t.level = path.level;
  t.has_truth = with_truth;
  if (with_truth) t.truth = path.truth;
  return t;
}

IncrementPair PathTable::increments() const {
  if (time.size() < 2) throw DataError("paths table needs at least 2 rows");
  std::array<std::vector<double>, 2> dx;
  for (int q = 0; q < 2; ++q) {
    for (std::size_t k = 1; k < level[q].size(); ++k) dx[q].push_back(level[q][k] - level[q][k - 1]);
  }
  double h = 0.0;
  if (const auto it = meta.find("h"); it != meta.end()) {
    h = parse_number(it->second);
  } else {
    h = (time.back() - time.front()) / static_cast<double>(time.size() - 1);
  }
  return IncrementPair(h, std::move(dx[0]), std::move(dx[1]));
}

std::string paths_to_csv(const PathTable& table) {
  std::string out = "# cojump paths v1";
  for (const auto& [k, v] : table.meta) out += " " + k + "=" + v;
  out += "\ntime,x1,x2";
  if (table.has_truth) {
    for (const char* c : kTruthColumns) out += std::string(",") + c;
  }
  out += "\n";
  for (std::size_t k = 0; k < table.time.size(); ++k) {
    out += format_number(table.time[k]) + "," + format_number(table.level[0][k]) + "," +
           format_number(table.level[1][k]);
    if (table.has_truth) {
      out += "," + format_number(table.truth[0].diffusion[k]) + "," +
             format_number(table.truth[1].diffusion[k]) + "," +
             format_number(table.truth[0].fa_jumps[k]) + "," +
             format_number(table.truth[1].fa_jumps[k]) + "," +
             format_number(table.truth[0].ia_jumps[k]) + "," +
             format_number(table.truth[1].ia_jumps[k]);
    }
    out += "\n";
  }
  return out;
}

PathTable paths_from_csv(const std::string& text) {
  PathTable t;
  const auto lines = lines_of(text);
  std::size_t i = 0;
  for (; i < lines.size() && !lines[i].empty() && lines[i][0] == '#'; ++i) {
    for (auto& [k, v] : parse_meta(lines[i])) t.meta[k] = v;
  }
  if (i >= lines.size()) throw DataError("paths CSV: missing header row");
  const auto header = split_csv(lines[i++]);
  if (header.size() < 3 || header[0] != "time" || header[1] != "x1" || header[2] != "x2") {
    throw DataError("paths CSV: header must start with time,x1,x2");
  }
  if (header.size() == 9) {
    for (std::size_t c = 0; c < kTruthColumns.size(); ++c) {
      if (header[3 + c] != kTruthColumns[c]) {
        throw DataError(fmt::format("paths CSV: unexpected column '{}'", header[3 + c]));
      }
    }
    t.has_truth = true;
  } else if (header.size() != 3) {
    throw DataError("paths CSV: expected 3 or 9 columns");
  }
  std::array<std::vector<double>*, 9> cols = {
      &t.time,
      &t.level[0],
      &t.level[1],
      &t.truth[0].diffusion,
      &t.truth[1].diffusion,
      &t.truth[0].fa_jumps,
      &t.truth[1].fa_jumps,
      &t.truth[0].ia_jumps,
      &t.truth[1].ia_jumps};
  for (; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto cells = split_csv(lines[i]);
    if (cells.size() != header.size()) {
      throw DataError(fmt::format("paths CSV line {}: expected {} fields, got {}", i + 1,
                                  header.size(), cells.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) cols[c]->push_back(parse_number(cells[c]));
  }
  if (t.time.size() < 2) throw DataError("paths CSV: need at least 2 rows");
  for (std::size_t k = 1; k < t.time.size(); ++k) {
    if (!(t.time[k] > t.time[k - 1])) {
      throw DataError(fmt::format("paths CSV: time not increasing at row {}", k + 1));
    }
  }
  return t;
}

std::string increments_to_csv(const IncrementPair& inc) {
  std::string out = "# h=" + format_number(inc.step()) + "\ndx1,dx2\n";
  for (std::size_t j = 0; j < inc.size(); ++j) {
    out += format_number(inc.first()[j]) + "," + format_number(inc.second()[j]) + "\n";
  }
  return out;
}

IncrementPair increments_from_csv(const std::string& text) {
  const auto lines = lines_of(text);
  std::optional<double> h;
  std::size_t i = 0;
  for (; i < lines.size() && !lines[i].empty() && lines[i][0] == '#'; ++i) {
    const auto meta = parse_meta(lines[i]);
    if (const auto it = meta.find("h"); it != meta.end()) h = parse_number(it->second);
  }
  if (!h) throw DataError("increments CSV: missing '# h=<value>' line");
  if (i >= lines.size() || lines[i] != "dx1,dx2") {
    throw DataError("increments CSV: header must be dx1,dx2");
  }
  std::vector<double> dx1;
  std::vector<double> dx2;
  for (++i; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto cells = split_csv(lines[i]);
    if (cells.size() != 2) throw DataError(fmt::format("increments CSV line {}: need 2 fields", i + 1));
    dx1.push_back(parse_number(cells[0]));
    dx2.push_back(parse_number(cells[1]));
  }
  try {
    return IncrementPair(*h, std::move(dx1), std::move(dx2));
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
}

std::string report_to_csv(const EstimatorReport& r) {
  std::string out =
      "steps,step,threshold1,threshold2,realized_cov,v11,v22,w,cojump_sum,cojump_intervals,"
      "truth,nb,nb_degenerate,r,l,v_rl\n";
  out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.steps, format_number(r.step),
                     format_number(r.threshold_used.first), format_number(r.threshold_used.second),
                     format_number(r.realized_cov), format_number(r.v11), format_number(r.v22),
                     format_number(r.w), format_number(r.cojump_sum), r.cojump_intervals.size(),
                     optional_number(r.truth), optional_number(r.nb),
                     r.nb_degenerate ? "true" : "false",
                     r.extra ? std::to_string(r.extra->r) : std::string{},
                     r.extra ? std::to_string(r.extra->l) : std::string{},
                     r.extra ? format_number(r.extra->value) : std::string{});
  return out;
}

std::string report_to_json(const EstimatorReport& r) {
  // Numbers go through format_number so the text is identical across runs.
  nlohmann::ordered_json j;
  j["steps"] = r.steps;
  j["step"] = format_number(r.step);
  j["threshold"] = {format_number(r.threshold_used.first), format_number(r.threshold_used.second)};
  j["realized_cov"] = format_number(r.realized_cov);
  j["v11"] = format_number(r.v11);
  j["v22"] = format_number(r.v22);
  j["w"] = format_number(r.w);
  j["cojump_sum"] = format_number(r.cojump_sum);
  j["truth"] = r.truth ? nlohmann::ordered_json(format_number(*r.truth)) : nlohmann::ordered_json();
  j["nb"] = r.nb ? nlohmann::ordered_json(format_number(*r.nb)) : nlohmann::ordered_json();
  j["nb_degenerate"] = r.nb_degenerate;
  if (r.extra) {
    j["v_rl"] = {{"r", r.extra->r}, {"l", r.extra->l}, {"value", format_number(r.extra->value)}};
  }
  auto& intervals = j["cojump_intervals"] = nlohmann::ordered_json::array();
  for (const auto& c : r.cojump_intervals) {
    intervals.push_back({{"index", c.index}, {"product", format_number(c.product)}});
  }
  return j.dump(2) + "\n";
}

std::string rungs_to_csv(const ExperimentReport& report) {
  std::vector<std::string> names;
  for (const auto& rung : report.rungs) {
    for (const auto& m : rung.metrics) {
      if (std::find(names.begin(), names.end(), m.name) == names.end()) names.push_back(m.name);
    }
  }
  std::string out = "steps,step,threshold,replications";
  for (const auto& n : names) out += "," + n;
  out += "\n";
  for (const auto& rung : report.rungs) {
    out += fmt::format("{},{},{},{}", rung.steps, format_number(rung.step),
                       format_number(rung.threshold), rung.replications);
    for (const auto& n : names) {
      const double v = rung.metric(n);
      out += "," + (std::isnan(v) ? std::string{} : format_number(v));
    }
    out += "\n";
  }
  return out;
}

std::string fits_to_csv(const ExperimentReport& report) {
  std::string out = "quantity,slope,slope_se,half_width,intercept,r_squared,target,tolerance,passed\n";
  for (const auto& f : report.fits) {
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", f.quantity, format_number(f.fit.slope),
                       format_number(f.fit.slope_std_error), format_number(f.fit.half_width),
                       format_number(f.fit.intercept), format_number(f.fit.r_squared),
                       optional_number(f.target), format_number(f.tolerance),
                       f.passed ? "true" : "false");
  }
  return out;
}

std::string experiment_summary(const ExperimentReport& report) {
  std::string out = fmt::format("experiment {}\n", to_string(report.kind));
  for (const auto& rung : report.rungs) {
    out += fmt::format("rung n={} h={:.6g} r_h={:.6g} M={}\n", rung.steps, rung.step,
                       rung.threshold, rung.replications);
    for (const auto& m : rung.metrics) out += fmt::format("  {} = {:.6g}\n", m.name, m.value);
  }
  for (const auto& f : report.fits) {
    out += fmt::format("fit {}: slope {:.4f} +/- {:.4f} (95%), R^2 {:.4f}", f.quantity,
                       f.fit.slope, f.fit.half_width, f.fit.r_squared);
    if (f.target) out += fmt::format(", target {:.4f} +/- {:.2f}", *f.target, f.tolerance);
    out += "\n";
  }
  if (report.degenerate_total > 0) {
    out += fmt::format("degenerate denominators excluded: {}\n", report.degenerate_total);
  }
  for (const auto& n : report.notes) out += "note: " + n + "\n";
  for (const auto& c : report.checks) {
    out += fmt::format("{} {}{} ({})\n", c.passed ? "PASS" : "FAIL", c.name,
                       c.exploratory ? " [exploratory]" : "", c.detail);
  }
  out += fmt::format("overall {}\n", report.all_passed() ? "PASS" : "FAIL");
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError(fmt::format("cannot write '{}'", tmp.string()));
    out << contents;
    out.flush();
    if (!out) throw DataError(fmt::format("write failed for '{}'", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace cojump
