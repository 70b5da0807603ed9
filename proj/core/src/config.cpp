#include "cojump/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace cojump {
namespace {

using boost::property_tree::ptree;

std::vector<std::string> split(const std::string& s, char sep = ' ') {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  if (sep == ' ') {
    while (in >> cur) out.push_back(cur);
  } else {
    while (std::getline(in, cur, sep)) out.push_back(cur);
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& raw, const std::string& where) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError(fmt::format("{}: '{}' is not a number", where, raw));
  }
  return v;
}

std::uint64_t to_uint(const std::string& raw, const std::string& where) {
  const std::string s = trim(raw);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError(fmt::format("{}: '{}' is not a non-negative integer", where, raw));
  }
  return v;
}

bool to_bool(const std::string& raw, const std::string& where) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", where, raw));
}

std::string num(double v) { return fmt::format("{}", v); }

// "0.3" or "table linear 0:0.2 1:0.4"
TimeFunction parse_time_function(const std::vector<std::string>& tok, const std::string& where) {
  if (tok.size() == 1) return ConstantPath{to_double(tok[0], where)};
  if (tok.size() >= 3 && tok[0] == "table") {
    TabulatedPath table;
    if (tok[1] == "linear") {
      table.mode = Interpolation::Linear;
    } else if (tok[1] == "step") {
      table.mode = Interpolation::Step;
    } else {
      throw ConfigError(fmt::format("{}: table mode must be linear or step", where));
    }
    for (std::size_t i = 2; i < tok.size(); ++i) {
      const auto colon = tok[i].find(':');
      if (colon == std::string::npos) {
        throw ConfigError(fmt::format("{}: table node '{}' needs time:value", where, tok[i]));
      }
      table.times.push_back(to_double(tok[i].substr(0, colon), where));
      table.values.push_back(to_double(tok[i].substr(colon + 1), where));
    }
    return table;
  }
  throw ConfigError(fmt::format("{}: expected a number or 'table <mode> t:v ...'", where));
}

std::string write_table(const TabulatedPath& t) {
  std::string out = t.mode == Interpolation::Linear ? "table linear" : "table step";
  for (std::size_t i = 0; i < t.times.size(); ++i) {
    out += fmt::format(" {}:{}", t.times[i], t.values[i]);
  }
  return out;
}

std::string write_time_function(const TimeFunction& f) {
  if (const auto* c = std::get_if<ConstantPath>(&f)) return num(c->value);
  return write_table(std::get<TabulatedPath>(f));
}

VolatilitySpec parse_vol(const std::string& raw, const std::string& where) {
  const auto tok = split(raw);
  if (!tok.empty() && tok[0] == "cir") {
    if (tok.size() != 5) throw ConfigError(where + ": 'cir kappa theta xi v0'");
    return SquareRootVariance{to_double(tok[1], where), to_double(tok[2], where),
                              to_double(tok[3], where), to_double(tok[4], where)};
  }
  const TimeFunction f = parse_time_function(tok, where);
  if (const auto* c = std::get_if<ConstantPath>(&f)) return *c;
  return std::get<TabulatedPath>(f);
}

std::string write_vol(const VolatilitySpec& v) {
  if (const auto* c = std::get_if<ConstantPath>(&v)) return num(c->value);
  if (const auto* t = std::get_if<TabulatedPath>(&v)) return write_table(*t);
  const auto& s = std::get<SquareRootVariance>(v);
  return fmt::format("cir {} {} {} {}", s.kappa, s.theta, s.xi, s.v0);
}

JumpSizeLaw parse_size_law(const std::string& raw, const std::string& where) {
  const auto tok = split(raw);
  if (tok.size() == 3 && tok[0] == "normal") {
    return NormalJumpSize{to_double(tok[1], where), to_double(tok[2], where)};
  }
  if (tok.size() == 4 && tok[0] == "uniform") {
    return UniformMagnitudeJumpSize{to_double(tok[1], where), to_double(tok[2], where),
                                    to_double(tok[3], where)};
  }
  if (tok.size() == 2 && tok[0] == "fixed") return FixedJumpSize{to_double(tok[1], where)};
  throw ConfigError(where + ": expected 'normal m s', 'uniform lo hi p' or 'fixed v'");
}

std::string write_size_law(const JumpSizeLaw& law) {
  if (const auto* n = std::get_if<NormalJumpSize>(&law)) {
    return fmt::format("normal {} {}", n->mean, n->stddev);
  }
  if (const auto* u = std::get_if<UniformMagnitudeJumpSize>(&law)) {
    return fmt::format("uniform {} {} {}", u->low, u->high, u->prob_positive);
  }
  return fmt::format("fixed {}", std::get<FixedJumpSize>(law).size);
}

CutoffPolicy parse_cutoff(const std::string& raw, const std::string& where) {
  const auto tok = split(raw);
  if (tok.size() == 2 && tok[0] == "delta") return ResidualVarianceFraction{to_double(tok[1], where)};
  if (tok.size() == 2 && tok[0] == "epsilon") return ExplicitCutoff{to_double(tok[1], where)};
  throw ConfigError(where + ": expected 'delta <fraction>' or 'epsilon <size>'");
}

std::string write_cutoff(const CutoffPolicy& p) {
  if (const auto* d = std::get_if<ResidualVarianceFraction>(&p)) return "delta " + num(d->delta);
  return "epsilon " + num(std::get<ExplicitCutoff>(p).epsilon);
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"model", {"horizon", "x0_1", "x0_2", "shared_fa_clock"}},
      {"coefficients", {"drift1", "drift2", "vol1", "vol2", "corr"}},
      {"fa1", {"intensity", "size"}},
      {"fa2", {"intensity", "size"}},
      {"ia1", {"scale", "alpha", "negative_scale", "negative_alpha"}},
      {"ia2", {"scale", "alpha", "negative_scale", "negative_alpha"}},
      {"copula", {"gamma"}},
      {"forced_jumps", {}},
      {"threshold", {"coeff", "beta"}},
      {"simulation", {"n", "seed", "cutoff", "max_expected_ia_jumps"}},
      {"experiment", {"kind", "ladder", "replications", "parallel", "ks_limit"}},
  };
  return keys;
}

// Read-only view of one INI section; absent sections yield no keys.
class Section {
 public:
  Section(const ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  [[nodiscard]] bool present() const { return tree_ != nullptr; }

  [[nodiscard]] std::optional<std::string> get(const std::string& key) const {
    if (!tree_) return std::nullopt;
    const auto child = tree_->get_optional<std::string>(ptree::path_type(key, '\0'));
    if (!child) return std::nullopt;
    return trim(*child);
  }

  [[nodiscard]] std::string where(const std::string& key) const { return name_ + "." + key; }

 private:
  const ptree* tree_;
  std::string name_;
};

std::optional<InfiniteActivityJumpSpec> parse_ia(const Section& s) {
  if (!s.present()) return std::nullopt;
  const auto scale = s.get("scale");
  const auto alpha = s.get("alpha");
  if (!scale || !alpha) throw ConfigError(s.where("scale/alpha") + ": both are required");
  std::optional<PowerLawTail> negative;
  const auto ns = s.get("negative_scale");
  const auto na = s.get("negative_alpha");
  if (ns || na) {
    if (!ns || !na) {
      throw ConfigError(s.where("negative_scale/negative_alpha") + ": give both or neither");
    }
    negative = PowerLawTail{to_double(*ns, s.where("negative_scale")),
                            to_double(*na, s.where("negative_alpha"))};
  }
  return InfiniteActivityJumpSpec(to_double(*scale, s.where("scale")),
                                  to_double(*alpha, s.where("alpha")), negative);
}

std::optional<FiniteActivityJumpSpec> parse_fa(const Section& s) {
  if (!s.present()) return std::nullopt;
  const auto intensity = s.get("intensity");
  const auto size = s.get("size");
  if (!intensity || !size) throw ConfigError(s.where("intensity/size") + ": both are required");
  return FiniteActivityJumpSpec(to_double(*intensity, s.where("intensity")),
                                parse_size_law(*size, s.where("size")));
}

RunConfig from_tree(const ptree& root) {
  for (const auto& [name, section] : root) {
    const auto it = schema().find(name);
    if (it == schema().end()) throw ConfigError(fmt::format("unknown section [{}]", name));
    if (!section.data().empty() && section.empty()) {
      throw ConfigError(fmt::format("key '{}' outside any section", name));
    }
    if (name == "forced_jumps") continue;
    for (const auto& [key, value] : section) {
      if (!it->second.count(key)) {
        throw ConfigError(fmt::format("unknown key '{}' in [{}]", key, name));
      }
    }
  }
  auto section = [&](const std::string& name) {
    const auto child = root.get_child_optional(ptree::path_type(name, '\0'));
    return Section(child ? &*child : nullptr, name);
  };

  RunConfig out;
  ModelSpec& m = out.model;
  // Invariant failures from constructors surface as ConfigError with context.
  try {
    const Section model = section("model");
    if (auto v = model.get("horizon")) m.horizon = to_double(*v, model.where("horizon"));
    if (auto v = model.get("x0_1")) m.initial[0] = to_double(*v, model.where("x0_1"));
    if (auto v = model.get("x0_2")) m.initial[1] = to_double(*v, model.where("x0_2"));
    if (auto v = model.get("shared_fa_clock")) {
      m.shared_fa_clock = to_bool(*v, model.where("shared_fa_clock"));
    }

    const Section coef = section("coefficients");
    for (int q = 0; q < 2; ++q) {
      const std::string d = fmt::format("drift{}", q + 1);
      const std::string v = fmt::format("vol{}", q + 1);
      if (auto raw = coef.get(d)) m.coefficients.drift[q] = parse_time_function(split(*raw), coef.where(d));
      if (auto raw = coef.get(v)) m.coefficients.vol[q] = parse_vol(*raw, coef.where(v));
    }
    if (auto raw = coef.get("corr")) {
      m.coefficients.corr = parse_time_function(split(*raw), coef.where("corr"));
    }

    m.fa_jumps[0] = parse_fa(section("fa1"));
    m.fa_jumps[1] = parse_fa(section("fa2"));
    m.ia_jumps[0] = parse_ia(section("ia1"));
    m.ia_jumps[1] = parse_ia(section("ia2"));
    const Section copula = section("copula");
    if (auto v = copula.get("gamma")) m.copula = CopulaSpec(to_double(*v, copula.where("gamma")));

    if (const auto forced = root.get_child_optional("forced_jumps")) {
      // Keys only name the entries; jumps are kept in time order.
      for (const auto& [key, value] : *forced) {
        const auto parts = split(value.data(), ',');
        const std::string where = "forced_jumps." + key;
        if (parts.size() != 3) throw ConfigError(where + ": expected 'time,size1,size2'");
        m.forced_jumps.push_back({to_double(parts[0], where), to_double(parts[1], where),
                                  to_double(parts[2], where)});
      }
      std::stable_sort(m.forced_jumps.begin(), m.forced_jumps.end(),
                       [](const ForcedJump& a, const ForcedJump& b) { return a.time < b.time; });
    }

    const Section thr = section("threshold");
    double coeff = 1.0;
    double beta = 0.9;
    if (auto v = thr.get("coeff")) coeff = to_double(*v, thr.where("coeff"));
    if (auto v = thr.get("beta")) beta = to_double(*v, thr.where("beta"));
    out.threshold = ThresholdRule(coeff, beta);

    const Section sim = section("simulation");
    if (auto v = sim.get("n")) out.simulation.steps = to_uint(*v, sim.where("n"));
    if (auto v = sim.get("seed")) out.simulation.seed = to_uint(*v, sim.where("seed"));
    if (auto v = sim.get("cutoff")) out.simulation.cutoff = parse_cutoff(*v, sim.where("cutoff"));
    if (auto v = sim.get("max_expected_ia_jumps")) {
      out.simulation.max_expected_ia_jumps = to_double(*v, sim.where("max_expected_ia_jumps"));
    }

    const Section exp = section("experiment");
    if (auto v = exp.get("kind")) out.experiment = parse_experiment_kind(*v);
    if (auto v = exp.get("ladder")) {
      for (const auto& tok : split(*v)) out.n_ladder.push_back(to_uint(tok, exp.where("ladder")));
    }
    if (auto v = exp.get("replications")) {
      out.replications = to_uint(*v, exp.where("replications"));
    }
    if (auto v = exp.get("parallel")) out.parallel = to_bool(*v, exp.where("parallel"));
    if (auto v = exp.get("ks_limit")) out.ks_limit = to_double(*v, exp.where("ks_limit"));

    m.validate();
    out.simulation.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return out;
}

}  // namespace

ExperimentPlan RunConfig::plan() const {
  ExperimentPlan p;
  p.kind = experiment;
  p.model = model;
  p.rule = threshold;
  p.n_ladder = n_ladder.empty() ? std::vector<std::size_t>{simulation.steps} : n_ladder;
  p.replications = replications;
  p.seed = simulation.seed;
  p.cutoff = simulation.cutoff;
  p.parallel = parallel;
  p.ks_limit = ks_limit;
  return p;
}

RunConfig parse_config(const std::string& text) {
  ptree root;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, root);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
  }
  return from_tree(root);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config '{}'", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string canonical_text(const RunConfig& c) {
  const ModelSpec& m = c.model;
  std::string out;
  auto line = [&out](const std::string& key, const std::string& value) {
    out += key + " = " + value + "\n";
  };
  out += "[model]\n";
  line("horizon", num(m.horizon));
  line("x0_1", num(m.initial[0]));
  line("x0_2", num(m.initial[1]));
  line("shared_fa_clock", m.shared_fa_clock ? "true" : "false");
  out += "\n[coefficients]\n";
  line("drift1", write_time_function(m.coefficients.drift[0]));
  line("drift2", write_time_function(m.coefficients.drift[1]));
  line("vol1", write_vol(m.coefficients.vol[0]));
  line("vol2", write_vol(m.coefficients.vol[1]));
  line("corr", write_time_function(m.coefficients.corr));
  for (int q = 0; q < 2; ++q) {
    if (!m.fa_jumps[q]) continue;
    out += fmt::format("\n[fa{}]\n", q + 1);
    line("intensity", num(m.fa_jumps[q]->intensity()));
    line("size", write_size_law(m.fa_jumps[q]->size_law()));
  }
  for (int q = 0; q < 2; ++q) {
    if (!m.ia_jumps[q]) continue;
    out += fmt::format("\n[ia{}]\n", q + 1);
    line("scale", num(m.ia_jumps[q]->scale()));
    line("alpha", num(m.ia_jumps[q]->alpha()));
    if (const auto& neg = m.ia_jumps[q]->negative()) {
      line("negative_scale", num(neg->scale));
      line("negative_alpha", num(neg->alpha));
    }
  }
  out += "\n[copula]\n";
  line("gamma", num(m.copula.gamma()));
  if (!m.forced_jumps.empty()) {
    out += "\n[forced_jumps]\n";
    for (std::size_t i = 0; i < m.forced_jumps.size(); ++i) {
      const auto& f = m.forced_jumps[i];
      line(fmt::format("jump{}", i + 1), fmt::format("{},{},{}", f.time, f.size1, f.size2));
    }
  }
  out += "\n[threshold]\n";
  line("coeff", num(c.threshold.coeff()));
  line("beta", num(c.threshold.beta()));
  out += "\n[simulation]\n";
  line("n", fmt::format("{}", c.simulation.steps));
  line("seed", fmt::format("{}", c.simulation.seed));
  line("cutoff", write_cutoff(c.simulation.cutoff));
  line("max_expected_ia_jumps", num(c.simulation.max_expected_ia_jumps));
  out += "\n[experiment]\n";
  line("kind", std::string(to_string(c.experiment)));
  std::string ladder;
  for (std::size_t i = 0; i < c.n_ladder.size(); ++i) {
    ladder += (i ? " " : "") + std::to_string(c.n_ladder[i]);
  }
  if (!ladder.empty()) line("ladder", ladder);
  line("replications", std::to_string(c.replications));
  line("parallel", c.parallel ? "true" : "false");
  if (c.ks_limit) line("ks_limit", num(*c.ks_limit));
  return out;
}

std::uint64_t config_hash(const RunConfig& config) {
  std::vector<std::string> lines;
  std::string section;
  std::istringstream in(canonical_text(config));
  for (std::string raw; std::getline(in, raw);) {
    if (raw.empty()) continue;
    if (raw.front() == '[') {
      section = raw.substr(1, raw.size() - 2);
      continue;
    }
    lines.push_back(section + "." + raw);
  }
  std::sort(lines.begin(), lines.end());
  std::uint64_t h = 14695981039346656037ULL;
  for (const auto& l : lines) {
    for (unsigned char ch : l + "\n") {
      h ^= ch;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

std::string hash_hex(std::uint64_t hash) { return fmt::format("{:016x}", hash); }

}  // namespace cojump
