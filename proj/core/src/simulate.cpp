#include "cojump/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "cojump/numeric.hpp"

namespace cojump {
namespace {

enum Purpose : std::uint64_t {
  kBrownian = 1,
  kVariance1 = 2,
  kVariance2 = 3,
  kFiniteJumps1 = 4,
  kFiniteJumps2 = 5,
  kSmallJumps = 6,
};

double uniform_time(double horizon, Rng& rng) {
  // (0, T]
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double t = 0.0;
  while (!(t > 0.0)) t = horizon * (1.0 - unit(rng));
  return std::min(t, horizon);
}

std::int64_t poisson_count(double mean, Rng& rng) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<std::int64_t> dist(mean);
  return dist(rng);
}

const PowerLawTail* branch_of(const std::optional<InfiniteActivityJumpSpec>& spec, bool positive) {
  if (!spec) return nullptr;
  if (positive) return &spec->positive();
  return spec->negative() ? &*spec->negative() : nullptr;
}

// Draws jumps for the tail-level interval [lo, hi) with the given Levy-level
// intensity; each level maps to per-component sizes inside (cutoff, 1].
class BranchSampler {
 public:
  BranchSampler(std::array<const PowerLawTail*, 2> tails, double cutoff, double sign,
                double horizon)
      : tails_(tails), cutoff_(cutoff), sign_(sign), horizon_(horizon) {
    for (int q = 0; q < 2; ++q) {
      if (tails_[q] == nullptr) continue;
      level_lo_[q] = tail_integral(*tails_[q], 1.0);
      level_hi_[q] = tail_integral(*tails_[q], cutoff_);
    }
  }

  [[nodiscard]] double expected_count(int q, double intensity) const {
    return intensity * (level_hi_[q] - level_lo_[q]) * horizon_;
  }

  void component_only(int q, double intensity, Rng& rng, IaSimulation& out) const {
    if (tails_[q] == nullptr || intensity <= 0.0) return;
    const std::int64_t count = poisson_count(expected_count(q, intensity), rng);
    std::uniform_real_distribution<double> level(level_lo_[q], level_hi_[q]);
    for (std::int64_t k = 0; k < count; ++k) {
      const double t = uniform_time(horizon_, rng);
      out.jumps[q].push_back({t, sign_ * size_at(q, level(rng))});
    }
  }

  void coupled(double intensity, Rng& rng, IaSimulation& out) const {
    if (intensity <= 0.0) return;
    const double lo = std::min(level_lo_[0], level_lo_[1]);
    const double hi = std::max(level_hi_[0], level_hi_[1]);
    const std::int64_t count = poisson_count(intensity * (hi - lo) * horizon_, rng);
    std::uniform_real_distribution<double> level(lo, hi);
    for (std::int64_t k = 0; k < count; ++k) {
      const double t = uniform_time(horizon_, rng);
      const double u = level(rng);
      const bool in1 = u >= level_lo_[0] && u < level_hi_[0];
      const bool in2 = u >= level_lo_[1] && u < level_hi_[1];
      double size1 = 0.0;
      double size2 = 0.0;
      if (in1) {
        size1 = sign_ * size_at(0, u);
        out.jumps[0].push_back({t, size1});
      }
      if (in2) {
        size2 = sign_ * size_at(1, u);
        out.jumps[1].push_back({t, size2});
      }
      if (in1 && in2) out.common.push_back({t, size1, size2});
    }
  }

 private:
  [[nodiscard]] double size_at(int q, double level) const {
    const double size = inverse_tail(*tails_[q], level);
    return std::clamp(size, std::nextafter(cutoff_, 1.0), 1.0);
  }

  std::array<const PowerLawTail*, 2> tails_;
  double cutoff_;
  double sign_;
  double horizon_;
  std::array<double, 2> level_lo_{0.0, 0.0};
  std::array<double, 2> level_hi_{0.0, 0.0};
};

std::vector<double> simulate_variance_path(const SquareRootVariance& cir, const Grid& grid,
                                           Rng& rng) {
  const double h = grid.step();
  const double sqrt_h = std::sqrt(h);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> sigma(grid.steps);
  double v = cir.v0;
  for (std::size_t j = 0; j < grid.steps; ++j) {
    const double vp = std::max(v, 0.0);
    sigma[j] = std::sqrt(vp);
    v += cir.kappa * (cir.theta - vp) * h + cir.xi * sigma[j] * sqrt_h * normal(rng);
  }
  return sigma;
}

std::vector<double> binned_sums(const std::vector<JumpEvent>& jumps, const Grid& grid) {
  std::vector<double> sums(grid.steps, 0.0);
  for (const auto& jump : jumps) sums[grid.bin(jump.time)] += jump.size;
  return sums;
}

std::vector<double> cumulative(const std::vector<double>& increments) {
  std::vector<double> levels(increments.size() + 1, 0.0);
  for (std::size_t j = 0; j < increments.size(); ++j) levels[j + 1] = levels[j] + increments[j];
  return levels;
}

double cojump_truth(const JumpLedger& ledger) {
  std::array<std::map<double, double>, 2> by_time;
  for (int q = 0; q < 2; ++q) {
    for (const auto& jump : ledger.fa[q]) by_time[q][jump.time] += jump.size;
    for (const auto& jump : ledger.ia[q]) by_time[q][jump.time] += jump.size;
  }
  numeric::Accumulator acc;
  for (const auto& [time, size] : by_time[0]) {
    const auto it = by_time[1].find(time);
    if (it != by_time[1].end()) acc.add(numeric::two_prod(size, it->second));
  }
  return acc.value();
}

void sort_by_time(std::vector<JumpEvent>& jumps) {
  std::stable_sort(jumps.begin(), jumps.end(),
                   [](const JumpEvent& a, const JumpEvent& b) { return a.time < b.time; });
}

}  // namespace

Rng make_stream(std::uint64_t seed, std::uint64_t path_index, std::uint64_t purpose) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(path_index), hi(path_index), lo(purpose), hi(purpose)};
  return Rng(seq);
}

void SimConfig::validate() const {
  if (steps < 2) throw std::invalid_argument("simulation: need at least 2 steps");
  if (const auto* fixed = std::get_if<ExplicitCutoff>(&cutoff)) {
    if (!(fixed->epsilon > 0.0 && fixed->epsilon < 1.0)) {
      throw std::invalid_argument("simulation: explicit cutoff must lie in (0, 1)");
    }
  } else {
    const double delta = std::get<ResidualVarianceFraction>(cutoff).delta;
    if (!(delta > 0.0 && delta < 1.0)) {
      throw std::invalid_argument("simulation: residual variance fraction must lie in (0, 1)");
    }
  }
  if (!(max_expected_ia_jumps > 0.0)) {
    throw std::invalid_argument("simulation: jump budget must be positive");
  }
}

std::optional<double> resolve_cutoff(const ModelSpec& model, const CutoffPolicy& policy) {
  if (!model.has_ia_jumps()) return std::nullopt;
  if (const auto* fixed = std::get_if<ExplicitCutoff>(&policy)) return fixed->epsilon;
  const double delta = std::get<ResidualVarianceFraction>(policy).delta;
  double eps = 1.0;
  for (const auto& spec : model.ia_jumps) {
    if (!spec) continue;
    eps = std::min(eps, std::pow(delta, 1.0 / (2.0 - spec->alpha())));
    if (spec->negative()) {
      eps = std::min(eps, std::pow(delta, 1.0 / (2.0 - spec->negative()->alpha)));
    }
  }
  return eps;
}

double Grid::time(std::size_t k) const {
  if (k >= steps) return horizon;
  return static_cast<double>(k) * step();
}

std::size_t Grid::bin(double t) const {
  const double index = std::ceil(t / step()) - 1.0;
  if (!(index > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(index), steps - 1);
}

BrownianIncrements simulate_brownian_pair(std::span<const double> corr, double h, Rng& rng) {
  if (!(h > 0.0)) throw std::invalid_argument("brownian pair: step must be positive");
  const double sqrt_h = std::sqrt(h);
  std::normal_distribution<double> normal(0.0, 1.0);
  BrownianIncrements out;
  out.first.resize(corr.size());
  out.second.resize(corr.size());
  for (std::size_t j = 0; j < corr.size(); ++j) {
    const double rho = corr[j];
    if (!(std::abs(rho) <= 1.0)) throw std::invalid_argument("brownian pair: |rho| > 1");
    const double dw1 = sqrt_h * normal(rng);
    const double dw3 = sqrt_h * normal(rng);
    out.first[j] = dw1;
    out.second[j] = rho * dw1 + std::sqrt(1.0 - rho * rho) * dw3;
  }
  return out;
}

std::vector<JumpEvent> simulate_fa_jumps(const FiniteActivityJumpSpec& spec, double horizon,
                                         Rng& rng) {
  std::vector<JumpEvent> jumps;
  const std::int64_t count = poisson_count(spec.intensity() * horizon, rng);
  jumps.reserve(static_cast<std::size_t>(count));
  for (std::int64_t k = 0; k < count; ++k) {
    const double t = uniform_time(horizon, rng);
    jumps.push_back({t, spec.sample_size(rng)});
  }
  sort_by_time(jumps);
  return jumps;
}

IaSimulation simulate_ia_jumps(const std::optional<InfiniteActivityJumpSpec>& spec1,
                               const std::optional<InfiniteActivityJumpSpec>& spec2,
                               const CopulaSpec& copula, double cutoff, const Grid& grid,
                               Rng& rng, double max_expected_jumps) {
  if (!(cutoff > 0.0 && cutoff < 1.0)) {
    throw std::invalid_argument("small jumps: cutoff must lie in (0, 1)");
  }
  double expected = 0.0;
  if (spec1) expected += band_mass(*spec1, cutoff, 1.0) * grid.horizon;
  if (spec2) expected += band_mass(*spec2, cutoff, 1.0) * grid.horizon;
  if (expected > max_expected_jumps) {
    throw std::domain_error("small jumps: cutoff implies too many jumps for the budget");
  }

  IaSimulation out;
  const double gamma = copula.gamma();
  for (const bool positive : {true, false}) {
    const std::array<const PowerLawTail*, 2> tails{branch_of(spec1, positive),
                                                   branch_of(spec2, positive)};
    if (tails[0] == nullptr && tails[1] == nullptr) continue;
    const BranchSampler sampler(tails, cutoff, positive ? 1.0 : -1.0, grid.horizon);
    if (tails[0] != nullptr && tails[1] != nullptr) {
      sampler.component_only(0, gamma, rng, out);
      sampler.component_only(1, gamma, rng, out);
      sampler.coupled(1.0 - gamma, rng, out);
    } else {
      sampler.component_only(tails[0] != nullptr ? 0 : 1, 1.0, rng, out);
    }
  }

  const double h = grid.step();
  const std::array<const std::optional<InfiniteActivityJumpSpec>*, 2> specs{&spec1, &spec2};
  for (int q = 0; q < 2; ++q) {
    sort_by_time(out.jumps[q]);
    out.increments[q] = binned_sums(out.jumps[q], grid);
    if (*specs[q]) {
      const double drift = compensator_mean(**specs[q], cutoff, h);
      for (double& x : out.increments[q]) x -= drift;
    }
  }
  std::stable_sort(out.common.begin(), out.common.end(),
                   [](const CommonJump& a, const CommonJump& b) { return a.time < b.time; });
  return out;
}

PathPair assemble_paths(const ModelSpec& model, const SimConfig& config) {
  model.validate();
  config.validate();
  const Grid grid{model.horizon, config.steps};
  const std::size_t n = grid.steps;
  const double h = grid.step();

  PathPair path;
  path.horizon = model.horizon;
  path.steps = n;
  path.step = h;
  path.seed = config.seed;
  path.path_index = config.path_index;
  path.time.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) path.time[k] = grid.time(k);

  // Coefficients at left endpoints.
  const auto& coeffs = model.coefficients;
  path.corr.resize(n);
  for (std::size_t j = 0; j < n; ++j) path.corr[j] = evaluate(coeffs.corr, path.time[j]);
  for (int q = 0; q < 2; ++q) {
    if (const auto* cir = std::get_if<SquareRootVariance>(&coeffs.vol[q])) {
      Rng rng = make_stream(config.seed, config.path_index, q == 0 ? kVariance1 : kVariance2);
      path.sigma[q] = simulate_variance_path(*cir, grid, rng);
    } else {
      const TimeFunction f = std::holds_alternative<ConstantPath>(coeffs.vol[q])
                                 ? TimeFunction{std::get<ConstantPath>(coeffs.vol[q])}
                                 : TimeFunction{std::get<TabulatedPath>(coeffs.vol[q])};
      path.sigma[q].resize(n);
      for (std::size_t j = 0; j < n; ++j) path.sigma[q][j] = evaluate(f, path.time[j]);
    }
  }

  // Diffusion parts.
  BrownianIncrements dw;
  if (!coeffs.volatility_identically_zero()) {
    Rng rng = make_stream(config.seed, config.path_index, kBrownian);
    dw = simulate_brownian_pair(path.corr, h, rng);
  }
  for (int q = 0; q < 2; ++q) {
    std::vector<double> dd(n);
    for (std::size_t j = 0; j < n; ++j) {
      dd[j] = evaluate(coeffs.drift[q], path.time[j]) * h;
      if (!dw.first.empty()) dd[j] += path.sigma[q][j] * (q == 0 ? dw.first[j] : dw.second[j]);
    }
    path.truth[q].diffusion = cumulative(dd);
  }

  // Finite-activity jumps.
  auto& ledger = path.ledger;
  if (model.shared_fa_clock) {
    Rng rng1 = make_stream(config.seed, config.path_index, kFiniteJumps1);
    Rng rng2 = make_stream(config.seed, config.path_index, kFiniteJumps2);
    ledger.fa[0] = simulate_fa_jumps(*model.fa_jumps[0], model.horizon, rng1);
    for (const auto& jump : ledger.fa[0]) {
      const double size2 = model.fa_jumps[1]->sample_size(rng2);
      ledger.fa[1].push_back({jump.time, size2});
      ledger.common_fa.push_back({jump.time, jump.size, size2});
    }
  } else {
    for (int q = 0; q < 2; ++q) {
      if (!model.fa_jumps[q]) continue;
      Rng rng = make_stream(config.seed, config.path_index, q == 0 ? kFiniteJumps1 : kFiniteJumps2);
      ledger.fa[q] = simulate_fa_jumps(*model.fa_jumps[q], model.horizon, rng);
    }
  }
  for (const auto& forced : model.forced_jumps) {
    if (forced.size1 != 0.0) ledger.fa[0].push_back({forced.time, forced.size1});
    if (forced.size2 != 0.0) ledger.fa[1].push_back({forced.time, forced.size2});
    if (forced.size1 != 0.0 && forced.size2 != 0.0) {
      ledger.common_fa.push_back({forced.time, forced.size1, forced.size2});
    }
  }
  for (auto& jumps : ledger.fa) sort_by_time(jumps);
  std::stable_sort(ledger.common_fa.begin(), ledger.common_fa.end(),
                   [](const CommonJump& a, const CommonJump& b) { return a.time < b.time; });
  for (int q = 0; q < 2; ++q) path.truth[q].fa_jumps = cumulative(binned_sums(ledger.fa[q], grid));

  // Infinite-activity jumps.
  path.cutoff = resolve_cutoff(model, config.cutoff);
  if (path.cutoff) {
    Rng rng = make_stream(config.seed, config.path_index, kSmallJumps);
    IaSimulation ia = simulate_ia_jumps(model.ia_jumps[0], model.ia_jumps[1], model.copula,
                                        *path.cutoff, grid, rng, config.max_expected_ia_jumps);
    for (int q = 0; q < 2; ++q) {
      ledger.ia[q] = std::move(ia.jumps[q]);
      path.truth[q].ia_jumps = cumulative(ia.increments[q]);
    }
    ledger.common_ia = std::move(ia.common);
  } else {
    for (int q = 0; q < 2; ++q) path.truth[q].ia_jumps.assign(n + 1, 0.0);
  }

  for (int q = 0; q < 2; ++q) {
    const auto& t = path.truth[q];
    path.level[q].resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
      path.level[q][k] = model.initial[q] + t.diffusion[k] + t.fa_jumps[k] + t.ia_jumps[k];
    }
  }

  numeric::Accumulator cov;
  for (std::size_t j = 0; j < n; ++j) {
    cov.add(path.corr[j] * path.sigma[0][j] * path.sigma[1][j] * h);
  }
  path.integrated_covariation = cov.value();
  path.cojump_sum = cojump_truth(ledger);
  return path;
}

IncrementPair increments_of(const PathPair& path) {
  std::array<std::vector<double>, 2> dx;
  for (int q = 0; q < 2; ++q) {
    dx[q].resize(path.steps);
    for (std::size_t j = 0; j < path.steps; ++j) {
      dx[q][j] = path.level[q][j + 1] - path.level[q][j];
    }
  }
  return IncrementPair(path.step, std::move(dx[0]), std::move(dx[1]));
}

IncrementPair ia_increments_of(const PathPair& path) {
  std::array<std::vector<double>, 2> dx;
  for (int q = 0; q < 2; ++q) {
    const auto& levels = path.truth[q].ia_jumps;
    dx[q].resize(path.steps);
    for (std::size_t j = 0; j < path.steps; ++j) dx[q][j] = levels[j + 1] - levels[j];
  }
  return IncrementPair(path.step, std::move(dx[0]), std::move(dx[1]));
}

std::vector<double> band_increments(const PathPair& path, const InfiniteActivityJumpSpec& spec,
                                    int component, double lo, double hi) {
  if (component < 0 || component > 1) throw std::invalid_argument("band: component is 0 or 1");
  if (!(lo > 0.0 && lo <= hi && hi <= 1.0)) {
    throw std::invalid_argument("band: need 0 < lo <= hi <= 1");
  }
  if (!path.cutoff || lo < *path.cutoff) {
    throw std::invalid_argument("band: lower edge below the simulated cutoff");
  }
  const Grid grid{path.horizon, path.steps};
  std::vector<double> inc(path.steps, 0.0);
  for (const auto& jump : path.ledger.ia[component]) {
    const double m = std::abs(jump.size);
    if (m > lo && m <= hi) inc[grid.bin(jump.time)] += jump.size;
  }
  if (lo < hi) {
    const double drift = path.step * band_first_moment(spec, lo, hi);
    for (double& x : inc) x -= drift;
  }
  return inc;
}

std::size_t joint_excess_count(const JumpLedger& ledger, double a, double b) {
  return static_cast<std::size_t>(
      std::count_if(ledger.common_ia.begin(), ledger.common_ia.end(),
                    [a, b](const CommonJump& c) { return c.size1 > a && c.size2 > b; }));
}

}  // namespace cojump
