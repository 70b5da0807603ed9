#include "cojump/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cojump {
namespace {

void check_tail(const PowerLawTail& tail) {
  if (!(tail.scale > 0.0) || !std::isfinite(tail.scale)) {
    throw std::invalid_argument("power-law tail: scale must be positive and finite");
  }
  if (!(tail.alpha > 0.0) || !std::isfinite(tail.alpha)) {
    throw std::invalid_argument("power-law tail: alpha must be positive and finite");
  }
}

void check_stable_like(const PowerLawTail& tail, const char* what) {
  check_tail(tail);
  if (!(tail.alpha < 2.0)) {
    throw std::invalid_argument(std::string(what) + ": alpha must lie in (0, 2)");
  }
}

// scale * integral_lo^hi x^-alpha dx
double branch_first_moment(const PowerLawTail& tail, double lo, double hi) {
  if (lo == hi) return 0.0;
  const double z = 1.0 - tail.alpha;
  const double log_ratio = std::log(lo / hi);
  if (z == 0.0) return -tail.scale * log_ratio;
  return tail.scale * std::pow(hi, z) * (-std::expm1(z * log_ratio)) / z;
}

double branch_second_moment(const PowerLawTail& tail, double eps) {
  const double k = 2.0 - tail.alpha;
  return tail.scale * std::pow(eps, k) / k;
}

double branch_mass(const PowerLawTail& tail, double lo, double hi) {
  return tail.scale / tail.alpha * (std::pow(lo, -tail.alpha) - std::pow(hi, -tail.alpha));
}

void check_band(double lo, double hi) {
  if (!(lo > 0.0) || !(hi <= 1.0) || !(lo <= hi)) {
    throw std::invalid_argument("jump band must satisfy 0 < lo <= hi <= 1");
  }
}

}  // namespace

double tail_integral(const PowerLawTail& tail, double x) {
  check_tail(tail);
  if (!(x > 0.0)) throw std::domain_error("tail_integral: jump size must be positive");
  return tail.scale * std::pow(x, -tail.alpha) / tail.alpha;
}

double inverse_tail(const PowerLawTail& tail, double mass) {
  check_tail(tail);
  if (!(mass > 0.0)) throw std::domain_error("inverse_tail: tail mass must be positive");
  return std::pow(tail.alpha * mass / tail.scale, -1.0 / tail.alpha);
}

double dependent_partner_size(const PowerLawTail& from, const PowerLawTail& to, double x) {
  if (!(x > 0.0)) throw std::domain_error("dependent_partner_size: jump size must be positive");
  if (from == to) return x;
  return inverse_tail(to, tail_integral(from, x));
}

InfiniteActivityJumpSpec::InfiniteActivityJumpSpec(double scale, double alpha,
                                                   std::optional<PowerLawTail> negative)
    : positive_{scale, alpha}, negative_(negative) {
  check_stable_like(positive_, "infinite-activity jumps");
  if (negative_) check_stable_like(*negative_, "infinite-activity negative branch");
}

double truncated_second_moment(const InfiniteActivityJumpSpec& spec, double eps) {
  if (!(eps > 0.0) || !(eps <= 1.0)) {
    throw std::domain_error("truncated_second_moment: eps must lie in (0, 1]");
  }
  double total = branch_second_moment(spec.positive(), eps);
  if (spec.negative()) total += branch_second_moment(*spec.negative(), eps);
  return total;
}

double band_first_moment(const InfiniteActivityJumpSpec& spec, double lo, double hi) {
  check_band(lo, hi);
  double total = branch_first_moment(spec.positive(), lo, hi);
  if (spec.negative()) total -= branch_first_moment(*spec.negative(), lo, hi);
  return total;
}

double band_mass(const InfiniteActivityJumpSpec& spec, double lo, double hi) {
  check_band(lo, hi);
  double total = branch_mass(spec.positive(), lo, hi);
  if (spec.negative()) total += branch_mass(*spec.negative(), lo, hi);
  return total;
}

double compensator_mean(const InfiniteActivityJumpSpec& spec, double eps, double h) {
  if (!(eps > 0.0) || !(eps < 1.0)) {
    throw std::domain_error("compensator_mean: eps must lie in (0, 1)");
  }
  if (!(h > 0.0)) throw std::domain_error("compensator_mean: step must be positive");
  return h * band_first_moment(spec, eps, 1.0);
}

FiniteActivityJumpSpec::FiniteActivityJumpSpec(double intensity, JumpSizeLaw law)
    : intensity_(intensity), law_(std::move(law)) {
  if (!(intensity_ >= 0.0) || !std::isfinite(intensity_)) {
    throw std::invalid_argument("finite-activity jumps: intensity must be finite and >= 0");
  }
  if (const auto* normal = std::get_if<NormalJumpSize>(&law_)) {
    if (!(normal->stddev >= 0.0) || (normal->stddev == 0.0 && normal->mean == 0.0)) {
      throw std::invalid_argument("normal jump size: law would put mass at 0");
    }
  } else if (const auto* uniform = std::get_if<UniformMagnitudeJumpSize>(&law_)) {
    if (!(uniform->low > 0.0) || !(uniform->high >= uniform->low) ||
        !(uniform->prob_positive >= 0.0 && uniform->prob_positive <= 1.0)) {
      throw std::invalid_argument("uniform jump size: need 0 < low <= high, p in [0,1]");
    }
  } else if (std::get<FixedJumpSize>(law_).size == 0.0) {
    throw std::invalid_argument("fixed jump size must be non-zero");
  }
}

double FiniteActivityJumpSpec::sample_size(std::mt19937_64& rng) const {
  return std::visit(
      [&rng](const auto& law) -> double {
        using Law = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<Law, NormalJumpSize>) {
          std::normal_distribution<double> dist(law.mean, law.stddev);
          double size = 0.0;
          while (size == 0.0) size = dist(rng);
          return size;
        } else if constexpr (std::is_same_v<Law, UniformMagnitudeJumpSize>) {
          std::uniform_real_distribution<double> magnitude(law.low, law.high);
          std::bernoulli_distribution positive(law.prob_positive);
          const double m = magnitude(rng);
          return positive(rng) ? m : -m;
        } else {
          return law.size;
        }
      },
      law_);
}

CopulaSpec::CopulaSpec(double gamma) : gamma_(gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("copula: gamma must lie in [0, 1]");
  }
}

ThresholdRule::ThresholdRule(double coeff, double beta) : coeff_(coeff), beta_(beta) {
  if (!(coeff > 0.0) || !std::isfinite(coeff)) {
    throw std::invalid_argument("threshold: coefficient must be positive and finite");
  }
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("threshold: beta must lie strictly inside (0, 1)");
  }
}

double ThresholdRule::level(double h) const {
  if (!(h > 0.0)) throw std::domain_error("threshold: step must be positive");
  return coeff_ * std::pow(h, beta_);
}

void ModelSpec::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("model: horizon must be positive and finite");
  }
  coefficients.validate();
  if (shared_fa_clock) {
    if (!fa_jumps[0] || !fa_jumps[1]) {
      throw std::invalid_argument("model: shared FA clock needs FA jumps on both components");
    }
    if (fa_jumps[0]->intensity() != fa_jumps[1]->intensity()) {
      throw std::invalid_argument("model: shared FA clock needs equal intensities");
    }
  }
  for (const auto& jump : forced_jumps) {
    if (!(jump.time > 0.0 && jump.time <= horizon)) {
      throw std::invalid_argument("model: forced jump time must lie in (0, T]");
    }
    if (jump.size1 == 0.0 && jump.size2 == 0.0) {
      throw std::invalid_argument("model: forced jump needs a non-zero size");
    }
  }
  if (ia_jumps[0] && ia_jumps[1] && ia_jumps[0]->alpha() > ia_jumps[1]->alpha()) {
    throw std::invalid_argument("model: infinite-activity indices must satisfy alpha1 <= alpha2");
  }
}

}  // namespace cojump
