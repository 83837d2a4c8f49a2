#include "riskfix/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "riskfix/errors.hpp"

namespace riskfix {

namespace {

constexpr double kKernelCutoff = 40.0;

void check_kernel_argument(double x) {
  if (!(x >= 0.0)) throw DomainError("G/H kernels are defined for x >= 0");
}

void check_omega(double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw DomainError("omega must be positive and finite");
}

}  // namespace

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double kernel_G(double x) {
  check_kernel_argument(x);
  if (x > kKernelCutoff) return 1.0;
  return normal_cdf(x) - x * normal_pdf(x) + x * x * normal_cdf(-x);
}

double kernel_H(double x) {
  check_kernel_argument(x);
  if (x > kKernelCutoff) return 0.0;
  return x * normal_pdf(x) - x * x * normal_cdf(-x);
}

double excess_second_moment(double gamma) {
  return 2.0 * ((1.0 + gamma * gamma) * normal_cdf(-gamma) - gamma * normal_pdf(gamma));
}

DiscretePrior::DiscretePrior(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw DomainError("prior needs at least one atom");
  double total = 0.0;
  for (const auto& a : atoms_) {
    if (!(a.value >= 0.0) || !std::isfinite(a.value))
      throw DomainError("prior atoms must be nonnegative and finite");
    if (!(a.weight > 0.0)) throw DomainError("prior weights must be positive");
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("prior weights must sum to 1");
}

DiscretePrior DiscretePrior::point_mass(double value) {
  return DiscretePrior({{value, 1.0}});
}

DiscretePrior DiscretePrior::parse(const std::string& text) {
  std::string body = text;
  if (body.rfind("atoms=", 0) == 0) body = body.substr(6);
  std::vector<Atom> atoms;
  std::stringstream list(body);
  std::string item;
  while (std::getline(list, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw DomainError("prior atom '" + item + "' is not of the form value:weight");
    try {
      std::size_t used_v = 0, used_w = 0;
      const std::string v = item.substr(0, colon), w = item.substr(colon + 1);
      const double value = std::stod(v, &used_v);
      const double weight = std::stod(w, &used_w);
      if (used_v != v.size() || used_w != w.size()) throw std::invalid_argument(item);
      atoms.push_back({value, weight});
    } catch (const std::logic_error&) {
      throw DomainError("prior atom '" + item + "' is not numeric");
    }
  }
  return DiscretePrior(std::move(atoms));
}

double DiscretePrior::mass_at_zero() const {
  double p = 0.0;
  for (const auto& a : atoms_)
    if (a.value == 0.0) p += a.weight;
  return p;
}

double DiscretePrior::second_moment() const {
  double m2 = 0.0;
  for (const auto& a : atoms_) m2 += a.weight * a.value * a.value;
  return m2;
}

std::string DiscretePrior::to_string() const {
  std::ostringstream out;
  out.precision(17);
  out << "atoms=";
  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    if (k > 0) out << ',';
    out << atoms_[k].value << ':' << atoms_[k].weight;
  }
  return out.str();
}

double prior_G(const DiscretePrior& prior, double omega) {
  check_omega(omega);
  double sum = 0.0;
  for (const auto& a : prior.atoms()) sum += a.weight * kernel_G(a.value / omega);
  return sum;
}

double prior_H(const DiscretePrior& prior, double omega) {
  check_omega(omega);
  double sum = 0.0;
  for (const auto& a : prior.atoms()) sum += a.weight * kernel_H(a.value / omega);
  return sum;
}

double psi_sparse(double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) throw DomainError("psi_sparse requires 0 < rho <= 1");
  const auto objective = [rho](double gamma) {
    return rho * (1.0 + gamma * gamma) + (1.0 - rho) * excess_second_moment(gamma);
  };
  // The objective is convex in gamma, so golden-section search is exact up to
  // the bracket tolerance.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = 20.0;
  double a = hi - inv_phi * (hi - lo), b = lo + inv_phi * (hi - lo);
  double fa = objective(a), fb = objective(b);
  while (hi - lo > 1e-10) {
    if (fa <= fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - inv_phi * (hi - lo);
      fa = objective(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + inv_phi * (hi - lo);
      fb = objective(b);
    }
  }
  const double gamma = 0.5 * (lo + hi);
  return std::min({objective(gamma), objective(0.0)});
}

}  // namespace riskfix
