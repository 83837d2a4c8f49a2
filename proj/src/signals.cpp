#include "riskfix/signals.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "riskfix/errors.hpp"

namespace riskfix {

namespace {

struct ParsedSpec {
  std::string name;
  std::string argument;
  bool has_argument = false;
};

ParsedSpec split_spec(std::string_view spec) {
  ParsedSpec out;
  const auto paren = spec.find('(');
  const auto colon = spec.find(':');
  if (paren != std::string_view::npos) {
    if (spec.back() != ')') throw ConfigError("unbalanced parentheses in signal '" + std::string(spec) + "'");
    out.name = std::string(spec.substr(0, paren));
    out.argument = std::string(spec.substr(paren + 1, spec.size() - paren - 2));
    out.has_argument = true;
  } else if (colon != std::string_view::npos) {
    out.name = std::string(spec.substr(0, colon));
    out.argument = std::string(spec.substr(colon + 1));
    out.has_argument = true;
  } else {
    out.name = std::string(spec);
  }
  return out;
}

double parse_number(const std::string& text, const std::string& context) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value))
    throw ConfigError("bad number '" + text + "' in " + context);
  return value;
}

}  // namespace

bool is_prior_spec(std::string_view spec) { return spec.rfind("atoms=", 0) == 0; }

Vector prior_to_vector(const DiscretePrior& prior, Eigen::Index n) {
  if (n < 1) throw DomainError("prior_to_vector: n must be positive");
  auto atoms = prior.atoms();
  std::sort(atoms.begin(), atoms.end(),
            [](const auto& a, const auto& b) { return a.value < b.value; });
  Vector out(n);
  std::size_t k = 0;
  double upper = atoms[0].weight;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double q = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    while (q > upper && k + 1 < atoms.size()) upper += atoms[++k].weight;
    out[i] = atoms[k].value;
  }
  return out;
}

Vector read_vector_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read vector file '" + path + "'");
  std::vector<double> values;
  std::string token;
  while (in >> token) values.push_back(parse_number(token, "'" + path + "'"));
  if (values.empty()) throw ConfigError("vector file '" + path + "' is empty");
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Vector make_signal(std::string_view spec, Eigen::Index n) {
  if (n < 1) throw DomainError("signal dimension must be positive");
  if (is_prior_spec(spec)) return prior_to_vector(DiscretePrior::parse(std::string(spec)), n);

  const auto parsed = split_spec(spec);
  const auto& name = parsed.name;
  const double dn = static_cast<double>(n);
  Vector out(n);
  if (name == "zero" && !parsed.has_argument) {
    out.setZero();
  } else if (name == "constant") {
    if (!parsed.has_argument) throw ConfigError("constant needs a value, e.g. constant(5)");
    out.setConstant(parse_number(parsed.argument, "signal '" + std::string(spec) + "'"));
  } else if (name == "linear" && !parsed.has_argument) {
    for (Eigen::Index i = 0; i < n; ++i) out[i] = static_cast<double>(i + 1) / dn;
  } else if (name == "quadratic" && !parsed.has_argument) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = static_cast<double>(i + 1) / dn;
      out[i] = x * x;
    }
  } else if (name == "piecewise_constant") {
    if (!parsed.has_argument) throw ConfigError("piecewise_constant needs a block count");
    const double k = parse_number(parsed.argument, "signal '" + std::string(spec) + "'");
    if (k < 1 || k != std::floor(k)) throw ConfigError("piecewise_constant needs an integer k >= 1");
    for (Eigen::Index i = 0; i < n; ++i)
      out[i] = std::floor(k * static_cast<double>(i) / dn) / k;
  } else if (name == "file" && parsed.has_argument) {
    out = read_vector_file(parsed.argument);
  } else {
    std::ifstream probe{std::string(spec)};
    if (!probe)
      throw ConfigError("'" + std::string(spec) + "' is neither a signal preset nor a readable file");
    out = read_vector_file(std::string(spec));
  }
  if (out.size() != n)
    throw ConfigError("signal '" + std::string(spec) + "' has " + std::to_string(out.size()) +
                      " entries, expected " + std::to_string(n));
  return out;
}

ConstraintSet make_constraint(std::string_view kind, Eigen::Index n, double radius,
                              Eigen::Index subspace_dim) {
  switch (parse_constraint_kind(kind)) {
    case ConstraintKind::Orthant:
      return ConstraintSet::orthant(n);
    case ConstraintKind::MonotoneCone:
      return ConstraintSet::monotone_cone(n);
    case ConstraintKind::L1Ball:
      return ConstraintSet::l1_ball(n, radius);
    case ConstraintKind::Subspace:
      return ConstraintSet::coordinate_subspace(n, subspace_dim);
  }
  throw DescriptorError("unknown constraint kind");
}

}  // namespace riskfix
