#include "ctns/coefficients.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "ctns/error.hpp"
#include "ctns/spectral.hpp"

namespace ctns {
namespace {

constexpr int kTransformNodes = 1 << 16;
constexpr double kSMinFraction = 1e-6;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(trim(text), &pos);
    if (pos != trim(text).size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("cannot parse " + what + " from '" + text + "'");
  }
}

struct Table {
  std::vector<double> s, f, chi;
};

double lerp_table(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
  const double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return ys[i] + w * (ys[i + 1] - ys[i]);
}

Table read_table(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) throw InvalidArgument("cannot open coefficient table " + csv.string());
  Table t;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c, ','))
      throw InvalidArgument("coefficient table rows need columns s, f, chi");
    if (t.s.empty() && trim(a) == "s") continue;  // header
    t.s.push_back(parse_double(a, "s"));
    t.f.push_back(parse_double(b, "f"));
    t.chi.push_back(parse_double(c, "chi"));
  }
  if (t.s.size() < 2) throw InvalidArgument("coefficient table needs at least two rows");
  for (std::size_t i = 1; i < t.s.size(); ++i)
    if (!(t.s[i] > t.s[i - 1])) throw InvalidArgument("coefficient table s column must increase");
  return t;
}

ScalarFunction product(const ScalarFunction& a, const ScalarFunction& b) {
  ScalarFunction p;
  p.value = [a, b](double s) { return a(s) * b(s); };
  if (a.has_derivatives() && b.has_derivatives()) {
    p.d1 = [a, b](double s) { return a.d1(s) * b(s) + a(s) * b.d1(s); };
    p.d2 = [a, b](double s) {
      return a.d2(s) * b(s) + 2.0 * a.d1(s) * b.d1(s) + a(s) * b.d2(s);
    };
  }
  return p;
}

}  // namespace

ScalarFunction ScalarFunction::constant(double c) {
  return {[c](double) { return c; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
}

ScalarFunction ScalarFunction::power(double p, double factor) {
  ScalarFunction fn;
  fn.value = [p, factor](double s) { return factor * std::pow(s, p); };
  fn.d1 = [p, factor](double s) { return p == 0.0 ? 0.0 : factor * p * std::pow(s, p - 1.0); };
  fn.d2 = [p, factor](double s) {
    return (p == 0.0 || p == 1.0) ? 0.0 : factor * p * (p - 1.0) * std::pow(s, p - 2.0);
  };
  return fn;
}

// ---------------------------------------------------------------------------
// Potential

Potential Potential::zero() { return Potential{}; }

Potential Potential::cosine(double amplitude, int axis, int mode) {
  if (axis < 0 || axis > 2) throw InvalidArgument("potential axis must be 0, 1 or 2");
  if (!std::isfinite(amplitude)) throw InvalidArgument("potential amplitude must be finite");
  Potential p;
  p.kind_ = Kind::cosine;
  p.amplitude_ = amplitude;
  p.axis_ = axis;
  p.mode_ = mode;
  return p;
}

Potential Potential::gridded(ScalarField samples) {
  Potential p;
  p.kind_ = Kind::gridded;
  p.samples_ = std::make_shared<const ScalarField>(std::move(samples));
  return p;
}

ScalarField Potential::values(const Grid& grid) const {
  switch (kind_) {
    case Kind::zero:
      return ScalarField(grid);
    case Kind::cosine: {
      if (axis_ >= grid.dim()) throw InvalidArgument("potential axis exceeds grid dimension");
      const double k = 2.0 * std::numbers::pi * mode_ / grid.length(axis_);
      return sample(grid, [&](const auto& x) { return amplitude_ * std::cos(k * x[axis_]); });
    }
    case Kind::gridded:
      if (!(samples_->grid() == grid)) throw InvalidArgument("gridded potential is on another grid");
      return *samples_;
  }
  return ScalarField(grid);
}

VectorField Potential::gradient(const Spectral& spectral) const {
  const Grid& grid = spectral.grid();
  switch (kind_) {
    case Kind::zero:
      return VectorField(grid);
    case Kind::cosine: {
      if (axis_ >= grid.dim()) throw InvalidArgument("potential axis exceeds grid dimension");
      VectorField g(grid);
      const double k = 2.0 * std::numbers::pi * mode_ / grid.length(axis_);
      g[axis_] = sample(grid, [&](const auto& x) { return -amplitude_ * k * std::sin(k * x[axis_]); });
      return g;
    }
    case Kind::gridded:
      return spectral.gradient(values(grid));
  }
  return VectorField(grid);
}

bool Potential::is_valid_on(const Spectral& spectral) const {
  return values(spectral.grid()).all_finite() && gradient(spectral).all_finite();
}

std::string Potential::describe() const {
  switch (kind_) {
    case Kind::zero:
      return "zero";
    case Kind::cosine: {
      std::ostringstream os;
      os << "cosine{" << amplitude_ << ", " << axis_ << ", " << mode_ << "}";
      return os.str();
    }
    case Kind::gridded:
      return "gridded";
  }
  return "zero";
}

// ---------------------------------------------------------------------------
// Families

CoefficientSet prototype(double chi0, double s0, Potential phi) {
  if (!(chi0 > 0.0)) throw InvalidArgument("prototype needs chi0 > 0");
  CoefficientSet c;
  c.family = "prototype";
  c.f = ScalarFunction::power(1.0);
  c.chi = ScalarFunction::constant(chi0);
  c.phi = std::move(phi);
  c.s0 = s0;
  const double root = std::sqrt(chi0);
  c.closed = ClosedTransforms{
      [root](double s) { return 2.0 * root * (std::sqrt(s) - 1.0); },
      [chi0](double s) { return chi0 * std::log(s); }};
  return c;
}

CoefficientSet powerlaw(double f_exp, double chi0, double s0, Potential phi) {
  if (!(chi0 > 0.0)) throw InvalidArgument("powerlaw needs chi0 > 0");
  if (!(f_exp > 0.0)) throw InvalidArgument("powerlaw needs a positive exponent");
  CoefficientSet c;
  c.family = "powerlaw";
  c.f = ScalarFunction::power(f_exp);
  c.chi = ScalarFunction::constant(chi0);
  c.phi = std::move(phi);
  c.s0 = s0;
  const double root = std::sqrt(chi0);
  const double a = 1.0 - 0.5 * f_exp;  // exponent of the Psi antiderivative
  const double b = 1.0 - f_exp;        // exponent of the rho antiderivative
  c.closed = ClosedTransforms{
      [root, a](double s) { return a == 0.0 ? root * std::log(s) : root * (std::pow(s, a) - 1.0) / a; },
      [chi0, b](double s) { return b == 0.0 ? chi0 * std::log(s) : chi0 * (std::pow(s, b) - 1.0) / b; }};
  return c;
}

CoefficientSet tabulated(const std::filesystem::path& csv, double s0, Potential phi) {
  auto table = std::make_shared<const Table>(read_table(csv));
  if (table->s.front() > 0.0 || table->s.back() < s0)
    throw InvalidArgument("coefficient table must cover [0, s0]");
  CoefficientSet c;
  c.family = "tabulated";
  c.f.value = [table](double s) { return lerp_table(table->s, table->f, s); };
  c.chi.value = [table](double s) { return lerp_table(table->s, table->chi, s); };
  c.phi = std::move(phi);
  c.s0 = s0;
  return c;
}

CoefficientSet make_family(const std::string& spec, double s0, Potential phi) {
  const std::string text = trim(spec);
  const auto open = text.find('{');
  if (open == std::string::npos || text.back() != '}')
    throw InvalidArgument("coefficient family must look like name{args}: " + spec);
  const std::string name = trim(text.substr(0, open));
  const std::string inner = text.substr(open + 1, text.size() - open - 2);
  std::vector<std::string> args;
  std::stringstream ss(inner);
  for (std::string item; std::getline(ss, item, ',');) args.push_back(trim(item));
  if (name == "prototype") {
    if (args.size() != 1) throw InvalidArgument("prototype{chi0} takes one argument");
    return prototype(parse_double(args[0], "chi0"), s0, std::move(phi));
  }
  if (name == "powerlaw") {
    if (args.size() != 2) throw InvalidArgument("powerlaw{f_exp, chi0} takes two arguments");
    return powerlaw(parse_double(args[0], "f_exp"), parse_double(args[1], "chi0"), s0, std::move(phi));
  }
  if (name == "tabulated") {
    if (args.size() != 1 || args[0].empty()) throw InvalidArgument("tabulated{path} takes one path");
    return tabulated(args[0], s0, std::move(phi));
  }
  throw InvalidArgument("unknown coefficient family '" + name + "'");
}

std::vector<double> sample_grid(double s0, int n_samples) {
  if (n_samples < 2) throw InvalidArgument("need at least two samples");
  std::vector<double> s(n_samples);
  for (int i = 0; i < n_samples; ++i) s[i] = s0 * i / (n_samples - 1);
  s.back() = s0;
  return s;
}

void validate(const CoefficientSet& coeffs, int n_samples, const Spectral* spectral) {
  if (!(coeffs.s0 >= 0.0) || !std::isfinite(coeffs.s0)) throw InvalidArgument("s0 must be nonnegative");
  if (!coeffs.f.value || !coeffs.chi.value) throw InvalidArgument("f and chi must be set");
  if (coeffs.f(0.0) != 0.0) throw InvalidArgument("f(0) must vanish");
  for (double s : sample_grid(coeffs.s0, n_samples)) {
    if (!(coeffs.f(s) >= 0.0)) throw InvalidArgument("f must be nonnegative on [0, s0]");
    if (!(coeffs.chi(s) > 0.0)) throw InvalidArgument("chi must be positive on [0, s0]");
  }
  if (spectral != nullptr && !coeffs.phi.is_valid_on(*spectral))
    throw InvalidArgument("potential has non-finite values or gradient");
}

// ---------------------------------------------------------------------------
// Derivatives

double first_derivative(const ScalarFunction& fn, double s, double h, double s0) {
  if (fn.d1) return fn.d1(s);
  if (s - h >= 0.0 && s + h <= s0 * (1.0 + 1e-12)) return (fn(s + h) - fn(s - h)) / (2.0 * h);
  if (s - h < 0.0) return (-3.0 * fn(s) + 4.0 * fn(s + h) - fn(s + 2.0 * h)) / (2.0 * h);
  return (3.0 * fn(s) - 4.0 * fn(s - h) + fn(s - 2.0 * h)) / (2.0 * h);
}

double second_derivative(const ScalarFunction& fn, double s, double h, double s0) {
  if (fn.d2) return fn.d2(s);
  if (s - h >= 0.0 && s + h <= s0 * (1.0 + 1e-12))
    return (fn(s + h) - 2.0 * fn(s) + fn(s - h)) / (h * h);
  if (s - h < 0.0)
    return (2.0 * fn(s) - 5.0 * fn(s + h) + 4.0 * fn(s + 2.0 * h) - fn(s + 3.0 * h)) / (h * h);
  return (2.0 * fn(s) - 5.0 * fn(s - h) + 4.0 * fn(s - 2.0 * h) - fn(s - 3.0 * h)) / (h * h);
}

// ---------------------------------------------------------------------------
// DerivedChemo

double DerivedChemo::g(double s) const { return coeffs_->f(s) / coeffs_->chi(s); }

double DerivedChemo::g_prime(double s) const {
  const auto& c = *coeffs_;
  if (c.f.has_derivatives() && c.chi.has_derivatives()) {
    const double chi = c.chi(s);
    return (c.f.d1(s) * chi - c.f(s) * c.chi.d1(s)) / (chi * chi);
  }
  ScalarFunction gf{[this](double x) { return g(x); }, {}, {}};
  return first_derivative(gf, s, fd_step_, s0_);
}

double DerivedChemo::g_second(double s) const {
  const auto& c = *coeffs_;
  if (c.f.has_derivatives() && c.chi.has_derivatives()) {
    const double chi = c.chi(s);
    const double f = c.f(s);
    const double num1 = c.f.d1(s) * chi - f * c.chi.d1(s);
    return (c.f.d2(s) * chi - f * c.chi.d2(s)) / (chi * chi) - 2.0 * c.chi.d1(s) * num1 / (chi * chi * chi);
  }
  ScalarFunction gf{[this](double x) { return g(x); }, {}, {}};
  return second_derivative(gf, s, fd_step_, s0_);
}

double DerivedChemo::interpolate(const std::vector<double>& table, double s) const {
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), s);
  std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
  i = std::clamp<std::size_t>(i, 1, nodes_.size() - 1) - 1;
  const double w = std::clamp((s - nodes_[i]) / (nodes_[i + 1] - nodes_[i]), 0.0, 1.0);
  return table[i] + w * (table[i + 1] - table[i]);
}

double DerivedChemo::psi(double s) const {
  if (s < nodes_.front()) {
    if (coeffs_->closed) return coeffs_->closed->psi(std::max(s, std::numeric_limits<double>::min()));
    return psi_table_.front();
  }
  return interpolate(psi_table_, s);
}

double DerivedChemo::rho(double s) const {
  if (s < nodes_.front()) {
    if (coeffs_->closed) return coeffs_->closed->rho(std::max(s, std::numeric_limits<double>::min()));
    return rho_table_.front();
  }
  return interpolate(rho_table_, s);
}

DerivedChemo derive_chemo(const CoefficientSet& coeffs, int n_samples) {
  if (n_samples < 16) throw InvalidArgument("derive_chemo needs at least 16 samples");
  if (!(coeffs.s0 > 0.0)) throw InvalidArgument("derive_chemo needs s0 > 0");
  validate(coeffs, n_samples);

  DerivedChemo d;
  d.coeffs_ = std::make_shared<const CoefficientSet>(coeffs);
  d.s0_ = coeffs.s0;
  d.fd_step_ = coeffs.s0 / (n_samples - 1);

  d.cg_minus_ = std::numeric_limits<double>::infinity();
  d.cg_plus_ = 0.0;
  for (double s : sample_grid(coeffs.s0, n_samples)) {
    if (s == 0.0) continue;
    const double g = d.g(s);
    if (!(g > 0.0)) {
      std::ostringstream os;
      os << "g = f/chi is not positive at s = " << s;
      throw InvalidArgument(os.str());
    }
    d.cg_minus_ = std::min(d.cg_minus_, g / s);
    d.cg_plus_ = std::max(d.cg_plus_, g / s);
  }

  // log-spaced nodes with s = 1 inserted exactly when it lies inside
  const double lo = kSMinFraction * coeffs.s0;
  const double hi = coeffs.s0;
  const double step = std::log(hi / lo) / (kTransformNodes - 1);
  d.nodes_.resize(kTransformNodes);
  for (int i = 0; i < kTransformNodes; ++i) d.nodes_[i] = lo * std::exp(step * i);
  d.nodes_.front() = lo;
  d.nodes_.back() = hi;
  if (1.0 > lo && 1.0 < hi) {
    auto it = std::lower_bound(d.nodes_.begin(), d.nodes_.end(), 1.0);
    if (*it != 1.0) d.nodes_.insert(it, 1.0);
  }

  using Quad = boost::math::quadrature::gauss_kronrod<double, 15>;
  const auto inv_sqrt_g = [&d](double s) { return 1.0 / std::sqrt(d.g(s)); };
  const auto inv_g = [&d](double s) { return 1.0 / d.g(s); };
  const auto integral = [](const auto& fn, double a, double b) {
    if (a == b) return 0.0;
    return Quad::integrate(fn, a, b, 3, 1e-12);
  };

  const std::size_t n = d.nodes_.size();
  d.psi_table_.assign(n, 0.0);
  d.rho_table_.assign(n, 0.0);
  std::size_t anchor;
  double anchor_psi = 0.0, anchor_rho = 0.0;
  if (1.0 <= lo) {
    anchor = 0;
    anchor_psi = -integral(inv_sqrt_g, lo, 1.0);
    anchor_rho = -integral(inv_g, lo, 1.0);
  } else if (1.0 >= hi) {
    anchor = n - 1;
    anchor_psi = integral(inv_sqrt_g, 1.0, hi);
    anchor_rho = integral(inv_g, 1.0, hi);
  } else {
    anchor = static_cast<std::size_t>(std::lower_bound(d.nodes_.begin(), d.nodes_.end(), 1.0) - d.nodes_.begin());
  }
  d.psi_table_[anchor] = anchor_psi;
  d.rho_table_[anchor] = anchor_rho;
  for (std::size_t i = anchor + 1; i < n; ++i) {
    d.psi_table_[i] = d.psi_table_[i - 1] + integral(inv_sqrt_g, d.nodes_[i - 1], d.nodes_[i]);
    d.rho_table_[i] = d.rho_table_[i - 1] + integral(inv_g, d.nodes_[i - 1], d.nodes_[i]);
  }
  for (std::size_t i = anchor; i-- > 0;) {
    d.psi_table_[i] = d.psi_table_[i + 1] - integral(inv_sqrt_g, d.nodes_[i], d.nodes_[i + 1]);
    d.rho_table_[i] = d.rho_table_[i + 1] - integral(inv_g, d.nodes_[i], d.nodes_[i + 1]);
  }
  return d;
}

// ---------------------------------------------------------------------------
// Structural hypotheses

std::string to_string(StructuralCondition c) {
  switch (c) {
    case StructuralCondition::g_increasing:
      return "(f/chi)' > 0";
    case StructuralCondition::g_concave:
      return "(f/chi)'' <= 0";
    case StructuralCondition::chi_f_convex:
      return "(chi*f)'' >= 0";
    case StructuralCondition::consumption_sign:
      return "f*g'/(2g^2) - f'/g <= 0";
  }
  return "?";
}

bool StructuralReport::flags(StructuralCondition c) const {
  const auto match = [c](const StructuralViolation& v) { return v.condition == c; };
  return std::any_of(violations.begin(), violations.end(), match) ||
         std::any_of(consistency.begin(), consistency.end(), match);
}

StructuralReport check_structural(const CoefficientSet& coeffs, int n_samples) {
  constexpr double kBand = 1e-9;
  constexpr double kStrict = 1e-12;

  StructuralReport report;
  report.sample_grid = sample_grid(coeffs.s0, n_samples);
  if (!(coeffs.s0 > 0.0)) throw InvalidArgument("check_structural needs s0 > 0");

  // g and its derivatives without the positivity gate of derive_chemo
  const double h = coeffs.s0 / (n_samples - 1);
  ScalarFunction g{[&coeffs](double s) { return coeffs.f(s) / coeffs.chi(s); }, {}, {}};
  if (coeffs.f.has_derivatives() && coeffs.chi.has_derivatives()) {
    const auto& f = coeffs.f;
    const auto& chi = coeffs.chi;
    g.d1 = [&f, &chi](double s) {
      const double c = chi(s);
      return (f.d1(s) * c - f(s) * chi.d1(s)) / (c * c);
    };
    g.d2 = [&f, &chi](double s) {
      const double c = chi(s);
      const double num1 = f.d1(s) * c - f(s) * chi.d1(s);
      return (f.d2(s) * c - f(s) * chi.d2(s)) / (c * c) - 2.0 * chi.d1(s) * num1 / (c * c * c);
    };
  }
  const ScalarFunction chi_f = product(coeffs.chi, coeffs.f);

  for (double s : report.sample_grid) {
    const double g1 = first_derivative(g, s, h, coeffs.s0);
    const double g2 = second_derivative(g, s, h, coeffs.s0);
    const double cf2 = second_derivative(chi_f, s, h, coeffs.s0);
    if (!(g1 > kStrict)) report.violations.push_back({StructuralCondition::g_increasing, s, g1});
    if (!(g2 <= kBand)) report.violations.push_back({StructuralCondition::g_concave, s, g2});
    if (!(cf2 >= -kBand)) report.violations.push_back({StructuralCondition::chi_f_convex, s, cf2});
    if (s > 0.0) {
      const double gv = g(s);
      const double fv = coeffs.f(s);
      const double f1 = first_derivative(coeffs.f, s, h, coeffs.s0);
      const double sign = fv * g1 / (2.0 * gv * gv) - f1 / gv;
      if (!(sign <= kBand))
        report.consistency.push_back({StructuralCondition::consumption_sign, s, sign});
    }
  }
  report.passes = report.violations.empty();
  return report;
}

}  // namespace ctns
