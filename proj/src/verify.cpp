#include "ctns/verify.hpp"

#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>

#include "ctns/diagnostics.hpp"
#include "ctns/error.hpp"
#include "ctns/random_fields.hpp"
#include "ctns/weak_form.hpp"

namespace ctns {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

CheckResult check(std::string name, bool passed, std::string detail) {
  return {std::move(name), passed, std::move(detail)};
}

double max_abs(const VectorField& v) {
  double m = 0.0;
  for (int i = 0; i < v.dim(); ++i) m = std::max(m, linf(v[i]));
  return m;
}

VectorField unit(VectorField v) {
  const double norm = l2_norm(v);
  return v *= 1.0 / norm;
}

// ---------------------------------------------------------------------------

std::vector<CheckResult> operators_suite() {
  std::vector<CheckResult> out;
  for (int dim : {2, 3}) {
    const std::string tag = dim == 2 ? " (2D 64^2)" : " (3D 32^3)";
    auto sp = std::make_shared<const Spectral>(Grid::cube(dim, dim == 2 ? 64 : 32, 1.0));
    const StokesOperator op(sp);
    Rng rng(1234 + dim);
    const VectorField v = unit(random_band_limited_vector(*sp, 10, rng));
    const VectorField w = unit(random_band_limited_vector(*sp, 10, rng));
    const ScalarField s = random_band_limited(*sp, 10, rng);

    const VectorField pv = op.project(v);
    const double idem = max_abs(op.project(pv) - pv) / max_abs(pv);
    out.push_back(check("projection idempotent" + tag, idem <= 1e-13, "rel " + sci(idem)));
    const double div = divergence_l2(*sp, pv);
    out.push_back(check("projection divergence free" + tag, div <= 1e-12, "L2 " + sci(div)));
    const double a = integrate(dot(pv, w)), b = integrate(dot(v, op.project(w)));
    const double sa = std::abs(a - b) / (l2_norm(v) * l2_norm(w));
    out.push_back(check("projection self-adjoint" + tag, sa <= 1e-12, "rel " + sci(sa)));

    const double phys = integrate(dot(v, v));
    double spec = 0.0;
    for (int i = 0; i < dim; ++i) spec += sp->spectral_energy(sp->forward(v[i]));
    const double pars = std::abs(phys - spec) / phys;
    out.push_back(check("Parseval" + tag, pars <= 1e-12, "rel " + sci(pars)));

    const double lhs = integrate(dot(sp->gradient(s), v));
    ScalarField s_div = sp->divergence(v);
    for (std::size_t i = 0; i < s_div.size(); ++i) s_div[i] *= s[i];
    const double rhs = -integrate(s_div);
    const double adj = std::abs(lhs - rhs) / std::max(std::abs(lhs), lp_norm(s, 2.0) * l2_norm(v));
    out.push_back(check("gradient/divergence adjoint" + tag, adj <= 1e-12, "rel " + sci(adj)));

    const VectorField y = op.yosida(pv, 0.05);
    out.push_back(check("Yosida L2 contraction" + tag, l2_norm(y) <= l2_norm(pv),
                        sci(l2_norm(y)) + " <= " + sci(l2_norm(pv))));
    const double comm = max_abs(op.project(y) - y) / max_abs(y);
    out.push_back(check("Yosida commutes with projection" + tag, comm <= 1e-13, "rel " + sci(comm)));

    double grad2 = 0.0;
    for (int i = 0; i < dim; ++i) grad2 += l2_norm_squared(sp->gradient(pv[i]));
    const double half = l2_norm_squared(op.fractional_power(pv, 0.5));
    const double ah = std::abs(half - grad2) / grad2;
    out.push_back(check("|A^1/2 u|^2 = |grad u|^2" + tag, ah <= 1e-12, "rel " + sci(ah)));

    const ScalarField x = op.implicit_solve(s, 0.1);
    const double inv = linf(x - 0.1 * sp->laplacian(x) - s) / linf(s);
    out.push_back(check("implicit solve inverts I - dt Laplacian" + tag, inv <= 1e-12, "rel " + sci(inv)));
  }
  return out;
}

// ---------------------------------------------------------------------------

CoefficientSet exponential_sensitivity() {
  CoefficientSet c;
  c.family = "f=s, chi=e^s";
  c.f = ScalarFunction::power(1.0);
  c.chi = {[](double s) { return std::exp(s); }, [](double s) { return std::exp(s); },
           [](double s) { return std::exp(s); }};
  c.s0 = 2.0;
  return c;
}

std::vector<CheckResult> coefficients_suite() {
  std::vector<CheckResult> out;
  const StructuralReport proto = check_structural(prototype(1.0, 4.0));
  out.push_back(check("prototype satisfies the structural conditions", proto.passes,
                      std::to_string(proto.violations.size()) + " violations"));
  out.push_back(check("prototype consumption sign identity", proto.consistency.empty(),
                      std::to_string(proto.consistency.size()) + " violations"));

  const DerivedChemo d = derive_chemo(prototype(1.0, 4.0));
  out.push_back(check("Psi(1) = rho(1) = 0", d.psi(1.0) == 0.0 && d.rho(1.0) == 0.0, ""));
  const double e4 = std::max(std::abs(d.psi(4.0) - 2.0), std::abs(d.rho(4.0) - std::log(4.0)));
  out.push_back(check("Psi(4) = 2, rho(4) = ln 4", e4 <= 1e-10, "err " + sci(e4)));
  double worst = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double s = 0.01 + (4.0 - 0.01) * i / 10000.0;
    worst = std::max(worst, std::abs(d.psi(s) - 2.0 * (std::sqrt(s) - 1.0)));
  }
  out.push_back(check("tabulated Psi within 1e-8 on [0.01, s0]", worst <= 1e-8, "max err " + sci(worst)));
  out.push_back(check("c_g^- = c_g^+ = 1", std::abs(d.cg_minus() - 1) < 1e-15 && std::abs(d.cg_plus() - 1) < 1e-15,
                      sci(d.cg_minus()) + ", " + sci(d.cg_plus())));

  const StructuralReport ex = check_structural(exponential_sensitivity());
  out.push_back(check("f=s, chi=e^s fails (f/chi)' > 0 only", !ex.passes && ex.flags(StructuralCondition::g_increasing) &&
                                                                  !ex.flags(StructuralCondition::g_concave) &&
                                                                  !ex.flags(StructuralCondition::chi_f_convex),
                      std::to_string(ex.violations.size()) + " violations"));
  const StructuralReport sq = check_structural(powerlaw(2.0, 1.0, 1.0));
  const bool at_origin = !sq.violations.empty() && sq.violations.front().s == 0.0 &&
                         sq.violations.front().condition == StructuralCondition::g_increasing;
  out.push_back(check("f=s^2 fails (f/chi)' > 0 at s = 0", !sq.passes && at_origin,
                      std::to_string(sq.violations.size()) + " violations"));
  return out;
}

// ---------------------------------------------------------------------------

std::vector<CheckResult> inequality_suite() {
  std::vector<CheckResult> out;
  struct Case {
    int dim, n;
    double p;
  };
  for (const Case& cs : {Case{2, 64, 1.0}, Case{3, 32, 1.0}, Case{2, 64, 0.5}}) {
    auto sp = std::make_shared<const Spectral>(Grid::cube(cs.dim, cs.n, 1.0));
    Rng rng(73 + cs.dim);
    const ScalarFunction h = ScalarFunction::power(cs.p);
    int ok = 0;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const ScalarField phi = random_positive_field(*sp, 4, 0.5, rng.uniform(1.0, 4.0), rng);
      const InequalityResult r = functional_inequality_check(phi, h, *sp);
      ok += r.satisfied ? 1 : 0;
      worst = std::max(worst, r.lhs / r.rhs_base);
    }
    char name[96];
    std::snprintf(name, sizeof name, "h(s)=s^%g on %d^%d: lhs <= 13.9282 rhs", cs.p, cs.n, cs.dim);
    out.push_back(check(name, ok == 100, std::to_string(ok) + "/100, max lhs/rhs_base " + sci(worst)));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<CheckResult> energy_suite() {
  std::vector<CheckResult> out;
  auto sp = std::make_shared<const Spectral>(Grid::cube(2, 32, 1.0));
  const StokesOperator op(sp);
  const CoefficientSet coeffs = prototype(1.0, 1.0, Potential::cosine(1.0, 1, 1));
  const DerivedChemo derived = derive_chemo(coeffs);
  InitPreset preset;
  preset.u_norm = 0.05;
  const State s0 = make_initial_data(preset, op, coeffs);
  SimParams p;
  p.dt = 1e-3;
  p.t_end = 0.2;
  const Stepper stepper(p, coeffs, op);

  std::vector<DiagnosticsRecord> recs{make_record(s0, derived, *sp, 1.0)};
  double mass_drift = 0.0, div = 0.0, c_hi = s0.c.max(), c_lo = s0.c.min(), signal_gap = 0.0;
  bool nonneg = true;
  State prev = s0;
  for (long k = 0; k < p.steps_from(0.0); ++k) {
    State next = stepper.step(prev);
    recs.push_back(make_record(next, derived, *sp, 1.0));
    const auto& r = recs.back();
    mass_drift = std::max(mass_drift, std::abs(r.mass - recs.front().mass) / recs.front().mass);
    div = std::max(div, divergence_l2(*sp, next.u));
    c_hi = std::max(c_hi, r.c_max);
    c_lo = std::min(c_lo, next.c.min());
    nonneg = nonneg && r.dissip_n >= 0 && r.dissip_c4 >= 0 && r.dissip_c2 >= 0 && r.dissip_u >= 0;
    if (next.c.min() > 0.05)
      signal_gap = std::max(signal_gap,
                            std::abs(signal_energy_via_psi(next.c, derived, *sp) - r.energy_signal) / r.energy_signal);
    prev = std::move(next);
  }
  out.push_back(check("mass conserved", mass_drift <= 1e-10, "max rel drift " + sci(mass_drift)));
  out.push_back(check("max c <= max c0 + 1e-8, min c >= -1e-8",
                      c_hi <= recs.front().c_max + 1e-8 && c_lo >= -1e-8, "max " + sci(c_hi) + ", min " + sci(c_lo)));
  out.push_back(check("u divergence free", div <= 1e-11, "max L2 " + sci(div)));
  out.push_back(check("dissipation terms nonnegative", nonneg, ""));
  out.push_back(check("signal energy = 1/2 |grad Psi(c)|^2", signal_gap <= 1e-8, "max rel " + sci(signal_gap)));

  try {
    const EnergyFit fit = fit_energy_constant(recs, 1.0);
    bool integrated = true;
    for (const auto& r : recs)
      integrated = integrated && r.energy_total <= recs.front().energy_total + fit.k_hat * r.t + 1e-12;
    out.push_back(check("finite energy constant", std::isfinite(fit.k_hat), "k_hat " + sci(fit.k_hat)));
    out.push_back(check("F(t) <= F(0) + k_hat t", integrated, ""));
  } catch (const std::exception& e) {
    out.push_back(check("finite energy constant", false, e.what()));
  }

  // fluid energy identity on Taylor-Green
  auto tg_sp = std::make_shared<const Spectral>(Grid::cube(2, 64, kTwoPi));
  const StokesOperator tg_op(tg_sp);
  const Grid& g = tg_sp->grid();
  State tg{0.0, ScalarField(g), ScalarField(g), VectorField(g)};
  tg.u[0] = sample(g, [](const auto& x) { return std::sin(x[0]) * std::cos(x[1]); });
  tg.u[1] = sample(g, [](const auto& x) { return -std::cos(x[0]) * std::sin(x[1]); });
  std::vector<double> res;
  for (double dt : {2e-3, 1e-3, 5e-4}) {
    SimParams q;
    q.dt = dt;
    q.t_end = 0.1;
    const Stepper st(q, prototype(1.0, 1.0), tg_op);
    State prev_tg = tg, cur = tg;
    for (long k = 0; k < q.steps_from(0.0); ++k) {
      prev_tg = cur;
      cur = st.step(cur);
    }
    res.push_back(fluid_energy_residual(prev_tg, cur, dt, st.potential_gradient(), *tg_sp));
  }
  const double r1 = res[0] / res[1], r2 = res[1] / res[2];
  out.push_back(check("fluid energy residual first order in dt", r1 >= 1.8 && r1 <= 2.2 && r2 >= 1.8 && r2 <= 2.2,
                      "ratios " + sci(r1) + ", " + sci(r2)));
  return out;
}

// ---------------------------------------------------------------------------

std::vector<CheckResult> weak_suite() {
  std::vector<CheckResult> out;
  auto sp = std::make_shared<const Spectral>(Grid::cube(2, 32, 1.0));
  const StokesOperator op(sp);
  const Grid& g = sp->grid();
  const CoefficientSet coeffs = prototype(1.0, 1.0, Potential::cosine(1.0, 1, 1));
  const TestLibrary lib = default_test_library(g, 0.05);

  std::vector<State> zero, steady;
  for (int i = 0; i <= 50; ++i) {
    zero.push_back(State{i * 1e-3, ScalarField(g), ScalarField(g), VectorField(g)});
    steady.push_back(State{i * 1e-3, ScalarField(g, 1.3), ScalarField(g), VectorField(g)});
  }
  const WeakResiduals z = weak_residuals(zero, lib, coeffs);
  out.push_back(check("zero trajectory", z.r_n() == 0 && z.r_c() == 0 && z.r_u() == 0, ""));
  const WeakResiduals st = weak_residuals(steady, lib, coeffs);
  const double worst = std::max({st.r_n(), st.r_c(), st.r_u()});
  out.push_back(check("steady constant state", worst <= 1e-10, "max " + sci(worst)));

  InitPreset preset;
  preset.u_norm = 0.05;
  const State s0 = make_initial_data(preset, op, coeffs);
  std::vector<WeakResiduals> levels;
  for (int level = 0; level < 3; ++level) {
    SimParams p;
    p.dt = 4e-4 / (1 << level);
    p.eps = 0.02 / (1 << level);
    p.t_end = 0.05;
    WeakResidualAccumulator acc(sp, coeffs, lib);
    acc.observe(s0);
    run(s0, p, coeffs, op, [&](const State& s) { acc.observe(s); });
    levels.push_back(acc.result());
  }
  const auto decreasing = [&](auto get) {
    return get(levels[1]) < get(levels[0]) && get(levels[2]) < get(levels[1]);
  };
  const auto series = [&](auto get) {
    return sci(get(levels[0])) + " > " + sci(get(levels[1])) + " > " + sci(get(levels[2]));
  };
  const auto rn = [](const WeakResiduals& r) { return r.r_n(); };
  const auto rc = [](const WeakResiduals& r) { return r.r_c(); };
  const auto ru = [](const WeakResiduals& r) { return r.r_u(); };
  out.push_back(check("r_n decreases under joint (dt, eps) halving", decreasing(rn), series(rn)));
  out.push_back(check("r_c decreases under joint (dt, eps) halving", decreasing(rc), series(rc)));
  out.push_back(check("r_u decreases under joint (dt, eps) halving", decreasing(ru), series(ru)));
  return out;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"operators", "coefficients", "inequality", "energy", "weak"};
  return names;
}

std::vector<CheckResult> run_suite(const std::string& name) {
  if (name == "operators") return operators_suite();
  if (name == "coefficients") return coefficients_suite();
  if (name == "inequality") return inequality_suite();
  if (name == "energy") return energy_suite();
  if (name == "weak") return weak_suite();
  throw InvalidArgument("unknown suite '" + name + "'");
}

}  // namespace ctns
