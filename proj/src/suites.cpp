#include "incl/suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "incl/rng.hpp"

namespace incl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int dimension(const RunConfig& c, int fallback) {
  const int n = c.n.value_or(fallback);
  if (n < SquareMatrix::kMinDim || n > SquareMatrix::kMaxDim) throw Error(Errc::BadParam, "n must lie in [2, 6]");
  return n;
}

long sample_count(const RunConfig& c, long fallback) {
  const long s = c.samples.value_or(fallback);
  if (s <= 0) throw Error(Errc::BadParam, "samples must be positive");
  return s;
}

SquareMatrix random_matrix(SplitMix64& rng, int n) {
  SquareMatrix a(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a.set(i, j, rng.uniform(-1.0, 1.0));
  return a;
}

Complex random_disk(SplitMix64& rng, double radius) {
  const double r = radius * std::sqrt(rng.uniform());
  return std::polar(r, rng.uniform(-kPi, kPi));
}

Json complex_json(Complex z) { return Json{{"re", json_number(z.real())}, {"im", json_number(z.imag())}}; }

Json derivatives_json(const ComplexDerivatives& d) {
  return Json{{"fz", complex_json(d.fz)}, {"fzbar", complex_json(d.fzbar)}};
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// Smallest slack seen and the input that produced it.
struct Worst {
  double slack = kInf;
  Json witness;

  template <class F>
  void update(double s, F&& make_witness) {
    if (s < slack || (std::isnan(s) && !std::isnan(slack))) {
      slack = s;
      witness = make_witness();
    }
  }
};

CheckRecord worst_record(std::string name, std::string_view anchor_key, const Worst& w, double tol) {
  const bool pass = w.slack >= -tol;
  CheckRecord r = make_record(std::move(name), anchor_key, pass, w.slack);
  if (!pass) r.counterexample = w.witness;
  return r;
}

// Counting check: pass iff no disagreement.
struct Tally {
  long compared = 0;
  long disagreements = 0;
  Json first;

  template <class F>
  void record(bool agree, F&& make_witness) {
    ++compared;
    if (agree) return;
    if (disagreements == 0) first = make_witness();
    ++disagreements;
  }
};

CheckRecord tally_record(std::string name, std::string_view anchor_key, const Tally& t) {
  CheckRecord r = make_record(std::move(name), anchor_key, t.disagreements == 0, -static_cast<double>(t.disagreements));
  r.details["compared"] = t.compared;
  r.details["disagreements"] = t.disagreements;
  if (t.disagreements > 0) r.counterexample = t.first;
  return r;
}

CheckRecord inconclusive(CheckRecord r) {
  r.status = Status::Inconclusive;
  return r;
}

// ---------------------------------------------------------------------------
// verify shift-bounds

Report verify_shift_bounds_suite(const RunConfig& cfg) {
  const int n = dimension(cfg, 2);
  const long samples = sample_count(cfg, 10000);
  const double tol = cfg.tolerances.get("shift_slack");
  const std::vector<double> lambdas{0.01, 0.1, 1.0, 10.0, 100.0};
  SplitMix64 rng(cfg.seed);
  Worst outer, inner, inv, sandwich;
  Tally det;
  long rejected = 0;
  for (long i = 0; i < samples; ++i) {
    SquareMatrix a(n);
    double margin = 0.0;
    for (;;) {
      a = random_matrix(rng, n);
      // Cheap rejections first: both force a margin of -1.
      bool negative = true;
      try {
        negative = determinant(a) <= 0.0 || has_negative_real_eigenvalue(a);
      } catch (const Error& e) {
        if (e.code() != Errc::IllConditioned) throw;
      }
      if (negative) {
        ++rejected;
        continue;
      }
      margin = inclusion_margin(a).value;
      // A margin of exactly -1 can round to just above it, so keep clear.
      if (margin > -1.0 + 1e-6 && determinant(a) > 0.0) break;
      ++rejected;
    }
    // Slightly below the estimate, so rounding in it cannot help the bounds.
    const double delta = std::min(margin, 0.0) - 1e-9;
    for (double lambda : lambdas) {
      const ShiftBoundsReport rep = evaluate_shift_bounds(a, delta, lambda);
      auto witness = [&] { return Json{{"matrix", matrix_json(a)}, {"delta", delta}, {"lambda", lambda}}; };
      outer.update(rep.outer.slack, witness);
      inner.update(rep.inner.slack, witness);
      inv.update(rep.inverse_norm.slack, witness);
      sandwich.update(rep.sandwich.slack, witness);
      det.record(rep.det_shifted > 0.0, witness);
    }
  }
  Report report;
  report.config = cfg;
  const Json common{{"n", n}, {"matrices", samples}, {"rejected", rejected}, {"lambdas", lambdas}};
  for (auto [name, key, w] : {std::tuple{"shift_bounds.outer_distortion", "shift_distortion", &outer},
                              std::tuple{"shift_bounds.inner_distortion", "shift_distortion", &inner},
                              std::tuple{"shift_bounds.inverse_norm", "shift_inverse", &inv},
                              std::tuple{"shift_bounds.sandwich", "shift_sandwich", &sandwich}}) {
    CheckRecord r = worst_record(name, key, *w, tol);
    r.details = common;
    report.add(std::move(r));
  }
  CheckRecord d = tally_record("shift_bounds.det_positive", "shift_det", det);
  d.details["n"] = n;
  report.add(std::move(d));
  return report;
}

// ---------------------------------------------------------------------------
// verify revtri

Report verify_revtri_suite(const RunConfig& cfg) {
  const int n = dimension(cfg, 2);
  const long samples = sample_count(cfg, 100000);
  const double tol = cfg.tolerances.get("revtri");
  SplitMix64 rng(cfg.seed);
  Worst worst;
  long skipped = 0;
  for (long i = 0; i < samples; ++i) {
    const double delta = rng.uniform(-0.999, 0.0);
    Vector u(n), w(n);
    for (auto& x : u) x = rng.normal();
    for (auto& x : w) x = rng.normal();
    const double nu = norm(u);
    for (auto& x : u) x /= nu;
    // Unit w orthogonal to u.
    const double p = dot(u, w);
    for (int j = 0; j < n; ++j) w[j] -= p * u[j];
    const double nw = norm(w);
    for (auto& x : w) x /= nw;
    // Angle between u and v anywhere in [0, arccos delta], the boundary included.
    const double phi = std::acos(delta) * std::sqrt(rng.uniform());
    const double su = std::exp(rng.uniform(-3.0, 3.0)), sv = std::exp(rng.uniform(-3.0, 3.0));
    Vector v(n);
    for (int j = 0; j < n; ++j) {
      v[j] = sv * (std::cos(phi) * u[j] + std::sin(phi) * w[j]);
      u[j] *= su;
    }
    try {
      const ReverseTriangleResult r = reverse_triangle_check(u, v, delta);
      const double rel = r.slack / std::max(norm(u), norm(v));
      worst.update(rel, [&] { return Json{{"u", to_json(u)}, {"v", to_json(v)}, {"delta", delta}}; });
    } catch (const Error& e) {
      if (e.code() != Errc::HypothesisViolated) throw;
      ++skipped;  // rounding pushed the pair just outside the angle condition
    }
  }
  Report report;
  report.config = cfg;
  CheckRecord r = worst_record("revtri.relative_slack", "reverse_triangle", worst, tol);
  r.details = Json{{"n", n}, {"pairs", samples}, {"hypothesis_rounding_skips", skipped}};
  report.add(std::move(r));
  return report;
}

// ---------------------------------------------------------------------------
// verify dcom

Report verify_dcom_suite(const RunConfig& cfg) {
  const long samples = sample_count(cfg, 100000);
  const double band = cfg.tolerances.get("dcom_band");
  SplitMix64 rng(cfg.seed);
  Tally closed, membership, sweep, nonneg;
  long excluded = 0;
  for (long i = 0; i < samples; ++i) {
    const ComplexDerivatives d{random_disk(rng, 2.0), random_disk(rng, 2.0)};
    const double delta = rng.uniform(-0.999, 0.999);
    const double gap = sector_gap(d, delta);
    if (std::abs(gap) < band) {
      ++excluded;
      continue;
    }
    const bool sector = cond_sector(d, delta);
    auto witness = [&] { return Json{{"derivatives", derivatives_json(d)}, {"delta", delta}, {"sector_gap", gap}}; };
    closed.record(sector == cond_closed_form(d, delta), witness);
    const InclusionVerdict v = cond_membership(d, delta, band);
    membership.record(sector == (v.status != Membership::Outside), witness);
    sweep.record(sector == (sweep_margin(d) >= delta), witness);
    if (delta >= 0.0) nonneg.record(sector == closed_form_primary(d, delta), witness);
  }

  // Symmetries of the sector condition.
  const long sym_samples = std::min<long>(samples, 10000);
  Tally conj, rot;
  for (long i = 0; i < sym_samples; ++i) {
    const ComplexDerivatives d{random_disk(rng, 2.0), random_disk(rng, 2.0)};
    const double delta = rng.uniform(-0.999, 0.999);
    const double phi = rng.uniform(-kPi, kPi);
    const bool base = cond_sector(d, delta);
    const ComplexDerivatives dc{std::conj(d.fz), std::conj(d.fzbar)};
    conj.record(base == cond_sector(dc, delta), [&] { return Json{{"derivatives", derivatives_json(d)}, {"delta", delta}}; });
    if (std::abs(sector_gap(d, delta)) < band) continue;
    const ComplexDerivatives dr{d.fz, d.fzbar * std::polar(1.0, phi)};
    rot.record(base == cond_sector(dr, delta),
               [&] { return Json{{"derivatives", derivatives_json(d)}, {"delta", delta}, {"phi", phi}}; });
  }

  // tau_K as a function of k.
  const double tau_tol = cfg.tolerances.get("tau_exact");
  Worst tau;
  for (int i = 0; i < 1000; ++i) {
    const double k = i / 1000.0;
    const double err = std::abs(tau_for_K(K_from_k(k)) - std::sqrt(1.0 - k * k));
    tau.update(tau_tol - err, [&] { return Json{{"k", k}, {"error", err}}; });
  }

  // Corollary threshold on a 200 x 200 grid.
  Tally threshold;
  for (int i = 0; i < 200; ++i) {
    const double t = i / 199.0;
    for (int j = 0; j < 200; ++j) {
      const double k = j / 200.0;
      const double delta = corollary_delta(t, k);
      const bool expected = t < tau_for_K(K_from_k(k)) - 1e-12;
      threshold.record((delta > -1.0) == expected, [&] { return Json{{"tau", t}, {"k", k}, {"delta", delta}}; });
    }
  }

  Report report;
  report.config = cfg;
  const Json exclusion{{"triples", samples}, {"excluded_in_band", excluded}, {"band", band}};
  auto add = [&](CheckRecord r) {
    for (auto& [k, v] : exclusion.items()) r.details[k] = v;
    report.add(std::move(r));
  };
  add(tally_record("dcom.sector_vs_closed_form", "dcom_closed_form", closed));
  add(tally_record("dcom.sector_vs_membership", "dcom_sector", membership));
  add(tally_record("dcom.sector_vs_sweep", "dcom_sector", sweep));
  add(tally_record("dcom.nonnegative_delta_primary_only", "dcom_nonnegative", nonneg));
  report.add(tally_record("dcom.conjugation_invariance", "dcom_symmetry", conj));
  report.add(tally_record("dcom.rotation_invariance", "dcom_symmetry", rot));
  report.add(worst_record("dcom.tau_identity", "tau", tau, 0.0));
  report.add(tally_record("dcom.corollary_threshold", "corollary", threshold));
  return report;
}

// ---------------------------------------------------------------------------
// verify courant-fischer

Report verify_courant_fischer_suite(const RunConfig& cfg) {
  if (cfg.n && *cfg.n != 2) throw Error(Errc::BadParam, "courant-fischer runs for n = 2 only");
  const long samples = sample_count(cfg, 1000);
  const double tol = cfg.tolerances.get("courant_fischer");
  constexpr int kGrid = 10000;
  SplitMix64 rng(cfg.seed);
  Worst lo, hi;
  for (long i = 0; i < samples; ++i) {
    const SquareMatrix a = random_matrix(rng, 2);
    const SingularSpectrum s = singular_values(a);
    double mn = kInf, mx = 0.0;
    for (int j = 0; j < kGrid; ++j) {
      const double t = kPi * j / kGrid;
      const double x = a(0, 0) * std::cos(t) + a(0, 1) * std::sin(t);
      const double y = a(1, 0) * std::cos(t) + a(1, 1) * std::sin(t);
      const double r = std::hypot(x, y);
      mn = std::min(mn, r);
      mx = std::max(mx, r);
    }
    auto witness = [&] { return Json{{"matrix", matrix_json(a)}, {"sigma", to_json(s.sigma)}, {"grid_min", mn}, {"grid_max", mx}}; };
    lo.update(tol - std::abs(mn - s.smallest()) / s.largest(), witness);
    hi.update(tol - std::abs(mx - s.largest()) / s.largest(), witness);
  }
  Report report;
  report.config = cfg;
  CheckRecord a = worst_record("courant_fischer.min_matches_sigma_n", "courant_fischer", lo, 0.0);
  CheckRecord b = worst_record("courant_fischer.max_matches_sigma_1", "courant_fischer", hi, 0.0);
  for (CheckRecord* r : {&a, &b}) r->details = Json{{"matrices", samples}, {"grid", kGrid}, {"tolerance", tol}};
  report.add(std::move(a));
  report.add(std::move(b));
  return report;
}

// ---------------------------------------------------------------------------
// verify cone-nesting

Report verify_cone_nesting_suite(const RunConfig& cfg) {
  const int n = dimension(cfg, 2);
  const long samples = sample_count(cfg, 10000);
  const double band = cfg.tolerances.get("membership_band");
  SplitMix64 rng(cfg.seed);
  Tally nesting, spectral;
  long near_minus_one = 0, ill_conditioned = 0;
  for (long i = 0; i < samples; ++i) {
    const SquareMatrix a = random_matrix(rng, n);
    const double delta = rng.uniform(-0.999, 0.999);
    const InclusionVerdict v = in_cone(a, InclusionParams{delta, std::nullopt}, band);
    const double hi = delta - 2.0 * band;
    const double lower = rng.uniform(-0.999, std::max(-0.999, hi));
    if (v.status == Membership::Inside && lower < hi) {
      const InclusionVerdict w = in_cone(a, InclusionParams{lower, std::nullopt}, band);
      nesting.record(w.status != Membership::Outside, [&] {
        return Json{{"matrix", matrix_json(a)}, {"delta", delta}, {"lower_delta", lower}, {"margin", v.margin}};
      });
    }
    if (std::abs(v.margin + 1.0) <= 1e-3) {
      ++near_minus_one;
      continue;
    }
    try {
      const bool negative = has_negative_real_eigenvalue(a);
      spectral.record((v.margin > -1.0) == !negative, [&] {
        return Json{{"matrix", matrix_json(a)}, {"margin", v.margin}, {"negative_eigenvalue", negative}};
      });
    } catch (const Error& e) {
      if (e.code() != Errc::IllConditioned) throw;
      ++ill_conditioned;
    }
  }
  Report report;
  report.config = cfg;
  CheckRecord a = tally_record("cone_nesting.inside_implies_not_outside_below", "cone_nesting", nesting);
  a.details["n"] = n;
  a.details["matrices"] = samples;
  report.add(std::move(a));
  CheckRecord b = tally_record("cone_nesting.spectral_characterization", "negative_eigenvalue", spectral);
  b.details["n"] = n;
  b.details["skipped_near_minus_one"] = near_minus_one;
  b.details["skipped_ill_conditioned"] = ill_conditioned;
  report.add(std::move(b));
  return report;
}

// ---------------------------------------------------------------------------
// Example helpers

GridSpec plane_grid(const RunConfig& cfg, long samples, double xlo, double xhi, double ylo, double yhi) {
  const int per_axis = std::max(2, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(samples)))));
  GridSpec g;
  g.lo = {xlo, ylo};
  g.hi = {xhi, yhi};
  g.counts = {per_axis, per_axis};
  g.exclusion = cfg.tolerances.get("interface_exclusion");
  g.seed = cfg.seed;
  g.jitter = 0.5;
  return g;
}

// Finite differences against the exact Jacobian on a thinned subset of the
// non-excluded samples.
CheckRecord fd_record(std::string name, const Mapping& f, const std::vector<FieldSample>& field,
                      const Tolerances& tol, std::size_t max_points = 2000) {
  const double h = tol.get("fd_step"), limit = tol.get("fd_relative");
  std::vector<const FieldSample*> pts;
  for (const auto& s : field)
    if (!s.excluded) pts.push_back(&s);
  const std::size_t stride = std::max<std::size_t>(1, pts.size() / max_points);
  Worst worst;
  long checked = 0, skipped = 0;
  for (std::size_t i = 0; i < pts.size(); i += stride) {
    const Point& x = pts[i]->x;
    try {
      const double err = finite_difference_error(f, x, h);
      worst.update(limit - err, [&] { return Json{{"x", to_json(x)}, {"relative_error", err}}; });
      ++checked;
    } catch (const Error& e) {
      if (e.code() != Errc::OutsideDomain) throw;
      ++skipped;  // stencil leaves the domain
    }
  }
  CheckRecord r = worst_record(std::move(name), "derivative", worst, 0.0);
  r.details = Json{{"points", checked}, {"skipped_near_boundary", skipped}, {"step", h}, {"tolerance", limit}};
  return r;
}

CheckRecord winding_record(std::string name, std::string_view key, const PlaneMapping& f, Complex center,
                           double radius, Complex target, long expected) {
  try {
    const WindingReport w = winding_number(f, center, radius, target);
    CheckRecord r = make_record(std::move(name), key, w.winding == expected, w.winding == expected ? 0.0 : -1.0);
    r.details = Json{{"radius", radius},
                     {"winding", w.winding},
                     {"expected", expected},
                     {"samples_used", w.samples_used},
                     {"min_boundary_distance", w.min_boundary_distance},
                     {"max_step", w.max_step}};
    if (w.winding != expected) r.counterexample = r.details;
    return r;
  } catch (const Error& e) {
    if (e.code() != Errc::Inconclusive && e.code() != Errc::TargetOnImage) throw;
    CheckRecord r = inconclusive(make_record(std::move(name), key, false, 0.0));
    r.details = Json{{"radius", radius}, {"error", e.what()}};
    return r;
  }
}

CheckRecord index_record(std::string name, const PlaneMapping& f, Complex point, long expected) {
  try {
    const long idx = index_at(f, point);
    CheckRecord r = make_record(std::move(name), "index", idx == expected, idx == expected ? 0.0 : -1.0);
    r.details = Json{{"point", complex_json(point)}, {"index", idx}, {"expected", expected}};
    return r;
  } catch (const Error& e) {
    if (e.code() != Errc::Inconclusive && e.code() != Errc::TargetOnImage) throw;
    CheckRecord r = inconclusive(make_record(std::move(name), "index", false, 0.0));
    r.details = Json{{"point", complex_json(point)}, {"error", e.what()}};
    return r;
  }
}

CheckRecord confirm_record(std::string name, std::string_view key, const Mapping& f, const Point& x1,
                           const Point& x2, double tol) {
  const auto w = confirm_collision(f, x1, x2, tol);
  const double gap = norm(Vector{[&] {
    const Point a = f.eval(x1), b = f.eval(x2);
    Vector d(a.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] - b[i];
    return d;
  }()});
  CheckRecord r = make_record(std::move(name), key, w.has_value(), tol - gap);
  r.details = Json{{"x1", to_json(x1)}, {"x2", to_json(x2)}, {"image_gap", gap}, {"tolerance", tol}};
  return r;
}

// A search that finds nothing is inconclusive, never a failure.
CheckRecord search_record(std::string name, const Mapping& f, const Box& box, long pairs, std::uint64_t seed,
                          double tol) {
  const CollisionSearchResult res = collision_search(f, box, pairs, seed, tol);
  CheckRecord r = make_record(std::move(name), "collision", true, 0.0);
  r.details = Json{{"pairs_tried", res.pairs_tried}, {"budget", res.budget}, {"tolerance", tol}};
  if (res.witness) {
    r.slack = tol - res.witness->image_gap;
    r.details["witness"] = Json{{"x1", to_json(res.witness->x1)},
                                {"x2", to_json(res.witness->x2)},
                                {"image_gap", res.witness->image_gap},
                                {"point_gap", res.witness->point_gap}};
  } else {
    r.status = Status::Inconclusive;
    r.details["witness"] = nullptr;
  }
  return r;
}

Json field_summary_json(const FieldSummary& s) {
  return Json{{"points", s.points},
              {"excluded", s.excluded},
              {"min_margin", json_number(s.min_margin)},
              {"max_outer_distortion", json_number(s.max_outer_distortion)},
              {"nonpositive_jacobian", s.nonpositive_jacobian}};
}

Point as_point(Complex z) { return {z.real(), z.imag()}; }

// ---------------------------------------------------------------------------
// example case1

ExampleRun example_case1(const RunConfig& cfg) {
  const double k = cfg.k.value_or(0.6);
  const auto f = branchex_case1(k);
  const long samples = sample_count(cfg, 100000);
  const Tolerances& tol = cfg.tolerances;
  ExampleRun run;
  run.report.config = cfg;
  Report& report = run.report;

  run.field = sample_field(*f, plane_grid(cfg, samples, -1.0, 1.0, -1.0, 1.0));
  const FieldSummary summary = summarize(run.field);
  const double root = std::sqrt((1.0 - k) * (1.0 + k));

  Worst identity, lower, two_sided;
  Tally even, reflect;
  for (const auto& s : run.field) {
    const Complex z(s.x[0], s.x[1]);
    auto where = [&] { return Json{{"z", complex_json(z)}}; };
    even.record(f->value(z) == f->value(-z), where);
    if (z.real() >= 0.0) reflect.record(f->value(z) == std::conj(f->value(std::conj(z))), where);
    if (s.excluded) continue;
    const ComplexDerivatives d = f->derivatives(z);
    const double mz = std::abs(d.fz);
    auto witness = [&] { return Json{{"z", complex_json(z)}, {"derivatives", derivatives_json(d)}}; };
    identity.update(tol.get("fold_identity") - std::abs(std::abs(d.fzbar) - k * mz), witness);
    lower.update(d.fz.real() + root * mz, witness);
    two_sided.update(root * mz - std::abs(d.fz.real()), witness);
  }
  const Json pts{{"field", field_summary_json(summary)}, {"k", k}};
  auto with_field = [&](CheckRecord r) {
    for (auto& [key, v] : pts.items()) r.details[key] = v;
    return r;
  };
  report.add(with_field(worst_record("case1.beltrami_identity", "fold_identity", identity, 0.0)));
  report.add(with_field(worst_record("case1.re_fz_lower_bound", "lower_real_part", lower, tol.get("inequality"))));
  report.add(with_field(worst_record("case1.re_fz_two_sided", "fold_identity", two_sided, tol.get("fold_identity"))));
  report.add(with_field(tally_record("case1.evenness", "symmetry", even)));
  report.add(with_field(tally_record("case1.reflection", "symmetry", reflect)));
  report.add(fd_record("case1.derivatives_vs_finite_differences", *f, run.field, tol));

  report.add(winding_record("case1.winding_r0.5", "degree", *f, 0.0, 0.5, 0.0, 2));
  report.add(winding_record("case1.winding_r0.05", "degree", *f, 0.0, 0.05, 0.0, 2));
  report.add(index_record("case1.index_origin", *f, 0.0, 2));

  report.add(confirm_record("case1.collision_z_minus_z", "collision", *f, as_point({0.3, 0.2}),
                            as_point({-0.3, -0.2}), 1e-12));
  report.add(search_record("case1.collision_search", *f, Box{{-1.0, -1.0}, {1.0, 1.0}}, 64, cfg.seed,
                           tol.get("collision")));

  // Regularized map f + lambda z at the branch point.
  const double floor = std::min(summary.min_margin, 0.0);
  const std::vector<double> radii{0.1, 0.01, 0.001};
  std::vector<double> lambdas{0.1, 1.0};
  if (cfg.lambda && std::find(lambdas.begin(), lambdas.end(), *cfg.lambda) == lambdas.end()) {
    lambdas.push_back(*cfg.lambda);
  }
  const double table_lambda = cfg.lambda.value_or(1.0);
  const double origin[2] = {0.0, 0.0};
  for (double lambda : lambdas) {
    const auto g = regularize(f, lambda);
    const auto rows = liminf_probe(*g, origin, radii);
    const double bound = lambda * std::sqrt(1.0 - floor * floor) / 2.0;
    Worst w;
    Json table = Json::array();
    for (const auto& row : rows) {
      w.update(row.min_ratio - bound, [&] { return Json{{"radius", row.radius}, {"min_ratio", row.min_ratio}}; });
      table.push_back(Json{{"r", row.radius}, {"min_ratio", row.min_ratio}});
    }
    // Index-based bound 1 / (2 M i^2), M = sup |(Df^lambda)^-1| sampled on the
    // field inside the largest probe radius. Not asserted: M is only an estimate.
    double inverse_sup = 0.0;
    for (const auto& s : run.field) {
      if (!s.jacobian || std::hypot(s.x[0], s.x[1]) > radii.front()) continue;
      ComplexDerivatives d = to_complex(*s.jacobian);
      d.fz += lambda;
      const double sigma_min = std::abs(d.fz) - std::abs(d.fzbar);
      inverse_sup = std::max(inverse_sup, sigma_min > 0.0 ? 1.0 / sigma_min : kInf);
    }
    const long index = index_at(*g, 0.0);
    const double index_bound = inverse_sup > 0.0 ? 1.0 / (2.0 * inverse_sup * double(index * index)) : kNaN;
    CheckRecord r = worst_record("case1.liminf_lambda_" + label(lambda), "liminf", w, tol.get("liminf"));
    r.details = Json{{"lambda", lambda}, {"margin_floor", floor}, {"bound", bound}, {"rows", table},
                     {"index", index}, {"inverse_sup_sampled", json_number(inverse_sup)},
                     {"index_bound_informational", json_number(index_bound)}};
    report.add(std::move(r));
    if (lambda == table_lambda) run.liminf = rows;
  }

  // The branch point disappears for large lambda.
  report.add(winding_record("case1.winding_lambda_0", "homotopy", *f, 0.0, 0.5, 0.0, 2));
  report.add(winding_record("case1.winding_lambda_10", "homotopy", *regularize(f, 10.0), 0.0, 0.5, 0.0, 1));
  for (double lambda : {0.1, 10.0}) {
    const double other = 0.9 * lambda;
    const auto g1 = regularize(f, lambda), g2 = regularize(f, other);
    const WindingReport w1 = winding_number(*g1, 0.0, 0.5, 0.0);
    const WindingReport w2 = winding_number(*g2, 0.0, 0.5, 0.0);
    // Rouche: |(lambda - other) z| < min |f^lambda| on the circle.
    const bool applicable = (lambda - other) * 0.5 < w1.min_boundary_distance;
    CheckRecord r = make_record("case1.homotopy_lambda_" + label(lambda), "homotopy",
                                applicable && w1.winding == w2.winding, w1.winding == w2.winding ? 0.0 : -1.0);
    if (!applicable) r.status = Status::Inconclusive;
    r.details = Json{{"lambda", lambda}, {"other", other}, {"winding", w1.winding},
                     {"other_winding", w2.winding}, {"min_boundary_distance", w1.min_boundary_distance}};
    report.add(std::move(r));
  }
  return run;
}

// ---------------------------------------------------------------------------
// example case2

ExampleRun example_case2(const RunConfig& cfg) {
  const double eps = cfg.eps.value_or(0.5);
  const auto f = branchex_case2(eps);
  const long samples = sample_count(cfg, 40000);
  const Tolerances& tol = cfg.tolerances;
  const double k = f->k();
  const double root = std::sqrt((1.0 - k) * (1.0 + k));
  ExampleRun run;
  run.report.config = cfg;
  Report& report = run.report;

  // Interfaces: the rays through (-d, +-1) and the negative real axis.
  const double d = f->slope(), c = std::hypot(1.0, d);
  const Complex up = Complex(-d, 1.0) / c, down = Complex(-d, -1.0) / c;
  Worst clauses, limits;
  const double eta = 1e-12;
  for (int i = 1; i <= 1000; ++i) {
    const double t = i / 1000.0;
    const Complex p = t * up;
    clauses.update(tol.get("continuity") - std::abs(f->sector_clause(p) - f->linear_clause(p)),
                   [&] { return Json{{"z", complex_json(p)}, {"interface", "ray"}}; });
    const Complex x(-t, 0.0);
    clauses.update(tol.get("continuity") - 2.0 * std::abs(f->linear_clause(x).imag()),
                   [&] { return Json{{"z", complex_json(x)}, {"interface", "negative_axis"}}; });
    // Two-sided limits of the full map across each interface.
    for (auto [point, normal] : {std::pair{t * up, up * Complex(0.0, -1.0)}, std::pair{t * down, down * Complex(0.0, 1.0)},
                                 std::pair{x, Complex(0.0, 1.0)}}) {
      const double jump = std::abs(f->value(point + eta * normal) - f->value(point - eta * normal));
      // The map is 3-Lipschitz near the interfaces.
      limits.update(tol.get("continuity") + 6.0 * eta - jump, [&] { return Json{{"z", complex_json(point)}, {"jump", jump}}; });
    }
  }
  report.add(worst_record("case2.interface_clause_agreement", "continuity", clauses, 0.0));
  report.add(worst_record("case2.interface_two_sided_limits", "continuity", limits, 0.0));

  run.field = sample_field(*f, plane_grid(cfg, samples, -1.0, 1.0, -1.0, 1.0));
  const FieldSummary summary = summarize(run.field);
  Worst qr, lower;
  Tally reflect;
  for (const auto& s : run.field) {
    const Complex z(s.x[0], s.x[1]);
    reflect.record(f->value(z) == std::conj(f->value(std::conj(z))), [&] { return Json{{"z", complex_json(z)}}; });
    if (s.excluded) continue;
    const ComplexDerivatives dz = f->derivatives(z);
    const double mz = std::abs(dz.fz);
    auto witness = [&] { return Json{{"z", complex_json(z)}, {"derivatives", derivatives_json(dz)}}; };
    qr.update(k * mz - std::abs(dz.fzbar), witness);
    lower.update(dz.fz.real() + root * mz, witness);
  }
  const Json pts{{"field", field_summary_json(summary)}, {"eps", eps}, {"k", k}};
  auto with_field = [&](CheckRecord r) {
    for (auto& [key, v] : pts.items()) r.details[key] = v;
    return r;
  };
  report.add(with_field(worst_record("case2.quasiregular", "beltrami", qr, tol.get("inequality"))));
  report.add(with_field(worst_record("case2.re_fz_lower_bound", "lower_real_part", lower, tol.get("inequality"))));
  report.add(with_field(tally_record("case2.reflection", "symmetry", reflect)));
  report.add(fd_record("case2.derivatives_vs_finite_differences", *f, run.field, tol));
  report.add(index_record("case2.index_origin", *f, 0.0, 2));
  report.add(winding_record("case2.winding_r0.5", "degree", *f, 0.0, 0.5, 0.0, 2));
  return run;
}

// ---------------------------------------------------------------------------
// example ball

SquareMatrix ball_jacobian_closed_form(std::span<const double> x, double eps) {
  const int n = static_cast<int>(x.size());
  double s2 = 0.0;
  for (int j = 0; j + 1 < n; ++j) s2 += x[j] * x[j];
  const double s = std::sqrt(s2), xn = x[n - 1];
  SquareMatrix jac = SquareMatrix::identity(n);
  for (int j = 0; j + 1 < n; ++j) jac.set(n - 1, j, eps * x[j] * xn / s);
  jac.set(n - 1, n - 1, eps * s);
  return jac;
}

ExampleRun example_ball(const RunConfig& cfg) {
  const int n = dimension(cfg, 3);
  const double eps = cfg.eps.value_or(0.4);
  const auto f = ball_example(n, eps);
  const long samples = sample_count(cfg, 10000);
  const Tolerances& tol = cfg.tolerances;
  ExampleRun run;
  run.report.config = cfg;
  Report& report = run.report;

  // Lattice over the cube sized so that about `samples` points land in the ball.
  const double ball_fraction = std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0 + 1.0) / std::pow(2.0, n);
  const int per_axis =
      std::max(2, static_cast<int>(std::ceil(std::pow(static_cast<double>(samples) / ball_fraction, 1.0 / n))));
  run.field = sample_field(*f, GridSpec::box(n, 1.0, per_axis, tol.get("interface_exclusion"), cfg.seed, 0.5));
  const FieldSummary summary = summarize(run.field);

  Worst closed, margin;
  Tally positive;
  for (const auto& s : run.field) {
    if (s.excluded) continue;
    const SquareMatrix expected = ball_jacobian_closed_form(s.x, eps);
    double diff = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) diff = std::max(diff, std::abs((*s.jacobian)(i, j) - expected(i, j)));
    auto witness = [&] { return Json{{"x", to_json(s.x)}, {"jacobian", matrix_json(*s.jacobian)}, {"margin", json_number(s.margin)}}; };
    closed.update(tol.get("fold_identity") - diff, witness);
    margin.update(s.margin + eps, witness);
    positive.record(determinant(*s.jacobian) > 0.0, witness);
  }
  const Json pts{{"field", field_summary_json(summary)}, {"n", n}, {"eps", eps}};
  auto with_field = [&](CheckRecord r) {
    for (auto& [key, v] : pts.items()) r.details[key] = v;
    return r;
  };
  report.add(with_field(worst_record("ball.jacobian_closed_form", "derivative", closed, 0.0)));
  report.add(fd_record("ball.derivatives_vs_finite_differences", *f, run.field, tol));
  report.add(with_field(tally_record("ball.jacobian_positive", "jacobian_positive", positive)));
  report.add(with_field(worst_record("ball.margin_floor", "ball_cone", margin, tol.get("margin_floor"))));

  // Radial integrability of s^-q over the ball.
  const std::vector<double> cutoffs = dyadic_cutoffs(20);
  {
    const double q = n - 1.5;
    const auto rows = radial_integrability(n, q, cutoffs);
    const double last = rows.back().increment;
    CheckRecord r = make_record("ball.integrability_subcritical", "integrability",
                                last < tol.get("subcritical_increment"), tol.get("subcritical_increment") - last);
    r.details = Json{{"q", q}, {"last_h", rows.back().h}, {"last_increment", last}, {"integral", rows.back().integral}};
    report.add(std::move(r));
  }
  {
    const double q = n - 1.0;
    run.integrability = radial_integrability(n, q, cutoffs);
    Worst w;
    for (const auto& row : run.integrability) {
      w.update(tol.get("log2_increment") - std::abs(row.increment - std::numbers::ln2),
               [&] { return Json{{"h", row.h}, {"increment", row.increment}}; });
    }
    CheckRecord r = worst_record("ball.integrability_critical", "integrability", w, 0.0);
    r.details = Json{{"q", q}, {"cutoffs", cutoffs.size()}};
    report.add(std::move(r));
  }
  {
    // Increments shrink geometrically exactly when q < n - 1.
    Tally threshold;
    Json sweep = Json::array();
    for (double q : {n - 2.5, n - 2.0, n - 1.5, n - 1.1, n - 1.0, n - 0.5, n - 0.0}) {
      if (q <= 0.0) continue;
      const auto rows = radial_integrability(n, q, cutoffs);
      const double a = rows[rows.size() - 2].increment, b = rows.back().increment;
      const bool divergent = b >= a * (1.0 - 1e-12);
      sweep.push_back(Json{{"q", q}, {"divergent", divergent}, {"last_increment", b}});
      threshold.record(divergent == (q >= n - 1.0), [&] { return Json{{"q", q}, {"divergent", divergent}}; });
    }
    CheckRecord r = tally_record("ball.integrability_threshold", "integrability", threshold);
    r.details["sweep"] = sweep;
    report.add(std::move(r));
  }

  // The x_n axis collapses to the origin.
  Point top(n, 0.0), bottom(n, 0.0);
  top[n - 1] = 0.3;
  bottom[n - 1] = -0.3;
  report.add(confirm_record("ball.axis_collision", "ball_collapse", *f, top, bottom, 1e-12));
  Box box{Vector(n, -0.5), Vector(n, 0.5)};
  report.add(search_record("ball.collision_search", *f, box, 64, cfg.seed, tol.get("collision")));

  Point a(n, 0.0);
  a[n - 1] = 0.2;
  const std::vector<double> radii{0.1, 0.01, 0.001};
  run.liminf = liminf_probe(*f, a, radii);
  Worst axis;
  Json rows = Json::array();
  const Point fa = f->eval(a);
  for (const auto& row : run.liminf) {
    Point x = a;
    x[n - 1] += row.radius;
    const Point fx = f->eval(x);
    Vector diff(n);
    for (int i = 0; i < n; ++i) diff[i] = fx[i] - fa[i];
    const double ratio = norm(diff) / row.radius;
    axis.update(-ratio, [&] { return Json{{"radius", row.radius}, {"axis_ratio", ratio}}; });
    rows.push_back(Json{{"r", row.radius}, {"min_ratio", row.min_ratio}, {"axis_ratio", ratio}});
  }
  CheckRecord r = worst_record("ball.axis_difference_quotient", "ball_collapse", axis, tol.get("fold_identity"));
  r.details = Json{{"a", to_json(a)}, {"rows", rows}};
  report.add(std::move(r));
  return run;
}

// ---------------------------------------------------------------------------
// example power52

ExampleRun example_power52(const RunConfig& cfg) {
  const auto f = power_half_plane();
  const long samples = sample_count(cfg, 2500);
  const Tolerances& tol = cfg.tolerances;
  ExampleRun run;
  run.report.config = cfg;
  Report& report = run.report;

  auto ratio_at = [&](double theta) {
    const Point a = as_point(std::polar(1.0, theta)), b = as_point(std::polar(1.0, -theta));
    return monotonicity_check(*f, a, b, 0.0).ratio;
  };
  const double lo = 2.0 * kPi / 5.0, hi = kPi / 2.0;
  Worst negative, opposite, positive;
  for (int i = 0; i < 100; ++i) {
    const double theta = lo + (i + 1) * (hi - lo) / 101.0;
    const double r = ratio_at(theta);
    negative.update(-r, [&] { return Json{{"theta", theta}, {"ratio", r}}; });
    opposite.update(tol.get("inequality") - std::abs(r + 1.0), [&] { return Json{{"theta", theta}, {"ratio", r}}; });
  }
  for (int i = 0; i < 100; ++i) {
    const double theta = 0.1 + (i + 1) * (lo - 0.01 - 0.1) / 101.0;
    const double r = ratio_at(theta);
    positive.update(r, [&] { return Json{{"theta", theta}, {"ratio", r}}; });
  }
  auto strict = [](CheckRecord r) {
    // Strict sign: a zero ratio fails.
    if (r.slack <= 0.0) {
      r.status = Status::Fail;
    }
    return r;
  };
  report.add(strict(worst_record("power52.ratio_negative_inside", "monotonicity", negative, 0.0)));
  report.add(worst_record("power52.opposite_directions", "monotonicity", opposite, 0.0));
  report.add(strict(worst_record("power52.ratio_positive_below", "monotonicity", positive, 0.0)));

  // Sign change on a 100-point grid over [0.1, pi/2).
  {
    const int m = 100;
    const double step = (hi - 0.1) / m;
    int change = -1, changes = 0;
    for (int i = 0; i + 1 < m; ++i) {
      const double t0 = 0.1 + i * step;
      if ((ratio_at(t0) > 0.0) != (ratio_at(t0 + step) > 0.0)) {
        ++changes;
        change = i;
      }
    }
    const double left = 0.1 + change * step, right = left + step;
    const bool localized = changes == 1 && left <= lo && lo <= right;
    CheckRecord r = make_record("power52.sign_change_localized", "monotonicity", localized,
                                localized ? step - (right - left) : -1.0);
    r.details = Json{{"sign_changes", changes}, {"left", left}, {"right", right}, {"expected", lo}, {"step", step}};
    report.add(std::move(r));
  }

  report.add(confirm_record("power52.collision", "collision", *f, as_point(std::polar(1.0, lo)),
                            as_point(std::polar(1.0, -lo)), 1e-12));

  run.field = sample_field(*f, plane_grid(cfg, samples, 0.05, 1.0, -1.0, 1.0));
  Worst holo;
  for (const auto& s : run.field) {
    if (s.excluded) continue;
    const Complex z(s.x[0], s.x[1]);
    const ComplexDerivatives d = f->derivatives(z);
    holo.update(-std::abs(d.fzbar), [&] { return Json{{"z", complex_json(z)}}; });
  }
  report.add(worst_record("power52.holomorphic", "derivative", holo, 0.0));
  report.add(fd_record("power52.derivatives_vs_finite_differences", *f, run.field, tol));
  return run;
}

}  // namespace

// ---------------------------------------------------------------------------

const std::vector<std::string>& lemma_ids() {
  static const std::vector<std::string> ids{"cone-nesting", "courant-fischer", "dcom", "revtri", "shift-bounds"};
  return ids;
}

const std::vector<std::string>& example_ids() {
  static const std::vector<std::string> ids{"ball", "case1", "case2", "power52"};
  return ids;
}

Report run_verify(const RunConfig& config) {
  const std::string& id = config.target;
  if (id == "shift-bounds") return verify_shift_bounds_suite(config);
  if (id == "revtri") return verify_revtri_suite(config);
  if (id == "dcom") return verify_dcom_suite(config);
  if (id == "courant-fischer") return verify_courant_fischer_suite(config);
  if (id == "cone-nesting") return verify_cone_nesting_suite(config);
  throw Error(Errc::BadParam, "unknown lemma id: " + id);
}

ExampleRun run_example(const RunConfig& config) {
  const std::string& id = config.target;
  if (id == "case1") return example_case1(config);
  if (id == "case2") return example_case2(config);
  if (id == "ball") return example_ball(config);
  if (id == "power52") return example_power52(config);
  throw Error(Errc::BadParam, "unknown example id: " + id);
}

TauSweep run_sweep_tau(const RunConfig& config) {
  std::vector<double> Ks{1.5, 2.25, 4.0, 10.0};
  if (config.K) Ks = {*config.K};
  constexpr int kGrid = 200;
  TauSweep out;
  out.report.config = config;
  const double tol = config.tolerances.get("tau_exact");
  {
    const double e1 = std::abs(tau_for_K(1.0) - 1.0), e4 = std::abs(tau_for_K(4.0) - 0.8);
    CheckRecord r = make_record("sweep_tau.exact_values", "tau", e1 <= tol && e4 <= tol, tol - std::max(e1, e4));
    r.details = Json{{"tau_1", tau_for_K(1.0)}, {"tau_4", tau_for_K(4.0)}};
    out.report.add(std::move(r));
  }
  for (double K : Ks) {
    const double k = k_from_K(K);
    const double tau_k = tau_for_K(K);
    std::vector<TauRow> rows;
    for (int i = 0; i < kGrid; ++i) {
      const double t = i / static_cast<double>(kGrid - 1);
      const double delta = corollary_delta(t, k);
      rows.push_back({K, t, delta, delta > -1.0});
    }
    // Above the threshold on a prefix of the grid, below on the rest.
    int first_below = kGrid;
    for (int i = 0; i < kGrid; ++i) {
      if (!rows[i].above_threshold) {
        first_below = i;
        break;
      }
    }
    bool monotone = true;
    for (int i = first_below; i < kGrid; ++i) monotone = monotone && !rows[i].above_threshold;
    const double left = first_below > 0 ? rows[first_below - 1].tau : 0.0;
    const double right = first_below < kGrid ? rows[first_below].tau : 1.0;
    const bool localized = monotone && first_below > 0 && left < tau_k && tau_k <= right;
    CheckRecord r = make_record("sweep_tau.crossing_K" + label(K), "corollary", localized,
                                localized ? std::min(tau_k - left, right - tau_k) : -1.0);
    r.details = Json{{"K", K},          {"k", k},         {"tau_K", tau_k},
                     {"last_above", left}, {"first_below", right}, {"grid_step", 1.0 / (kGrid - 1)}};
    out.report.add(std::move(r));
    Json table = Json::array();
    for (const auto& row : rows) table.push_back(Json{json_number(row.tau), json_number(row.delta), row.above_threshold});
    out.report.tables["K" + label(K)] = Json{{"columns", {"tau", "delta", "above_threshold"}}, {"rows", table}};
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());
  }
  return out;
}

Report run_analyze_matrix(const RunConfig& config, const SquareMatrix& a) {
  const double delta = config.delta.value_or(0.0);
  const InclusionParams params{delta, config.K};
  params.validate();
  const double band = config.tolerances.get("membership_band");
  Report report;
  report.config = config;

  const SingularSpectrum spectrum = singular_values(a);
  const double det = determinant(a);
  const MarginResult margin = inclusion_margin(a, kDefaultMarginResolution, config.certify);
  const double effective_band = std::max(band, margin.certified ? margin.error_bound : 0.0);
  Membership status = classify_margin(margin.value, delta, effective_band);
  std::optional<double> ko;
  if (config.K) {
    ko = outer_distortion(a);  // throws NonpositiveDeterminant when det <= 0
    if (*ko > *config.K * (1.0 + 1e-9)) status = Membership::Outside;
  }
  std::optional<bool> negative;
  try {
    negative = has_negative_real_eigenvalue(a);
  } catch (const Error& e) {
    if (e.code() != Errc::IllConditioned) throw;
  }

  Json info{{"matrix", matrix_json(a)},
            {"spectrum", to_json(spectrum.sigma)},
            {"determinant", det},
            {"outer_distortion", det > 0.0 ? json_number(outer_distortion(a)) : Json(nullptr)},
            {"inner_distortion", det > 0.0 ? json_number(inner_distortion(a)) : Json(nullptr)},
            {"margin", json_number(margin.value)},
            {"margin_error_bound", margin.error_bound},
            {"margin_certified", margin.certified},
            {"witness", to_json(margin.witness)},
            {"delta", delta},
            {"K", config.K ? Json(*config.K) : Json(nullptr)},
            {"verdict", std::string(to_string(status))},
            {"negative_real_eigenvalue", negative ? Json(*negative) : Json(nullptr)}};

  // The verdict is a result, not a check: an outside verdict passes as long
  // as it is decided. Only the boundary band is inconclusive.
  CheckRecord m = make_record("analyze.verdict", "cone", true, margin.value - delta);
  if (status == Membership::Boundary) m.status = Status::Inconclusive;
  m.details = info;
  report.add(std::move(m));

  // margin > -1 must exclude negative real eigenvalues.
  CheckRecord s = make_record("analyze.spectral_consistency", "negative_eigenvalue", true, 0.0);
  if (!negative) {
    s.status = Status::Inconclusive;
  } else if (margin.value > -1.0 + 1e-9 && *negative) {
    s.status = Status::Fail;
    s.slack = -1.0;
  }
  s.details = Json{{"margin", json_number(margin.value)}, {"negative_real_eigenvalue", negative ? Json(*negative) : Json(nullptr)}};
  report.add(std::move(s));
  return report;
}

void write_tau_csv(std::ostream& out, const std::vector<TauRow>& rows) {
  out << "K,tau,delta,above_threshold\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%s\n", r.K, r.tau, r.delta, r.above_threshold ? "true" : "false");
    out << buf;
  }
}

Json matrix_json(const SquareMatrix& a) {
  Json rows = Json::array();
  for (int i = 0; i < a.dim(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < a.dim(); ++j) row.push_back(json_number(a(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

SquareMatrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw Error(Errc::DimensionMismatch, "matrix must be an array of rows");
  const int n = static_cast<int>(j.size());
  if (n < SquareMatrix::kMinDim || n > SquareMatrix::kMaxDim) {
    throw Error(Errc::DimensionMismatch, "matrix dimension must lie in [2, 6]");
  }
  SquareMatrix a(n);
  for (int i = 0; i < n; ++i) {
    const Json& row = j[i];
    if (!row.is_array() || static_cast<int>(row.size()) != n) throw Error(Errc::DimensionMismatch, "matrix must be square");
    for (int c = 0; c < n; ++c) {
      if (!row[c].is_number()) throw Error(Errc::DimensionMismatch, "matrix entries must be numbers");
      a.set(i, c, row[c].get<double>());
    }
  }
  return a;
}

}  // namespace incl
