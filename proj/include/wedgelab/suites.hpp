#pragma once

// Verification suites shared by the command-line tool and the acceptance
// runner.  Every suite is a pure function of its RunConfig and returns a
// report whose JSON form is deterministic.

#include "wedgelab/io.hpp"

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace wedgelab {

struct RunConfig {
  std::uint64_t seed = 1;
  /// Overrides of the per-check thresholds for geometric and operator checks.
  std::optional<double> tol_geo;
  std::optional<double> tol_op;
  int samples = 1000;
  double mass = 1.0;
  int K = 200;
  double h = 0.05;
  Sabotage sabotage = Sabotage::None;

  double geo(double fallback) const { return tol_geo.value_or(fallback); }
  double op(double fallback) const { return tol_op.value_or(fallback); }
};

inline json to_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["tol_geo"] = c.tol_geo ? json(*c.tol_geo) : json(nullptr);
  j["tol_op"] = c.tol_op ? json(*c.tol_op) : json(nullptr);
  j["samples"] = c.samples;
  j["mass"] = c.mass;
  j["K"] = c.K;
  j["h"] = c.h;
  j["sabotage"] = sabotage_name(c.sabotage);
  return j;
}

/// Fields missing from j keep their values in base.
inline RunConfig run_config_from_json(const json& j, RunConfig base = {}) {
  if (!j.is_object()) throw InputError("a run configuration is a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "seed" && v.is_number_unsigned()) {
      base.seed = v.get<std::uint64_t>();
    } else if ((key == "tol_geo" || key == "tol_op") && (v.is_number() || v.is_null())) {
      auto& slot = key == "tol_geo" ? base.tol_geo : base.tol_op;
      slot = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
    } else if ((key == "samples" || key == "K") && v.is_number_integer()) {
      (key == "K" ? base.K : base.samples) = v.get<int>();
    } else if ((key == "mass" || key == "h") && v.is_number()) {
      (key == "h" ? base.h : base.mass) = v.get<double>();
    } else if (key == "sabotage" && v.is_string()) {
      const auto s = parse_sabotage(v.get<std::string>());
      if (!s) throw InputError("unknown sabotage '" + v.get<std::string>() + "'");
      base.sabotage = *s;
    } else {
      throw InputError("invalid configuration entry '" + key + "': " + v.dump());
    }
  }
  return base;
}

struct SuiteCheck {
  std::string check;
  std::string status;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string witness;
};

struct SuiteReport {
  std::string suite;
  json config = json::object();
  std::vector<SuiteCheck> checks;
  json data = json::object();

  bool passed() const {
    for (const auto& c : checks)
      if (c.status == "fail") return false;
    return true;
  }

  const SuiteCheck& at(const std::string& name) const {
    for (const auto& c : checks)
      if (c.check == name) return c;
    throw std::out_of_range("no check named " + name);
  }

  /// Residual compared against a tolerance; the witness is kept only on failure.
  void add(const std::string& name, double residual, double tol, const std::string& witness = {}) {
    const bool ok = std::isfinite(residual) && residual <= tol;
    checks.push_back({name, ok ? "pass" : "fail", residual, tol, ok ? std::string() : witness});
  }

  void add(const CheckResult& r, double tol, const std::string& prefix) {
    checks.push_back({prefix + r.check, r.status, r.residual, tol, r.witness});
  }

  json to_json() const {
    json cs = json::array();
    for (const auto& c : checks)
      cs.push_back({{"check", c.check},
                    {"status", c.status},
                    {"residual", c.residual},
                    {"tolerance", c.tolerance},
                    {"witness", c.witness}});
    json out;
    out["suite"] = suite;
    out["config"] = config;
    out["passed"] = passed();
    out["checks"] = cs;
    if (!data.empty()) out["data"] = data;
    return out;
  }
};

// ---- geometry -------------------------------------------------------------------

inline SuiteReport geometry_suite(const RunConfig& cfg) {
  SuiteReport rep;
  rep.suite = "geometry";
  rep.config = to_json(cfg);
  std::mt19937_64 rng(cfg.seed);
  const int n = std::max(cfg.samples, 5);

  // Composed reflections about W + xi and W give the reflection translation.
  double refl = 0;
  std::string refl_where;
  for (int i = 0; i < n; ++i) {
    const Wedge w = random_wedge(rng);
    const FourVector xi = random_four_vector(rng);
    const auto prod = compose(edge_reflection(w + xi), edge_reflection(w));
    const double r = std::max((prod.lambda() - Mat4::Identity()).cwiseAbs().maxCoeff(),
                              (prod.translation_part() - reflection_translation(w, xi, 1e-12)).max_abs() /
                                  std::max(1.0, xi.max_abs()));
    if (r > refl) {
      refl = r;
      refl_where = "sample " + std::to_string(i);
    }
  }
  rep.add("reflection_translation", refl, cfg.geo(1e-12), refl_where);

  double trip = 0;
  std::size_t longest = 0;
  std::string trip_where;
  for (int i = 0; i < n / 2; ++i) {
    const auto l = random_poincare(rng, true);
    const auto word = decompose_poincare(l);
    longest = std::max(longest, word.size());
    const double r = compose_word(word).distance(l);
    if (r > trip) {
      trip = r;
      trip_where = "sample " + std::to_string(i);
    }
  }
  rep.add("decompose_round_trip", trip, cfg.geo(1e-9), trip_where);
  rep.add("decompose_word_length", static_cast<double>(longest), 10.0, "word of length " + std::to_string(longest));

  double ident = 0;
  std::string ident_where;
  for (int i = 0; i < n / 5; ++i) {
    std::vector<Wedge> ws;
    for (int k = 0; k < 6; ++k) ws.push_back(random_wedge(rng));
    const auto l = random_poincare(rng, false, 2.0);
    double r;
    std::string err;
    try {
      const auto id = identify_wedge_map(sample_map(ws, l));
      r = std::max(id.lambda.distance(l), std::abs(id.scale - 1.0));
    } catch (const GeometryError& e) {
      r = INFINITY;
      err = std::string(": ") + e.what();
    }
    if (!(r <= ident)) {
      ident = r;
      ident_where = "sample " + std::to_string(i) + err;
    }
  }
  rep.add("identify_wedge_map", ident, cfg.geo(1e-9), ident_where);

  std::vector<Wedge> ws;
  for (int k = 0; k < 6; ++k) ws.push_back(random_wedge(rng));
  const auto dil = identify_wedge_map(sample_map(ws, PoincareElement::identity(), 2.0));
  rep.add("identify_dilation", std::max(std::abs(dil.scale - 2.0), dil.lambda.distance(PoincareElement::identity())),
          cfg.geo(1e-12), "recovered scale " + std::to_string(dil.scale));

  double equiv = 0;
  for (int i = 0; i < n / 5; ++i) {
    const Wedge w = random_wedge(rng);
    const auto l = random_poincare(rng);
    equiv = std::max(equiv, wedge_distance(transform(l, complement(w)), complement(transform(l, w))));
  }
  rep.add("complement_equivariance", equiv, cfg.geo(1e-9));
  return rep;
}

inline SuiteReport decompose_report(const PoincareElement& l, const RunConfig& cfg) {
  SuiteReport rep;
  rep.suite = "decompose";
  rep.config = to_json(cfg);
  const auto word = decompose_poincare(l);
  json w = json::array();
  for (const auto& x : word) w.push_back(to_json(x));
  rep.data["word"] = w;
  rep.data["length"] = word.size();
  rep.add("round_trip", compose_word(word).distance(l), cfg.geo(1e-9));
  rep.add("word_length", static_cast<double>(word.size()), 10.0);
  return rep;
}

// ---- tomita -----------------------------------------------------------------------

inline json spectrum_json(const Eigen::VectorXd& s) {
  json out = json::array();
  for (Eigen::Index i = 0; i < s.size(); ++i) out.push_back(s(i));
  return out;
}

inline void add_tomita_residuals(SuiteReport& rep, const TomitaReport& t, double tol, const std::string& prefix = {}) {
  for (const auto& [name, r] : t.residuals) rep.add(prefix + name, r, tol);
}

/// Modular data of one algebra and vector; throws ModularError when the
/// vector is not cyclic and separating.
inline SuiteReport tomita_compute_report(const FiniteVNAlgebra& a, const StateVector& omega, const RunConfig& cfg) {
  SuiteReport rep;
  rep.suite = "tomita";
  rep.config = to_json(cfg);
  const auto d = compute_modular(a, omega);
  rep.data["spectrum"] = spectrum_json(d.spectrum);
  add_tomita_residuals(rep, verify_tomita(a, d), cfg.op(1e-9));
  return rep;
}

inline SuiteReport tomita_suite(const RunConfig& cfg, int fixtures = 100) {
  SuiteReport rep;
  rep.suite = "tomita";
  rep.config = to_json(cfg);
  std::mt19937_64 rng(cfg.seed);
  const std::vector<std::vector<int>> shapes{{2}, {3}, {4}, {1, 2}, {2, 2}, {1, 1, 2}, {3, 1}, {2, 3}};
  TomitaReport worst;
  for (int trial = 0; trial < fixtures; ++trial) {
    const auto& blocks = shapes[static_cast<std::size_t>(trial) % shapes.size()];
    const auto a = direct_sum_fixture(blocks);
    const auto t = verify_tomita(a, compute_modular(a, random_faithful_vector(blocks, rng)));
    for (const auto& [k, v] : t.residuals) worst.residuals[k] = std::max(worst.residuals[k], v);
  }
  add_tomita_residuals(rep, worst, cfg.op(1e-9), "random_");

  const auto d = compute_modular(left_factor_algebra(2, 2), schmidt_vector({2.0 / 3.0, 1.0 / 3.0}));
  Eigen::VectorXd frozen(4);
  frozen << 0.5, 1.0, 1.0, 2.0;
  rep.data["two_factor_spectrum"] = spectrum_json(d.spectrum);
  rep.add("two_factor_spectrum", (d.spectrum - frozen).cwiseAbs().maxCoeff(), cfg.op(1e-12));
  return rep;
}

// ---- model --------------------------------------------------------------------------

struct ModelRun {
  SuiteReport report;
  std::string spectrum_csv;  // theta,p0,p1 of the measured spectrum
};

inline Vec2 random_vec2(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  const double a = u(rng);
  return {a, u(rng)};
}

inline StateVector random_interior_vector(const ModelFixture& m, int margin, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  StateVector v = StateVector::Zero(m.dim());
  for (int r : m.interior_rows(margin)) {
    const double re = nd(rng);
    v(r) = Complex(re, nd(rng));
  }
  return v.normalized();
}

/// Rows "theta,p0,p1" of measured spectral points, theta the rapidity of p.
inline std::string spectrum_csv(const std::vector<FourVector>& points) {
  std::ostringstream os;
  os << "theta,p0,p1\n" << std::setprecision(17);
  for (const auto& p : points) os << std::atanh(p[1] / p[0]) << ',' << p[0] << ',' << p[1] << '\n';
  return os.str();
}

/// Translations, axis unitaries, continuity, spectrum, stability and the
/// CGMA conditions of the grid model net.
inline ModelRun model_suite(const RunConfig& cfg) {
  ModelRun run;
  SuiteReport& rep = run.report;
  rep.suite = "model";
  rep.config = to_json(cfg);
  const auto model = std::make_shared<const ModelFixture>(build_model(cfg.mass, cfg.K, cfg.h));
  const NetFixture f = model_net(model, Vec2(0.02, 0.05), cfg.sabotage);
  std::mt19937_64 rng(cfg.seed);
  const double exact = cfg.op(1e-12);

  const auto cg = check_cgma(f);
  for (const auto& [name, r] : cg.conditions) rep.add(r, cfg.op(1e-10), "cgma_");

  const auto star = check_star_relation(f, PoincareElement::translation({0.02, 0.05, 0, 0}), {"Rhalf", "R0"});
  rep.add("star_relation", star.residual, cfg.op(1e-10), std::to_string(star.compared) + " members compared");

  // Translation system against the analytic diagonal representation.
  const auto t = assemble_translations(f, {0, 1});
  double assembly = 0;
  for (int i = 0; i < 50; ++i) {
    const Vec2 xi = random_vec2(rng, 1.0);
    assembly = std::max(assembly, operator_distance(t({xi(0), xi(1), 0, 0}), model->translation_rep(xi)));
  }
  rep.add("translation_assembly", assembly, exact);
  rep.add("translation_commutation", check_commutation(t, {0.4, -0.9, 0, 0}), exact);
  rep.add("axis_consistency_right_left",
          check_axis_consistency(f, {f.at("R0").region, f.at("L0").region}, 0.7), exact);

  // V(t) = J_{W + t xi} J_W on dyadic rationals.
  const auto v = build_axis_unitary(f, "R0", {0.0, 0.3, 0, 0});
  const auto ax = check_axis_unitary(v, {0.125, 0.25, 0.375, 0.5});
  rep.add("axis_doubling", ax.doubling, exact);
  rep.add("axis_reflection", ax.reflection, exact);
  rep.add("axis_homomorphism", ax.homomorphism, exact);

  // ||(J_t - J_0) psi|| <= C |t| on interior vectors.
  const Vec2 dir(0.5, 0.25);
  const double c = model->phase_rate(dir);
  const auto j0 = model->wedge_conjugation(ModelWedgeTag::right(Vec2::Zero()));
  double excess = -INFINITY;
  for (int i = 0; i < 20; ++i) {
    const StateVector psi = random_interior_vector(*model, cfg.K / 4, rng);
    for (double s : {1e-3, 0.01, 0.1, 0.5}) {
      const auto js = model->wedge_conjugation(ModelWedgeTag::right(Vec2(s * dir)));
      excess = std::max(excess, (js.apply(psi) - j0.apply(psi)).norm() - c * s);
    }
  }
  rep.add("continuity_bound", std::max(excess, 0.0), 0.0, "bound exceeded by " + std::to_string(excess));

  try {
    const auto sp = spectrum_report(t);
    rep.data["cone"] = cone_name(sp.cone);
    rep.data["spectrum_points"] = sp.points.size();
    const bool forward = sp.cone == Cone::Forward && !sp.trivial;
    rep.add("spectrum_cone", forward ? sp.max_violation : INFINITY, 0.0,
            std::string("cone ") + cone_name(sp.cone) + (sp.trivial ? " (trivial)" : ""));
    run.spectrum_csv = spectrum_csv(sp.points);
  } catch (const SpectrumAmbiguity& e) {
    rep.add("spectrum_cone", INFINITY, 0.0, e.what());
  }

  const auto st = check_modular_stability(f);
  rep.add("modular_stability", st.operator_residual, exact);
  std::size_t longest = 0;
  for (auto n : st.word_lengths) longest = std::max(longest, n);
  rep.add("boost_certificates", longest <= 10 ? st.geometric_residual : INFINITY, cfg.geo(1e-9),
          "longest word " + std::to_string(longest));
  return run;
}

// ---- cgma ---------------------------------------------------------------------------

inline SuiteReport cgma_suite(const NetFixture& f, const RunConfig& cfg) {
  SuiteReport rep;
  rep.suite = "cgma";
  rep.config = to_json(cfg);
  rep.data["fixture"] = f.name;
  for (const auto& [name, r] : check_cgma(f).conditions) rep.add(r, cfg.op(1e-10), "cgma_");
  if (f.omega) rep.add("modular_data_consistency", modular_data_consistency(f), cfg.op(1e-9));
  return rep;
}

}  // namespace wedgelab
