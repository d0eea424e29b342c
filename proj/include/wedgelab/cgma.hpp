#pragma once

// Verification harness for nets of wedge data: conditions (a)-(d) of the
// modular-action characterization, the covariance relation
// J(l) J_W J(l)^{-1} = J_{lW}, translations built from products of modular
// conjugations, the spectrum condition and modular stability.

#include "wedgelab/freemodel.hpp"
#include "wedgelab/tomita.hpp"
#include "wedgelab/wedges.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace wedgelab {

class HarnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Spectral norm for operators up to 64x64; above that the upper bound
/// sqrt(||m||_1 ||m||_inf), which is exact for diagonal and shift operators.
inline double norm_bound(const LinOp& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() <= 64) return op_norm(m);
  const double c1 = m.cwiseAbs().colwise().sum().maxCoeff();
  const double ci = m.cwiseAbs().rowwise().sum().maxCoeff();
  return std::sqrt(c1 * ci);
}

inline double operator_distance(const LinOp& a, const LinOp& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
  return norm_bound(LinOp(a - b));
}

// ---- net fixtures -------------------------------------------------------------

/// Data attached to one wedge: its modular conjugation, optionally the
/// modular unitaries Delta^{+-i t0} and the wedge algebra.
struct NetData {
  AntilinearOperator J;
  LinOp flow_plus;
  LinOp flow_minus;
  std::optional<FiniteVNAlgebra> algebra;

  bool has_flow() const { return flow_plus.size() > 0; }

  /// Data of the image net element under Ad T, T antiunitary.  Since
  /// Delta_{TW} = T Delta_W T^{-1}, the flows exchange roles.
  NetData transported(const AntilinearOperator& t) const {
    NetData out;
    out.J = (t * J) * t.inverse();
    if (has_flow()) {
      out.flow_plus = t.adjoint_action(flow_minus);
      out.flow_minus = t.adjoint_action(flow_plus);
    }
    if (algebra) {
      std::vector<LinOp> moved;
      for (const auto& b : algebra->basis()) moved.push_back(t.adjoint_action(b));
      out.algebra = FiniteVNAlgebra::from_span(algebra->dim(), moved);
    }
    return out;
  }
};

/// Distance used to identify net elements: algebras when both carry one,
/// else modular flows, else conjugations.
inline double identity_distance(const NetData& a, const NetData& b) {
  if (a.algebra && b.algebra) return span_distance(*a.algebra, *b.algebra);
  if (a.has_flow() && b.has_flow())
    return std::max(operator_distance(a.flow_plus, b.flow_plus), operator_distance(a.flow_minus, b.flow_minus));
  return operator_distance(a.J.matrix(), b.J.matrix());
}

/// Distance over every datum present in both.
inline double full_distance(const NetData& a, const NetData& b) {
  double d = operator_distance(a.J.matrix(), b.J.matrix());
  if (a.has_flow() && b.has_flow())
    d = std::max({d, operator_distance(a.flow_plus, b.flow_plus), operator_distance(a.flow_minus, b.flow_minus)});
  if (a.algebra && b.algebra) d = std::max(d, span_distance(*a.algebra, *b.algebra));
  return d;
}

struct NetMember {
  std::string id;
  Wedge region;
  NetData data;
};

struct NetFixture {
  std::string name;
  Eigen::Index dim = 0;
  /// The finite wedge sample the conditions quantify over.
  std::vector<NetMember> members;
  /// Wedges whose conjugations act on the sample without belonging to it.
  std::vector<NetMember> extra_generators;
  std::optional<StateVector> omega;
  double flow_time = 0.0;
  double match_tol = 1e-6;
  double op_tol = 1e-9;
  /// Net data at arbitrary wedges, when the fixture knows the whole net.
  std::function<std::optional<NetData>(const Wedge&)> data_at;
  /// Wedge carrying the given data, when recognizable.
  std::function<std::optional<Wedge>(const NetData&)> locate;
  /// Rows on which flow comparisons are exact (grid interior); empty = all.
  std::function<std::vector<Eigen::Index>(int steps)> reliable_rows;

  const NetMember* find(const std::string& id) const {
    for (const auto& m : members)
      if (m.id == id) return &m;
    for (const auto& m : extra_generators)
      if (m.id == id) return &m;
    return nullptr;
  }

  const NetMember& at(const std::string& id) const {
    const NetMember* m = find(id);
    if (!m) throw HarnessError("no net element with id '" + id + "'");
    return *m;
  }

  std::optional<NetData> data_for(const Wedge& w) const {
    for (const auto& m : members)
      if (approx_equal(m.region, w, 1e-9)) return m.data;
    for (const auto& m : extra_generators)
      if (approx_equal(m.region, w, 1e-9)) return m.data;
    if (data_at) return data_at(w);
    return std::nullopt;
  }

  std::vector<const NetMember*> generators() const {
    std::vector<const NetMember*> g;
    for (const auto& m : members) g.push_back(&m);
    for (const auto& m : extra_generators) g.push_back(&m);
    return g;
  }
};

// ---- induced maps -------------------------------------------------------------

struct MemberMatch {
  std::vector<std::string> ids;
  double best = std::numeric_limits<double>::infinity();
};

inline MemberMatch match_members(const NetFixture& f, const NetData& d) {
  MemberMatch out;
  for (const auto& m : f.members) {
    const double r = identity_distance(m.data, d);
    out.best = std::min(out.best, r);
    if (r <= f.match_tol) out.ids.push_back(m.id);
  }
  return out;
}

struct InducedEntry {
  std::string source;
  std::vector<std::string> matches;
  double residual = 0.0;
};

struct InducedMap {
  std::string generator;
  std::vector<InducedEntry> entries;

  std::vector<std::string> unmatched() const {
    std::vector<std::string> out;
    for (const auto& e : entries)
      if (e.matches.empty()) out.push_back(e.source);
    return out;
  }

  /// Source id -> image id; throws on an ambiguous match.
  std::map<std::string, std::string> resolve() const {
    std::map<std::string, std::string> out;
    for (const auto& e : entries) {
      if (e.matches.size() > 1)
        throw HarnessError("ambiguous image of '" + e.source + "': '" + e.matches[0] + "' and '" + e.matches[1] + "'");
      if (e.matches.size() == 1) out[e.source] = e.matches[0];
    }
    return out;
  }

  /// Pairs of regions for the uniquely matched members.
  WedgeMapSample as_sample(const NetFixture& f) const {
    WedgeMapSample s;
    for (const auto& [src, dst] : resolve()) s.pairs.emplace_back(f.at(src).region, f.at(dst).region);
    return s;
  }
};

/// The member matched by J_g data(W0) J_g^{-1} for every member W0.
inline InducedMap induced_wedge_map(const NetFixture& f, const std::string& generator) {
  if (f.members.size() < 2) throw HarnessError("induced_wedge_map needs at least two net elements");
  const NetMember& g = f.at(generator);
  InducedMap out{generator, {}};
  for (const auto& m : f.members) {
    InducedEntry e{m.id, {}, 0.0};
    if (g.data.J.dim() != m.data.J.dim()) {
      e.residual = std::numeric_limits<double>::infinity();
    } else {
      const MemberMatch mm = match_members(f, m.data.transported(g.data.J));
      e.matches = mm.ids;
      e.residual = mm.best;
    }
    out.entries.push_back(std::move(e));
  }
  return out;
}

// ---- conditions (a)-(d) -------------------------------------------------------

struct CheckResult {
  std::string check;
  std::string status;  // "pass", "fail" or "skipped"
  double residual = 0.0;
  std::string witness;

  bool passed() const { return status == "pass"; }
  bool failed() const { return status == "fail"; }
};

struct CgmaReport {
  std::map<std::string, CheckResult> conditions;

  const CheckResult& operator[](const std::string& c) const { return conditions.at(c); }
  std::vector<std::string> failed() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : conditions)
      if (v.failed()) out.push_back(k);
    return out;
  }
};

namespace detail {

inline bool all_have_algebras(const NetFixture& f) {
  return std::all_of(f.members.begin(), f.members.end(), [](const NetMember& m) { return m.data.algebra.has_value(); });
}

inline CheckResult check_bijection(const NetFixture& f) {
  CheckResult r{"a", "pass", 0.0, ""};
  for (std::size_t i = 0; i < f.members.size(); ++i)
    for (std::size_t j = i + 1; j < f.members.size(); ++j) {
      const double d = identity_distance(f.members[i].data, f.members[j].data);
      if (d <= f.match_tol) {
        r.status = "fail";
        r.residual = std::max(r.residual, f.match_tol - d);
        if (r.witness.empty()) r.witness = f.members[i].id + "," + f.members[j].id;
      }
    }
  if (!all_have_algebras(f)) {
    if (r.passed()) r.witness = "order compatibility needs algebras; injectivity only";
    return r;
  }
  for (const auto& a : f.members)
    for (const auto& b : f.members) {
      if (&a == &b) continue;
      const double c = a.data.algebra->residual_in(*b.data.algebra);
      const bool alg_in = c <= f.op_tol;
      const bool geo_in = included(a.region, b.region);
      if (geo_in) r.residual = std::max(r.residual, c);
      if (alg_in != geo_in) {
        if (r.passed()) r.witness = a.id + "," + b.id;
        r.status = "fail";
      }
    }
  return r;
}

inline CheckResult check_intersections(const NetFixture& f) {
  if (!all_have_algebras(f) || !f.omega) return {"b", "skipped", 0.0, "no algebras at one-particle level"};
  CheckResult r{"b", "pass", 0.0, ""};
  for (std::size_t i = 0; i < f.members.size(); ++i)
    for (std::size_t j = i; j < f.members.size(); ++j) {
      const auto& a = f.members[i];
      const auto& b = f.members[j];
      const auto meet = intersection(*a.data.algebra, *b.data.algebra);
      const auto cs = is_cyclic_separating(meet, *f.omega);
      const bool faithful = cs.cyclic && cs.separating;
      const bool ok = disjoint(a.region, b.region) != faithful;
      if (!ok && r.passed()) {
        r.status = "fail";
        r.witness = a.id + "," + b.id;
      }
    }
  return r;
}

inline CheckResult check_invariance(const NetFixture& f) {
  CheckResult r{"c", "pass", 0.0, ""};
  int unchecked = 0;
  auto fail = [&](const std::string& w) {
    if (r.passed()) r.witness = w;
    r.status = "fail";
  };
  std::vector<const NetMember*> valid;
  for (const NetMember* g : f.generators()) {
    const double inv = g->data.J.involution_residual();
    const double unit = g->data.J.antiunitarity_residual();
    r.residual = std::max({r.residual, inv, unit});
    if (inv > f.op_tol || unit > f.op_tol)
      fail(g->id + " is not an antiunitary involution");
    else
      valid.push_back(g);
  }
  for (const NetMember* g : valid) {
    for (const auto& m : f.members) {
      if (m.data.J.dim() != g->data.J.dim()) {
        fail(g->id + " maps " + m.id + " outside the net (dimension)");
        continue;
      }
      const NetData image = m.data.transported(g->data.J);
      const MemberMatch mm = match_members(f, image);
      if (!mm.ids.empty()) {
        r.residual = std::max(r.residual, mm.best);
        continue;
      }
      if (!f.locate || !f.data_at) {
        ++unchecked;
        continue;
      }
      const auto where = f.locate(image);
      const auto expected = where ? f.data_at(*where) : std::nullopt;
      const double d = expected ? full_distance(*expected, image) : std::numeric_limits<double>::infinity();
      if (d > f.match_tol) {
        fail(g->id + " maps " + m.id + " outside the net");
        r.residual = std::max(r.residual, d);
      } else {
        r.residual = std::max(r.residual, d);
      }
    }
  }
  if (r.passed() && unchecked > 0) r.witness = std::to_string(unchecked) + " images outside the sample not checked";
  return r;
}

inline CheckResult check_transitivity(const NetFixture& f) {
  CheckResult r{"d", "pass", 0.0, ""};
  if (f.members.empty()) return r;
  std::set<std::string> reached{f.members.front().id};
  std::deque<const NetMember*> queue{&f.members.front()};
  while (!queue.empty()) {
    const NetMember* m = queue.front();
    queue.pop_front();
    for (const NetMember* g : f.generators()) {
      if (g->data.J.dim() != m->data.J.dim()) continue;
      const MemberMatch mm = match_members(f, m->data.transported(g->data.J));
      for (const auto& id : mm.ids) {
        r.residual = std::max(r.residual, mm.best);
        if (reached.insert(id).second) queue.push_back(&f.at(id));
      }
    }
  }
  std::vector<std::string> missing;
  for (const auto& m : f.members)
    if (!reached.count(m.id)) missing.push_back(m.id);
  if (!missing.empty()) {
    r.status = "fail";
    std::ostringstream os;
    os << "orbit of " << f.members.front().id << " misses";
    for (const auto& id : missing) os << ' ' << id;
    r.witness = os.str();
  } else {
    r.witness = "orbit covers " + std::to_string(f.members.size()) + " sampled wedges";
  }
  return r;
}

}  // namespace detail

inline CgmaReport check_cgma(const NetFixture& f) {
  CgmaReport rep;
  rep.conditions["a"] = detail::check_bijection(f);
  rep.conditions["b"] = detail::check_intersections(f);
  rep.conditions["c"] = detail::check_invariance(f);
  rep.conditions["d"] = detail::check_transitivity(f);
  return rep;
}

/// Max deviation of a fixture with algebras from the modular data computed
/// directly from (algebra, Omega).
inline double modular_data_consistency(const NetFixture& f) {
  if (!f.omega) return 0.0;
  double r = 0;
  for (const auto& m : f.members) {
    if (!m.data.algebra) continue;
    const ModularData d = compute_modular(*m.data.algebra, *f.omega);
    r = std::max(r, operator_distance(d.J.matrix(), m.data.J.matrix()));
    if (m.data.has_flow()) {
      r = std::max(r, operator_distance(modular_flow(d, f.flow_time), m.data.flow_plus));
      r = std::max(r, operator_distance(modular_flow(d, -f.flow_time), m.data.flow_minus));
    }
  }
  return r;
}

// ---- covariance relation --------------------------------------------------------

/// J_{w[0]} ... J_{w[n-1]} for net element ids.
inline SemilinearOp conjugation_word(const NetFixture& f, const std::vector<std::string>& word) {
  SemilinearOp out = SemilinearOp::identity(f.dim);
  for (const auto& id : word) out = out * SemilinearOp(f.at(id).data.J);
  return out;
}

struct StarResult {
  double residual = 0.0;
  int compared = 0;
  int skipped = 0;
};

/// max_W || J(l) J_W J(l)^{-1} - J_{lW} || over the sample, J(l) the
/// conjugation word; members whose image has no net data are skipped.
inline StarResult check_star_relation(const NetFixture& f, const PoincareElement& l, const std::vector<std::string>& word) {
  std::vector<Wedge> regions;
  for (const auto& id : word) regions.push_back(f.at(id).region);
  const PoincareElement induced = compose_word(regions);
  if (induced.distance(l) > 1e-9 * std::max(1.0, l.translation_part().max_abs()))
    throw HarnessError("conjugation word does not induce the given Poincare element");
  const SemilinearOp jl = conjugation_word(f, word);
  StarResult out;
  for (const auto& m : f.members) {
    const auto target = f.data_for(transform(l, m.region));
    if (!target) {
      ++out.skipped;
      continue;
    }
    ++out.compared;
    out.residual = std::max(out.residual, operator_distance(jl.adjoint_action(m.data.J).matrix(), target->J.matrix()));
  }
  return out;
}

// ---- one-parameter groups from conjugations ------------------------------------

inline AntilinearOperator conjugation_at(const NetFixture& f, const Wedge& w) {
  const auto d = f.data_for(w);
  if (!d) {
    std::ostringstream os;
    os << "no net data for the wedge with apex (" << w.xi()[0] << ", " << w.xi()[1] << ", " << w.xi()[2] << ", "
       << w.xi()[3] << ")";
    throw HarnessError(os.str());
  }
  return d->J;
}

/// t -> V(t) = J_{W + t xi} J_W.
class AxisUnitary {
 public:
  AxisUnitary(const NetFixture& f, const Wedge& w, const FourVector& xi) : f_(&f), w_(w), xi_(xi), jw_(conjugation_at(f, w)) {}

  LinOp operator()(double t) const { return conjugation_at(*f_, w_ + xi_ * t) * jw_; }
  const AntilinearOperator& base() const { return jw_; }
  /// Translation induced by V(t) on the geometric side.
  FourVector induced_translation(double t) const { return reflection_translation(w_, xi_ * t); }

 private:
  const NetFixture* f_;
  Wedge w_;
  FourVector xi_;
  AntilinearOperator jw_;
};

struct AxisUnitaryReport {
  double unitarity = 0.0;
  double homomorphism = 0.0;  // V(s)V(t) - V(s+t)
  double reflection = 0.0;    // V(t) J_W - J_W V(t)^{-1}
  double doubling = 0.0;      // V(t)^2 - V(2t)

  double worst() const { return std::max({unitarity, homomorphism, reflection, doubling}); }
};

inline AxisUnitaryReport check_axis_unitary(const AxisUnitary& v, const std::vector<double>& ts) {
  AxisUnitaryReport r;
  for (double t : ts) {
    const LinOp vt = v(t);
    r.unitarity = std::max(r.unitarity, unitarity_residual(vt));
    const LinOp lhs = (vt * v.base()).matrix();
    const LinOp rhs = (v.base() * LinOp(vt.adjoint())).matrix();
    r.reflection = std::max(r.reflection, operator_distance(lhs, rhs));
    r.doubling = std::max(r.doubling, operator_distance(product(vt, vt), v(2 * t)));
    for (double s : ts) r.homomorphism = std::max(r.homomorphism, operator_distance(product(v(s), vt), v(s + t)));
  }
  return r;
}

inline AxisUnitary build_axis_unitary(const NetFixture& f, const std::string& id, const FourVector& xi) {
  return AxisUnitary(f, f.at(id).region, xi);
}

// ---- translations -------------------------------------------------------------

/// U_i(s) = J_{W_i + s e_mu / 2} J_{W_i} along each available coordinate axis.
struct TranslationSystem {
  const NetFixture* net = nullptr;
  Wedge base;
  std::vector<int> axes;  // coordinate indices mu with an axis unitary

  LinOp axis_unitary(int mu, double s) const {
    return conjugation_at(*net, base + FourVector::axis(mu, s / 2)) * conjugation_at(*net, base);
  }

  /// U(xi) = prod_mu U_mu(xi_mu); components along missing axes must vanish.
  LinOp operator()(const FourVector& xi) const {
    LinOp u = LinOp::Identity(net->dim, net->dim);
    for (int mu = 0; mu < 4; ++mu) {
      const bool have = std::find(axes.begin(), axes.end(), mu) != axes.end();
      if (!have) {
        if (xi[mu] != 0.0) throw HarnessError("translation has a component along an axis without data");
        continue;
      }
      u = product(u, axis_unitary(mu, xi[mu]));
    }
    return u;
  }

  PoincareElement induced(int mu, double s) const {
    return compose(edge_reflection(base + FourVector::axis(mu, s / 2)), edge_reflection(base));
  }
};

/// Max ||U(xi0) via W_i - U(xi0) via W_j|| over the given base wedges, for a
/// time translation xi0.
inline double check_axis_consistency(const NetFixture& f, const std::vector<Wedge>& bases, double xi0) {
  if (bases.size() < 2) throw HarnessError("axis consistency needs at least two wedge orientations");
  const FourVector half = FourVector::time(xi0 / 2);
  std::vector<LinOp> us;
  for (const auto& w : bases) us.push_back(conjugation_at(f, w + half) * conjugation_at(f, w));
  double r = 0;
  for (std::size_t i = 0; i < us.size(); ++i)
    for (std::size_t j = i + 1; j < us.size(); ++j) r = std::max(r, operator_distance(us[i], us[j]));
  return r;
}

/// Geometric counterpart: lambda_{W_i + xi0/2} lambda_{W_i} against the
/// translation by xi0 for the three standard wedges.
inline double geometric_axis_consistency(const FourVector& xi0) {
  double r = 0;
  for (int i = 1; i <= 3; ++i) {
    const Wedge w = standard_wedge(i);
    const PoincareElement l = compose(edge_reflection(w + xi0 / 2.0), edge_reflection(w));
    r = std::max(r, l.distance(PoincareElement::translation(xi0)));
  }
  return r;
}

/// Commutator of the axis unitaries for the components of xi.
inline double check_commutation(const TranslationSystem& t, const FourVector& xi) {
  double r = 0;
  for (std::size_t i = 0; i < t.axes.size(); ++i)
    for (std::size_t j = i + 1; j < t.axes.size(); ++j) {
      const LinOp a = t.axis_unitary(t.axes[i], xi[t.axes[i]]);
      const LinOp b = t.axis_unitary(t.axes[j], xi[t.axes[j]]);
      r = std::max(r, operator_distance(product(a, b), product(b, a)));
    }
  return r;
}

/// Geometric counterpart: induced translations along different axes commute.
inline double geometric_commutation(const FourVector& xi) {
  double r = 0;
  std::vector<PoincareElement> ts;
  for (int mu = 0; mu < 4; ++mu) {
    if (xi[mu] == 0.0) continue;
    const Wedge w = standard_wedge(mu == 1 ? 2 : 1);
    ts.push_back(compose(edge_reflection(w + FourVector::axis(mu, xi[mu] / 2)), edge_reflection(w)));
  }
  for (std::size_t i = 0; i < ts.size(); ++i)
    for (std::size_t j = i + 1; j < ts.size(); ++j)
      r = std::max(r, compose(ts[i], ts[j]).distance(compose(ts[j], ts[i])));
  return r;
}

/// Translation system based at the first sample member, with axes for
/// which the net provides data.  Aborts when the axis unitaries built from
/// complementary wedges disagree.
inline TranslationSystem assemble_translations(const NetFixture& f, const std::vector<int>& axes, double probe = 0.1,
                                               double tol = 1e-9) {
  if (f.members.empty()) throw HarnessError("empty net fixture");
  TranslationSystem t{&f, f.members.front().region, axes};
  const Wedge b = t.base;
  const double r = check_axis_consistency(f, {b, complement(b)}, probe);
  if (r > tol) throw HarnessError("axis unitaries disagree between a wedge and its complement: " + std::to_string(r));
  return t;
}

inline double translation_group_residual(const TranslationSystem& t, const FourVector& a, const FourVector& b) {
  return operator_distance(product(t(a), t(b)), t(a + b));
}

/// max over members with W + xi in the net of ||U J_W U^{-1} - J_{W+xi}||.
inline double translation_covariance_residual(const TranslationSystem& t, const FourVector& xi) {
  const LinOp u = t(xi);
  const LinOp uinv = u.adjoint();
  double r = 0;
  for (const auto& m : t.net->members) {
    const auto target = t.net->data_for(m.region + xi);
    if (!target) continue;
    r = std::max(r, operator_distance(((u * m.data.J) * uinv).matrix(), target->J.matrix()));
  }
  return r;
}

// ---- spectrum -----------------------------------------------------------------

enum class Cone { Forward, Backward, Neither };

inline const char* cone_name(Cone c) {
  switch (c) {
    case Cone::Forward:
      return "Forward";
    case Cone::Backward:
      return "Backward";
    default:
      return "Neither";
  }
}

class SpectrumAmbiguity : public HarnessError {
 public:
  SpectrumAmbiguity(const std::string& what, int suggested_levels)
      : HarnessError(what), suggested_levels_(suggested_levels) {}
  int suggested_levels() const { return suggested_levels_; }

 private:
  int suggested_levels_;
};

struct SpectrumReport {
  std::vector<FourVector> points;
  Cone cone = Cone::Neither;
  double max_violation = 0.0;  // of the classified cone, or of the forward cone if Neither
  bool trivial = false;
};

/// Classifies points by p0 >= |p| - tol (Forward) or -p0 >= |p| - tol (Backward).
inline SpectrumReport classify_spectrum(std::vector<FourVector> points, double tol = 1e-12) {
  SpectrumReport r;
  r.points = std::move(points);
  double fwd = 0, bwd = 0, biggest = 0;
  for (const auto& p : r.points) {
    const double s = p.spatial().norm();
    fwd = std::max(fwd, s - p[0]);
    bwd = std::max(bwd, s + p[0]);
    biggest = std::max(biggest, p.max_abs());
  }
  r.trivial = biggest <= tol;
  if (fwd <= tol) {
    r.cone = Cone::Forward;
    r.max_violation = std::max(0.0, fwd);
  } else if (bwd <= tol) {
    r.cone = Cone::Backward;
    r.max_violation = std::max(0.0, bwd);
  } else {
    r.cone = Cone::Neither;
    r.max_violation = fwd;
  }
  return r;
}

namespace detail {

inline double wrap_phase(double x) { return std::remainder(x, 2 * std::numbers::pi); }

inline bool is_diagonal(const LinOp& m, double tol) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (i != j && std::abs(m(i, j)) > tol) return false;
  return true;
}

}  // namespace detail

/// Joint spectrum of the translation generators.  Eigenphases of U(s e_mu)
/// are followed along s = scale / 2^n, n = levels..0, unwrapping each step
/// from the previous one.
inline SpectrumReport spectrum_report(const TranslationSystem& t, double scale = 1.0, int levels = 20,
                                      double tol = 1e-12) {
  const Eigen::Index n = t.net->dim;
  const double fine = scale / std::ldexp(1.0, levels);
  // Joint eigenbasis from the finest samples.
  std::vector<LinOp> finest;
  for (int mu : t.axes) finest.push_back(t.axis_unitary(mu, fine));
  bool diagonal = true;
  for (const auto& u : finest) diagonal = diagonal && detail::is_diagonal(u, 1e-12);
  LinOp basis = LinOp::Identity(n, n);
  if (!diagonal) {
    LinOp mix = LinOp::Zero(n, n);
    double w = 1.0;
    for (const auto& u : finest) {
      mix += w * u;
      w *= 0.6180339887498949;
    }
    Eigen::ComplexEigenSolver<LinOp> es(mix);
    basis = es.eigenvectors();
    for (Eigen::Index j = 0; j < n; ++j) basis.col(j).normalize();
  }
  const LinOp basis_inv = diagonal ? basis : LinOp(basis.inverse());
  auto eigenphases = [&](int mu, double s) -> Eigen::VectorXd {
    const LinOp u = t.axis_unitary(mu, s);
    Eigen::VectorXd ph(n);
    if (diagonal) {
      for (Eigen::Index k = 0; k < n; ++k) ph(k) = std::arg(u(k, k));
    } else {
      const LinOp d = basis_inv * u * basis;
      for (Eigen::Index k = 0; k < n; ++k) ph(k) = std::arg(d(k, k));
    }
    return ph;
  };

  std::vector<Eigen::VectorXd> generator(4, Eigen::VectorXd::Zero(n));
  const double guard = std::numbers::pi / 4;
  for (int mu : t.axes) {
    Eigen::VectorXd phase = eigenphases(mu, fine);
    const double top = phase.cwiseAbs().maxCoeff();
    if (top > guard) {
      const int extra = static_cast<int>(std::ceil(std::log2(top / guard)));
      throw SpectrumAmbiguity("eigenphase " + std::to_string(top) + " at the finest sample is ambiguous; use at least " +
                                  std::to_string(levels + extra) + " refinement levels",
                              levels + extra);
    }
    for (int lev = levels - 1; lev >= 0; --lev) {
      const Eigen::VectorXd measured = eigenphases(mu, scale / std::ldexp(1.0, lev));
      for (Eigen::Index k = 0; k < n; ++k) {
        const double predicted = 2 * phase(k);
        const double step = detail::wrap_phase(measured(k) - predicted);
        if (std::abs(step) > guard)
          throw SpectrumAmbiguity("phase unwrapping lost track at refinement level " + std::to_string(lev) +
                                      "; use at least " + std::to_string(levels + 4) + " levels",
                                  levels + 4);
        phase(k) = predicted + step;
      }
    }
    // phase = p . (scale e_mu) = g_mumu p_mu scale
    generator[static_cast<std::size_t>(mu)] = phase / (scale * metric()(mu, mu));
  }
  std::vector<FourVector> pts;
  for (Eigen::Index k = 0; k < n; ++k)
    pts.emplace_back(generator[0](k), generator[1](k), generator[2](k), generator[3](k));
  return classify_spectrum(std::move(pts), tol);
}

// ---- modular stability --------------------------------------------------------

/// Poincare transformation induced by Delta_W^{it}: the boost fixing the
/// edge of W with l+ -> e^{2 pi t} l+, l- -> e^{-2 pi t} l-.
inline PoincareElement modular_boost(const Wedge& w, double t) {
  const Vec4& lp = w.ell_plus().vec();
  const Vec4& lm = w.ell_minus().vec();
  const double c = w.ray_product();
  const Mat4 pp = lp * (metric() * lm).transpose() / c;
  const Mat4 pm = lm * (metric() * lp).transpose() / c;
  const double s = 2 * std::numbers::pi * t;
  const Mat4 lambda = Mat4::Identity() + (std::exp(s) - 1.0) * pp + (std::exp(-s) - 1.0) * pm;
  return {lambda, FourVector(Vec4(w.xi().vec() - lambda * w.xi().vec())), 1e-8};
}

struct StabilityReport {
  double operator_residual = 0.0;
  int operator_comparisons = 0;
  double geometric_residual = 0.0;
  std::vector<std::size_t> word_lengths;
};

/// (i) Delta_W^{i n t0} J_V Delta_W^{-i n t0} = J_{Lambda_W V} for sample
/// members W, V and n in steps; (ii) modular boosts about the three spatial
/// axes decompose into reflection words.
inline StabilityReport check_modular_stability(const NetFixture& f, const std::vector<int>& steps = {1, 2},
                                               const std::vector<double>& rapidities = {0.5, 1.0}) {
  StabilityReport r;
  for (const auto& w : f.members) {
    if (!w.data.has_flow()) throw HarnessError("modular stability needs flow data for " + w.id);
    for (int n : steps) {
      LinOp fl = LinOp::Identity(f.dim, f.dim);
      for (int i = 0; i < n; ++i) fl = product(fl, w.data.flow_plus);
      const LinOp fl_inv = fl.adjoint();
      const PoincareElement boost = modular_boost(w.region, n * f.flow_time);
      std::vector<Eigen::Index> rows;
      if (f.reliable_rows) rows = f.reliable_rows(n);
      for (const auto& v : f.members) {
        const auto target = f.data_for(transform(boost, v.region));
        if (!target) continue;
        const LinOp moved = ((fl * v.data.J) * fl_inv).matrix();
        double d = 0;
        if (rows.empty()) {
          d = operator_distance(moved, target->J.matrix());
        } else {
          for (Eigen::Index a : rows)
            for (Eigen::Index b : rows) d = std::max(d, std::abs(moved(a, b) - target->J.matrix()(a, b)));
        }
        r.operator_residual = std::max(r.operator_residual, d);
        ++r.operator_comparisons;
      }
    }
  }
  for (int axis = 1; axis <= 3; ++axis)
    for (double chi : rapidities) {
      const auto l = PoincareElement::lorentz(boost_matrix(axis, chi));
      const auto word = decompose_poincare(l);
      r.word_lengths.push_back(word.size());
      r.geometric_residual = std::max(r.geometric_residual, compose_word(word).distance(l));
    }
  return r;
}

// ---- projective lift ----------------------------------------------------------

/// J(l) = J_{W_1} ... J_{W_n} for the reflection word of l.
inline SemilinearOp lift_representation(const PoincareElement& l, const NetFixture& f) {
  SemilinearOp out = SemilinearOp::identity(f.dim);
  for (const auto& w : decompose_poincare(l)) {
    const auto d = f.data_for(w);
    if (!d) throw HarnessError("reflection word uses a wedge without net data");
    out = out * SemilinearOp(d->J);
  }
  return out;
}

struct LiftDefect {
  double centrality = 0.0;    // max ||D J_W - J_W D|| over the sample
  double from_identity = 0.0; // ||D - 1|| when D is linear
  bool antilinear = false;
};

/// D = J(l1) J(l2) J(l1 l2)^{-1}.
inline LiftDefect lift_defect(const NetFixture& f, const PoincareElement& l1, const PoincareElement& l2) {
  const SemilinearOp d = lift_representation(l1, f) * lift_representation(l2, f) *
                         lift_representation(compose(l1, l2), f).inverse();
  LiftDefect r;
  r.antilinear = d.antilinear();
  if (!r.antilinear) r.from_identity = operator_distance(d.matrix(), LinOp::Identity(f.dim, f.dim));
  for (const auto& m : f.members) {
    const SemilinearOp j(m.data.J);
    r.centrality = std::max(r.centrality, operator_distance((d * j).matrix(), (j * d).matrix()));
  }
  return r;
}

// ---- fixtures -----------------------------------------------------------------

/// 3+1 region of a model wedge tag: Right(xi) = W_1 + (xi0, xi1, 0, 0).
inline Wedge model_region(const ModelWedgeTag& tag) {
  const FourVector shift(tag.xi(0), tag.xi(1), 0, 0);
  const Wedge right = standard_wedge(1) + shift;
  return tag.side == Side::Right ? right : complement(right);
}

inline std::optional<ModelWedgeTag> model_tag(const Wedge& w, double tol = 1e-9) {
  const FourVector x = w.xi();
  if (std::abs(x[2]) > tol || std::abs(x[3]) > tol) return std::nullopt;
  const Vec2 xi(x[0], x[1]);
  if (same_rays(w, standard_wedge(1), tol)) return ModelWedgeTag::right(xi);
  if (same_rays(w, complement(standard_wedge(1)), tol)) return ModelWedgeTag::left(xi);
  return std::nullopt;
}

inline NetData model_data(const ModelFixture& m, const ModelWedgeTag& tag, double t0) {
  NetData d;
  d.J = m.wedge_conjugation(tag);
  d.flow_plus = m.modular_flow(tag, t0);
  d.flow_minus = m.modular_flow(tag, -t0);
  return d;
}

/// Recovers the wedge tag from model net data: the side from the direction
/// of the one-step flow, the apex from the conjugation's phases at the two
/// central grid points (valid while |2 p.xi| < pi there).
inline std::optional<ModelWedgeTag> locate_model_data(const ModelFixture& m, const NetData& d) {
  if (!d.has_flow() || d.J.dim() != m.dim()) return std::nullopt;
  const int r0 = m.grid().row(0);
  Side side;
  if (std::abs(d.flow_plus(r0 - 1, r0)) > 0.5)
    side = Side::Right;
  else if (std::abs(d.flow_plus(r0 + 1, r0)) > 0.5)
    side = Side::Left;
  else
    return std::nullopt;
  Eigen::Matrix2d a;
  Eigen::Vector2d b;
  for (int i = 0; i < 2; ++i) {
    const Vec2 p = m.momentum(i);
    a.row(i) << p(0), -p(1);
    b(i) = std::arg(d.J.matrix()(m.grid().row(i), m.grid().row(i))) / 2.0;
  }
  return ModelWedgeTag{side, a.partialPivLu().solve(b)};
}

enum class Sabotage { None, DuplicateConjugation, NonInvolutive, WrongWedge };

inline const char* sabotage_name(Sabotage s) {
  switch (s) {
    case Sabotage::DuplicateConjugation:
      return "duplicate-conjugation";
    case Sabotage::NonInvolutive:
      return "non-involutive";
    case Sabotage::WrongWedge:
      return "wrong-wedge";
    default:
      return "none";
  }
}

inline std::optional<Sabotage> parse_sabotage(const std::string& s) {
  for (Sabotage v : {Sabotage::None, Sabotage::DuplicateConjugation, Sabotage::NonInvolutive, Sabotage::WrongWedge})
    if (s == sabotage_name(v)) return v;
  return std::nullopt;
}

/// Net of the grid model over the sample {Right(0), Left(0), Right(xi),
/// Left(xi)}, with Right(xi/2) acting as an extra generator.  The flow
/// time is one grid step, t0 = h / (2 pi).
inline NetFixture model_net(std::shared_ptr<const ModelFixture> model, const Vec2& xi = Vec2(0.02, 0.05),
                            Sabotage sabotage = Sabotage::None) {
  const double t0 = model->grid().h / (2 * std::numbers::pi);
  NetFixture f;
  f.name = std::string("model/") + sabotage_name(sabotage);
  f.dim = model->dim();
  f.flow_time = t0;
  auto member = [&](const std::string& id, const ModelWedgeTag& tag) {
    return NetMember{id, model_region(tag), model_data(*model, tag, t0)};
  };
  f.members.push_back(member("R0", ModelWedgeTag::right(Vec2::Zero())));
  f.members.push_back(member("L0", ModelWedgeTag::left(Vec2::Zero())));
  f.members.push_back(member("Rxi", ModelWedgeTag::right(xi)));
  f.members.push_back(member("Lxi", ModelWedgeTag::left(xi)));
  f.extra_generators.push_back(member("Rhalf", ModelWedgeTag::right(Vec2(xi / 2))));

  switch (sabotage) {
    case Sabotage::DuplicateConjugation: {
      NetMember dup = f.members[0];
      dup.id = "dup";
      dup.region = model_region(ModelWedgeTag::right(Vec2(3 * xi)));
      f.members.push_back(dup);
      break;
    }
    case Sabotage::NonInvolutive: {
      // Compose J_{Right(xi)} with a small real rotation of two components.
      LinOp rot = LinOp::Identity(f.dim, f.dim);
      const int r = model->grid().row(0);
      const double eps = 0.1;
      rot(r, r) = std::cos(eps);
      rot(r, r + 1) = -std::sin(eps);
      rot(r + 1, r) = std::sin(eps);
      rot(r + 1, r + 1) = std::cos(eps);
      f.members[2].data.J = f.members[2].data.J * rot;
      break;
    }
    case Sabotage::WrongWedge: {
      const Vec2 off = 5 * xi + Vec2(0.003, -0.001);
      f.members[3].data = model_data(*model, ModelWedgeTag::left(off), t0);
      break;
    }
    default:
      break;
  }

  f.data_at = [model, t0](const Wedge& w) -> std::optional<NetData> {
    const auto tag = model_tag(w);
    if (!tag) return std::nullopt;
    return model_data(*model, *tag, t0);
  };
  f.locate = [model](const NetData& d) -> std::optional<Wedge> {
    const auto tag = locate_model_data(*model, d);
    if (!tag) return std::nullopt;
    return model_region(*tag);
  };
  f.reliable_rows = [model](int steps) {
    const auto rows = model->interior_rows(steps);
    return std::vector<Eigen::Index>(rows.begin(), rows.end());
  };
  return f;
}

/// Two-factor net on C^n (x) C^n: W_1 -> M_n (x) 1 and its complement
/// -> 1 (x) M_n, with vector sum_i sqrt(p_i) e_i (x) e_i.
inline NetFixture two_factor_net(const std::vector<double>& schmidt = {2.0 / 3.0, 1.0 / 3.0}, double t0 = 0.25) {
  const int n = static_cast<int>(schmidt.size());
  NetFixture f;
  f.name = "two-factor";
  f.dim = n * n;
  f.flow_time = t0;
  f.omega = schmidt_vector(schmidt);
  auto member = [&](const std::string& id, const Wedge& w, const FiniteVNAlgebra& a) {
    const ModularData d = compute_modular(a, *f.omega);
    NetData nd;
    nd.J = d.J;
    nd.flow_plus = modular_flow(d, t0);
    nd.flow_minus = modular_flow(d, -t0);
    nd.algebra = a;
    return NetMember{id, w, nd};
  };
  f.members.push_back(member("W1", standard_wedge(1), left_factor_algebra(n, n)));
  f.members.push_back(member("W1c", complement(standard_wedge(1)), right_factor_algebra(n, n)));
  return f;
}

}  // namespace wedgelab
