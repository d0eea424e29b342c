#pragma once

// JSON encodings of geometric objects, complex matrices, algebras, reports
// and net fixtures.  Complex entries are [re, im] pairs; a matrix is an
// array of rows.  Real numbers are accepted wherever a complex entry is.

#include "wedgelab/cgma.hpp"

#include <json.hpp>

#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace wedgelab {

using json = nlohmann::ordered_json;

/// Malformed or inconsistent input.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace io_detail {

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline double number(const json& j) {
  if (!j.is_number()) throw InputError("expected a number, got " + j.dump());
  return j.get<double>();
}

}  // namespace io_detail

inline json to_json(const FourVector& v) { return json::array({v[0], v[1], v[2], v[3]}); }

inline FourVector four_vector_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw InputError("a four-vector is an array of 4 numbers");
  try {
    return {io_detail::number(j[0]), io_detail::number(j[1]), io_detail::number(j[2]), io_detail::number(j[3])};
  } catch (const GeometryError& e) {
    throw InputError(e.what());
  }
}

inline json to_json(const PoincareElement& l) {
  json lam = json::array();
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) lam.push_back(l.lambda()(i, k));
  return {{"lambda", lam}, {"a", to_json(l.translation_part())}};
}

inline PoincareElement poincare_from_json(const json& j) {
  const json& lam = io_detail::field(j, "lambda");
  if (!lam.is_array() || lam.size() != 16) throw InputError("'lambda' is an array of 16 numbers, row-major");
  Mat4 m;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) m(i, k) = io_detail::number(lam[static_cast<std::size_t>(4 * i + k)]);
  try {
    return {m, four_vector_from_json(io_detail::field(j, "a")), 1e-8};
  } catch (const GeometryError& e) {
    throw InputError(e.what());
  }
}

inline json to_json(const Wedge& w) {
  return {{"ell_plus", to_json(w.ell_plus().four_vector())},
          {"ell_minus", to_json(w.ell_minus().four_vector())},
          {"xi", to_json(w.xi())}};
}

inline Wedge wedge_from_json(const json& j) {
  try {
    return wedge_from_rays(four_vector_from_json(io_detail::field(j, "ell_plus")).vec(),
                           four_vector_from_json(io_detail::field(j, "ell_minus")).vec(),
                           four_vector_from_json(io_detail::field(j, "xi")).vec());
  } catch (const GeometryError& e) {
    throw InputError(std::string("invalid wedge: ") + e.what());
  }
}

inline json to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {io_detail::number(j[0]), io_detail::number(j[1])};
  throw InputError("a complex entry is a number or [re, im], got " + j.dump());
}

inline json vector_to_json(const StateVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

inline StateVector vector_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InputError("a vector is a non-empty array of complex entries");
  StateVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  return v;
}

inline json matrix_to_json(const LinOp& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
    out.push_back(std::move(row));
  }
  return out;
}

/// Square matrix from an array of rows.
inline LinOp matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InputError("a matrix is a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  LinOp m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) throw InputError("matrix is not square");
    for (Eigen::Index k = 0; k < n; ++k) m(i, k) = complex_from_json(row[static_cast<std::size_t>(k)]);
  }
  return m;
}

/// Algebra generated by a list of matrices; the *-algebra closure is taken.
inline FiniteVNAlgebra algebra_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InputError("an algebra is a non-empty array of matrices");
  std::vector<LinOp> gens;
  for (const auto& m : j) gens.push_back(matrix_from_json(m));
  for (const auto& g : gens)
    if (g.rows() != gens.front().rows()) throw InputError("algebra generators differ in dimension");
  return algebra_closure(gens);
}

inline json algebra_to_json(const FiniteVNAlgebra& a) {
  json out = json::array();
  for (Eigen::Index k = 0; k < a.size(); ++k) out.push_back(matrix_to_json(a.basis(k)));
  return out;
}

inline json to_json(const CheckResult& r) {
  return {{"check", r.check}, {"status", r.status}, {"residual", r.residual}, {"witness", r.witness}};
}

inline json to_json(const CgmaReport& rep) {
  json out = json::array();
  for (const auto& [name, r] : rep.conditions) out.push_back(to_json(r));
  return out;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

// ---- net fixtures ---------------------------------------------------------------

inline json fixture_to_json(const NetFixture& f) {
  json out;
  out["name"] = f.name;
  auto wedges = [](const std::vector<NetMember>& ms) {
    json arr = json::array();
    for (const auto& m : ms) {
      json w = to_json(m.region);
      w["id"] = m.id;
      arr.push_back(std::move(w));
    }
    return arr;
  };
  out["family"] = wedges(f.members);
  if (!f.extra_generators.empty()) out["generators"] = wedges(f.extra_generators);
  json conj = json::object(), flows = json::object(), algebras = json::object();
  for (const NetMember* m : f.generators()) {
    conj[m->id] = matrix_to_json(m->data.J.matrix());
    if (m->data.has_flow())
      flows[m->id] = {{"plus", matrix_to_json(m->data.flow_plus)}, {"minus", matrix_to_json(m->data.flow_minus)}};
    if (m->data.algebra) algebras[m->id] = algebra_to_json(*m->data.algebra);
  }
  out["conjugations"] = conj;
  if (!flows.empty()) {
    out["flows"] = flows;
    out["flow_time"] = f.flow_time;
  }
  if (!algebras.empty()) out["algebras"] = algebras;
  if (f.omega) out["omega"] = vector_to_json(*f.omega);
  return out;
}

/// Either an explicit family with matrices, or {"model": {mass, K, h},
/// "xi": [x0, x1], "sabotage": name} for the grid model net.
inline NetFixture fixture_from_json(const json& j) {
  if (!j.is_object()) throw InputError("a fixture is a JSON object");
  if (j.contains("model")) {
    const json& p = j.at("model");
    const double m = io_detail::number(io_detail::field(p, "mass"));
    const json& kj = io_detail::field(p, "K");
    if (!kj.is_number_integer()) throw InputError("'K' must be an integer");
    const double h = io_detail::number(io_detail::field(p, "h"));
    Vec2 xi(0.02, 0.05);
    if (j.contains("xi")) {
      const json& x = j.at("xi");
      if (!x.is_array() || x.size() != 2) throw InputError("'xi' is an array of 2 numbers");
      xi = Vec2(io_detail::number(x[0]), io_detail::number(x[1]));
    }
    Sabotage s = Sabotage::None;
    if (j.contains("sabotage")) {
      const auto parsed = parse_sabotage(j.at("sabotage").get<std::string>());
      if (!parsed) throw InputError("unknown sabotage '" + j.at("sabotage").get<std::string>() + "'");
      s = *parsed;
    }
    try {
      return model_net(std::make_shared<const ModelFixture>(build_model(m, kj.get<int>(), h,
                                                                        j.value("time_reflected", false))),
                       xi, s);
    } catch (const ModelError& e) {
      throw InputError(e.what());
    }
  }

  NetFixture f;
  f.name = j.value("name", std::string("fixture"));
  const json& conj = io_detail::field(j, "conjugations");
  const json* flows = j.contains("flows") ? &j.at("flows") : nullptr;
  const json* algebras = j.contains("algebras") ? &j.at("algebras") : nullptr;
  if (flows) f.flow_time = io_detail::number(io_detail::field(j, "flow_time"));
  if (j.contains("omega")) f.omega = vector_from_json(j.at("omega"));

  auto read_members = [&](const json& arr, std::vector<NetMember>& into) {
    if (!arr.is_array()) throw InputError("a wedge family is an array");
    for (const auto& w : arr) {
      const json& idj = io_detail::field(w, "id");
      if (!idj.is_string()) throw InputError("wedge ids are strings");
      const std::string id = idj.get<std::string>();
      if (f.find(id)) throw InputError("duplicate wedge id '" + id + "'");
      NetMember m;
      m.id = id;
      m.region = wedge_from_json(w);
      if (!conj.contains(id)) throw InputError("no conjugation for '" + id + "'");
      const LinOp jm = matrix_from_json(conj.at(id));
      if (f.dim == 0) f.dim = jm.rows();
      if (jm.rows() != f.dim) throw InputError("conjugation of '" + id + "' has the wrong dimension");
      m.data.J = AntilinearOperator(jm);
      if (flows) {
        const json& fl = io_detail::field(*flows, id.c_str());
        m.data.flow_plus = matrix_from_json(io_detail::field(fl, "plus"));
        m.data.flow_minus = matrix_from_json(io_detail::field(fl, "minus"));
        if (m.data.flow_plus.rows() != f.dim || m.data.flow_minus.rows() != f.dim)
          throw InputError("flow of '" + id + "' has the wrong dimension");
      }
      if (algebras) {
        m.data.algebra = algebra_from_json(io_detail::field(*algebras, id.c_str()));
        if (m.data.algebra->dim() != f.dim) throw InputError("algebra of '" + id + "' has the wrong dimension");
      }
      into.push_back(std::move(m));
    }
  };
  read_members(io_detail::field(j, "family"), f.members);
  if (j.contains("generators")) read_members(j.at("generators"), f.extra_generators);
  if (f.members.empty()) throw InputError("empty wedge family");
  if (f.omega && f.omega->size() != f.dim) throw InputError("'omega' has the wrong dimension");
  return f;
}

}  // namespace wedgelab
