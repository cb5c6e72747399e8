#pragma once

#include "tvls/errors.hpp"
#include "tvls/function.hpp"
#include "tvls/kernels.hpp"
#include "tvls/levy.hpp"
#include "tvls/model.hpp"
#include "tvls/stability.hpp"
#include "tvls/transition.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace tvls::io {

using json = nlohmann::json;

namespace detail {

inline double number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ModelFormatError(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ModelFormatError(field, "must be finite");
  return v;
}

inline std::vector<double> numbers(const json& j, const std::string& field) {
  if (!j.is_array()) throw ModelFormatError(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

inline std::vector<double> params(const json& j, const std::string& field, std::size_t count) {
  if (!j.contains("params")) throw ModelFormatError(field + ".params", "missing");
  auto p = numbers(j["params"], field + ".params");
  if (p.size() != count) {
    std::ostringstream msg;
    msg << "expected " << count << " parameters, got " << p.size();
    throw ModelFormatError(field + ".params", msg.str());
  }
  return p;
}

inline void only_keys(const json& j, const std::string& field, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ModelFormatError(field.empty() ? key : field + "." + key, "unknown key");
}

}  // namespace detail

/// fn = number | {"family": name, "params": [...]}; piecewise polynomials use
/// {"family": "piecewise_polynomial", "breakpoints": [...], "pieces": [[c0, c1, ...], ...]}.
inline ScalarFunction function_from_json(const json& j, const std::string& field) {
  if (j.is_number()) return ScalarFunction::constant(detail::number(j, field));
  if (!j.is_object()) throw ModelFormatError(field, "expected a number or a function object");
  if (!j.contains("family") || !j["family"].is_string()) throw ModelFormatError(field + ".family", "missing");
  const std::string fam = j["family"].get<std::string>();
  try {
    if (fam == "piecewise_polynomial" || fam == "polynomial") {
      detail::only_keys(j, field, {"family", "breakpoints", "pieces", "params"});
      if (fam == "polynomial") return ScalarFunction::polynomial(detail::numbers(j.value("params", json::array()), field + ".params"));
      std::vector<double> br = j.contains("breakpoints") ? detail::numbers(j["breakpoints"], field + ".breakpoints")
                                                         : std::vector<double>{};
      if (!j.contains("pieces") || !j["pieces"].is_array()) throw ModelFormatError(field + ".pieces", "missing");
      std::vector<std::vector<double>> pieces;
      for (std::size_t i = 0; i < j["pieces"].size(); ++i)
        pieces.push_back(detail::numbers(j["pieces"][i], field + ".pieces[" + std::to_string(i) + "]"));
      return ScalarFunction::piecewise(std::move(br), std::move(pieces));
    }
    detail::only_keys(j, field, {"family", "params"});
    if (fam == "constant") return ScalarFunction::constant(detail::params(j, field, 1)[0]);
    if (fam == "affine") {
      const auto p = detail::params(j, field, 2);
      return ScalarFunction::affine(p[0], p[1]);
    }
    if (fam == "sinusoidal") {
      const auto p = detail::params(j, field, 4);
      return ScalarFunction::sinusoidal(p[0], p[1], p[2], p[3]);
    }
    if (fam == "logistic") {
      const auto p = detail::params(j, field, 4);
      return ScalarFunction::logistic(p[0], p[1], p[2], p[3]);
    }
    if (fam == "step") {
      const auto p = detail::params(j, field, 3);
      return ScalarFunction::step(p[0], p[1], p[2]);
    }
  } catch (const ModelFormatError&) {
    throw;
  } catch (const PreconditionError& e) {
    throw ModelFormatError(field, e.what());
  }
  throw ModelFormatError(field + ".family", "unknown family '" + fam + "'");
}

inline json to_json(const ScalarFunction& f) {
  require(f.has_identity_time_map(), "rescaled coefficient functions are not serializable");
  return std::visit(
      [](const auto& g) -> json {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, family::Constant>) {
          return g.value;
        } else if constexpr (std::is_same_v<T, family::Affine>) {
          return {{"family", "affine"}, {"params", {g.intercept, g.slope}}};
        } else if constexpr (std::is_same_v<T, family::Sinusoidal>) {
          return {{"family", "sinusoidal"}, {"params", {g.offset, g.amplitude, g.omega, g.phase}}};
        } else if constexpr (std::is_same_v<T, family::Logistic>) {
          return {{"family", "logistic"}, {"params", {g.base, g.height, g.rate, g.center}}};
        } else if constexpr (std::is_same_v<T, family::PiecewisePolynomial>) {
          return {{"family", "piecewise_polynomial"}, {"breakpoints", g.breakpoints}, {"pieces", g.pieces}};
        } else if constexpr (std::is_same_v<T, family::Step>) {
          return {{"family", "step"}, {"params", {g.jump_at, g.left, g.right}}};
        } else {
          throw PreconditionError("callback coefficient functions are not serializable");
        }
      },
      f.family());
}

inline MatrixFunction matrix_from_json(const json& j, const std::string& field, int rows, int cols) {
  MatrixFunction m(rows, cols);
  if (!j.is_array() || static_cast<int>(j.size()) != rows) {
    std::ostringstream msg;
    msg << "expected " << rows << " rows";
    throw ModelFormatError(field, msg.str());
  }
  for (int i = 0; i < rows; ++i) {
    const std::string fi = field + "[" + std::to_string(i) + "]";
    if (cols == 1 && !j[i].is_array()) {
      m(i, 0) = function_from_json(j[i], fi);
      continue;
    }
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != cols) {
      std::ostringstream msg;
      msg << "expected " << cols << " entries";
      throw ModelFormatError(fi, msg.str());
    }
    for (int k = 0; k < cols; ++k) m(i, k) = function_from_json(j[i][k], fi + "[" + std::to_string(k) + "]");
  }
  return m;
}

inline json to_json(const MatrixFunction& m) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    if (m.cols() == 1) {
      out.push_back(to_json(m(i, 0)));
      continue;
    }
    json row = json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
    out.push_back(row);
  }
  return out;
}

inline LevyModel levy_from_json(const json& j, const std::string& field = "levy") {
  if (!j.is_object()) throw ModelFormatError(field, "expected an object");
  detail::only_keys(j, field, {"brownian_variance", "jump_intensity", "jump_std"});
  auto get = [&](const char* key) {
    return j.contains(key) ? detail::number(j[key], field + "." + key) : 0.0;
  };
  try {
    return {get("brownian_variance"), get("jump_intensity"), get("jump_std")};
  } catch (const ModelFormatError&) {
    throw;
  } catch (const PreconditionError& e) {
    throw ModelFormatError(field, e.what());
  }
}

inline json to_json(const LevyModel& l) {
  return {{"brownian_variance", l.brownian_variance()}, {"jump_intensity", l.jump_intensity()}, {"jump_std", l.jump_std()}};
}

inline StabilityCertificate certificate_from_json(const json& j, const std::string& field = "certificate") {
  if (!j.is_object()) throw ModelFormatError(field, "expected an object");
  detail::only_keys(j, field, {"gamma", "lambda", "route", "window", "grid_points", "empirical_gamma"});
  StabilityCertificate c;
  if (!j.contains("gamma")) throw ModelFormatError(field + ".gamma", "missing");
  if (!j.contains("lambda")) throw ModelFormatError(field + ".lambda", "missing");
  c.gamma = detail::number(j["gamma"], field + ".gamma");
  c.lambda = detail::number(j["lambda"], field + ".lambda");
  c.route = CertificateRoute::user_supplied;
  if (j.contains("route")) {
    if (!j["route"].is_string()) throw ModelFormatError(field + ".route", "expected a string");
    try {
      c.route = route_from_string(j["route"].get<std::string>());
    } catch (const PreconditionError& e) {
      throw ModelFormatError(field + ".route", e.what());
    }
  }
  if (j.contains("window")) {
    const auto w = detail::numbers(j["window"], field + ".window");
    if (w.size() != 2 || !(w[0] < w[1])) throw ModelFormatError(field + ".window", "expected [lo, hi] with lo < hi");
    c.window_lo = w[0];
    c.window_hi = w[1];
  }
  if (j.contains("grid_points")) c.grid_points = static_cast<int>(detail::number(j["grid_points"], field + ".grid_points"));
  if (j.contains("empirical_gamma")) c.empirical_gamma = j["empirical_gamma"].get<bool>();
  if (!(c.gamma > 0.0)) throw ModelFormatError(field + ".gamma", "must be positive");
  if (!(c.lambda > 0.0)) throw ModelFormatError(field + ".lambda", "must be positive");
  return c;
}

inline json to_json(const StabilityCertificate& c) {
  return {{"gamma", c.gamma},
          {"lambda", c.lambda},
          {"route", to_string(c.route)},
          {"window", {c.window_lo, c.window_hi}},
          {"grid_points", c.grid_points},
          {"empirical_gamma", c.empirical_gamma}};
}

/// A decoded model file: the state-space realization (companion form for
/// CARMA input), the CARMA description when given, and an optional certificate.
struct ModelBundle {
  StateSpaceModel model;
  std::optional<CarmaModel> carma;
  std::optional<StabilityCertificate> certificate;
};

inline ModelBundle model_from_json(const json& j) {
  if (!j.is_object()) throw ModelFormatError("$", "model file must contain a JSON object");
  ModelBundle out;
  LevyModel levy = j.contains("levy") ? levy_from_json(j["levy"]) : LevyModel::brownian(1.0);
  if (!j.contains("p")) throw ModelFormatError("p", "missing");
  const double pd = detail::number(j["p"], "p");
  const int p = static_cast<int>(pd);
  if (p < 1 || p != pd) throw ModelFormatError("p", "must be a positive integer");

  if (j.contains("ar")) {
    detail::only_keys(j, "", {"p", "q", "ar", "ma", "levy", "certificate", "name", "description"});
    if (!j["ar"].is_array() || static_cast<int>(j["ar"].size()) != p)
      throw ModelFormatError("ar", "expected p autoregressive coefficients");
    if (!j.contains("ma") || !j["ma"].is_array() || j["ma"].empty()) throw ModelFormatError("ma", "expected b_0..b_q");
    const int q = static_cast<int>(j["ma"].size()) - 1;
    if (j.contains("q") && detail::number(j["q"], "q") != q) throw ModelFormatError("q", "does not match the length of ma");
    if (q >= p) throw ModelFormatError("q", "CARMA needs p > q");
    std::vector<ScalarFunction> ar, ma;
    for (int i = 0; i < p; ++i) ar.push_back(function_from_json(j["ar"][i], "ar[" + std::to_string(i) + "]"));
    for (int i = 0; i <= q; ++i) ma.push_back(function_from_json(j["ma"][i], "ma[" + std::to_string(i) + "]"));
    out.carma = CarmaModel(std::move(ar), std::move(ma), levy);
    out.model = companion_from_carma(*out.carma);
  } else {
    detail::only_keys(j, "", {"p", "A", "B", "C", "levy", "certificate", "name", "description"});
    for (const char* key : {"A", "B", "C"})
      if (!j.contains(key)) throw ModelFormatError(key, "missing");
    out.model = StateSpaceModel(matrix_from_json(j["A"], "A", p, p), matrix_from_json(j["B"], "B", p, 1),
                                matrix_from_json(j["C"], "C", p, 1), levy);
  }
  if (j.contains("certificate")) out.certificate = certificate_from_json(j["certificate"]);
  return out;
}

inline json to_json(const StateSpaceModel& m, const std::optional<StabilityCertificate>& cert = {}) {
  json out = {{"p", m.dimension()}, {"A", to_json(m.A)}, {"B", to_json(m.B)}, {"C", to_json(m.C)}, {"levy", to_json(m.levy)}};
  if (cert) out["certificate"] = to_json(*cert);
  return out;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelFormatError(path, "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ModelFormatError(path, std::string("invalid JSON: ") + e.what());
  }
}

inline ModelBundle load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

inline json to_json(const TransitionMatrix& t) {
  json rows = json::array();
  for (int i = 0; i < t.value.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < t.value.cols(); ++k) row.push_back(t.value(i, k));
    rows.push_back(row);
  }
  json out = {{"value", rows},
              {"method", to_string(t.method)},
              {"error_estimate", t.error_estimate},
              {"terms_or_steps", t.terms_or_steps}};
  if (!t.term_norms.empty()) out["term_norms"] = t.term_norms;
  return out;
}

namespace detail {
inline json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }
}  // namespace detail

inline json to_json(const StabilityReport& r) {
  json out = {{"passes", r.passes},
              {"route", r.route},
              {"message", r.message},
              {"sup_lambda_max", detail::finite_or_null(r.sup_lambda_max)},
              {"alpha", detail::finite_or_null(r.alpha)},
              {"beta", detail::finite_or_null(r.beta)},
              {"mu", detail::finite_or_null(r.mu)}};
  out["certificate"] = r.certificate ? to_json(*r.certificate) : json(nullptr);
  return out;
}

inline json to_json(const CommutativeRouteReport& r) {
  json out = {{"commutative", r.commutative},
              {"D1_diagonalizable", r.d1_diagonalizable},
              {"D2_cesaro_bounded", r.d2_cesaro_bounded},
              {"mu", r.mu},
              {"max_condition", detail::finite_or_null(r.max_condition)},
              {"cesaro_sup", detail::finite_or_null(r.cesaro_sup)}};
  out["certificate"] = r.certificate ? to_json(*r.certificate) : json(nullptr);
  out["passes"] = r.certificate.has_value();
  return out;
}

inline json to_json(const ControllabilityReport& r) {
  return {{"t_grid", r.t_grid},
          {"ranks", r.ranks},
          {"min_singular_values", r.min_singular_values},
          {"instantaneous", r.instantaneous}};
}

inline json to_json(const EquivalenceReport& r) {
  return {{"max_rel_err", r.max_rel_err},
          {"equivalent", r.equivalent},
          {"samples_used", r.samples_used},
          {"notes", r.notes}};
}

}  // namespace tvls::io
