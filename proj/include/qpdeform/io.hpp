#pragma once

// CSV and JSON renderings of weights and regime reports. Numbers are written
// in scientific notation with 17 significant digits so reruns diff cleanly.

#include <cstdio>
#include <sstream>
#include <string>

#include "json.hpp"
#include "qpdeform/convergence.hpp"
#include "qpdeform/unity.hpp"

namespace qpdeform::io {

inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

/// JSON numbers use the library's round-trip formatting; nan/inf, which JSON
/// cannot carry, go out as strings.
inline nlohmann::json num(double v) {
  if (std::isfinite(v)) return v;
  return fmt(v);
}

inline nlohmann::json num(complex z) {
  return nlohmann::json{{"re", num(z.real())}, {"im", num(z.imag())}};
}

/// x, wtilde, w_physical (+ imag for Fourier inversions).
inline std::string weight_csv(const WeightFunction& wtilde,
                              const WeightFunction& physical) {
  std::ostringstream os;
  const bool imag = !wtilde.imag_part.empty();
  os << "x,wtilde,w_physical" << (imag ? ",wtilde_imag" : "") << "\n";
  for (std::size_t i = 0; i < wtilde.grid_x.size(); ++i) {
    os << fmt(wtilde.grid_x[i]) << ',' << fmt(wtilde.grid_values[i]) << ','
       << fmt(physical.grid_values[i]);
    if (imag) os << ',' << fmt(wtilde.imag_part[i]);
    os << "\n";
  }
  return os.str();
}

inline nlohmann::json weight_json(const WeightFunction& wtilde,
                                  const WeightFunction& physical) {
  nlohmann::json j;
  j["method"] = std::string(to_string(wtilde.method));
  j["basis"] = wtilde.basis ? std::string(to_string(*wtilde.basis)) : "none";
  if (wtilde.basis == Basis::GeneralizedLaguerre)
    j["laguerre_alpha"] = num(wtilde.laguerre_alpha);
  j["support"] = {num(wtilde.support.lo), num(wtilde.support.hi)};
  nlohmann::json coeffs = nlohmann::json::array();
  for (double c : wtilde.coeffs) coeffs.push_back(num(c));
  j["coefficients"] = coeffs;
  nlohmann::json diag;
  diag["min_wtilde"] = num(wtilde.min_value);
  diag["min_w_physical"] = num(physical.min_value);
  if (wtilde.method == WeightMethod::MomentReconstruction) {
    diag["condition_estimate"] = num(wtilde.condition_estimate);
    nlohmann::json res = nlohmann::json::array();
    for (double r : wtilde.moment_residuals) res.push_back(num(r));
    diag["moment_residuals"] = res;
  } else {
    diag["y_cut"] = num(wtilde.y_cut);
    diag["damping"] = num(wtilde.damping);
    double imax = 0.0;
    for (double v : wtilde.imag_part) imax = std::max(imax, std::abs(v));
    diag["max_abs_imag"] = num(imax);
  }
  diag["warnings"] = wtilde.warnings;
  j["diagnostics"] = diag;
  nlohmann::json grid = nlohmann::json::array();
  for (std::size_t i = 0; i < wtilde.grid_x.size(); ++i)
    grid.push_back({num(wtilde.grid_x[i]), num(wtilde.grid_values[i]),
                    num(physical.grid_values[i])});
  j["grid"] = grid;
  return j;
}

inline std::string join_estimates(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    s += fmt(v[i]);
  }
  return s;
}

/// q_re, q_im, p_re, p_im, regime, v_exp1, v_exp2, v_wbar, ratio_estimates
inline std::string regimes_csv(const std::vector<Proposition2Row>& rows) {
  std::ostringstream os;
  os << "q_re,q_im,p_re,p_im,regime,v_exp1,v_exp2,v_wbar,ratio_estimates,"
        "boundary_distance,contradiction,root_of_unity_index\n";
  for (const auto& r : rows) {
    const auto& v = r.verdict;
    os << fmt(v.params.q().real()) << ',' << fmt(v.params.q().imag()) << ','
       << fmt(v.params.p().real()) << ',' << fmt(v.params.p().imag()) << ','
       << to_string(v.regime) << ',';
    if (r.root_of_unity_index) {
      os << "Skipped,Skipped,Skipped,";
    } else {
      os << to_string(v.per_series[0]) << ',' << to_string(v.per_series[1])
         << ',' << to_string(v.per_series[2]) << ',';
    }
    os << join_estimates(v.evidence) << ',' << fmt(r.boundary_distance) << ','
       << (r.contradiction ? "true" : "false") << ','
       << (r.root_of_unity_index ? std::to_string(*r.root_of_unity_index) : "")
       << "\n";
  }
  return os.str();
}

inline nlohmann::json regimes_json(const std::vector<Proposition2Row>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    const auto& v = r.verdict;
    nlohmann::json j;
    j["q"] = num(v.params.q());
    j["p"] = num(v.params.p());
    j["regime"] = std::string(to_string(v.regime));
    if (r.root_of_unity_index) {
      j["skipped_root_of_unity_index"] = *r.root_of_unity_index;
    } else {
      j["v_exp1"] = std::string(to_string(v.per_series[0]));
      j["v_exp2"] = std::string(to_string(v.per_series[1]));
      j["v_wbar"] = std::string(to_string(v.per_series[2]));
    }
    nlohmann::json ev = nlohmann::json::array();
    for (double e : v.evidence) ev.push_back(num(e));
    j["ratio_estimates"] = ev;
    j["boundary_distance"] = num(r.boundary_distance);
    j["contradiction"] = r.contradiction;
    arr.push_back(j);
  }
  return arr;
}

}  // namespace qpdeform::io
