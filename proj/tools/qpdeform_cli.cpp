// qpdeform: command-line front end for the (q,p)-deformed oscillator library.
//
// Exit codes: 0 success, 1 computational failure, 2 usage error.

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qpdeform/io.hpp"
#include "qpdeform/qpdeform.hpp"

namespace {

using qpdeform::complex;
using qpdeform::DeformationParams;
using nlohmann::json;
namespace io = qpdeform::io;

constexpr const char* kConfigEnv = "QPDEFORM_CONFIG";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// "re", "re,im" or "polar:r,theta".
complex parse_complex(const std::string& text, const std::string& what) {
  std::string s = text;
  bool polar = false;
  if (s.rfind("polar:", 0) == 0) {
    polar = true;
    s = s.substr(6);
  }
  std::vector<double> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw UsageError(what + ": cannot parse '" + text + "' as a number");
    }
    if (used != item.size())
      throw UsageError(what + ": cannot parse '" + text + "' as a number");
    parts.push_back(v);
  }
  if (parts.empty() || parts.size() > 2 || (polar && parts.size() != 2))
    throw UsageError(what + ": expected re, re,im or polar:r,theta");
  if (polar) return std::polar(parts[0], parts[1]);
  return {parts[0], parts.size() == 2 ? parts[1] : 0.0};
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    try {
      out.push_back(std::stod(item, &used));
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size())
      throw UsageError(what + ": cannot parse '" + text + "' as a list of numbers");
  }
  if (out.empty()) throw UsageError(what + ": empty list");
  return out;
}

/// Settings shared by all subcommands; each subcommand registers the ones it
/// reads.
struct Settings {
  std::string q = "1";
  std::string p = "1";
  std::string x = "1";
  std::string z = "0.5";
  std::string z2;
  int which = 1;
  std::size_t nmax = 10;
  std::size_t series_nmax = 500;
  std::size_t dim = 0;
  std::size_t degree = 12;
  std::size_t nmoments = 24;
  double tol = 1e-15;
  double damping = 0.3;
  double y_cut = 8.0;
  double alpha = 0.0;
  std::string method = "moments";
  std::optional<double> grid_lo;
  std::optional<double> grid_hi;
  std::size_t grid_n = 201;
  std::string mode = "prop2";
  std::string points;
  std::string y_samples = "0.5,1,2";
  std::string x_fractions = "0.5";
  std::string out;
  std::string format = "csv";
  std::string config;
};

/// Flag values from a flat JSON object for every option of the invoked
/// subcommand that was not given on the command line.
class ConfigBinder {
 public:
  /// Subsequent bindings belong to `sub`.
  void scope(CLI::App* sub) { scope_ = sub; }

  void bind(CLI::Option* opt, std::function<void(const json&)> assign) {
    bindings_.push_back({scope_, opt, std::move(assign)});
  }

  void apply(const json& cfg) const {
    for (const auto& [sub, opt, assign] : bindings_) {
      if (!sub->parsed() || opt->count() > 0) continue;
      const std::string key = opt->get_name(false, true).substr(2);
      if (!cfg.contains(key)) continue;
      try {
        assign(cfg.at(key));
      } catch (const json::exception&) {
        throw UsageError("config key '" + key + "' has the wrong type");
      }
    }
  }

 private:
  struct Binding {
    CLI::App* sub;
    CLI::Option* opt;
    std::function<void(const json&)> assign;
  };
  CLI::App* scope_ = nullptr;
  std::vector<Binding> bindings_;
};

std::string complex_from_json(const json& v) {
  if (v.is_number()) return io::fmt(v.get<double>());
  if (v.is_array() && v.size() == 2)
    return io::fmt(v[0].get<double>()) + "," + io::fmt(v[1].get<double>());
  return v.get<std::string>();
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
  return cfg;
}

void emit(const Settings& s, const std::string& text) {
  if (s.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(s.out);
  if (!f) throw UsageError("cannot write '" + s.out + "'");
  f << text;
}

void emit_json(const Settings& s, const json& j) { emit(s, j.dump(2) + "\n"); }

DeformationParams params_of(const Settings& s) {
  return DeformationParams(parse_complex(s.q, "--q"), parse_complex(s.p, "--p"));
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string row;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) row += ',';
    row += c;
    first = false;
  }
  return row + "\n";
}

// qnum

int cmd_qnum(const Settings& s) {
  const DeformationParams params = params_of(s);
  const qpdeform::QNumberSequence seq = qpdeform::qp_sequence(s.nmax, params);
  if (seq.first_nonfinite)
    std::cerr << "warning: factorials leave the double range at n = "
              << *seq.first_nonfinite << "\n";
  if (s.format == "json") {
    json rows = json::array();
    for (std::size_t n = 0; n <= s.nmax; ++n)
      rows.push_back({{"n", n},
                      {"basket", io::num(seq.numbers[n])},
                      {"factorial", io::num(seq.factorials[n])},
                      {"abs_factorial", io::num(seq.abs_factorials[n])}});
    json j{{"q", io::num(params.q())}, {"p", io::num(params.p())}, {"rows", rows}};
    if (seq.first_nonfinite) j["first_nonfinite"] = *seq.first_nonfinite;
    if (seq.first_zero) j["first_zero"] = *seq.first_zero;
    emit_json(s, j);
    return 0;
  }
  std::string text = "n,basket_re,basket_im,factorial_re,factorial_im,abs_factorial\n";
  for (std::size_t n = 0; n <= s.nmax; ++n)
    text += csv_row({std::to_string(n), io::fmt(seq.numbers[n].real()),
                     io::fmt(seq.numbers[n].imag()), io::fmt(seq.factorials[n].real()),
                     io::fmt(seq.factorials[n].imag()), io::fmt(seq.abs_factorials[n])});
  emit(s, text);
  return 0;
}

// exp

int cmd_exp(const Settings& s) {
  const DeformationParams params = params_of(s);
  const complex x = parse_complex(s.x, "--x");
  qpdeform::SeriesControl ctrl;
  ctrl.n_max = s.series_nmax;
  ctrl.tol = s.tol;
  if (ctrl.min_terms > ctrl.n_max) ctrl.min_terms = ctrl.n_max;
  qpdeform::SeriesEvaluation e;
  if (s.which == 1) {
    e = qpdeform::exp1(x, params, ctrl);
  } else if (x.imag() == 0.0 && x.real() >= 0.0) {
    e = qpdeform::exp2(x.real(), params, ctrl);
  } else {
    e = qpdeform::exp2_complex(x, params, ctrl);
  }
  const double R = qpdeform::convergence_radius(params);
  if (s.format == "json") {
    emit_json(s, {{"which", s.which},
                  {"x", io::num(x)},
                  {"value", io::num(e.value)},
                  {"terms", e.terms_used},
                  {"tail_bound", io::num(e.tail_bound)},
                  {"rounding_bound", io::num(e.rounding_bound)},
                  {"radius", io::num(R)},
                  {"verdict", std::string(qpdeform::to_string(e.verdict))}});
  } else {
    emit(s, "value_re,value_im,terms,tail_bound,rounding_bound,radius,verdict\n" +
                csv_row({io::fmt(e.value.real()), io::fmt(e.value.imag()),
                         std::to_string(e.terms_used), io::fmt(e.tail_bound),
                         io::fmt(e.rounding_bound), io::fmt(R),
                         std::string(qpdeform::to_string(e.verdict))}));
  }
  if (e.verdict == qpdeform::Verdict::DivergentInput) {
    std::cerr << "error: |x| = " << std::abs(x)
              << " is outside the convergence disk R = " << R << "\n";
    return 1;
  }
  return 0;
}

// coherent

int cmd_coherent(const Settings& s) {
  const DeformationParams params = params_of(s);
  const complex z = parse_complex(s.z, "--z");
  const qpdeform::CoherentState st = qpdeform::make_state(z, params, s.dim);
  const auto ops = qpdeform::build_operators(std::max<std::size_t>(st.dim(), 2), params);
  const qpdeform::AnnihilatorResidual ann =
      st.dim() >= 2 ? qpdeform::annihilator_residual(st, ops)
                    : qpdeform::AnnihilatorResidual{};
  const double self = qpdeform::overlap(st, st).value.real();
  std::optional<qpdeform::OverlapResult> ov;
  std::optional<qpdeform::DistanceResult> dist;
  if (!s.z2.empty()) {
    const qpdeform::CoherentState other =
        qpdeform::make_state(parse_complex(s.z2, "--z2"), params, s.dim);
    ov = qpdeform::overlap(st, other);
    dist = qpdeform::label_distance_sq(st, other);
  }

  if (s.format == "json") {
    json coeffs = json::array();
    for (const complex& c : st.coeffs) coeffs.push_back(io::num(c));
    json j{{"z", io::num(z)},
           {"dim", st.dim()},
           {"norm_const", io::num(st.norm_const)},
           {"norm_sq", io::num(st.norm_sq())},
           {"self_overlap", io::num(self)},
           {"tail_bound", io::num(st.tail_bound)},
           {"annihilator_residual", io::num(ann.interior)},
           {"annihilator_last_component", io::num(ann.last_component)},
           {"coefficients", coeffs}};
    if (ov) {
      j["overlap"] = io::num(ov->value);
      j["overlap_closed_form"] = io::num(ov->closed_form);
      j["overlap_consistent"] = ov->consistent();
      j["distance_sq"] = io::num(dist->value);
      j["distance_sq_direct"] = io::num(dist->direct);
    }
    emit_json(s, j);
    return 0;
  }
  std::string text = "n,c_re,c_im\n";
  for (std::size_t n = 0; n < st.dim(); ++n)
    text += csv_row({std::to_string(n), io::fmt(st.coeffs[n].real()),
                     io::fmt(st.coeffs[n].imag())});
  emit(s, text);
  std::cerr << "dim " << st.dim() << ", norm_sq " << io::fmt(st.norm_sq())
            << ", tail_bound " << io::fmt(st.tail_bound) << ", annihilator residual "
            << io::fmt(ann.interior) << "\n";
  if (ov)
    std::cerr << "overlap " << io::fmt(ov->value.real()) << " " << io::fmt(ov->value.imag())
              << ", distance_sq " << io::fmt(dist->value) << "\n";
  return 0;
}

// fock-check

struct CheckRow {
  std::string name;
  double value;
  double threshold;  // NaN for informational rows
};

bool passes(const CheckRow& r) { return std::isnan(r.threshold) || r.value <= r.threshold; }

std::string checks_csv(const std::vector<CheckRow>& rows) {
  std::string text = "check,value,threshold,status\n";
  for (const auto& r : rows)
    text += csv_row({r.name, io::fmt(r.value),
                     std::isnan(r.threshold) ? "" : io::fmt(r.threshold),
                     std::isnan(r.threshold) ? "info" : (passes(r) ? "pass" : "fail")});
  return text;
}

json checks_json(const std::vector<CheckRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    json j{{"check", r.name}, {"value", io::num(r.value)}};
    if (std::isnan(r.threshold)) {
      j["status"] = "info";
    } else {
      j["threshold"] = io::num(r.threshold);
      j["status"] = passes(r) ? "pass" : "fail";
    }
    arr.push_back(j);
  }
  return arr;
}

std::vector<CheckRow> fock_rows(const DeformationParams& params, std::size_t dim) {
  const auto ops = qpdeform::build_operators(dim, params);
  const auto r = qpdeform::relation_residuals(ops, params);
  constexpr double tol = 1e-12;
  const double info = std::nan("");
  return {{"fock_qmutation", r.residual_qmutation, tol},
          {"fock_delta_commutation", r.residual_delta_comm, tol},
          {"fock_adag_commutation", r.residual_adag_comm_swapped, tol},
          {"fock_qp_relation", r.residual_qp, tol},
          // the a^+ relation in the orientation a^+ Delta - Q Delta a^+ = -a^+ Delta'
          // only holds when (1 - q)([n] + [n+1]) vanishes
          {"fock_adag_commutation_printed_order", r.residual_adag_comm, info}};
}

int cmd_fock_check(const Settings& s) {
  const DeformationParams params = params_of(s);
  const std::size_t dim = s.dim == 0 ? 12 : s.dim;
  const auto rows = fock_rows(params, dim);
  if (s.format == "json")
    emit_json(s, {{"dim", dim}, {"block_dim", dim - 1}, {"checks", checks_json(rows)}});
  else
    emit(s, checks_csv(rows));
  for (const auto& r : rows)
    if (!passes(r)) return 1;
  return 0;
}

// weight

qpdeform::GridSpec weight_grid(const Settings& s, const DeformationParams& params) {
  const double R = qpdeform::convergence_radius(params);
  qpdeform::GridSpec g;
  g.count = s.grid_n;
  g.lo = s.grid_lo.value_or(0.0);
  // exp2 (and hence the physical weight) needs x < R
  g.hi = s.grid_hi.value_or(std::isfinite(R) ? 0.99 * R : 20.0);
  if (!(g.hi > g.lo)) throw UsageError("grid upper end must exceed the lower end");
  if (std::isfinite(R) && (g.lo < 0.0 || g.hi >= R))
    throw UsageError("weight grid must lie in [0, R) with R = " + io::fmt(R));
  return g;
}

int cmd_weight(const Settings& s) {
  const DeformationParams params = params_of(s);
  const qpdeform::GridSpec grid = weight_grid(s, params);
  qpdeform::WeightFunction wt;
  if (s.method == "moments") {
    const std::size_t nm = std::max(s.nmoments, s.degree);
    wt = qpdeform::weight_from_moments(qpdeform::target_moments(params, nm), s.degree,
                                       grid, s.alpha);
  } else {
    wt = qpdeform::weight_from_fourier(params, s.y_cut, s.damping, grid);
  }
  const qpdeform::WeightFunction w = qpdeform::physical_weight(wt, params);
  for (const auto& msg : wt.warnings) std::cerr << "warning: " << msg << "\n";
  if (s.format == "json")
    emit_json(s, io::weight_json(wt, w));
  else
    emit(s, io::weight_csv(wt, w));
  return 0;
}

// verify

std::string regime_text(qpdeform::Regime r) {
  return std::string(qpdeform::to_string(r));
}

int cmd_verify(const Settings& s) {
  const DeformationParams params = params_of(s);
  const qpdeform::Regime regime = qpdeform::classify_regime(params);
  if (regime == qpdeform::Regime::Outside) {
    const std::string msg =
        "regime Outside: the parameters satisfy neither |q| <= 1 with |p| = 1 "
        "nor |q| = 1 with |p| >= 1, so at least one of exp1, exp2 and Wbar "
        "diverges";
    if (s.format == "json")
      emit_json(s, {{"regime", "Outside"}, {"status", "fail"}, {"diagnosis", msg}});
    else
      emit(s, "check,value,threshold,status\nregime,,,fail\n");
    std::cerr << "verify failed: " << msg << "\n";
    return 1;
  }

  const std::size_t dim = s.dim == 0 ? 20 : s.dim;
  std::vector<CheckRow> rows = fock_rows(params, dim);
  const double info = std::nan("");

  // normalization, label continuity and eigenstate checks on a fixed label set
  const double R = qpdeform::convergence_radius(params);
  const double r2max = std::isfinite(R) ? 0.8 * R : 4.0;
  double norm_dev = 0.0, ann_excess = 0.0, overlap_excess = 0.0, cont = 0.0;
  for (int i = 1; i <= 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const complex z = std::polar(std::sqrt(r2max * i / 4.0), 0.4 + 1.57 * j);
      const auto st = qpdeform::make_state(z, params);
      norm_dev = std::max(norm_dev, std::abs(st.norm_sq() - 1.0) -
                                        std::max(1e-10, st.tail_bound));
      const auto ops = qpdeform::build_operators(st.dim(), params);
      ann_excess = std::max(ann_excess, qpdeform::annihilator_residual(st, ops).interior -
                                            10.0 * st.tail_bound);
      const auto near = qpdeform::make_state(z * 0.999, params, st.dim());
      const auto ov = qpdeform::overlap(st, near);
      overlap_excess = std::max(overlap_excess, std::abs(ov.value - ov.closed_form) -
                                                    ov.tolerance);
      cont = std::max(cont, qpdeform::label_distance_sq(st, near).direct /
                                std::abs(z * 0.001));
    }
  }
  rows.push_back({"normalization_excess", std::max(norm_dev, 0.0), 0.0});
  rows.push_back({"annihilator_excess", std::max(ann_excess, 0.0), 0.0});
  rows.push_back({"overlap_excess", std::max(overlap_excess, 0.0), 0.0});
  rows.push_back({"continuity_constant", cont, 1e6});

  // resolution of unity by the moment route
  const std::size_t nm = std::max(s.nmoments, s.degree);
  const auto wt = qpdeform::weight_from_moments(qpdeform::target_moments(params, nm),
                                                s.degree, std::nullopt, s.alpha);
  double mres = 0.0;
  for (double r : wt.moment_residuals) mres = std::max(mres, std::abs(r));
  rows.push_back({"moment_residual", mres, 1e-6});
  rows.push_back({"moment_condition", wt.condition_estimate, info});
  const std::size_t matched = std::min(dim, s.degree + 1);
  rows.push_back({"resolution_residual",
                  qpdeform::resolution_residual(wt, params, matched).residual, 1e-6});
  rows.push_back({"resolution_residual_full_dim",
                  qpdeform::resolution_residual(wt, params, dim).residual, info});
  rows.push_back({"min_wtilde", wt.min_value, info});

  if (s.format == "json")
    emit_json(s, {{"regime", regime_text(regime)},
                  {"dim", dim},
                  {"degree", s.degree},
                  {"checks", checks_json(rows)}});
  else
    emit(s, checks_csv(rows));
  for (const auto& r : rows)
    if (!passes(r)) {
      std::cerr << "verify failed: " << r.name << " = " << io::fmt(r.value) << "\n";
      return 1;
    }
  return 0;
}

// regimes

std::vector<DeformationParams> read_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open points file '" + path + "'");
  std::vector<DeformationParams> grid;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("q_re", 0) == 0) continue;
    const auto v = parse_list(line, "points file");
    if (v.size() != 4) throw UsageError("points file rows need q_re,q_im,p_re,p_im");
    grid.emplace_back(complex{v[0], v[1]}, complex{v[2], v[3]});
  }
  if (grid.empty()) throw UsageError("points file holds no parameter rows");
  return grid;
}

int cmd_regimes(const Settings& s) {
  const auto ys = parse_list(s.y_samples, "--y");
  if (s.mode == "prop1") {
    std::vector<complex> qs = qpdeform::standard_prop1_off_circle();
    const auto on = qpdeform::standard_prop1_on_circle();
    qs.insert(qs.end(), on.begin(), on.end());
    json arr = json::array();
    std::string text = "Q_re,Q_im,y,verdict,limit_estimate,stable,root_of_unity_index\n";
    for (const complex Q : qs) {
      for (const auto& r : qpdeform::proposition1_check(Q, ys)) {
        const std::string root =
            r.root_of_unity_index ? std::to_string(*r.root_of_unity_index) : "";
        text += csv_row({io::fmt(Q.real()), io::fmt(Q.imag()), io::fmt(r.y),
                         std::string(qpdeform::to_string(r.verdict)),
                         io::fmt(r.limit_estimate), r.stable ? "true" : "false", root});
        json j{{"Q", io::num(Q)},
               {"y", io::num(r.y)},
               {"verdict", std::string(qpdeform::to_string(r.verdict))},
               {"limit_estimate", io::num(r.limit_estimate)},
               {"stable", r.stable}};
        if (r.root_of_unity_index) j["root_of_unity_index"] = *r.root_of_unity_index;
        arr.push_back(j);
      }
    }
    if (s.format == "json")
      emit_json(s, arr);
    else
      emit(s, text);
    return 0;
  }
  const auto grid = s.points.empty() ? qpdeform::standard_sweep() : read_points(s.points);
  const auto xs = parse_list(s.x_fractions, "--x-frac");
  const auto rows = qpdeform::proposition2_check(grid, ys, xs);
  if (s.format == "json")
    emit_json(s, io::regimes_json(rows));
  else
    emit(s, io::regimes_csv(rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"(q,p)-deformed oscillators and their coherent states"};
  app.require_subcommand(1);
  Settings s;
  ConfigBinder binder;

  auto str_json = [](std::string& dst) {
    return [&dst](const json& v) { dst = v.is_string() ? v.get<std::string>() : v.dump(); };
  };
  auto cplx_json = [](std::string& dst) {
    return [&dst](const json& v) { dst = complex_from_json(v); };
  };
  auto common = [&](CLI::App* sub, bool params = true) {
    binder.scope(sub);
    if (params) {
      binder.bind(sub->add_option("--q", s.q, "q as re, re,im or polar:r,theta")
                      ->capture_default_str(),
                  cplx_json(s.q));
      binder.bind(sub->add_option("--p", s.p, "p as re, re,im or polar:r,theta")
                      ->capture_default_str(),
                  cplx_json(s.p));
    }
    binder.bind(sub->add_option("--format", s.format, "csv or json")
                    ->check(CLI::IsMember({"csv", "json"}))
                    ->capture_default_str(),
                str_json(s.format));
    binder.bind(sub->add_option("--out", s.out, "output path (default stdout)"),
                str_json(s.out));
    sub->add_option("--config", s.config,
                    std::string("JSON config file; default from $") + kConfigEnv);
  };
  auto size_opt = [&](CLI::App* sub, const std::string& name, std::size_t& dst,
                      const std::string& help) {
    binder.bind(sub->add_option(name, dst, help)->capture_default_str(),
                [&dst](const json& v) { dst = v.get<std::size_t>(); });
  };
  auto real_opt = [&](CLI::App* sub, const std::string& name, double& dst,
                      const std::string& help) {
    binder.bind(sub->add_option(name, dst, help)->capture_default_str(),
                [&dst](const json& v) { dst = v.get<double>(); });
  };

  std::map<CLI::App*, std::function<int(const Settings&)>> handlers;

  auto* qnum = app.add_subcommand("qnum", "basket numbers and factorials");
  common(qnum);
  size_opt(qnum, "--nmax", s.nmax, "largest n");
  handlers[qnum] = cmd_qnum;

  auto* exp = app.add_subcommand("exp", "deformed exponentials exp1 / exp2");
  common(exp);
  binder.bind(exp->add_option("--which", s.which, "1 or 2")
                  ->check(CLI::IsMember({1, 2}))
                  ->capture_default_str(),
              [&](const json& v) { s.which = v.get<int>(); });
  binder.bind(exp->add_option("--x", s.x, "argument")->capture_default_str(), cplx_json(s.x));
  size_opt(exp, "--nmax", s.series_nmax, "series term cap");
  real_opt(exp, "--tol", s.tol, "relative tail tolerance");
  handlers[exp] = cmd_exp;

  auto* coh = app.add_subcommand("coherent", "coherent-state coefficients and checks");
  common(coh);
  binder.bind(coh->add_option("--z", s.z, "label")->capture_default_str(), cplx_json(s.z));
  binder.bind(coh->add_option("--z2", s.z2, "second label for overlap and distance"),
              cplx_json(s.z2));
  size_opt(coh, "--dim", s.dim, "Fock truncation (0 = automatic)");
  handlers[coh] = cmd_coherent;

  auto* fock = app.add_subcommand("fock-check", "ladder-operator relation residuals");
  common(fock);
  size_opt(fock, "--dim", s.dim, "Fock truncation (0 = 12)");
  handlers[fock] = cmd_fock_check;

  auto* weight = app.add_subcommand("weight", "resolution-of-unity weight function");
  common(weight);
  binder.bind(weight->add_option("--method", s.method, "moments or fourier")
                  ->check(CLI::IsMember({"moments", "fourier"}))
                  ->capture_default_str(),
              str_json(s.method));
  size_opt(weight, "--degree", s.degree, "expansion degree");
  size_opt(weight, "--nmoments", s.nmoments, "number of target moments");
  real_opt(weight, "--alpha", s.alpha, "Laguerre alpha on infinite support");
  real_opt(weight, "--y-cut", s.y_cut, "Fourier window half-width");
  real_opt(weight, "--damping", s.damping, "Gaussian damping e^(-damping y^2)");
  binder.bind(weight->add_option("--grid-lo", s.grid_lo, "grid start"),
              [&](const json& v) { s.grid_lo = v.get<double>(); });
  binder.bind(weight->add_option("--grid-hi", s.grid_hi, "grid end (default 0.99 R or 20)"),
              [&](const json& v) { s.grid_hi = v.get<double>(); });
  size_opt(weight, "--grid-n", s.grid_n, "grid points");
  handlers[weight] = cmd_weight;

  auto* verify = app.add_subcommand("verify", "full verification suite");
  common(verify);
  size_opt(verify, "--dim", s.dim, "Fock truncation (0 = 20)");
  size_opt(verify, "--degree", s.degree, "moment reconstruction degree");
  size_opt(verify, "--nmoments", s.nmoments, "number of target moments");
  real_opt(verify, "--alpha", s.alpha, "Laguerre alpha on infinite support");
  handlers[verify] = cmd_verify;

  auto* regimes = app.add_subcommand("regimes", "regime sweep with ratio tests");
  common(regimes, false);
  binder.bind(regimes->add_option("--mode", s.mode, "prop2 (parameter grid) or prop1 (symmetric Q)")
                  ->check(CLI::IsMember({"prop1", "prop2"}))
                  ->capture_default_str(),
              str_json(s.mode));
  binder.bind(regimes->add_option("--points", s.points, "CSV of q_re,q_im,p_re,p_im rows"),
              str_json(s.points));
  binder.bind(regimes->add_option("--y", s.y_samples, "comma-separated y samples")
                  ->capture_default_str(),
              str_json(s.y_samples));
  binder.bind(regimes->add_option("--x-frac", s.x_fractions,
                                  "comma-separated x / R samples")
                  ->capture_default_str(),
              str_json(s.x_fractions));
  handlers[regimes] = cmd_regimes;

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    std::string config = s.config;
    if (config.empty()) {
      if (const char* env = std::getenv(kConfigEnv)) config = env;
    }
    if (!config.empty()) binder.apply(load_config(config));
    for (auto& [sub, handler] : handlers)
      if (sub->parsed()) return handler(s);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const qpdeform::InvalidParameter& e) {
    std::cerr << "invalid parameter: " << e.what() << "\n";
    return 2;
  } catch (const qpdeform::LabelOutOfDisk& e) {
    std::cerr << "invalid label: " << e.what() << "\n";
    return 2;
  } catch (const qpdeform::Error& e) {
    std::cerr << "computation failed: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
