// Acceptance run: one PASS/FAIL line per criterion, with the measured numbers
// indented underneath. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "oracle/mp_oracle.hpp"
#include "qpdeform/qpdeform.hpp"

using namespace qpdeform;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

const complex kQuarterTurn = std::polar(1.0, std::numbers::pi / 4);

// q inside the disk with p on the circle, and q on the circle with |p| >= 1
std::vector<DeformationParams> regime_grid() {
  std::vector<DeformationParams> grid;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      if ((i + j) % 2 == 0)
        grid.emplace_back(std::polar(0.3 + 0.15 * i, 0.4 + 0.9 * i),
                          std::polar(1.0, -1.3 + 0.55 * j));
      else
        grid.emplace_back(std::polar(1.0, 0.37 + 1.1 * i),
                          std::polar(1.0 + 0.25 * j, 0.61 - 0.7 * j));
    }
  }
  return grid;
}

std::vector<DeformationParams> klauder_points() {
  std::vector<DeformationParams> pts = regime_grid();
  pts.emplace_back(complex{0.5, 0.0}, complex{1.0, 0.0});
  pts.emplace_back(complex{0.5, 0.0}, kQuarterTurn);
  return pts;
}

// 50 labels filling |z|^2 <= 0.8 R
std::vector<complex> labels(double R) {
  std::vector<complex> zs;
  const double golden = 0.6180339887498949;
  for (int k = 0; k < 50; ++k) {
    const double r2 = 0.8 * R * (k + 0.5) / 50.0;
    const double frac = golden * k - std::floor(golden * k);
    zs.push_back(std::polar(std::sqrt(r2), 2.0 * std::numbers::pi * frac));
  }
  return zs;
}

// 1. classical limit

Outcome classical_limit() {
  Outcome o;
  const DeformationParams classical(complex{1.0, 0.0}, complex{1.0, 0.0});

  double basket_err = 0.0;
  for (std::size_t n = 0; n <= 100; ++n)
    basket_err = std::max(basket_err, std::abs(qp_number(n, classical) - double(n)));
  o.require(basket_err == 0.0, "[n] = n exactly for n <= 100");

  double exp_err = 0.0;
  for (int i = 0; i <= 40; ++i) {
    const double x = -10.0 + 0.5 * i;
    const SeriesEvaluation e = exp1(complex{x, 0.0}, classical);
    exp_err = std::max(exp_err, std::abs(e.value - std::exp(x)) / std::exp(x));
  }
  for (int i = 0; i < 24; ++i) {
    const complex x = std::polar(10.0 * (i + 1) / 24.0, 0.7 + 0.9 * i);
    const SeriesEvaluation e = exp1(x, classical);
    exp_err = std::max(exp_err, std::abs(e.value - std::exp(x)) / std::abs(std::exp(x)));
  }
  o.require(exp_err <= 1e-10, "exp1 vs e^x, |x| <= 10: max rel err " + sci(exp_err));

  double cs_err = 0.0;
  for (complex z : {complex{0.5, 0.0}, complex{1.0, 1.0}, complex{2.0, -1.5},
                    complex{0.0, 3.0}}) {
    const CoherentState st = make_state(z, classical);
    for (std::size_t n = 0; n < st.dim(); ++n) {
      const double mag = std::exp(-std::norm(z) / 2.0 + n * std::log(std::abs(z)) -
                                  0.5 * std::lgamma(n + 1.0));
      const complex expected = std::polar(mag, n * std::arg(z));
      cs_err = std::max(cs_err, std::abs(st.coeffs[n] - expected));
    }
  }
  o.require(cs_err <= 1e-10, "coherent coefficients vs canonical form: max err " + sci(cs_err));

  const WeightFunction wt = weight_from_moments(target_moments(classical, 24), 12,
                                                GridSpec{0.0, 20.0, 401});
  const WeightFunction w = physical_weight(wt, classical);
  double wt_err = 0.0, w_err = 0.0;
  for (std::size_t i = 0; i < wt.grid_x.size(); ++i) {
    const double x = wt.grid_x[i];
    wt_err = std::max(wt_err, std::abs(wt.grid_values[i] - std::exp(-x) / std::numbers::pi));
    w_err = std::max(w_err, std::abs(w.grid_values[i] - 1.0 / std::numbers::pi));
  }
  o.require(wt_err <= 1e-6, "recovered Wtilde vs e^-x/pi on [0,20]: max err " + sci(wt_err));
  o.require(w_err <= 1e-6, "physical weight vs 1/pi on [0,20]: max err " + sci(w_err));
  return o;
}

// 2. algebra residuals

Outcome algebra_residuals() {
  Outcome o;
  constexpr double tol = 1e-12;
  double worst[5] = {0, 0, 0, 0, 0};
  for (const DeformationParams& params : regime_grid()) {
    const RelationReport r = relation_residuals(build_operators(20, params), params);
    const double v[5] = {r.residual_qmutation, r.residual_delta_comm, r.residual_adag_comm,
                         r.residual_qp, r.residual_adag_comm_swapped};
    for (int k = 0; k < 5; ++k) worst[k] = std::max(worst[k], v[k]);
  }
  o.require(worst[0] <= tol, "a a+ - Q a+ a = Delta': max " + sci(worst[0]));
  o.require(worst[1] <= tol, "a Delta - Q Delta a = Delta' a: max " + sci(worst[1]));
  o.require(worst[2] <= tol, "a+ Delta - Q Delta a+ = -a+ Delta': max " + sci(worst[2]));
  o.require(worst[3] <= tol, "a a+ - q a+ a = p^-N: max " + sci(worst[3]));
  o.notes.push_back("info Delta a+ - Q a+ Delta = a+ Delta' (swapped order): max " +
                    sci(worst[4]));
  return o;
}

// 3, 4 and 9 share the states

Outcome normalization() {
  Outcome o;
  double worst = 0.0;
  std::size_t states = 0;
  for (const DeformationParams& params : klauder_points()) {
    for (complex z : labels(convergence_radius(params))) {
      worst = std::max(worst, std::abs(make_state(z, params).norm_sq() - 1.0));
      ++states;
    }
  }
  o.require(worst <= 1e-10, "|<z|z> - 1| over " + std::to_string(states) +
                                " states (27 points x 50 labels): max " + sci(worst));
  return o;
}

Outcome continuity() {
  Outcome o;
  const std::vector<double> deltas = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  double worst_c = 0.0;
  bool monotone = true;
  double last = 0.0;
  std::size_t cases = 0;
  for (const DeformationParams& params : klauder_points()) {
    const double R = convergence_radius(params);
    const double r = std::min(std::sqrt(0.5 * R), std::sqrt(0.8 * R) - 0.1);
    for (int k = 0; k < 5; ++k) {
      const complex z = std::polar(r, 0.3 + 1.25 * k);
      const complex dir = std::polar(1.0, 1.1 - 0.8 * k);
      double prev = std::numeric_limits<double>::infinity();
      for (double d : deltas) {
        const complex z2 = z + d * dir;
        const std::size_t dim = std::max(auto_dim(z, params), auto_dim(z2, params));
        const double dist = label_distance_sq(make_state(z, params, dim),
                                              make_state(z2, params, dim)).direct;
        worst_c = std::max(worst_c, dist / d);
        if (!(dist < prev)) monotone = false;
        prev = dist;
        last = std::max(last, d == deltas.back() ? dist : 0.0);
      }
      ++cases;
    }
  }
  o.require(std::isfinite(worst_c), "largest d^2/|delta| over " + std::to_string(cases) +
                                        " labels and |delta| = 1e-1..1e-6: " + sci(worst_c));
  o.require(monotone, "d^2 strictly decreasing as |delta| shrinks");
  o.require(last <= 1e-10, "d^2 at |delta| = 1e-6: max " + sci(last));
  return o;
}

Outcome eigenstate() {
  Outcome o;
  double worst_ratio = 0.0;
  std::size_t states = 0;
  for (const DeformationParams& params : klauder_points()) {
    const auto zs = labels(convergence_radius(params));
    std::size_t dim = 2;
    for (complex z : zs) dim = std::max(dim, auto_dim(z, params));
    const FockOperators ops = build_operators(dim, params);
    for (complex z : zs) {
      const CoherentState st = make_state(z, params, dim);
      const AnnihilatorResidual r = annihilator_residual(st, ops);
      worst_ratio = std::max(worst_ratio, r.interior / st.tail_bound);
      ++states;
    }
  }
  o.require(worst_ratio <= 10.0, "interior residual / tail_bound over " +
                                     std::to_string(states) + " states: max " +
                                     sci(worst_ratio));
  return o;
}

// 5. resolution of unity

Outcome resolution() {
  Outcome o;
  const std::vector<std::pair<std::string, DeformationParams>> points = {
      {"q=0.5 p=1", DeformationParams(complex{0.5, 0.0}, complex{1.0, 0.0})},
      {"q=0.5 p=e^(i pi/4)", DeformationParams(complex{0.5, 0.0}, kQuarterTurn)}};
  for (const auto& [name, params] : points) {
    const double R = convergence_radius(params);
    const WeightFunction wt =
        weight_from_moments(target_moments(params, 24), 12, GridSpec{0.0, R, 201});
    double mres = 0.0;
    for (double r : wt.moment_residuals) mres = std::max(mres, std::abs(r));
    o.require(mres <= 1e-6, name + ": relative moment residual n <= 12: max " + sci(mres));

    const double res = resolution_residual(wt, params, 12).residual;
    o.require(res <= 1e-4, name + ": resolution residual at dim 12: " + sci(res));

    const GridSpec central{0.1 * R, 0.9 * R, 161};
    const WeightFunction moments = weight_from_moments(target_moments(params, 24), 12, central);
    const WeightFunction fourier = weight_from_fourier(params, 8.0, 0.3, central);
    double diff = 0.0;
    for (std::size_t i = 0; i < central.count; ++i)
      diff = std::max(diff, std::abs(moments.grid_values[i] - fourier.grid_values[i]));
    o.require(diff <= 1e-3, name + ": Fourier (y_cut 8, damping 0.3) vs moments on "
                                   "[0.1R, 0.9R]: max diff " + sci(diff));
    o.notes.push_back("info " + name + ": smallest moment-reconstructed Wtilde " +
                      sci(moments.min_value));
  }
  return o;
}

// 6, 7. propositions

Outcome proposition1() {
  Outcome o;
  const std::vector<double> ys = {0.5, 1.0, 2.0};
  std::size_t off_bad = 0, on_bad = 0;
  const auto off = standard_prop1_off_circle();
  const auto on = standard_prop1_on_circle();
  for (complex Q : off)
    for (const auto& r : proposition1_check(Q, ys))
      if (r.verdict != SeriesVerdict::Divergent) ++off_bad;
  for (complex Q : on)
    for (const auto& r : proposition1_check(Q, ys))
      if (r.verdict != SeriesVerdict::Convergent || r.root_of_unity_index) ++on_bad;
  o.require(off.size() == 40 && off_bad == 0,
            std::to_string(off.size()) + " values with |Q| in {0.5, 0.9, 1.1, 2}: " +
                std::to_string(off_bad) + " non-Divergent (Q, y) rows");
  o.require(on.size() == 10 && on_bad == 0,
            std::to_string(on.size()) + " unit-circle values at irrational angles: " +
                std::to_string(on_bad) + " non-Convergent (Q, y) rows");
  return o;
}

Outcome proposition2() {
  Outcome o;
  const auto grid = standard_sweep();
  const std::vector<double> ys = {0.5, 1.0, 2.0};
  const std::vector<double> xs = {0.5};
  const auto rows = proposition2_check(grid, ys, xs);
  std::size_t contradictions = 0, skipped = 0, inconclusive = 0;
  std::map<std::string, int> by_regime;
  for (const auto& r : rows) {
    if (r.contradiction) ++contradictions;
    if (r.root_of_unity_index) ++skipped;
    if (r.inconclusive_allowed) ++inconclusive;
    ++by_regime[std::string(to_string(r.verdict.regime))];
  }
  std::string mix;
  for (const auto& [k, v] : by_regime) mix += " " + k + "=" + std::to_string(v);
  o.require(rows.size() == 100, "sweep size " + std::to_string(rows.size()) + ":" + mix);
  o.require(contradictions == 0, "contradictions: " + std::to_string(contradictions) +
                                     " (root-of-unity skips " + std::to_string(skipped) +
                                     ", near-boundary points " +
                                     std::to_string(inconclusive) + ")");
  return o;
}

// 8. radius

oracle::mp_complex oracle_exp1(complex x, const DeformationParams& params, std::size_t terms) {
  const oracle::mp_complex q = oracle::to_mp(params.q()), p = oracle::to_mp(params.p());
  const oracle::mp_complex xm = oracle::to_mp(x);
  oracle::mp_complex term(1), sum(1);
  for (std::size_t n = 1; n < terms; ++n) {
    term *= xm / oracle::basket(n, q, p);
    sum += term;
  }
  return sum;
}

oracle::mp_real oracle_log_term(double x_abs, const DeformationParams& params, std::size_t n) {
  const oracle::mp_complex q = oracle::to_mp(params.q()), p = oracle::to_mp(params.p());
  return n * log(oracle::mp_real(x_abs)) - log(oracle::abs_factorial(n, q, p));
}

Outcome radius() {
  Outcome o;
  std::vector<DeformationParams> pts;
  for (const DeformationParams& params : regime_grid())
    if (!(std::abs(std::abs(params.q()) - 1.0) < 1e-12 &&
          std::abs(std::abs(params.p()) - 1.0) < 1e-12))
      pts.push_back(params);
  std::vector<DeformationParams> chosen;
  for (std::size_t i = 0; i < pts.size() && chosen.size() < 10; i += 2) chosen.push_back(pts[i]);

  std::size_t flips = 0;
  double worst_oracle = 0.0;
  bool independent = true;
  for (std::size_t k = 0; k < chosen.size(); ++k) {
    const DeformationParams& params = chosen[k];
    const double R = convergence_radius(params);
    const complex dir = std::polar(1.0, 0.5 + 0.77 * k);
    const SeriesEvaluation inside = exp1(0.9 * R * dir, params);
    const SeriesEvaluation outside = exp1(1.1 * R * dir, params);
    if (inside.verdict == Verdict::Converged && outside.verdict == Verdict::DivergentInput)
      ++flips;
    const complex ref = oracle::to_double(oracle_exp1(0.9 * R * dir, params, 900));
    worst_oracle = std::max(worst_oracle, std::abs(inside.value - ref) / std::abs(ref));
    // terms keep growing just outside and keep shrinking just inside
    if (!(oracle_log_term(1.1 * R, params, 600) > oracle_log_term(1.1 * R, params, 300)) ||
        !(oracle_log_term(0.9 * R, params, 600) < oracle_log_term(0.9 * R, params, 300)))
      independent = false;
  }
  o.require(chosen.size() == 10 && flips == 10,
            std::to_string(flips) + " of " + std::to_string(chosen.size()) +
                " points: Converged at 0.9R, DivergentInput at 1.1R");
  o.require(worst_oracle <= 1e-10, "exp1 at 0.9R vs 50-digit oracle: max rel err " +
                                       sci(worst_oracle));
  o.require(independent, "oracle terms |x^n/[n]!| shrink at 0.9R and grow at 1.1R (n = 300 -> 600)");
  return o;
}

// 10. determinism

std::string capture(const std::string& args, int& code) {
  const std::string cmd = std::string(QPDEFORM_CLI_PATH) + " " + args + " 2>/dev/null";
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    code = -1;
    return out;
  }
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

Outcome determinism() {
  Outcome o;
  const std::vector<std::string> runs = {
      "verify --q 1 --p 1 --dim 20",
      "verify --q 0.5 --p 1 --dim 16 --degree 12",
      "verify --q 0.5 --p 1 --dim 16 --degree 12 --format json",
      "verify --q 2 --p 1",
      "regimes",
      "regimes --format json",
      "regimes --mode prop1"};
  for (const std::string& args : runs) {
    int c1 = 0, c2 = 0;
    const std::string a = capture(args, c1);
    const std::string b = capture(args, c2);
    o.require(!a.empty() && a == b && c1 == c2,
              "'" + args + "': " + std::to_string(a.size()) + " bytes, exit " +
                  std::to_string(c1) + (a == b ? ", identical" : ", DIFFERS"));
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "classical-limit exactness", classical_limit},
      {2, "algebra residuals", algebra_residuals},
      {3, "Klauder normalization", normalization},
      {4, "Klauder label continuity", continuity},
      {5, "Klauder resolution of unity", resolution},
      {6, "symmetric-basket Wbar convergence only on |Q| = 1", proposition1},
      {7, "regime sweep consistency", proposition2},
      {8, "convergence radius", radius},
      {9, "annihilator eigenstates", eigenstate},
      {10, "determinism", determinism}};

  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name
              << " (" << sci(secs) << " s)\n";
    for (const auto& n : o.notes) std::cout << "    " << n << "\n";
    std::cout.flush();
    if (!o.pass) ++failed;
  }
  std::cout << (criteria.size() - failed) << " of " << criteria.size()
            << " criteria pass\n";
  return failed;
}
