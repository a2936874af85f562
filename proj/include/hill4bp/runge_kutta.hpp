#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "hill4bp/errors.hpp"

namespace hill4bp {

template <int N>
using StateN = Eigen::Matrix<double, N, 1>;

/// One Dormand-Prince 8(5,3) step from (t, y) with slope k1 = f(t, y).
/// Writes the 8th-order solution and returns the combined 5th/3rd-order error
/// estimate in the norm with absolute and relative tolerance `tol` (accept
/// iff <= 1).
template <int N, typename Rhs>
double dop853_step(const Rhs& f, double t, const StateN<N>& y, const StateN<N>& k1, double h, double tol,
                   StateN<N>& y_new) {
  constexpr double c2 = 0.526001519587677318785587544488E-01, c3 = 0.789002279381515978178381316732E-01,
                   c4 = 0.118350341907227396726757197510E+00, c5 = 0.281649658092772603273242802490E+00,
                   c6 = 0.333333333333333333333333333333E+00, c7 = 0.25E+00,
                   c8 = 0.307692307692307692307692307692E+00, c9 = 0.651282051282051282051282051282E+00,
                   c10 = 0.6E+00, c11 = 0.857142857142857142857142857142E+00;
  constexpr double b1 = 5.42937341165687622380535766363E-2, b6 = 4.45031289275240888144113950566E0,
                   b7 = 1.89151789931450038304281599044E0, b8 = -5.8012039600105847814672114227E0,
                   b9 = 3.1116436695781989440891606237E-1, b10 = -1.52160949662516078556178806805E-1,
                   b11 = 2.01365400804030348374776537501E-1, b12 = 4.47106157277725905176885569043E-2;
  constexpr double a21 = 5.26001519587677318785587544488E-2;
  constexpr double a31 = 1.97250569845378994544595329183E-2, a32 = 5.91751709536136983633785987549E-2;
  constexpr double a41 = 2.95875854768068491816892993775E-2, a43 = 8.87627564304205475450678981324E-2;
  constexpr double a51 = 2.41365134159266685502369798665E-1, a53 = -8.84549479328286085344864962717E-1,
                   a54 = 9.24834003261792003115737966543E-1;
  constexpr double a61 = 3.7037037037037037037037037037E-2, a64 = 1.70828608729473871279604482173E-1,
                   a65 = 1.25467687566822425016691814123E-1;
  constexpr double a71 = 3.7109375E-2, a74 = 1.70252211019544039314978060272E-1,
                   a75 = 6.02165389804559606850219397283E-2, a76 = -1.7578125E-2;
  constexpr double a81 = 3.70920001185047927108779319836E-2, a84 = 1.70383925712239993810214054705E-1,
                   a85 = 1.07262030446373284651809199168E-1, a86 = -1.53194377486244017527936158236E-2,
                   a87 = 8.27378916381402288758473766002E-3;
  constexpr double a91 = 6.24110958716075717114429577812E-1, a94 = -3.36089262944694129406857109825E0,
                   a95 = -8.68219346841726006818189891453E-1, a96 = 2.75920996994467083049415600797E1,
                   a97 = 2.01540675504778934086186788979E1, a98 = -4.34898841810699588477366255144E1;
  constexpr double a101 = 4.77662536438264365890433908527E-1, a104 = -2.48811461997166764192642586468E0,
                   a105 = -5.90290826836842996371446475743E-1, a106 = 2.12300514481811942347288949897E1,
                   a107 = 1.52792336328824235832596922938E1, a108 = -3.32882109689848629194453265587E1,
                   a109 = -2.03312017085086261358222928593E-2;
  constexpr double a111 = -9.3714243008598732571704021658E-1, a114 = 5.18637242884406370830023853209E0,
                   a115 = 1.09143734899672957818500254654E0, a116 = -8.14978701074692612513997267357E0,
                   a117 = -1.85200656599969598641566180701E1, a118 = 2.27394870993505042818970056734E1,
                   a119 = 2.49360555267965238987089396762E0, a1110 = -3.0467644718982195003823669022E0;
  constexpr double a121 = 2.27331014751653820792359768449E0, a124 = -1.05344954667372501984066689879E1,
                   a125 = -2.00087205822486249909675718444E0, a126 = -1.79589318631187989172765950534E1,
                   a127 = 2.79488845294199600508499808837E1, a128 = -2.85899827713502369474065508674E0,
                   a129 = -8.87285693353062954433549289258E0, a1210 = 1.23605671757943030647266201528E1,
                   a1211 = 6.43392746015763530355970484046E-1;
  constexpr double bhh1 = 0.244094488188976377952755905512E+00, bhh2 = 0.733846688281611857341361741547E+00,
                   bhh3 = 0.220588235294117647058823529412E-01;
  constexpr double er1 = 0.1312004499419488073250102996E-01, er6 = -0.1225156446376204440720569753E+01,
                   er7 = -0.4957589496572501915214079952E+00, er8 = 0.1664377182454986536961530415E+01,
                   er9 = -0.3503288487499736816886487290E+00, er10 = 0.3341791187130174790297318841E+00,
                   er11 = 0.8192320648511571246570742613E-01, er12 = -0.2235530786388629525884427845E-01;

  using V = StateN<N>;
  const V k2 = f(t + c2 * h, V(y + h * a21 * k1));
  const V k3 = f(t + c3 * h, V(y + h * (a31 * k1 + a32 * k2)));
  const V k4 = f(t + c4 * h, V(y + h * (a41 * k1 + a43 * k3)));
  const V k5 = f(t + c5 * h, V(y + h * (a51 * k1 + a53 * k3 + a54 * k4)));
  const V k6 = f(t + c6 * h, V(y + h * (a61 * k1 + a64 * k4 + a65 * k5)));
  const V k7 = f(t + c7 * h, V(y + h * (a71 * k1 + a74 * k4 + a75 * k5 + a76 * k6)));
  const V k8 = f(t + c8 * h, V(y + h * (a81 * k1 + a84 * k4 + a85 * k5 + a86 * k6 + a87 * k7)));
  const V k9 = f(t + c9 * h, V(y + h * (a91 * k1 + a94 * k4 + a95 * k5 + a96 * k6 + a97 * k7 + a98 * k8)));
  const V k10 = f(t + c10 * h, V(y + h * (a101 * k1 + a104 * k4 + a105 * k5 + a106 * k6 + a107 * k7 +
                                          a108 * k8 + a109 * k9)));
  const V k11 = f(t + c11 * h, V(y + h * (a111 * k1 + a114 * k4 + a115 * k5 + a116 * k6 + a117 * k7 +
                                          a118 * k8 + a119 * k9 + a1110 * k10)));
  const V k12 = f(t + h, V(y + h * (a121 * k1 + a124 * k4 + a125 * k5 + a126 * k6 + a127 * k7 + a128 * k8 +
                                    a129 * k9 + a1210 * k10 + a1211 * k11)));
  const V slope = b1 * k1 + b6 * k6 + b7 * k7 + b8 * k8 + b9 * k9 + b10 * k10 + b11 * k11 + b12 * k12;
  y_new = y + h * slope;

  const V e3 = slope - bhh1 * k1 - bhh2 * k9 - bhh3 * k12;
  const V e5 = er1 * k1 + er6 * k6 + er7 * k7 + er8 * k8 + er9 * k9 + er10 * k10 + er11 * k11 + er12 * k12;
  // Max norm with absolute tolerance: near collisions |p| ~ r^{-1/2} grows
  // and a relative tolerance would let the energy error scale with it.
  const double err3 = (e3.cwiseAbs().maxCoeff()) / tol;
  const double err5 = (e5.cwiseAbs().maxCoeff()) / tol;
  const double deno = err5 * err5 + 0.01 * err3 * err3;
  return deno <= 0.0 ? 0.0 : std::abs(h) * err5 * err5 / std::sqrt(deno);
}

struct StepControl {
  double tol = 1e-10;      ///< absolute local error tolerance (max norm)
  double h_min = 1e-14;    ///< relative to max(1, |t|)
  std::size_t max_steps = 20'000'000;
};

/// Adaptive Dormand-Prince 8(5,3) integration from t0 to t_final (either direction).
///
/// Steps are clipped to land exactly on each entry of `outputs` (monotone in
/// the direction of integration); `record(t, y)` is called at t0, at every
/// output time and at t_final. With no outputs every accepted step is recorded.
/// `after_step(t_prev, y_prev, t, y)` runs on each accepted step, may modify y
/// (projection) and returns false to stop. Returns the final time reached.
template <int N, typename Rhs, typename AfterStep, typename Record>
double integrate_adaptive(const Rhs& f, double t0, StateN<N>& y, double t_final, const StepControl& ctl,
                          const std::vector<double>& outputs, AfterStep&& after_step, Record&& record) {
  const double dir = t_final >= t0 ? 1.0 : -1.0;
  double t = t0;
  record(t, y);
  if (t_final == t0) return t;

  StateN<N> k1 = f(t, y);
  double h = 0.0;
  {
    // Starting step from the scale of y and its slope.
    const auto sc = (y.cwiseAbs().array() * ctl.tol + ctl.tol).eval();
    const double d0 = (y.array() / sc).matrix().norm();
    const double d1 = (k1.array() / sc).matrix().norm();
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min({h, std::abs(t_final - t0), 0.1});
  }

  std::size_t next_output = 0;
  while (next_output < outputs.size() && dir * (outputs[next_output] - t) <= 0.0) ++next_output;
  const bool record_steps = outputs.empty();

  StateN<N> y_new;
  for (std::size_t step = 0;; ++step) {
    if (step >= ctl.max_steps) throw StepFailure("maximum number of integration steps exceeded");
    double target = t_final;
    bool hits_output = false;
    if (next_output < outputs.size() && dir * (outputs[next_output] - t_final) < 0.0) {
      target = outputs[next_output];
      hits_output = true;
    }
    bool clipped = false;
    double h_try = h;
    if (h_try >= std::abs(target - t)) {
      h_try = std::abs(target - t);
      clipped = true;
    }
    if (h_try < ctl.h_min * std::max(1.0, std::abs(t))) {
      if (!clipped) throw StepFailure("step size underflow");
      // Target within rounding of t: land on it without stepping.
      t = target;
      record(t, y);
      if (!hits_output) return t;
      ++next_output;
      continue;
    }

    const double e = dop853_step<N>(f, t, y, k1, dir * h_try, ctl.tol, y_new);
    if (!std::isfinite(e)) {
      h = 0.2 * h_try;
      continue;
    }
    const double factor = e == 0.0 ? 6.0 : std::clamp(0.9 * std::pow(e, -0.125), 1.0 / 3.0, 6.0);
    if (e > 1.0) {
      h = h_try * std::min(1.0, factor);
      continue;
    }

    const double t_prev = t;
    const StateN<N> y_prev = y;
    t = clipped ? target : t + dir * h_try;
    y = y_new;
    const bool keep_going = after_step(t_prev, y_prev, t, y);
    if (!keep_going) {
      record(t, y);
      return t;
    }
    const bool at_end = clipped && !hits_output;
    if (clipped && hits_output) {
      record(t, y);
      ++next_output;
    } else if (record_steps || at_end) {
      record(t, y);
    }
    if (at_end) return t;
    // A clipped step says nothing about the natural step size.
    if (!clipped) h = h_try * factor;
    k1 = f(t, y);
  }
}

}  // namespace hill4bp
