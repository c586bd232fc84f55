#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace conserva {

/// Explicit embedded Runge-Kutta pair.  a is strictly lower triangular,
/// b are the propagating weights, b - btilde the embedded ones.
struct ButcherTableau {
  std::size_t stages = 0;
  int order = 0;
  int embedded_order = 0;
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  std::vector<double> btilde;  // b_i - bhat_i, weights of the error estimate
  std::vector<double> c;
};

/// Tsitouras' 5(4) pair, coefficients as published (free 4th-order
/// interpolant omitted).  b_7 = 0 and the last stage feeds only the error
/// estimate.
inline const ButcherTableau& tsit5() {
  static const ButcherTableau t = [] {
    ButcherTableau tb;
    tb.stages = 7;
    tb.order = 5;
    tb.embedded_order = 4;
    tb.c = {0.0, 0.161, 0.327, 0.9, 0.9800255409045097, 1.0, 1.0};
    tb.a.assign(7, std::vector<double>(7, 0.0));
    tb.a[1][0] = 0.161;
    tb.a[2][0] = -0.008480655492356989;
    tb.a[2][1] = 0.335480655492357;
    tb.a[3][0] = 2.8971530571054935;
    tb.a[3][1] = -6.359448489975075;
    tb.a[3][2] = 4.3622954328695815;
    tb.a[4][0] = 5.325864828439257;
    tb.a[4][1] = -11.748883564062828;
    tb.a[4][2] = 7.4955393428898365;
    tb.a[4][3] = -0.09249506636175525;
    tb.a[5][0] = 5.86145544294642;
    tb.a[5][1] = -12.92096931784711;
    tb.a[5][2] = 8.159367898576159;
    tb.a[5][3] = -0.071584973281401;
    tb.a[5][4] = -0.028269050394068383;
    tb.a[6][0] = 0.09646076681806523;
    tb.a[6][1] = 0.01;
    tb.a[6][2] = 0.4798896504144996;
    tb.a[6][3] = 1.379008574103742;
    tb.a[6][4] = -3.290069515436081;
    tb.a[6][5] = 2.324710524099774;
    tb.b = {0.09646076681806523, 0.01, 0.4798896504144996, 1.379008574103742,
            -3.290069515436081, 2.324710524099774, 0.0};
    tb.btilde = {-1.780011052225771e-3, -8.164344596567469e-4, 7.880878010261995e-3,
                 -1.4471100717326291e-1, 5.823571654525552e-1, -4.580821059291869e-1,
                 1.5151515151515152e-2};
    return tb;
  }();
  return t;
}

}  // namespace conserva
