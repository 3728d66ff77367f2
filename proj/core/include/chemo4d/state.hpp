#pragma once

#include "chemo4d/field.hpp"
#include "chemo4d/params.hpp"

namespace chemo4d {

/// The triple (u, v, w) at one time instant, plus the tracked quantity
/// vt = d1*Lap(v) - lambda1*v + w (the v-equation evaluated on the grid,
/// never a finite difference in time).
struct State {
  double t = 0.0;
  Field u;
  Field v;
  Field w;
  Field vt;

  State(double time, Field u_, Field v_, Field w_, Field vt_)
      : t(time), u(std::move(u_)), v(std::move(v_)), w(std::move(w_)),
        vt(std::move(vt_)) {}
};

/// All functional values tracked along a run at one time instant.
struct Diagnostics {
  double mass_u = 0.0;
  double mass_w = 0.0;
  double entropy = 0.0;    // int (1+u) log(1+u)
  double E_chem = 0.0;     // chemical energy E(v; u)
  double F_lyap = 0.0;     // entropy + 0.5*||vt||_2^2 + E_chem
  double D_diss = 0.0;     // dissipation D(u, v)
  double L_energy = 0.0;   // boundedness energy L(u, v, w)
  double D1_diss = 0.0;    // dissipation D1(u, v, w)
  double sup_u = 0.0;
  double lp43_u = 0.0;     // ||u||_{4/3}
  double grad_v_sq = 0.0;  // ||grad v||_2^2
  double vt_l2_sq = 0.0;   // ||vt||_2^2
};

}  // namespace chemo4d
