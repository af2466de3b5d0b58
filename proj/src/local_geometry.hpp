#pragma once

// Pointwise curvature algebra from the radial 2-jet (g, dg/dr, d2g/dr2) of a
// rotationally symmetric metric. Only r-derivatives are nonzero.

#include "rdt/tensor.hpp"

namespace rdt::detail {

using Array2 = double[2][2];
using Array3 = double[2][2][2];
using Array4 = double[2][2][2][2];

struct MetricJet {
  Sym2 g;
  Sym2 dg;
  Sym2 ddg;
};

struct LocalGeometry {
  Array2 g;
  Array2 ginv;
  Array2 dginv;   // d/dr of g^{-1}
  Array3 gamma;   // Gamma^k_ij as [k][i][j]
  Array3 dgamma;  // d/dr Gamma^k_ij
  Array4 riemann_up;  // R^l_{ijk} as [l][i][j][k]
  Array2 ricci;
};

inline void to_array(const Sym2& s, Array2& a) {
  a[0][0] = s.rr;
  a[0][1] = s.rt;
  a[1][0] = s.rt;
  a[1][1] = s.tt;
}

/// Christoffel symbols and their radial derivative from a metric jet.
inline void christoffel_jet(const MetricJet& jet, LocalGeometry& out) {
  Array2 dg, ddg;
  to_array(jet.g, out.g);
  to_array(jet.dg, dg);
  to_array(jet.ddg, ddg);
  const Sym2 inv = jet.g.inverse();
  to_array(inv, out.ginv);
  // d(g^{-1}) = -g^{-1} dg g^{-1}
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      double acc = 0.0;
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) acc -= out.ginv[a][c] * dg[c][d] * out.ginv[d][b];
      out.dginv[a][b] = acc;
    }
  // First-kind symbols [ij,l] = 1/2 (d_i g_jl + d_j g_il - d_l g_ij), with d_i = delta_{i0} d/dr.
  Array3 first, dfirst;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int l = 0; l < 2; ++l) {
        const double di = i == 0 ? 1.0 : 0.0;
        const double dj = j == 0 ? 1.0 : 0.0;
        const double dl = l == 0 ? 1.0 : 0.0;
        first[i][j][l] = 0.5 * (di * dg[j][l] + dj * dg[i][l] - dl * dg[i][j]);
        dfirst[i][j][l] = 0.5 * (di * ddg[j][l] + dj * ddg[i][l] - dl * ddg[i][j]);
      }
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double v = 0.0, dv = 0.0;
        for (int l = 0; l < 2; ++l) {
          v += out.ginv[k][l] * first[i][j][l];
          dv += out.dginv[k][l] * first[i][j][l] + out.ginv[k][l] * dfirst[i][j][l];
        }
        out.gamma[k][i][j] = v;
        out.dgamma[k][i][j] = dv;
      }
}

/// Riemann tensor R^rho_{sigma mu nu} = d_mu Gamma^rho_{nu sigma} - d_nu Gamma^rho_{mu sigma}
///   + Gamma^rho_{mu lambda} Gamma^lambda_{nu sigma} - Gamma^rho_{nu lambda} Gamma^lambda_{mu sigma}
/// and Ric_{sigma nu} = R^rho_{sigma rho nu}.
inline void curvature_jet(LocalGeometry& lg) {
  for (int rho = 0; rho < 2; ++rho)
    for (int s = 0; s < 2; ++s)
      for (int mu = 0; mu < 2; ++mu)
        for (int nu = 0; nu < 2; ++nu) {
          double v = 0.0;
          if (mu == 0) v += lg.dgamma[rho][nu][s];
          if (nu == 0) v -= lg.dgamma[rho][mu][s];
          for (int l = 0; l < 2; ++l)
            v += lg.gamma[rho][mu][l] * lg.gamma[l][nu][s] - lg.gamma[rho][nu][l] * lg.gamma[l][mu][s];
          lg.riemann_up[rho][s][mu][nu] = v;
        }
  for (int s = 0; s < 2; ++s)
    for (int nu = 0; nu < 2; ++nu) {
      double v = 0.0;
      for (int rho = 0; rho < 2; ++rho) v += lg.riemann_up[rho][s][rho][nu];
      lg.ricci[s][nu] = v;
    }
}

inline LocalGeometry local_geometry(const MetricJet& jet) {
  LocalGeometry lg;
  christoffel_jet(jet, lg);
  curvature_jet(lg);
  return lg;
}

/// Radial 2-jet of g at grid point i.
inline MetricJet metric_jet(const MetricField& g, std::size_t i) {
  const RadialGrid& grid = *g.grid();
  const Stencil& s1 = grid.first_derivative(i);
  const Stencil& s2 = grid.second_derivative(i);
  MetricJet jet;
  jet.g = g[i];
  for (std::size_t k = 0; k < s1.count; ++k) jet.dg = jet.dg + s1.weights[k] * g[s1.first + k];
  for (std::size_t k = 0; k < s2.count; ++k) jet.ddg = jet.ddg + s2.weights[k] * g[s2.first + k];
  return jet;
}

}  // namespace rdt::detail
