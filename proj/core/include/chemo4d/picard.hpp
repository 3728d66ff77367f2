#pragma once

#include <cstddef>
#include <vector>

#include "chemo4d/field.hpp"
#include "chemo4d/params.hpp"

namespace chemo4d {

/// B(x, y) = int_0^1 (1-s)^{x-1} s^{y-1} ds via log-Gamma.
double beta(double x, double y);

/// I_{lambda,p}(t) = int_0^t e^{-lambda s} s^{-2(1-1/p)} ds for p in [1, 2),
/// adaptive quadrature to relative 1e-8. For lambda > 0 the value is bounded
/// by Gamma(2/p-1) lambda^{-(2/p-1)}.
double i_lambda_p(double lambda, double p, double t);

/// Initial data triple for the Duhamel construction.
struct MildData {
  Field u0;
  Field v0;
  Field w0;
};

/// Trajectory on the graded mesh t_j = T (j/m)^2, j = 0..m, with the
/// exponents of the scaling-critical weighted norms. Slot 0 holds the data.
struct WeightedTriple {
  double T = 0.0;
  std::size_t m = 0;
  double p = 3.0;      // 2 < p < 4
  double q = 1.8;      // 4p/(p+4) < q < 2
  std::vector<double> times;
  std::vector<Field> u, v, w;

  void validate_exponents() const;
};

WeightedTriple zero_triple(const GridPtr& grid, double T, std::size_t m,
                           double p = 3.0, double q = 1.8);

/// Substep count used by the Duhamel quadrature for a propagation over
/// `interval` within a horizon (T, m); also the rule for the homogeneous
/// parts, so tests can reproduce them exactly.
std::size_t duhamel_substeps(double interval, double T, std::size_t m);

/// One application of the Duhamel map: heat propagation of the data plus
/// composite trapezoid quadrature of the source integrals on the graded
/// mesh; the divergence in the u-component is applied after the semigroup.
WeightedTriple phi_map(const WeightedTriple& input, const MildData& data,
                       const Params& params);

struct XtNorms {
  double Nu = 0.0;  // sup_t t^{1/2} ||u||_{4/3}
  double Nv = 0.0;  // sup_t t^{1-2/p} ||v||_{W^{2,p}}
  double Nw = 0.0;  // sup_t t^{3/2-2/q} ||w||_{W^{1,q}}
  double total() const { return Nu + Nv + Nw; }
};

XtNorms xt_norms(const WeightedTriple& triple);

/// d_{X_T} distance between two triples on the same mesh.
double triple_distance(const WeightedTriple& a, const WeightedTriple& b);

struct PicardResult {
  WeightedTriple fixed_point;
  std::vector<double> ratios;  // successive-distance contraction ratios
  std::size_t iterations = 0;
  bool converged = false;
};

/// Iterate phi from the zero triple until successive iterates are closer
/// than tol in the X_T metric. Throws NonContractionError after three
/// consecutive ratios >= 1.
PicardResult picard_iterate(const MildData& data, const Params& params,
                            double T, std::size_t k_max, double tol,
                            std::size_t mesh_m = 64);

}  // namespace chemo4d
