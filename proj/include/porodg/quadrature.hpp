#pragma once

#include <vector>

#include <Eigen/Core>

namespace porodg {

/// Points in barycentric coordinates with weights normalised to sum to one, so the
/// physical weight is weight * measure.
struct TetRule {
  std::vector<Eigen::Vector4d> bary;
  std::vector<double> weights;
  int degree = 0;
  std::size_t size() const { return weights.size(); }
};

struct TriRule {
  std::vector<Eigen::Vector3d> bary;
  std::vector<double> weights;
  int degree = 0;
  std::size_t size() const { return weights.size(); }
};

/// Gauss-Jacobi nodes and weights on [0, 1] for the weight (1 - t)^a.
void gauss_jacobi_01(int n, int a, std::vector<double>& nodes, std::vector<double>& weights);

/// Collapsed-coordinate product rule exact for polynomials of total degree <= degree.
TetRule tet_rule(int degree);
TriRule tri_rule(int degree);

}  // namespace porodg
