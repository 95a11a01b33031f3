#include "porodg/quadrature.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "porodg/errors.hpp"

namespace porodg {

void gauss_jacobi_01(int n, int a, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw InvalidArgument("quadrature needs at least one point");
  // Golub-Welsch on [-1, 1] for (1 - x)^a, then map to [0, 1].
  const double al = a, be = 0.0;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + al + be;
    J(k, k) = (al + be == 0.0) ? 0.0 : (be * be - al * al) / (s * (s + 2.0));
    if (k + 1 < n) {
      const double m = k + 1;
      const double t = 2.0 * m + al + be;
      const double bk = 4.0 * m * (m + al) * (m + be) * (m + al + be) / (t * t * (t + 1.0) * (t - 1.0));
      J(k, k + 1) = J(k + 1, k) = std::sqrt(bk);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
  const double mu0 = std::pow(2.0, al + be + 1.0) * std::tgamma(al + 1.0) * std::tgamma(be + 1.0) / std::tgamma(al + be + 2.0);
  nodes.resize(n);
  weights.resize(n);
  const double scale = std::pow(0.5, al + 1.0);
  for (int k = 0; k < n; ++k) {
    const double v0 = eig.eigenvectors()(0, k);
    nodes[k] = 0.5 * (1.0 + eig.eigenvalues()[k]);
    weights[k] = mu0 * v0 * v0 * scale;
  }
}

TetRule tet_rule(int degree) {
  if (degree < 0) throw InvalidArgument("negative quadrature degree");
  const int n = (degree + 2) / 2;
  std::vector<double> x0, w0, x1, w1, x2, w2;
  gauss_jacobi_01(n, 0, x0, w0);
  gauss_jacobi_01(n, 1, x1, w1);
  gauss_jacobi_01(n, 2, x2, w2);
  TetRule r;
  r.degree = 2 * n - 1;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double z = x2[k];
        const double y = (1.0 - z) * x1[j];
        const double x = (1.0 - z) * (1.0 - x1[j]) * x0[i];
        r.bary.emplace_back(1.0 - x - y - z, x, y, z);
        r.weights.push_back(6.0 * w0[i] * w1[j] * w2[k]);
      }
  return r;
}

TriRule tri_rule(int degree) {
  if (degree < 0) throw InvalidArgument("negative quadrature degree");
  const int n = (degree + 2) / 2;
  std::vector<double> x0, w0, x1, w1;
  gauss_jacobi_01(n, 0, x0, w0);
  gauss_jacobi_01(n, 1, x1, w1);
  TriRule r;
  r.degree = 2 * n - 1;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double y = x1[j];
      const double x = (1.0 - y) * x0[i];
      r.bary.emplace_back(1.0 - x - y, x, y);
      r.weights.push_back(2.0 * w0[i] * w1[j]);
    }
  return r;
}

}  // namespace porodg
