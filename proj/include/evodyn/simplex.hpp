#ifndef EVODYN_SIMPLEX_HPP
#define EVODYN_SIMPLEX_HPP

#include <Eigen/Dense>

#include "evodyn/errors.hpp"

namespace evodyn {

// Population state: entries >= 0, summing to 1 within kSimplexSumTol.
inline constexpr double kSimplexSumTol = 1e-9;

class SimplexState {
 public:
  explicit SimplexState(Eigen::VectorXd x);

  const Eigen::VectorXd& vec() const { return x_; }
  int size() const { return static_cast<int>(x_.size()); }
  double operator[](int i) const { return x_(i); }

  bool interior(double margin = 0.0) const;

 private:
  Eigen::VectorXd x_;
};

SimplexState barycenter(int n);

// True when v sums to 0 within tol (membership in the simplex tangent space).
bool is_tangent(const Eigen::VectorXd& v, double tol = 1e-9);

// Orthonormal basis of the tangent space, built by Gram-Schmidt on the
// difference chain e1-e2, e2-e3, ... in that order. Deterministic: the same n
// always yields the same matrix. Columns sum to 0 within 1e-12.
struct TangentBasis {
  Eigen::MatrixXd N;  // n x (n-1)
  int n() const { return static_cast<int>(N.rows()); }
};

TangentBasis tangent_basis(int n);

}  // namespace evodyn

#endif
