#include "evodyn/simplex.hpp"

#include <cmath>

namespace evodyn {

SimplexState::SimplexState(Eigen::VectorXd x) : x_(std::move(x)) {
  if (x_.size() < 2) {
    throw ValidationError("simplex state needs at least 2 entries, got " +
                          std::to_string(x_.size()));
  }
  if (!x_.allFinite()) {
    throw ValidationError("simplex state has non-finite entries");
  }
  for (int i = 0; i < x_.size(); ++i) {
    if (x_(i) < 0.0) {
      throw ValidationError("simplex state entry " + std::to_string(i + 1) +
                            " is negative: " + std::to_string(x_(i)));
    }
  }
  const double s = x_.sum();
  if (std::abs(s - 1.0) > kSimplexSumTol) {
    throw ValidationError("simplex state sums to " + std::to_string(s) +
                          ", expected 1 within 1e-9");
  }
}

bool SimplexState::interior(double margin) const {
  return x_.minCoeff() > margin;
}

SimplexState barycenter(int n) {
  if (n < 2) throw ValidationError("barycenter needs n >= 2");
  return SimplexState(Eigen::VectorXd::Constant(n, 1.0 / n));
}

bool is_tangent(const Eigen::VectorXd& v, double tol) {
  return v.allFinite() && std::abs(v.sum()) <= tol;
}

TangentBasis tangent_basis(int n) {
  if (n < 2) throw ValidationError("tangent basis needs n >= 2, got " + std::to_string(n));
  Eigen::MatrixXd N(n, n - 1);
  for (int k = 0; k < n - 1; ++k) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v(k) = 1.0;
    v(k + 1) = -1.0;
    // Classical Gram-Schmidt with one re-orthogonalization pass; the chain
    // vectors are well conditioned so this keeps orthogonality near eps.
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < k; ++j) v -= N.col(j).dot(v) * N.col(j);
    }
    N.col(k) = v / v.norm();
  }
  return TangentBasis{std::move(N)};
}

}  // namespace evodyn
