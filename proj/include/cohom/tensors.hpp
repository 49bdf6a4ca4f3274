#ifndef COHOM_TENSORS_HPP
#define COHOM_TENSORS_HPP

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "cohom/errors.hpp"

namespace cohom {

/// Number of independent components of a symmetric dim x dim matrix.
inline int sym_components(int dim) { return dim * (dim + 1) / 2; }

inline void check_dim(int dim) {
  if (dim != 1 && dim != 2)
    throw InputError("dimension must be 1 or 2, got " + std::to_string(dim));
}

template <typename Scalar>
using SmallVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, 0, 3, 1>;
template <typename Scalar>
using SmallMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

/// Symmetric matrix in dimension 1 or 2.
///
/// Components are stored as (x11) in 1D and (x11, x22, sqrt(2) x12) in 2D, so
/// that the Euclidean dot product of two component vectors equals the
/// Frobenius product of the full matrices.
template <typename Scalar>
class SymTensor {
 public:
  using Components = SmallVector<Scalar>;
  using Full = SmallMatrix<Scalar>;

  SymTensor() : dim_(1), c_(Components::Zero(1)) {}
  explicit SymTensor(int dim) : dim_(dim) {
    check_dim(dim);
    c_ = Components::Zero(sym_components(dim));
  }

  static SymTensor zero(int dim) { return SymTensor(dim); }

  static SymTensor identity(int dim) {
    SymTensor t(dim);
    t.c_(0) = 1;
    if (dim == 2) t.c_(1) = 1;
    return t;
  }

  static SymTensor from_components(int dim, const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& c) {
    SymTensor t(dim);
    if (c.size() != t.c_.size())
      throw InputError("component count does not match dimension");
    t.c_ = c;
    return t;
  }

  /// Builds from the full matrix entries; only the symmetric part is kept.
  template <typename Derived>
  static SymTensor from_matrix(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() != m.cols()) throw InputError("matrix must be square");
    SymTensor t(static_cast<int>(m.rows()));
    t.c_(0) = m(0, 0);
    if (t.dim_ == 2) {
      t.c_(1) = m(1, 1);
      t.c_(2) = Scalar(M_SQRT1_2) * (m(0, 1) + m(1, 0));
    }
    return t;
  }

  /// 2D shorthand: [[xx, xy], [xy, yy]].
  static SymTensor make(Scalar xx, Scalar yy, Scalar xy) {
    SymTensor t(2);
    t.c_ << xx, yy, Scalar(M_SQRT2) * xy;
    return t;
  }
  static SymTensor make(Scalar x) {
    SymTensor t(1);
    t.c_(0) = x;
    return t;
  }

  int dim() const { return dim_; }
  const Components& components() const { return c_; }
  Components& components() { return c_; }

  Scalar operator()(int i, int j) const {
    if (i == j) return c_(i);
    return Scalar(M_SQRT1_2) * c_(2);
  }

  Full matrix() const {
    Full m(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j);
    return m;
  }

  Scalar dot(const SymTensor& o) const {
    require_same_dim(o);
    return c_.dot(o.c_);
  }
  Scalar squared_norm() const { return c_.squaredNorm(); }
  /// Frobenius norm |x|.
  Scalar norm() const { return c_.stableNorm(); }

  SymTensor& operator+=(const SymTensor& o) {
    require_same_dim(o);
    c_ += o.c_;
    return *this;
  }
  SymTensor& operator-=(const SymTensor& o) {
    require_same_dim(o);
    c_ -= o.c_;
    return *this;
  }
  SymTensor& operator*=(Scalar s) {
    c_ *= s;
    return *this;
  }
  friend SymTensor operator+(SymTensor a, const SymTensor& b) { return a += b; }
  friend SymTensor operator-(SymTensor a, const SymTensor& b) { return a -= b; }
  friend SymTensor operator-(SymTensor a) { return a *= Scalar(-1); }
  friend SymTensor operator*(Scalar s, SymTensor a) { return a *= s; }
  friend SymTensor operator*(SymTensor a, Scalar s) { return a *= s; }
  friend SymTensor operator/(SymTensor a, Scalar s) { return a *= Scalar(1) / s; }

  void require_same_dim(const SymTensor& o) const {
    if (o.dim_ != dim_) throw InputError("symmetric tensor dimension mismatch");
  }

 private:
  int dim_;
  Components c_;
};

/// (a (x) b + b (x) a) / 2
template <typename DerivedA, typename DerivedB>
SymTensor<typename DerivedA::Scalar> sym_dyad(const Eigen::MatrixBase<DerivedA>& a,
                                              const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.size() != b.size()) throw InputError("sym_dyad: vector length mismatch");
  const int dim = static_cast<int>(a.size());
  check_dim(dim);
  const SmallMatrix<Scalar> m = Scalar(0.5) * (a * b.transpose() + b * a.transpose());
  return SymTensor<Scalar>::from_matrix(m);
}

/// Positive definite operator A on symmetric matrices, in the component basis
/// of SymTensor (so <A x, y> is a plain dot product of components).
template <typename Scalar>
class ElasticityOperator {
 public:
  using Matrix = SmallMatrix<Scalar>;

  ElasticityOperator() : ElasticityOperator(identity(1)) {}

  ElasticityOperator(int dim, const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>& m)
      : dim_(dim) {
    check_dim(dim);
    const int n = sym_components(dim);
    if (m.rows() != n || m.cols() != n)
      throw InputError("elasticity matrix must be " + std::to_string(n) + "x" + std::to_string(n));
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12) * (Scalar(1) + m.cwiseAbs().maxCoeff()))
      throw InputError("elasticity matrix must be symmetric");
    matrix_ = Scalar(0.5) * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> eig(matrix_);
    const Scalar lo = eig.eigenvalues().minCoeff();
    const Scalar hi = eig.eigenvalues().maxCoeff();
    if (!(lo > Scalar(0))) throw InputError("elasticity matrix must be positive definite");
    alpha_ = lo;
    big_m_ = std::sqrt(hi);
  }

  static ElasticityOperator identity(int dim) {
    check_dim(dim);
    const int n = sym_components(dim);
    return ElasticityOperator(dim, Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Identity(n, n));
  }

  /// A x = 2 mu x + lambda tr(x) I.
  static ElasticityOperator isotropic(int dim, Scalar lambda, Scalar mu) {
    check_dim(dim);
    const int n = sym_components(dim);
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m =
        Scalar(2) * mu * Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Identity(n, n);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) m(i, j) += lambda;
    return ElasticityOperator(dim, m);
  }

  int dim() const { return dim_; }
  const Matrix& matrix() const { return matrix_; }

  /// Lower equivalence constant: sqrt(alpha)|x| <= ||x||.
  Scalar alpha() const { return alpha_; }
  /// Upper equivalence constant: ||x|| <= M |x|.
  Scalar M() const { return big_m_; }

  SymTensor<Scalar> apply(const SymTensor<Scalar>& x) const {
    require(x);
    return SymTensor<Scalar>::from_components(dim_, matrix_ * x.components());
  }

  Scalar inner(const SymTensor<Scalar>& x, const SymTensor<Scalar>& y) const {
    require(x);
    require(y);
    return y.components().dot(matrix_ * x.components());
  }

 private:
  void require(const SymTensor<Scalar>& x) const {
    if (x.dim() != dim_) throw InputError("elasticity operator dimension mismatch");
  }

  int dim_;
  Matrix matrix_;
  Scalar alpha_ = 1;
  Scalar big_m_ = 1;
};

/// ||x|| = <A x, x>^(1/2)
template <typename Scalar>
Scalar energy_norm(const ElasticityOperator<Scalar>& a, const SymTensor<Scalar>& x) {
  return std::sqrt(std::max(Scalar(0), a.inner(x, x)));
}

using SymTensord = SymTensor<double>;
using ElasticityOperatord = ElasticityOperator<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

}  // namespace cohom

#endif  // COHOM_TENSORS_HPP
