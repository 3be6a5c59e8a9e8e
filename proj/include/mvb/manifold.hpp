#pragma once

#include <Eigen/Dense>

#include "mvb/errors.hpp"

namespace mvb {

/// A point on the cone of symmetric positive-definite matrices.  The stored
/// matrix is exactly symmetric (the constructor symmetrizes) and positive
/// definite (a Cholesky factorization must succeed, else PreconditionError).
class SpdPoint {
 public:
  explicit SpdPoint(const Eigen::MatrixXd& m);

  const Eigen::MatrixXd& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

  /// Bitwise equality of the stored representations.
  bool same_as(const SpdPoint& other) const;

 private:
  Eigen::MatrixXd m_;
};

/// A tangent vector at an SpdPoint: a symmetric matrix carrying its base
/// point.  Operations that consume a tangent check that its base matches the
/// point they are applied at.
class SpdTangent {
 public:
  SpdTangent(const Eigen::MatrixXd& value, const SpdPoint& base);

  const Eigen::MatrixXd& value() const { return v_; }
  const SpdPoint& base() const { return base_; }

 private:
  Eigen::MatrixXd v_;
  SpdPoint base_;
};

/// A point on the Stiefel manifold of n x p matrices with orthonormal
/// columns; the constructor enforces |W'W - I|_F <= 1e-10.
class StiefelPoint {
 public:
  explicit StiefelPoint(const Eigen::MatrixXd& w);

  const Eigen::MatrixXd& matrix() const { return w_; }
  Eigen::Index rows() const { return w_.rows(); }
  Eigen::Index cols() const { return w_.cols(); }

  bool same_as(const StiefelPoint& other) const;

 private:
  Eigen::MatrixXd w_;
};

/// A tangent vector at a StiefelPoint (W'U skew-symmetric), carrying its
/// base point.
class StiefelTangent {
 public:
  StiefelTangent(const Eigen::MatrixXd& value, const StiefelPoint& base);

  const Eigen::MatrixXd& value() const { return v_; }
  const StiefelPoint& base() const { return base_; }

 private:
  Eigen::MatrixXd v_;
  StiefelPoint base_;
};

/// Second-order retraction on the SPD cone:
///   R_S(xi) = S + xi + (1/2) xi S^{-1} xi.
/// The result is symmetrized and validated; if rounding pushes it off the
/// cone (Cholesky failure) a StepRejected is thrown so the caller can halve
/// the step.  A bitwise-zero tangent returns S itself, bit for bit.
SpdPoint spd_retract(const SpdPoint& s, const SpdTangent& xi);

/// Vector transport between SPD points:
///   Gamma(xi) = E xi E',  E = (S2 S1^{-1})^{1/2},
/// evaluated through the symmetric form
///   E = S1^{1/2} (S1^{-1/2} S2 S1^{-1/2})^{1/2} S1^{-1/2}
/// so only symmetric eigendecompositions are needed.  Transporting from a
/// point to itself returns xi unchanged (exact identity).
SpdTangent spd_transport(const SpdPoint& from, const SpdPoint& to,
                         const SpdTangent& xi);

/// Orthogonal projection of an ambient gradient G onto the tangent space of
/// the Stiefel manifold at W:
///   P_W(G) = (I - WW')G + W skew(W'G),
/// computed in the equivalent form G - W sym(W'G).
StiefelTangent stiefel_project(const StiefelPoint& w, const Eigen::MatrixXd& g);

/// QR retraction on the Stiefel manifold: the Q factor of W + xi with the
/// sign convention that R has a positive diagonal (which makes the factor
/// unique).  Rank deficiency of W + xi raises NumericalError.  A
/// bitwise-zero tangent returns W itself.
StiefelPoint stiefel_retract_qr(const StiefelPoint& w,
                                const StiefelTangent& xi);

}  // namespace mvb
