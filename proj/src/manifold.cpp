#include "mvb/manifold.hpp"

#include <cmath>
#include <cstring>
#include <string>

namespace mvb {
namespace {

bool bitwise_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return std::memcmp(a.data(), b.data(),
                     sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

void require_square(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw PreconditionError(std::string(what) + ": matrix must be square");
  }
}

void require_base_match(bool ok, const char* what) {
  if (!ok) {
    throw PreconditionError(std::string(what) +
                            ": tangent base does not match the point");
  }
}

}  // namespace

SpdPoint::SpdPoint(const Eigen::MatrixXd& m) {
  require_square(m, "SpdPoint");
  m_ = 0.5 * (m + m.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(m_);
  if (llt.info() != Eigen::Success) {
    throw PreconditionError("SpdPoint: matrix is not positive definite");
  }
}

bool SpdPoint::same_as(const SpdPoint& other) const {
  return bitwise_equal(m_, other.m_);
}

SpdTangent::SpdTangent(const Eigen::MatrixXd& value, const SpdPoint& base)
    : v_(0.5 * (value + value.transpose())), base_(base) {
  if (value.rows() != base.dim() || value.cols() != base.dim()) {
    throw PreconditionError("SpdTangent: shape does not match base point");
  }
}

StiefelPoint::StiefelPoint(const Eigen::MatrixXd& w) : w_(w) {
  if (w.rows() < w.cols() || w.cols() == 0) {
    throw PreconditionError("StiefelPoint: need n >= p >= 1");
  }
  const Eigen::MatrixXd gram = w.transpose() * w;
  const double residual =
      (gram - Eigen::MatrixXd::Identity(w.cols(), w.cols()))
          .cwiseAbs()
          .maxCoeff();
  if (!(residual <= 1e-10)) {
    throw PreconditionError(
        "StiefelPoint: columns not orthonormal (max |W'W - I| = " +
        std::to_string(residual) + ")");
  }
}

bool StiefelPoint::same_as(const StiefelPoint& other) const {
  return bitwise_equal(w_, other.w_);
}

StiefelTangent::StiefelTangent(const Eigen::MatrixXd& value,
                               const StiefelPoint& base)
    : v_(value), base_(base) {
  if (value.rows() != base.rows() || value.cols() != base.cols()) {
    throw PreconditionError("StiefelTangent: shape does not match base point");
  }
  const Eigen::MatrixXd a = base.matrix().transpose() * value;
  const double residual = (a + a.transpose()).cwiseAbs().maxCoeff();
  if (!(residual <= 1e-8 * (1.0 + value.cwiseAbs().maxCoeff()))) {
    throw PreconditionError("StiefelTangent: W'U is not skew-symmetric");
  }
}

SpdPoint spd_retract(const SpdPoint& s, const SpdTangent& xi) {
  require_base_match(xi.base().same_as(s), "spd_retract");
  if (xi.value().isZero(0.0)) {
    return s;  // exact zero step, bit for bit
  }
  Eigen::LLT<Eigen::MatrixXd> llt(s.matrix());
  if (llt.info() != Eigen::Success) {
    throw NumericalError("spd_retract: base factorization failed");
  }
  const Eigen::MatrixXd sinv_xi = llt.solve(xi.value());
  Eigen::MatrixXd r = s.matrix() + xi.value() + 0.5 * xi.value() * sinv_xi;
  r = 0.5 * (r + r.transpose()).eval();
  Eigen::LLT<Eigen::MatrixXd> check(r);
  if (check.info() != Eigen::Success) {
    throw StepRejected("spd_retract: step leaves the SPD cone at float precision");
  }
  return SpdPoint(r);
}

SpdTangent spd_transport(const SpdPoint& from, const SpdPoint& to,
                         const SpdTangent& xi) {
  require_base_match(xi.base().same_as(from), "spd_transport");
  if (from.same_as(to)) {
    return SpdTangent(xi.value(), to);  // identity transport, exact
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_from(from.matrix());
  if (es_from.info() != Eigen::Success) {
    throw NumericalError("spd_transport: eigendecomposition failed");
  }
  const Eigen::MatrixXd half = es_from.operatorSqrt();
  const Eigen::MatrixXd inv_half = es_from.operatorInverseSqrt();
  Eigen::MatrixXd b = inv_half * to.matrix() * inv_half;
  b = 0.5 * (b + b.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_b(b);
  if (es_b.info() != Eigen::Success) {
    throw NumericalError("spd_transport: inner eigendecomposition failed");
  }
  // E = from^{1/2} b^{1/2} from^{-1/2} satisfies E E = to * from^{-1}.
  const Eigen::MatrixXd e = half * es_b.operatorSqrt() * inv_half;
  Eigen::MatrixXd moved = e * xi.value() * e.transpose();
  moved = 0.5 * (moved + moved.transpose()).eval();
  return SpdTangent(moved, to);
}

StiefelTangent stiefel_project(const StiefelPoint& w,
                               const Eigen::MatrixXd& g) {
  if (g.rows() != w.rows() || g.cols() != w.cols()) {
    throw PreconditionError("stiefel_project: gradient shape mismatch");
  }
  const Eigen::MatrixXd a = w.matrix().transpose() * g;
  const Eigen::MatrixXd u =
      g - w.matrix() * (0.5 * (a + a.transpose()));
  return StiefelTangent(u, w);
}

StiefelPoint stiefel_retract_qr(const StiefelPoint& w,
                                const StiefelTangent& xi) {
  require_base_match(xi.base().same_as(w), "stiefel_retract_qr");
  if (xi.value().isZero(0.0)) {
    return w;  // exact zero step
  }
  const Eigen::MatrixXd b = w.matrix() + xi.value();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
  Eigen::MatrixXd q = qr.householderQ() *
                      Eigen::MatrixXd::Identity(b.rows(), b.cols());
  const double scale = b.norm();
  for (Eigen::Index k = 0; k < b.cols(); ++k) {
    const double rkk = qr.matrixQR()(k, k);
    if (std::abs(rkk) <= 1e-12 * (1.0 + scale)) {
      throw NumericalError("stiefel_retract_qr: W + xi is rank deficient");
    }
    if (rkk < 0.0) q.col(k) = -q.col(k);
  }
  return StiefelPoint(q);
}

}  // namespace mvb
