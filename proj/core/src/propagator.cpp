#include "matspec/propagator.hpp"

#include <algorithm>
#include <cmath>

namespace matspec {

namespace {

// Cubic Lagrange interpolation of grid samples at x.
CMat interp(const std::vector<CMat>& Q, double h, double x) {
  const int M = static_cast<int>(Q.size()) - 1;
  int i = std::clamp(static_cast<int>(std::floor(x / h)), 0, M - 1);
  int j0 = std::clamp(i - 1, 0, M - 3);
  double t = x / h - j0;
  double w[4];
  for (int a = 0; a < 4; ++a) {
    double v = 1;
    for (int b = 0; b < 4; ++b)
      if (b != a) v *= (t - b) / double(a - b);
    w[a] = v;
  }
  CMat out = w[0] * Q[j0];
  for (int a = 1; a < 4; ++a) out += w[a] * Q[j0 + a];
  return out;
}

}  // namespace

Propagator::Propagator(const std::vector<CMat>& Q, int substeps)
    : m_(static_cast<int>(Q.front().rows())),
      M_(static_cast<int>(Q.size()) - 1),
      sub_(std::max(1, substeps)) {
  const double h = kPi / M_;
  hs_ = h / sub_;
  const double g = std::sqrt(3.0) / 6.0;
  const double a1 = 0.25 - g, a2 = 0.25 + g;
  factors_.reserve(2 * M_ * sub_);
  for (int i = 0; i < M_ * sub_; ++i) {
    double x0 = i * hs_;
    CMat q1 = interp(Q, h, x0 + (0.5 - g) * hs_);
    CMat q2 = interp(Q, h, x0 + (0.5 + g) * hs_);
    // First applied factor weights the earlier Gauss node by a2.
    for (const CMat& P : {CMat(a2 * q1 + a1 * q2), CMat(a1 * q1 + a2 * q2)}) {
      CMat Ph = 0.5 * (P + P.adjoint());
      Factor f;
      double off = 0, scale = 0;
      for (int r = 0; r < m_; ++r)
        for (int c = 0; c < m_; ++c) {
          scale = std::max(scale, std::abs(Ph(r, c)));
          if (r != c) off = std::max(off, std::abs(Ph(r, c)));
        }
      if (off <= 1e-15 * scale || m_ == 1) {
        f.diagonal = true;
        f.p = Ph.diagonal().real();
      } else {
        Eigen::SelfAdjointEigenSolver<CMat> es(Ph);
        f.U = es.eigenvectors();
        f.p = es.eigenvalues();
      }
      factors_.push_back(std::move(f));
    }
  }
}

void Propagator::run(cd lambda, CMat& y, CMat& yp, std::vector<CMat>* ys,
                     std::vector<CMat>* yps, const Visit* visit) const {
  const double a = 0.5 * hs_;
  const double k2 = 0.5 * hs_ * hs_;
  CVec cc(m_), ca(m_), cb(m_);
  CMat zt(y.rows(), y.cols()), zb(y.rows(), y.cols());
  if (ys) {
    ys->assign(1, y);
    ys->reserve(M_ + 1);
  }
  if (yps) {
    yps->assign(1, yp);
    yps->reserve(M_ + 1);
  }
  if (visit) (*visit)(y, yp);
  std::size_t idx = 0;
  for (int i = 0; i < M_; ++i) {
    for (int s = 0; s < sub_; ++s) {
      for (int f = 0; f < 2; ++f, ++idx) {
        const Factor& F = factors_[idx];
        for (int j = 0; j < m_; ++j) {
          cd sig = k2 * (F.p(j) - 0.5 * lambda);
          cd C, S;
          if (std::abs(sig) < 1e-4) {
            C = 1.0 + sig * (0.5 + sig * (1.0 / 24 + sig / 720.0));
            S = 1.0 + sig * (1.0 / 6 + sig * (1.0 / 120 + sig / 5040.0));
          } else {
            cd w = std::sqrt(sig);
            C = std::cosh(w);
            S = std::sinh(w) / w;
          }
          cc(j) = C;
          ca(j) = a * S;
          cb(j) = sig * S / a;
        }
        if (F.diagonal) {
          for (int j = 0; j < m_; ++j) {
            for (Eigen::Index c = 0; c < y.cols(); ++c) {
              cd t = y(j, c), b = yp(j, c);
              y(j, c) = cc(j) * t + ca(j) * b;
              yp(j, c) = cb(j) * t + cc(j) * b;
            }
          }
        } else {
          zt.noalias() = F.U.adjoint() * y;
          zb.noalias() = F.U.adjoint() * yp;
          for (int j = 0; j < m_; ++j) {
            for (Eigen::Index c = 0; c < y.cols(); ++c) {
              cd t = zt(j, c), b = zb(j, c);
              zt(j, c) = cc(j) * t + ca(j) * b;
              zb(j, c) = cb(j) * t + cc(j) * b;
            }
          }
          y.noalias() = F.U * zt;
          yp.noalias() = F.U * zb;
        }
      }
      if (visit) (*visit)(y, yp);
    }
    if (ys) ys->push_back(y);
    if (yps) yps->push_back(yp);
  }
}

}  // namespace matspec
