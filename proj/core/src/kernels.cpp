#include "matspec/kernels.hpp"

#include <cmath>

#include "matspec/core.hpp"

namespace matspec {

cd sinc(cd z) {
  if (std::abs(z) < 1e-2) {
    cd z2 = z * z;
    return 1.0 - z2 / 6.0 * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0));
  }
  return std::sin(z) / z;
}

cd sin_ratio_divdiff(double x, cd a, cd b) {
  if (std::abs(b) > std::abs(a)) std::swap(a, b);
  if (std::abs(a) * x < 0.5) {
    // F(a) = sum_j (-1)^j a^{2j} x^{2j+1}/(2j+1)!, and
    // (a^{2j} - b^{2j})/(a - b) = H_{2j-1} with H_n = a H_{n-1} + b^n, H_0 = 1.
    cd total = 0, H = 1, bp = 1;
    double coef = x;
    for (int j = 1; j <= 10; ++j) {
      bp *= b;
      H = a * H + bp;
      coef *= -x * x / ((2.0 * j) * (2.0 * j + 1));
      total += coef * H;
      bp *= b;
      H = a * H + bp;
    }
    return total;
  }
  cd c = 0.5 * (a + b), d = a - b;
  return (x * std::cos(c * x) * sinc(0.5 * d * x) - x * sinc(b * x)) / a;
}

cd cos_product_integral(double x, cd theta, cd rho) {
  return 0.5 * x * (sinc((theta - rho) * x) + sinc((theta + rho) * x));
}

cd cos_product_integral_dx(double x, cd theta, cd rho) {
  return std::cos(theta * x) * std::cos(rho * x);
}

cd wtilde(double x, cd rho, double rt) {
  return -x * std::sin(0.5 * (rho + rt) * x) * sinc(0.5 * (rho - rt) * x);
}

cd wtilde_dx(double x, cd rho, double rt) {
  return -std::sin(rho * x) - rt * x * std::cos(0.5 * (rho + rt) * x) * sinc(0.5 * (rho - rt) * x);
}

cd Wtilde(double x, cd theta, cd rho, double rt) {
  return 0.5 * (sin_ratio_divdiff(x, rho + theta, rt + theta) +
                sin_ratio_divdiff(x, rho - theta, rt - theta));
}

cd Wtilde_dx(double x, cd theta, cd rho, double rt) {
  return std::cos(theta * x) * wtilde(x, rho, rt);
}

cd sin_over(double x, cd rho) { return x * sinc(rho * x); }

cd sin_product_integral(double x, cd theta, cd rho) {
  if (std::max(std::abs(theta), std::abs(rho)) * x < 1e-3) {
    cd t2 = theta * theta, r2 = rho * rho;
    double x3 = x * x * x, x5 = x3 * x * x, x7 = x5 * x * x;
    return x3 / 3.0 - (t2 + r2) * x5 / 30.0 + ((t2 * t2 + r2 * r2) / 120.0 + t2 * r2 / 36.0) * x7 / 7.0;
  }
  if (std::abs(theta) >= std::abs(rho)) return -sin_ratio_divdiff(x, theta - rho, theta + rho) / theta;
  return -sin_ratio_divdiff(x, rho - theta, rho + theta) / rho;
}

cd sin_product_integral_dx(double x, cd theta, cd rho) {
  return sin_over(x, theta) * sin_over(x, rho);
}

cd sin_wtilde(double x, cd rho, double rt) { return sin_ratio_divdiff(x, rho, rt); }

cd sin_wtilde_dx(double x, cd rho, double rt) { return wtilde(x, rho, rt); }

namespace {

cd sin_W_direct(double x, cd theta, cd rho, double rt) {
  cd g = -(sin_ratio_divdiff(x, theta - rho, theta - rt) +
           sin_ratio_divdiff(x, theta + rho, theta + rt)) /
         (2.0 * theta);
  return (g - sin_product_integral(x, theta, rho)) / rt;
}

}  // namespace

cd sin_Wtilde(double x, cd theta, cd rho, double rt) {
  const double t1 = 1e-3;
  if (std::abs(theta) >= t1) return sin_W_direct(x, theta, rho, rt);
  // Even in theta: fit W(0) + c theta^2 from theta = t1, 2 t1.
  cd w1 = sin_W_direct(x, t1, rho, rt);
  cd w2 = sin_W_direct(x, 2 * t1, rho, rt);
  cd w0 = (4.0 * w1 - w2) / 3.0;
  return w0 + (w1 - w0) * (theta * theta) / (t1 * t1);
}

cd sin_Wtilde_dx(double x, cd theta, cd rho, double rt) {
  return sin_over(x, theta) * sin_wtilde(x, rho, rt);
}

std::vector<double> xi_sequence(const SpectralData& d) {
  std::vector<double> xi;
  for (int n = 1; n <= d.N(); ++n) {
    double s = 0;
    for (int k = 1; k <= d.m; ++k) s += std::abs(d.rho({n, k}) - double(n - 1));
    double c = (n == 1 ? 1.0 : 2.0) / kPi;
    s += opnorm(d.beta_sum(n) - c * CMat::Identity(d.m, d.m));
    xi.push_back(s);
  }
  return xi;
}

AssembledSystem assemble(double x, const SpectralData& d, int N, bool derivative) {
  const int m = d.m;
  const int C = m + 1;
  AssembledSystem a;
  a.x = x;
  a.N = N;
  a.m = m;
  a.cols = C;
  a.has_derivative = derivative;
  const int P = N * C * m;
  a.psi = CMat::Zero(m, P);
  a.R = CMat::Zero(P, P);
  if (derivative) {
    a.dpsi = CMat::Zero(m, P);
    a.dR = CMat::Zero(P, P);
  }
  const CMat Im = CMat::Identity(m, m);
  std::vector<cd> rho(N * m);
  std::vector<CMat> beta(N * m);
  for (int n = 1; n <= N; ++n)
    for (int k = 1; k <= m; ++k) {
      rho[(n - 1) * m + k - 1] = d.rho({n, k});
      beta[(n - 1) * m + k - 1] = d.beta({n, k});
    }
  auto col = [&](int n, int k) { return ((n - 1) * C + (k - 1)) * m; };

  for (int n = 1; n <= N; ++n) {
    const double rt = n - 1;
    for (int k = 1; k <= m; ++k) {
      cd r = rho[(n - 1) * m + k - 1];
      a.psi.block(0, col(n, k), m, m) = wtilde(x, r, rt) * Im;
      if (derivative) a.dpsi.block(0, col(n, k), m, m) = wtilde_dx(x, r, rt) * Im;
    }
    a.psi.block(0, col(n, C), m, m) = std::cos(rt * x) * Im;
    if (derivative) a.dpsi.block(0, col(n, C), m, m) = -rt * std::sin(rt * x) * Im;
  }

  // Kernel value for a row spectral parameter theta against column (n, k).
  auto kernel = [&](cd theta, int n, int k, bool dx) -> cd {
    const double rt = n - 1;
    if (k <= m) {
      cd r = rho[(n - 1) * m + k - 1];
      return dx ? Wtilde_dx(x, theta, r, rt) : Wtilde(x, theta, r, rt);
    }
    return dx ? cos_product_integral_dx(x, theta, rt) : cos_product_integral(x, theta, rt);
  };

  for (int l = 1; l <= N; ++l) {
    const double rtl = l - 1;
    const double bt = (l == 1 ? 1.0 : 2.0) / kPi;
    for (int n = 1; n <= N; ++n)
      for (int k = 1; k <= C; ++k) {
        for (int pass = 0; pass < (derivative ? 2 : 1); ++pass) {
          CMat& R = pass == 0 ? a.R : a.dR;
          const bool dx = pass == 1;
          CMat last = -bt * kernel(rtl, n, k, dx) * Im;
          for (int s = 1; s <= m; ++s) {
            const int j = (l - 1) * m + s - 1;
            cd ker = kernel(rho[j], n, k, dx);
            R.block(col(l, s), col(n, k), m, m) = (rho[j] - rtl) * ker * beta[j];
            last += ker * beta[j];
          }
          R.block(col(l, C), col(n, k), m, m) = last;
        }
      }
  }
  return a;
}

}  // namespace matspec
