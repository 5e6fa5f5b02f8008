#include "matspec/phase_scan.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/toms748_solve.hpp>

#include "matspec/parallel.hpp"

namespace matspec {

namespace {

constexpr double kMaxMove = 1.0;
// Backward moves up to this size are rounding, not rotation.
constexpr double kSlack = 0.1;
constexpr int kBlock = 8;

double wrap(double a) {
  while (a > kPi) a -= 2 * kPi;
  while (a <= -kPi) a += 2 * kPi;
  return a;
}

// Positive move from a to b in (-kSlack, 2 pi - kSlack].
double forward_move(double a, double b) {
  double d = b - a;
  while (d > 2 * kPi - kSlack) d -= 2 * kPi;
  while (d <= -kSlack) d += 2 * kPi;
  return d;
}

struct Point {
  double s;
  double c;
  std::vector<double> th;
};

// Scale frozen on unit intervals of |s|, comparable to |rho|.
double scale_for(double s) { return std::max(1.0, std::floor(std::abs(s)) + 1.0); }

class Scanner {
 public:
  explicit Scanner(const Pencil& p) : pencil_(p) {}

  Point at(double s, double c) const {
    CMat Y, Z;
    pencil_(s_to_lambda(s), c, Y, Z);
    return {s, c, eigenphases(Y, Z)};
  }
  Point at(double s) const { return at(s, scale_for(s)); }

  // Zero crossings between a and b. With c fixed every eigenphase increases
  // with lambda, so moves are read forward and fast turns are subdivided.
  int crossings(const Point& a, const Point& b0) const {
    const Point b = b0.c == a.c ? b0 : at(b0.s, a.c);
    const std::size_t m = a.th.size();
    double best = 1e300;
    std::size_t shift = 0;
    for (std::size_t r = 0; r < m; ++r) {
      double mx = 0;
      for (std::size_t j = 0; j < m; ++j)
        mx = std::max(mx, std::abs(forward_move(a.th[j], b.th[(j + r) % m])));
      if (mx < best) {
        best = mx;
        shift = r;
      }
    }
    if (best > kMaxMove && b.s - a.s > 1e-9 * std::max(1.0, std::abs(a.s))) {
      Point mid = at(0.5 * (a.s + b.s), a.c);
      return crossings(a, mid) + crossings(mid, b);
    }
    int c = 0;
    for (std::size_t j = 0; j < m; ++j) {
      double from = a.th[j];
      double to = from + forward_move(from, b.th[(j + shift) % m]);
      // Passes through 0 (mod 2 pi), signed.
      c += static_cast<int>(std::floor(to / (2 * kPi)) - std::floor(from / (2 * kPi)));
    }
    return c;
  }

  double nearest(double s, double c) const {
    Point p = at(s, c);
    double best = p.th[0];
    for (double t : p.th)
      if (std::abs(t) < std::abs(best)) best = t;
    return best;
  }

  // Appends the c roots in (a.s, b.s]; a.c is used throughout.
  void refine(const Point& a, const Point& b0, int c, std::vector<double>& out) const {
    if (c <= 0) return;
    const Point b = b0.c == a.c ? b0 : at(b0.s, a.c);
    const double w = b.s - a.s;
    const double scale = std::max(1.0, std::abs(a.s));
    if (w < 1e-13 * scale) {
      double lam = s_to_lambda(0.5 * (a.s + b.s));
      for (int i = 0; i < c; ++i) out.push_back(lam);
      return;
    }
    if (c == 1 && w < 1e-3 * scale) {
      double ga = nearest(a.s, a.c), gb = nearest(b.s, a.c);
      if (ga < 0 && gb > 0 && ga > -0.1 && gb < 0.1) {
        boost::uintmax_t iters = 100;
        auto tol = boost::math::tools::eps_tolerance<double>(50);
        auto r = boost::math::tools::toms748_solve([&](double s) { return nearest(s, a.c); },
                                                   a.s, b.s, ga, gb, tol, iters);
        out.push_back(s_to_lambda(0.5 * (r.first + r.second)));
        return;
      }
    }
  Point mid = at(a.s + 0.5 * w);
    int c1 = crossings(a, mid);
    c1 = std::clamp(c1, 0, c);
    refine(a, mid, c1, out);
    refine(mid, b, c - c1, out);
  }

 private:
  const Pencil& pencil_;
};

}  // namespace

double lambda_to_s(double lambda) {
  return lambda >= 0 ? std::sqrt(lambda) : -std::sqrt(-lambda);
}

std::vector<double> eigenphases(const CMat& Y, const CMat& Z) {
  const cd I(0, 1);
  CMat A = Y - I * Z;
  CMat B = Y + I * Z;
  std::vector<double> th;
  if (Y.rows() == 1) {
    th.push_back(std::arg(A(0, 0) / B(0, 0)));
  } else {
    CMat W = B.partialPivLu().solve(A);
    Eigen::ComplexEigenSolver<CMat> es(W, false);
    for (Eigen::Index j = 0; j < W.rows(); ++j) th.push_back(std::arg(es.eigenvalues()(j)));
  }
  std::sort(th.begin(), th.end());
  return th;
}

namespace {

constexpr double kPathMove = 1.0;

int count_in(const std::vector<double>& lam, double a, double b) {
  return static_cast<int>(std::upper_bound(lam.begin(), lam.end(), b) -
                          std::upper_bound(lam.begin(), lam.end(), a));
}

// Roots of the index in (sa, sb] by bisection on s.
void bisect_roots(const PathPencil& path, double sa, int na, double sb, int nb,
                  std::vector<double>& out) {
  if (nb == na) return;
  const double w = sb - sa;
  if (w < 1e-14 * std::max(1.0, std::abs(sa))) {
    for (int i = na; i < nb; ++i) out.push_back(s_to_lambda(sb));
    return;
  }
  const double sm = sa + 0.5 * w;
  const int nm = path_index(path, s_to_lambda(sm));
  bisect_roots(path, sa, na, sm, nm, out);
  bisect_roots(path, sm, nm, sb, nb, out);
}

// Narrows [sa, sb] to the sub-intervals where scan and index disagree and
// replaces the scanned roots there.
void repair_between(const PathPencil& path, double sa, int na, double sb, int nb, double width,
                    std::vector<double>& lam) {
  const double la = s_to_lambda(sa), lb = s_to_lambda(sb);
  if (count_in(lam, la, lb) == nb - na) return;
  if (sb - sa > width) {
    const double sm = 0.5 * (sa + sb);
    const int nm = path_index(path, s_to_lambda(sm));
    repair_between(path, sa, na, sm, nm, width, lam);
    repair_between(path, sm, nm, sb, nb, width, lam);
    return;
  }
  std::vector<double> found;
  bisect_roots(path, sa, na, sb, nb, found);
  auto first = std::upper_bound(lam.begin(), lam.end(), la);
  auto last = std::upper_bound(lam.begin(), lam.end(), lb);
  lam.erase(first, last);
  lam.insert(std::upper_bound(lam.begin(), lam.end(), la), found.begin(), found.end());
}

void repair(const PathPencil& path, double s0, ScanResult& res) {
  const int n0 = path_index(path, s_to_lambda(s0));
  const int n1 = path_index(path, s_to_lambda(res.s_end));
  repair_between(path, s0, n0, res.s_end, n1, 0.05, res.lambda);
}

}  // namespace

int path_index(const PathPencil& path, double lambda) {
  std::vector<double> th;
  path(lambda, [&](const CMat& Y, const CMat& Z) {
    std::vector<double> ph = eigenphases(Y, Z);
    const std::size_t m = ph.size();
    if (th.empty()) {
      th = ph;
      return;
    }
    double best = 1e300;
    std::size_t shift = 0;
    for (std::size_t r = 0; r < m; ++r) {
      double mx = 0;
      for (std::size_t j = 0; j < m; ++j)
        mx = std::max(mx, std::abs(wrap(ph[(j + r) % m] - wrap(th[j]))));
      if (mx < best) {
        best = mx;
        shift = r;
      }
    }
    if (best > kPathMove)
      throw BandIncomplete("path resolution too coarse for the oscillation count at lambda=" +
                           std::to_string(lambda));
    std::vector<double> next(m);
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t i = (j + shift) % m;
      next[i] = th[j] + wrap(ph[i] - wrap(th[j]));
    }
    th = std::move(next);
  });
  int idx = 0;
  for (double t : th) idx += static_cast<int>(std::floor(t / (2 * kPi)));
  return idx;
}

ScanResult scan_eigenvalues(const Pencil& pencil, const ScanOptions& opt, const PathPencil& path) {
  Scanner sc(pencil);
  ScanResult res;
  long k = static_cast<long>(std::floor((opt.s_low - opt.offset) / opt.ds)) - 1;
  auto mesh = [&](long i) { return opt.offset + opt.ds * i; };
  const long k0 = k;
  Point prev = sc.at(mesh(k));
  for (;;) {
    std::vector<Point> pts(kBlock);
    parallel_for(kBlock, [&](std::size_t i) { pts[i] = sc.at(mesh(k + 1 + long(i))); });
    std::vector<std::vector<double>> roots(kBlock);
    std::vector<int> counts(kBlock);
    parallel_for(kBlock, [&](std::size_t i) {
      const Point& a = i == 0 ? prev : pts[i - 1];
      counts[i] = sc.crossings(a, pts[i]);
      if (counts[i] < 0)
        throw BandIncomplete("eigenphase moved backwards near lambda=" +
                             std::to_string(s_to_lambda(a.s)));
      sc.refine(a, pts[i], counts[i], roots[i]);
    });
    for (int i = 0; i < kBlock; ++i) {
      if (static_cast<int>(roots[i].size()) != counts[i])
        throw BandIncomplete("root refinement lost a crossing");
      res.lambda.insert(res.lambda.end(), roots[i].begin(), roots[i].end());
      res.s_end = pts[i].s;
      if (res.s_end >= opt.s_stop && res.lambda.size() >= opt.target) {
        std::sort(res.lambda.begin(), res.lambda.end());
        if (path) {
          repair(path, mesh(k0), res);
          if (res.lambda.size() < opt.target)
            throw BandIncomplete("oscillation count disagrees with the eigenvalue scan");
        }
        return res;
      }
      if (res.s_end > opt.s_cap)
        throw BandIncomplete("found " + std::to_string(res.lambda.size()) + " of " +
                             std::to_string(opt.target) + " eigenvalues below lambda=" +
                             std::to_string(s_to_lambda(opt.s_cap)));
    }
    prev = pts.back();
    k += kBlock;
  }
}

}  // namespace matspec
