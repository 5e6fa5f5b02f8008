#pragma once

#include <complex>
#include <compare>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace matspec {

using cd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

constexpr double kPi = 3.14159265358979323846;

// Errors. code() maps onto CLI exit statuses.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what, int code)
      : std::runtime_error(what), kind_(std::move(kind)), code_(code) {}
  const std::string& kind() const { return kind_; }
  int code() const { return code_; }

 private:
  std::string kind_;
  int code_;
};

struct ParseError : Error {
  explicit ParseError(const std::string& w) : Error("ParseError", w, 1) {}
};
struct ValidationError : Error {
  explicit ValidationError(const std::string& w) : Error("ValidationError", w, 2) {}
};
struct BandIncomplete : Error {
  explicit BandIncomplete(const std::string& w) : Error("BandIncomplete", w, 3) {}
};
struct RankMismatch : Error {
  explicit RankMismatch(const std::string& w) : Error("RankMismatch", w, 3) {}
};
struct NearEigenvalue : Error {
  explicit NearEigenvalue(const std::string& w) : Error("NearEigenvalue", w, 3) {}
};
struct IllConditioned : Error {
  IllConditioned(double x, double cond)
      : Error("IllConditioned",
              "condition " + std::to_string(cond) + " at x=" + std::to_string(x), 3),
        x(x), cond(cond) {}
  double x;
  double cond;
};
struct DegenerateZ : Error {
  explicit DegenerateZ(const std::string& w) : Error("DegenerateZ", w, 3) {}
};

// (Q, h, H) on the uniform grid x_i = i*pi/M.
struct Coefficients {
  int m = 1;
  int M = 0;
  std::vector<CMat> Q;
  CMat h;
  CMat H;

  double step() const { return kPi / M; }
  double x(int i) const { return i * kPi / M; }
  CMat omega() const;

  static Coefficients zero(int m, int M);
};

struct IndexPair {
  int n = 1;
  int k = 1;
  auto operator<=>(const IndexPair&) const = default;
};

struct Band {
  int n = 1;
  std::vector<double> lambda;  // m values
  std::vector<CVec> v;         // m vectors of length m
};

struct SpectralData {
  int m = 1;
  std::vector<Band> bands;

  int N() const { return static_cast<int>(bands.size()); }
  double lambda(IndexPair p) const { return bands[p.n - 1].lambda[p.k - 1]; }
  const CVec& v(IndexPair p) const { return bands[p.n - 1].v[p.k - 1]; }
  cd rho(IndexPair p) const;
  CMat beta(IndexPair p) const;
  CMat V(int n) const;
  CMat beta_sum(int n) const;
};

// sqrt with arg in (-pi/2, pi/2]: negative lambda maps to i*sqrt(|lambda|).
cd rho_of(double lambda);

// Largest singular value.
double opnorm(const CMat& a);
CMat herm_part(const CMat& a);
double herm_defect(const CMat& a);

}  // namespace matspec
