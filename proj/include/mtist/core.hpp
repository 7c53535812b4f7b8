#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace mtist {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;
using rvec = std::vector<double>;
using Mat2 = std::array<cplx, 4>;  // row major: 00 01 10 11

inline constexpr cplx I{0.0, 1.0};
inline constexpr double PI = 3.14159265358979323846;

// Exit codes follow the command-line contract.
enum class ErrorKind { config = 1, admissibility = 2, partial = 3, convergence = 4, domain = 5, precondition = 6 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }
  int exit_code() const {
    switch (kind_) {
      case ErrorKind::admissibility: return 2;
      case ErrorKind::partial: return 3;
      case ErrorKind::convergence: return 4;
      default: return 1;
    }
  }

 private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorKind::config, w) {}
};
struct AdmissibilityError : Error {
  explicit AdmissibilityError(const std::string& w) : Error(ErrorKind::admissibility, w) {}
};
struct ConvergenceError : Error {
  explicit ConvergenceError(const std::string& w) : Error(ErrorKind::convergence, w) {}
};
struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(ErrorKind::domain, w) {}
};
struct PreconditionError : Error {
  explicit PreconditionError(const std::string& w) : Error(ErrorKind::precondition, w) {}
};

inline Mat2 matmul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

inline double sup_abs(const cvec& a) {
  double m = 0.0;
  for (const auto& x : a) m = std::max(m, std::abs(x));
  return m;
}

inline double l2(const cvec& a) {
  double s = 0.0;
  for (const auto& x : a) s += std::norm(x);
  return std::sqrt(s);
}

inline double sup_diff(const cvec& a, const cvec& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double rel_l2(const cvec& a, const cvec& ref) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - ref[i]);
    den += std::norm(ref[i]);
  }
  return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace mtist
