#pragma once

#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

namespace utm {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};
inline constexpr double eps = std::numeric_limits<double>::epsilon();

inline std::string fmt_c(cplx z) {
  std::ostringstream os;
  os.precision(17);
  os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// evaluation point lies exactly on a branch cut
struct CutError : Error {
  cplx kappa;
  explicit CutError(cplx k, const std::string& what = "point on cut")
      : Error(what + " at kappa=" + fmt_c(k)), kappa(k) {}
};

struct DomainError : Error {
  using Error::Error;
};

struct QuadratureError : Error {
  int worst_leg;
  QuadratureError(const std::string& what, int leg)
      : Error("quadrature failure: " + what + " (worst leg " + std::to_string(leg) + ")"),
        worst_leg(leg) {}
};

struct SingularSystemError : Error {
  cplx kappa;
  explicit SingularSystemError(cplx k)
      : Error("kappa near determinant zero at kappa=" + fmt_c(k)), kappa(k) {}
};

struct ConfigError : Error {
  std::string field;
  ConfigError(std::string f, const std::string& what)
      : Error(f + ": " + what), field(std::move(f)) {}
};

struct RepresentationError : Error {
  using Error::Error;
};

}  // namespace utm
