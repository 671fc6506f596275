// Common scalar types, tolerances and exceptions.

#ifndef AFFIRR_TYPES_HPP_
#define AFFIRR_TYPES_HPP_

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <type_traits>

#include <Eigen/Dense>

namespace affirr {

  enum class Field { real, complex };

  using complex_t = std::complex<double>;

  template <typename S>
  struct scalar_traits;

  template <>
  struct scalar_traits<double> {
    static constexpr Field field = Field::real;
    static constexpr bool  is_complex = false;
  };

  template <>
  struct scalar_traits<complex_t> {
    static constexpr Field field = Field::complex;
    static constexpr bool  is_complex = true;
  };

  template <typename S>
  concept Scalar = std::is_same_v<S, double> || std::is_same_v<S, complex_t>;

  template <Scalar S>
  using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

  template <Scalar S>
  using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

  inline char const* to_string(Field f) noexcept {
    return f == Field::real ? "real" : "complex";
  }

  // Thresholds driving every numerical decision in the library.
  struct ToleranceProfile {
    double rank     = 1e-8;  // relative singular-value cutoff
    double residual = 1e-8;  // identity-check residual bound
    double eig      = 1e-8;  // eigenvalue clustering width

    // Throws std::invalid_argument unless every entry lies in (0, 1e-2).
    void validate() const {
      auto check = [](double v, char const* name) {
        if (!(v > 0.0 && v < 1e-2)) {
          throw std::invalid_argument(std::string("tolerance '") + name
                                      + "' must lie in (0, 1e-2)");
        }
      };
      check(rank, "rank");
      check(residual, "residual");
      check(eig, "eig");
    }

    bool operator==(ToleranceProfile const&) const = default;
  };

  // A mathematical precondition of an operation does not hold.
  class PreconditionError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
  };

  // A computed object failed its own verification; never silently returned.
  class ConsistencyError : public std::logic_error {
   public:
    using std::logic_error::logic_error;
  };

  template <typename Derived>
  bool all_finite(Eigen::MatrixBase<Derived> const& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        auto const& v = m(i, j);
        if constexpr (scalar_traits<typename Derived::Scalar>::is_complex) {
          if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            return false;
          }
        } else {
          if (!std::isfinite(v)) {
            return false;
          }
        }
      }
    }
    return true;
  }

}  // namespace affirr

#endif  // AFFIRR_TYPES_HPP_
