// Tolerance-aware dense linear algebra used by every decision procedure.
//
// Rank decisions are relative: a singular value counts as nonzero when it
// exceeds tol.rank * max(sigma_max, scale). The optional scale is a floor
// for systems like pi(s) - I whose entries can all be roundoff; callers
// pass the magnitude of the matrices the system was built from. Residual checks are absolute with a
// (1 + norm) scale factor, as documented per function.

#ifndef AFFIRR_NUMKERNEL_HPP_
#define AFFIRR_NUMKERNEL_HPP_

#include <algorithm>
#include <optional>
#include <random>
#include <vector>

#include "types.hpp"

namespace affirr {

  namespace detail {
    template <Scalar S>
    S random_scalar(std::mt19937_64& rng) {
      std::normal_distribution<double> n(0.0, 1.0);
      if constexpr (scalar_traits<S>::is_complex) {
        double re = n(rng);
        double im = n(rng);
        return S(re, im);
      } else {
        return n(rng);
      }
    }

    inline Eigen::Index numerical_rank(Eigen::VectorXd const& sv, double rel, double scale) {
      if (sv.size() == 0 || sv(0) <= 0.0) {
        return 0;
      }
      double cut = rel * std::max(sv(0), scale);
      Eigen::Index r = 0;
      while (r < sv.size() && sv(r) > cut) {
        ++r;
      }
      return r;
    }
  }  // namespace detail

  template <Scalar S>
  Vec<S> random_vector(Eigen::Index n, std::mt19937_64& rng) {
    Vec<S> v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      v(i) = detail::random_scalar<S>(rng);
    }
    return v;
  }

  template <Scalar S>
  Mat<S> random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
    Mat<S> m(r, c);
    for (Eigen::Index j = 0; j < c; ++j) {
      for (Eigen::Index i = 0; i < r; ++i) {
        m(i, j) = detail::random_scalar<S>(rng);
      }
    }
    return m;
  }

  // Haar-distributed orthogonal / unitary matrix (QR with sign fix).
  template <Scalar S>
  Mat<S> random_unitary(Eigen::Index n, std::mt19937_64& rng) {
    Mat<S>                      g = random_matrix<S>(n, n, rng);
    Eigen::HouseholderQR<Mat<S>> qr(g);
    Mat<S>                      q = qr.householderQ() * Mat<S>::Identity(n, n);
    Mat<S>                      r = qr.matrixQR();
    for (Eigen::Index i = 0; i < n; ++i) {
      double a = std::abs(r(i, i));
      if (a > 0) {
        q.col(i) *= r(i, i) / a;
      }
    }
    return q;
  }

  template <typename Derived>
  double spectral_norm(Eigen::MatrixBase<Derived> const& a) {
    if (a.size() == 0) {
      return 0.0;
    }
    using M = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Eigen::JacobiSVD<M> svd(a.derived());
    return svd.singularValues()(0);
  }

  // Kronecker product a (x) b.
  template <Scalar S>
  Mat<S> kron(Mat<S> const& a, Mat<S> const& b) {
    Mat<S> out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
      }
    }
    return out;
  }

  // Column-major vectorisation and its inverse.
  template <Scalar S>
  Vec<S> vec(Mat<S> const& m) {
    return Eigen::Map<Vec<S> const>(m.data(), m.size());
  }

  template <Scalar S>
  Mat<S> unvec(Eigen::Ref<Vec<S> const> const& v, Eigen::Index rows, Eigen::Index cols) {
    Vec<S> tmp = v;
    return Eigen::Map<Mat<S>>(tmp.data(), rows, cols);
  }

  // Orthonormal basis (as columns) of the null space of a.
  //
  // Postconditions: columns orthonormal; the dimension equals
  // cols(a) - numerical_rank(a).
  template <Scalar S>
  Mat<S> null_space_basis(Mat<S> const& a, ToleranceProfile const& tol = {},
                          double scale = 0.0) {
    Eigen::Index const n = a.cols();
    if (n == 0) {
      return Mat<S>(0, 0);
    }
    if (a.rows() == 0) {
      return Mat<S>::Identity(n, n);
    }
    Eigen::JacobiSVD<Mat<S>> svd(a, Eigen::ComputeFullV);
    Eigen::Index r = detail::numerical_rank(svd.singularValues(), tol.rank, scale);
    return svd.matrixV().rightCols(n - r);
  }

  // Orthonormal basis of the column space of a.
  template <Scalar S>
  Mat<S> range_basis(Mat<S> const& a, ToleranceProfile const& tol = {}, double scale = 0.0) {
    if (a.rows() == 0 || a.cols() == 0) {
      return Mat<S>(a.rows(), 0);
    }
    Eigen::JacobiSVD<Mat<S>> svd(a, Eigen::ComputeThinU);
    Eigen::Index r = detail::numerical_rank(svd.singularValues(), tol.rank, scale);
    return svd.matrixU().leftCols(r);
  }

  template <Scalar S>
  Eigen::Index numerical_rank(Mat<S> const& a, ToleranceProfile const& tol = {},
                              double scale = 0.0) {
    if (a.size() == 0) {
      return 0;
    }
    Eigen::JacobiSVD<Mat<S>> svd(a);
    return detail::numerical_rank(svd.singularValues(), tol.rank, scale);
  }

  template <Scalar S>
  struct SolutionSet {
    Vec<S> particular;   // minimum-norm solution
    Mat<S> homogeneous;  // orthonormal basis of ker(A)
  };

  // Solves A x = c in the least-squares sense. Returns std::nullopt when the
  // residual exceeds tol.residual * (1 + |c|); otherwise the minimum-norm
  // particular solution and an orthonormal basis of ker(A).
  template <Scalar S>
  std::optional<SolutionSet<S>> solve_affine_system(Mat<S> const&          a,
                                                    Vec<S> const&          c,
                                                    ToleranceProfile const& tol = {},
                                                    double                  scale = 0.0) {
    if (a.rows() != c.size()) {
      throw std::invalid_argument("solve_affine_system: dimension mismatch");
    }
    Eigen::Index const n = a.cols();
    SolutionSet<S>     out;
    if (a.rows() == 0 || n == 0) {
      out.particular = Vec<S>::Zero(n);
      out.homogeneous = Mat<S>::Identity(n, n);
      if (c.norm() > tol.residual * (1.0 + c.norm())) {
        return std::nullopt;
      }
      return out;
    }
    Eigen::JacobiSVD<Mat<S>> svd(a, Eigen::ComputeThinU | Eigen::ComputeFullV);
    auto const&              sv = svd.singularValues();
    Eigen::Index             r = detail::numerical_rank(sv, tol.rank, scale);
    Vec<S>                   coeff = svd.matrixU().leftCols(r).adjoint() * c;
    for (Eigen::Index i = 0; i < r; ++i) {
      coeff(i) /= sv(i);
    }
    out.particular = svd.matrixV().leftCols(r) * coeff;
    double res = (a * out.particular - c).norm();
    if (res > tol.residual * (1.0 + c.norm())) {
      return std::nullopt;
    }
    out.homogeneous = svd.matrixV().rightCols(n - r);
    return out;
  }

  template <Scalar S>
  struct EigenCluster {
    double value;  // mean of the clustered eigenvalues
    Mat<S> basis;  // orthonormal eigenvectors
  };

  // Eigen-decomposition of a self-adjoint matrix, eigenvalues ascending and
  // grouped when consecutive values differ by at most
  // tol.eig * max(1, max |lambda|).
  template <Scalar S>
  std::vector<EigenCluster<S>> hermitian_eigensystem(Mat<S> const&          a,
                                                     ToleranceProfile const& tol = {}) {
    if (a.rows() != a.cols()) {
      throw std::invalid_argument("hermitian_eigensystem: matrix is not square");
    }
    double scale = a.size() == 0 ? 0.0 : a.norm();
    if ((a - a.adjoint()).norm() > tol.residual * (1.0 + scale)) {
      throw PreconditionError("hermitian_eigensystem: matrix is not self-adjoint");
    }
    std::vector<EigenCluster<S>> out;
    if (a.rows() == 0) {
      return out;
    }
    Mat<S>                                 h = (a + a.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Mat<S>> es(h);
    auto const&                            ev = es.eigenvalues();
    double const width = tol.eig * std::max(1.0, ev.cwiseAbs().maxCoeff());
    Eigen::Index start = 0;
    for (Eigen::Index i = 1; i <= ev.size(); ++i) {
      if (i == ev.size() || ev(i) - ev(i - 1) > width) {
        Eigen::Index len = i - start;
        out.push_back({ev.segment(start, len).mean(),
                       es.eigenvectors().middleCols(start, len)});
        start = i;
      }
    }
    return out;
  }

  // Orthogonal projector onto the column span of an orthonormal basis.
  template <Scalar S>
  Mat<S> projector(Mat<S> const& basis, Eigen::Index n) {
    if (basis.cols() == 0) {
      return Mat<S>::Zero(n, n);
    }
    return basis * basis.adjoint();
  }

}  // namespace affirr

#endif  // AFFIRR_NUMKERNEL_HPP_
