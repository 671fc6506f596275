// Isometric representations of finitely presented groups, their commutants
// and first cohomology.

#ifndef AFFIRR_REPCOH_HPP_
#define AFFIRR_REPCOH_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "numkernel.hpp"
#include "presentation.hpp"
#include "types.hpp"

namespace affirr {

  // One isometric matrix per generator of a presentation.
  template <Scalar S>
  class Representation {
   public:
    static constexpr Field field = scalar_traits<S>::field;

    Representation() = default;

    // Checks shapes and finiteness only; numerical identities are checked by
    // verify_representation.
    Representation(GroupPresentation presentation, std::size_t dim, std::vector<Mat<S>> gens)
        : _presentation(std::move(presentation)), _dim(dim), _generators(std::move(gens)) {
      if (_generators.size() != _presentation.generator_count()) {
        throw std::invalid_argument("representation: expected "
                                    + std::to_string(_presentation.generator_count())
                                    + " generator matrices, got "
                                    + std::to_string(_generators.size()));
      }
      for (std::size_t i = 0; i < _generators.size(); ++i) {
        auto const& m = _generators[i];
        if (static_cast<std::size_t>(m.rows()) != dim
            || static_cast<std::size_t>(m.cols()) != dim) {
          throw std::invalid_argument("representation: matrix for '"
                                      + _presentation.generator_names()[i]
                                      + "' is not " + std::to_string(dim) + "x"
                                      + std::to_string(dim));
        }
        if (!all_finite(m)) {
          throw std::invalid_argument("representation: matrix for '"
                                      + _presentation.generator_names()[i]
                                      + "' has non-finite entries");
        }
      }
    }

    GroupPresentation const& presentation() const noexcept {
      return _presentation;
    }
    std::size_t dim() const noexcept {
      return _dim;
    }
    std::size_t generator_count() const noexcept {
      return _generators.size();
    }
    Mat<S> const& generator(std::size_t i) const {
      return _generators.at(i);
    }
    std::vector<Mat<S>> const& generators() const noexcept {
      return _generators;
    }

    bool operator==(Representation const&) const = default;

   private:
    GroupPresentation   _presentation;
    std::size_t         _dim = 0;
    std::vector<Mat<S>> _generators;
  };

  // Values of a 1-cocycle on the generators.
  template <Scalar S>
  struct Cocycle {
    std::vector<Vec<S>> values;

    static Cocycle zero(std::size_t gens, std::size_t dim) {
      return {std::vector<Vec<S>>(gens, Vec<S>::Zero(dim))};
    }

    // Concatenated generator values.
    Vec<S> flatten() const {
      Eigen::Index n = 0;
      for (auto const& v : values) {
        n += v.size();
      }
      Vec<S>       out(n);
      Eigen::Index at = 0;
      for (auto const& v : values) {
        out.segment(at, v.size()) = v;
        at += v.size();
      }
      return out;
    }

    static Cocycle unflatten(Eigen::Ref<Vec<S> const> const& flat, std::size_t gens,
                             std::size_t dim) {
      Cocycle c;
      for (std::size_t s = 0; s < gens; ++s) {
        c.values.push_back(flat.segment(static_cast<Eigen::Index>(s * dim),
                                        static_cast<Eigen::Index>(dim)));
      }
      return c;
    }

    double max_norm() const {
      double m = 0.0;
      for (auto const& v : values) {
        m = std::max(m, v.norm());
      }
      return m;
    }

    bool operator==(Cocycle const& other) const {
      if (values.size() != other.values.size()) {
        return false;
      }
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i].size() != other.values[i].size() || values[i] != other.values[i]) {
          return false;
        }
      }
      return true;
    }
  };

  // Ordered product of generator matrices along w (inverse letters use the
  // adjoint).
  template <Scalar S>
  Mat<S> rep_evaluate(Representation<S> const& rep, Word const& w) {
    rep.presentation().check(w);
    auto   d = static_cast<Eigen::Index>(rep.dim());
    Mat<S> m = Mat<S>::Identity(d, d);
    for (auto const& l : w) {
      if (l.sign > 0) {
        m = m * rep.generator(l.generator);
      } else {
        m = m * rep.generator(l.generator).adjoint();
      }
    }
    return m;
  }

  // Value b(w) of the unique cocycle extension, using b(gh) = b(g) + pi(g)b(h)
  // and b(s^-1) = -pi(s)^-1 b(s).
  template <Scalar S>
  Vec<S> cocycle_extend(Representation<S> const& rep, Cocycle<S> const& b, Word const& w) {
    rep.presentation().check(w);
    auto   d = static_cast<Eigen::Index>(rep.dim());
    Mat<S> m = Mat<S>::Identity(d, d);
    Vec<S> v = Vec<S>::Zero(d);
    for (auto const& l : w) {
      Mat<S> const& g = rep.generator(l.generator);
      if (l.sign > 0) {
        v += m * b.values.at(l.generator);
        m = m * g;
      } else {
        m = m * g.adjoint();
        v -= m * b.values.at(l.generator);
      }
    }
    return v;
  }

  // Linear map (v_s)_s -> (b(r))_r sending generator values to relator
  // values; Z^1 is its kernel. Rows are grouped by relator, columns by
  // generator.
  template <Scalar S>
  Mat<S> cocycle_constraint_matrix(Representation<S> const& rep) {
    auto const&  rels = rep.presentation().relators();
    auto         d = static_cast<Eigen::Index>(rep.dim());
    auto         k = static_cast<Eigen::Index>(rep.generator_count());
    Mat<S>       out = Mat<S>::Zero(static_cast<Eigen::Index>(rels.size()) * d, k * d);
    Eigen::Index row = 0;
    for (auto const& r : rels) {
      Mat<S> m = Mat<S>::Identity(d, d);
      for (auto const& l : r) {
        auto          col = static_cast<Eigen::Index>(l.generator) * d;
        Mat<S> const& g = rep.generator(l.generator);
        if (l.sign > 0) {
          out.block(row, col, d, d) += m;
          m = m * g;
        } else {
          m = m * g.adjoint();
          out.block(row, col, d, d) -= m;
        }
      }
      row += d;
    }
    return out;
  }

  // Coboundary map v -> (pi(s)v - v)_s.
  template <Scalar S>
  Mat<S> coboundary_matrix(Representation<S> const& rep) {
    auto   d = static_cast<Eigen::Index>(rep.dim());
    auto   k = static_cast<Eigen::Index>(rep.generator_count());
    Mat<S> out(k * d, d);
    for (Eigen::Index s = 0; s < k; ++s) {
      out.block(s * d, 0, d, d)
          = rep.generator(static_cast<std::size_t>(s)) - Mat<S>::Identity(d, d);
    }
    return out;
  }

  template <Scalar S>
  Cocycle<S> coboundary(Representation<S> const& rep, Vec<S> const& v) {
    Cocycle<S> c;
    for (auto const& g : rep.generators()) {
      c.values.push_back(g * v - v);
    }
    return c;
  }

  struct RepresentationReport {
    std::vector<double> isometry_residuals;  // |M*M - I| per generator
    std::vector<double> relator_residuals;   // |pi(r) - I| per relator
    std::vector<double> cocycle_residuals;   // |b(r)| per relator (if checked)
    double              cocycle_bound = 0.0;
    bool                isometry_ok = true;
    bool                relators_ok = true;
    bool                cocycle_ok = true;

    bool passed() const noexcept {
      return isometry_ok && relators_ok && cocycle_ok;
    }
  };

  template <Scalar S>
  RepresentationReport verify_representation(Representation<S> const& rep,
                                             ToleranceProfile const&  tol = {}) {
    RepresentationReport out;
    auto                 d = static_cast<Eigen::Index>(rep.dim());
    for (auto const& g : rep.generators()) {
      double r = (g.adjoint() * g - Mat<S>::Identity(d, d)).norm();
      out.isometry_residuals.push_back(r);
      out.isometry_ok = out.isometry_ok && r <= tol.residual;
    }
    for (auto const& w : rep.presentation().relators()) {
      double r = (rep_evaluate(rep, w) - Mat<S>::Identity(d, d)).norm();
      out.relator_residuals.push_back(r);
      out.relators_ok = out.relators_ok && r <= tol.residual;
    }
    return out;
  }

  // Representation checks plus the cocycle identity on every relator:
  // |b(r)| <= tol.residual * (1 + max_s |b(s)|).
  template <Scalar S>
  RepresentationReport verify_cocycle(Representation<S> const& rep, Cocycle<S> const& b,
                                      ToleranceProfile const& tol = {}) {
    RepresentationReport out = verify_representation(rep, tol);
    out.cocycle_bound = tol.residual * (1.0 + b.max_norm());
    for (auto const& w : rep.presentation().relators()) {
      double r = cocycle_extend(rep, b, w).norm();
      out.cocycle_residuals.push_back(r);
      out.cocycle_ok = out.cocycle_ok && r <= out.cocycle_bound;
    }
    return out;
  }

  // Orthonormal basis of the fixed vectors of pi(G).
  template <Scalar S>
  Mat<S> fixed_subspace(Representation<S> const& rep, ToleranceProfile const& tol = {}) {
    auto d = static_cast<Eigen::Index>(rep.dim());
    if (rep.generator_count() == 0) {
      return Mat<S>::Identity(d, d);
    }
    return null_space_basis<S>(coboundary_matrix(rep), tol, 1.0);
  }

  // Basis of {T : T pi(s) = pi(s) T for all generators s}, over the
  // representation's own field.
  template <Scalar S>
  std::vector<Mat<S>> commutant_basis(Representation<S> const& rep,
                                      ToleranceProfile const&  tol = {}) {
    auto   d = static_cast<Eigen::Index>(rep.dim());
    auto   k = static_cast<Eigen::Index>(rep.generator_count());
    Mat<S> id = Mat<S>::Identity(d, d);
    Mat<S> sys(k * d * d, d * d);
    for (Eigen::Index s = 0; s < k; ++s) {
      Mat<S> const& a = rep.generator(static_cast<std::size_t>(s));
      // vec(T A - A T) = (A^T (x) I - I (x) A) vec(T)
      sys.block(s * d * d, 0, d * d, d * d) = kron<S>(a.transpose(), id) - kron<S>(id, a);
    }
    Mat<S>              null = null_space_basis<S>(sys, tol, 1.0);
    std::vector<Mat<S>> out;
    for (Eigen::Index j = 0; j < null.cols(); ++j) {
      out.push_back(unvec<S>(null.col(j), d, d));
    }
    return out;
  }

  // Z^1, B^1 and orthogonal representatives of H^1, all as orthonormal
  // coordinate matrices over concatenated generator values.
  template <Scalar S>
  struct CohomologyBasis {
    Mat<S> z1;  // (k*d) x dim Z^1
    Mat<S> b1;  // (k*d) x dim B^1
    Mat<S> h1;  // (k*d) x dim H^1, orthogonal to b1

    std::size_t dim_z1() const noexcept {
      return static_cast<std::size_t>(z1.cols());
    }
    std::size_t dim_b1() const noexcept {
      return static_cast<std::size_t>(b1.cols());
    }
    std::size_t dim_h1() const noexcept {
      return static_cast<std::size_t>(h1.cols());
    }

    std::vector<Cocycle<S>> cocycles(Mat<S> const& coords, std::size_t gens,
                                     std::size_t dim) const {
      std::vector<Cocycle<S>> out;
      for (Eigen::Index j = 0; j < coords.cols(); ++j) {
        out.push_back(Cocycle<S>::unflatten(coords.col(j), gens, dim));
      }
      return out;
    }
  };

  template <Scalar S>
  CohomologyBasis<S> cohomology(Representation<S> const& rep, ToleranceProfile const& tol = {}) {
    CohomologyBasis<S> out;
    auto               n = static_cast<Eigen::Index>(rep.generator_count() * rep.dim());
    if (n == 0) {
      out.z1 = out.b1 = out.h1 = Mat<S>(0, 0);
      return out;
    }
    out.z1 = null_space_basis<S>(cocycle_constraint_matrix(rep), tol, 1.0);
    out.b1 = range_basis<S>(coboundary_matrix(rep), tol, 1.0);
    if (out.b1.cols() == 0) {
      out.h1 = out.z1;
    } else if (out.z1.cols() == 0) {
      out.h1 = Mat<S>(n, 0);
    } else {
      Mat<S> c = null_space_basis<S>(Mat<S>(out.b1.adjoint() * out.z1), tol, 1.0);
      out.h1 = out.z1 * c;
    }
    return out;
  }

  // For each commutant element T, the matrix of [b] -> [T b] in the
  // coordinates given by the columns of basis.h1.
  template <Scalar S>
  std::vector<Mat<S>> commutant_action_on_h1(Representation<S> const&  rep,
                                             CohomologyBasis<S> const&  basis,
                                             std::vector<Mat<S>> const& commutant) {
    auto                k = static_cast<Eigen::Index>(rep.generator_count());
    std::vector<Mat<S>> out;
    for (auto const& t : commutant) {
      Mat<S> blk = kron<S>(Mat<S>::Identity(k, k), t);
      out.push_back(basis.h1.adjoint() * blk * basis.h1);
    }
    return out;
  }

}  // namespace affirr

#endif  // AFFIRR_REPCOH_HPP_
