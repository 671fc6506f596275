// Affine isometric actions alpha(g)v = pi(g)v + b(g), their commutant, the
// irreducibility decision with invariant-subspace witnesses, projections,
// direct sums and equivalence.

#ifndef AFFIRR_AFFINE_HPP_
#define AFFIRR_AFFINE_HPP_

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "numkernel.hpp"
#include "presentation.hpp"
#include "repcoh.hpp"
#include "types.hpp"

namespace affirr {

  template <Scalar S>
  class AffineAction {
   public:
    AffineAction() = default;

    AffineAction(Representation<S> rep, Cocycle<S> cocycle)
        : _rep(std::move(rep)), _cocycle(std::move(cocycle)) {
      if (_cocycle.values.size() != _rep.generator_count()) {
        throw std::invalid_argument("affine action: expected "
                                    + std::to_string(_rep.generator_count())
                                    + " cocycle values, got "
                                    + std::to_string(_cocycle.values.size()));
      }
      for (std::size_t s = 0; s < _cocycle.values.size(); ++s) {
        if (static_cast<std::size_t>(_cocycle.values[s].size()) != _rep.dim()) {
          throw std::invalid_argument("affine action: cocycle value for '"
                                      + _rep.presentation().generator_names()[s]
                                      + "' has wrong dimension");
        }
        if (!all_finite(_cocycle.values[s])) {
          throw std::invalid_argument("affine action: non-finite cocycle value");
        }
      }
    }

    Representation<S> const& rep() const noexcept {
      return _rep;
    }
    Cocycle<S> const& cocycle() const noexcept {
      return _cocycle;
    }
    GroupPresentation const& presentation() const noexcept {
      return _rep.presentation();
    }
    std::size_t dim() const noexcept {
      return _rep.dim();
    }
    Mat<S> const& linear(std::size_t s) const {
      return _rep.generator(s);
    }
    Vec<S> const& translation(std::size_t s) const {
      return _cocycle.values.at(s);
    }

    bool operator==(AffineAction const&) const = default;

   private:
    Representation<S> _rep;
    Cocycle<S>        _cocycle;
  };

  // v -> linear * v + translation.
  template <Scalar S>
  struct AffineMap {
    Mat<S> linear;
    Vec<S> translation;

    static AffineMap identity(Eigen::Index d) {
      return {Mat<S>::Identity(d, d), Vec<S>::Zero(d)};
    }

    Vec<S> operator()(Vec<S> const& v) const {
      return linear * v + translation;
    }

    // (*this) o other
    AffineMap after(AffineMap const& other) const {
      return {linear * other.linear, linear * other.translation + translation};
    }
  };

  // base + span(directions), directions orthonormal.
  template <Scalar S>
  struct AffineSubspace {
    Vec<S> base;
    Mat<S> directions;

    Eigen::Index dim() const noexcept {
      return directions.cols();
    }

    // Distance from x to the subspace.
    double distance(Vec<S> const& x) const {
      Vec<S> r = x - base;
      if (directions.cols() > 0) {
        r -= directions * (directions.adjoint() * r);
      }
      return r.norm();
    }

    bool contains(Vec<S> const& x, ToleranceProfile const& tol = {}) const {
      return distance(x) <= tol.residual * (1.0 + x.norm());
    }
  };

  template <Scalar S>
  AffineMap<S> generator_map(AffineAction<S> const& a, std::size_t s) {
    return {a.linear(s), a.translation(s)};
  }

  template <Scalar S>
  AffineMap<S> action_evaluate(AffineAction<S> const& a, Word const& w) {
    return {rep_evaluate(a.rep(), w), cocycle_extend(a.rep(), a.cocycle(), w)};
  }

  template <Scalar S>
  RepresentationReport verify_action(AffineAction<S> const& a, ToleranceProfile const& tol = {}) {
    return verify_cocycle(a.rep(), a.cocycle(), tol);
  }

  // Largest scaled deviation of alpha(s)K from K over the generators: for
  // the base point the distance of alpha(s)(base) to K divided by
  // (1 + |alpha(s)(base)|), for directions |(I - P) pi(s) D|.
  template <Scalar S>
  double invariance_residual(AffineAction<S> const& a, AffineSubspace<S> const& k) {
    double worst = 0.0;
    for (std::size_t s = 0; s < a.rep().generator_count(); ++s) {
      Vec<S> img = a.linear(s) * k.base + a.translation(s);
      worst = std::max(worst, k.distance(img) / (1.0 + img.norm()));
      if (k.directions.cols() > 0) {
        Mat<S> moved = a.linear(s) * k.directions;
        Mat<S> off = moved - k.directions * (k.directions.adjoint() * moved);
        worst = std::max(worst, off.norm());
      }
    }
    return worst;
  }

  // Solution set of alpha(s)v = v for all generators, or std::nullopt.
  template <Scalar S>
  std::optional<AffineSubspace<S>> fixed_points(AffineAction<S> const&  a,
                                                ToleranceProfile const& tol = {}) {
    auto d = static_cast<Eigen::Index>(a.dim());
    if (a.rep().generator_count() == 0) {
      return AffineSubspace<S>{Vec<S>::Zero(d), Mat<S>::Identity(d, d)};
    }
    Vec<S> rhs = -a.cocycle().flatten();
    auto   sol = solve_affine_system<S>(coboundary_matrix(a.rep()), rhs, tol, 1.0);
    if (!sol) {
      return std::nullopt;
    }
    return AffineSubspace<S>{sol->particular, sol->homogeneous};
  }

  ////////////////////////////////////////////////////////////////////////
  // Affine commutant
  ////////////////////////////////////////////////////////////////////////

  // A solution (U, t) of U pi(s) = pi(s) U, U b(s) = (pi(s) - I) t; the
  // corresponding commutant element is v -> (I + U)v + t.
  template <Scalar S>
  struct CommutantPair {
    Mat<S> u;
    Vec<S> t;
    double u_norm;  // |U| of this basis element in normalised coordinates

    AffineMap<S> as_map() const {
      return {Mat<S>::Identity(u.rows(), u.cols()) + u, t};
    }
  };

  template <Scalar S>
  struct AffineCommutant {
    // Basis ordered by decreasing u_norm; the trailing elements with u = 0
    // are exactly the translations along the fixed space.
    std::vector<CommutantPair<S>> basis;
    std::size_t                   nontranslation_count = 0;
  };

  namespace detail {
    template <Scalar S>
    double cocycle_scale(AffineAction<S> const& a) {
      double beta = a.cocycle().max_norm();
      return beta > 0.0 ? beta : 1.0;
    }
  }  // namespace detail

  // Basis of the homogeneous system defining the affine commutant. Cocycle
  // values are normalised by their largest norm before solving, which makes
  // the decision invariant under b -> c b. The basis is rotated so that its
  // U-components are orthogonal with decreasing norm.
  template <Scalar S>
  AffineCommutant<S> affine_commutant(AffineAction<S> const&  a,
                                      ToleranceProfile const& tol = {}) {
    auto         d = static_cast<Eigen::Index>(a.dim());
    auto         k = static_cast<Eigen::Index>(a.rep().generator_count());
    Eigen::Index nu = d * d;
    double const beta = detail::cocycle_scale(a);
    Mat<S>       id = Mat<S>::Identity(d, d);
    Mat<S>       sys = Mat<S>::Zero(k * (nu + d), nu + d);
    for (Eigen::Index s = 0; s < k; ++s) {
      auto          su = static_cast<std::size_t>(s);
      Mat<S> const& p = a.linear(su);
      Mat<S>        bs = a.translation(su) / beta;
      Eigen::Index  r0 = s * (nu + d);
      sys.block(r0, 0, nu, nu) = kron<S>(p.transpose(), id) - kron<S>(id, p);
      sys.block(r0 + nu, 0, d, nu) = kron<S>(Mat<S>(bs.transpose()), id);
      sys.block(r0 + nu, nu, d, d) = -(p - id);
    }
    Mat<S> null = null_space_basis<S>(sys, tol, 1.0);

    AffineCommutant<S> out;
    if (null.cols() == 0) {
      return out;
    }
    Mat<S>                   ublock = null.topRows(nu);
    Eigen::JacobiSVD<Mat<S>> svd(ublock, Eigen::ComputeFullV);
    Mat<S>                   rotated = null * svd.matrixV();
    auto const&              sv = svd.singularValues();
    for (Eigen::Index j = 0; j < rotated.cols(); ++j) {
      double n = j < sv.size() ? sv(j) : 0.0;
      bool   zero = n <= tol.rank;
      Mat<S> u = unvec<S>(rotated.col(j).head(nu), d, d);
      if (zero) {
        u.setZero();
        n = 0.0;
      } else {
        ++out.nontranslation_count;
      }
      out.basis.push_back({u, Vec<S>(rotated.col(j).tail(d) * beta), n});
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Irreducibility
  ////////////////////////////////////////////////////////////////////////

  template <Scalar S>
  struct IrreducibilityVerdict {
    bool irreducible = false;

    // Reducible only.
    std::optional<AffineMap<S>>      witness_commutant;
    std::optional<AffineSubspace<S>> witness_subspace;
    double                           invariance_residual = 0.0;

    // Irreducible only: span of the translation parts of the commutant,
    // which must coincide with the fixed space of pi(G).
    Mat<S> translation_directions;
    bool   translations_match_fixed_space = true;
    double translation_residual = 0.0;
  };

  // Residuals of U pi(s) - pi(s) U and U b(s) - (pi(s) - I) t, scaled.
  template <Scalar S>
  double commutant_residual(AffineAction<S> const& a, Mat<S> const& u, Vec<S> const& t) {
    auto   d = static_cast<Eigen::Index>(a.dim());
    double worst = 0.0;
    for (std::size_t s = 0; s < a.rep().generator_count(); ++s) {
      Mat<S> const& p = a.linear(s);
      Vec<S> const& b = a.translation(s);
      worst = std::max(worst, (u * p - p * u).norm() / (1.0 + u.norm()));
      double scale = 1.0 + u.norm() * b.norm() + 2.0 * t.norm();
      worst = std::max(worst, (u * b - (p - Mat<S>::Identity(d, d)) * t).norm() / scale);
    }
    return worst;
  }

  namespace detail {
    // K = {x : E x = -v0} with E the projector onto span(q) and
    // v0 = (E H E)^+ E U* t, H = U*U.
    template <Scalar S>
    AffineSubspace<S> subspace_from_projector(Mat<S> const& h, Mat<S> const& q,
                                              Mat<S> const& complement, Mat<S> const& u,
                                              Vec<S> const& t) {
      Mat<S> hq = q.adjoint() * h * q;
      Vec<S> v0 = q * hq.ldlt().solve(Vec<S>(q.adjoint() * u.adjoint() * t));
      return {Vec<S>(-v0), complement};
    }
  }  // namespace detail

  // Extracts a proper nonempty invariant affine subspace from a commutant
  // element v -> Tv + t with U = T - I != 0, using the spectral projector of
  // U*U for its largest eigenvalue.
  template <Scalar S>
  AffineSubspace<S> invariant_subspace_from_witness(AffineAction<S> const&  a,
                                                    AffineMap<S> const&     w,
                                                    ToleranceProfile const& tol = {}) {
    auto d = static_cast<Eigen::Index>(a.dim());
    if (w.linear.rows() != d || w.linear.cols() != d || w.translation.size() != d) {
      throw std::invalid_argument("witness dimensions do not match the action");
    }
    Mat<S> u = w.linear - Mat<S>::Identity(d, d);
    if (u.norm() <= tol.residual) {
      throw PreconditionError("witness has U = T - I = 0 (a translation)");
    }
    double cres = commutant_residual(a, u, w.translation);
    if (cres > tol.residual) {
      throw PreconditionError("witness fails the commutant equations (residual "
                              + std::to_string(cres) + ")");
    }
    Mat<S> h = u.adjoint() * u;
    h = (h + h.adjoint()) / 2.0;
    auto clusters = hermitian_eigensystem<S>(h, tol);

    auto assemble = [&](std::size_t first_kept) {
      Eigen::Index kept = 0;
      for (std::size_t i = first_kept; i < clusters.size(); ++i) {
        kept += clusters[i].basis.cols();
      }
      Mat<S>       q(d, kept), comp(d, d - kept);
      Eigen::Index qi = 0, ci = 0;
      for (std::size_t i = 0; i < clusters.size(); ++i) {
        auto const& c = clusters[i].basis;
        if (i >= first_kept) {
          q.middleCols(qi, c.cols()) = c;
          qi += c.cols();
        } else {
          comp.middleCols(ci, c.cols()) = c;
          ci += c.cols();
        }
      }
      return detail::subspace_from_projector<S>(h, q, comp, u, w.translation);
    };

    auto ok = [&](AffineSubspace<S> const& k) {
      return k.dim() < d && invariance_residual(a, k) <= tol.residual;
    };

    // Largest eigenvalue first; if near-degenerate clusters were split the
    // projector onto the whole nonzero spectrum is used instead.
    AffineSubspace<S> k = assemble(clusters.size() - 1);
    if (ok(k)) {
      return k;
    }
    double      top = clusters.back().value;
    std::size_t first = clusters.size() - 1;
    while (first > 0 && clusters[first - 1].value > tol.eig * std::max(1.0, top)) {
      --first;
    }
    k = assemble(first);
    if (ok(k)) {
      return k;
    }
    throw ConsistencyError("invariant subspace extraction produced a non-invariant subspace"
                           " (residual "
                           + std::to_string(invariance_residual(a, k)) + ")");
  }

  // Decides irreducibility: alpha is irreducible iff its affine commutant
  // consists of translations. Reducible verdicts carry a verified witness.
  template <Scalar S>
  IrreducibilityVerdict<S> is_irreducible(AffineAction<S> const&  a,
                                          ToleranceProfile const& tol = {}) {
    if (a.dim() == 0) {
      throw PreconditionError("is_irreducible: dimension must be >= 1");
    }
    auto                     d = static_cast<Eigen::Index>(a.dim());
    AffineCommutant<S>       ac = affine_commutant(a, tol);
    IrreducibilityVerdict<S> v;
    if (ac.nontranslation_count == 0) {
      v.irreducible = true;
      Mat<S> ts(d, static_cast<Eigen::Index>(ac.basis.size()));
      for (std::size_t j = 0; j < ac.basis.size(); ++j) {
        ts.col(static_cast<Eigen::Index>(j)) = ac.basis[j].t;
      }
      v.translation_directions = range_basis<S>(ts, tol);
      Mat<S> fixed = fixed_subspace(a.rep(), tol);
      double res = 0.0;
      for (Eigen::Index j = 0; j < v.translation_directions.cols(); ++j) {
        Vec<S> t = v.translation_directions.col(j);
        for (std::size_t s = 0; s < a.rep().generator_count(); ++s) {
          res = std::max(res, (a.linear(s) * t - t).norm());
        }
      }
      v.translation_residual = res;
      v.translations_match_fixed_space
          = v.translation_directions.cols() == fixed.cols() && res <= tol.residual;
      return v;
    }
    CommutantPair<S> const& best = ac.basis.front();
    v.witness_commutant = best.as_map();
    v.witness_subspace = invariant_subspace_from_witness(a, *v.witness_commutant, tol);
    v.invariance_residual = invariance_residual(a, *v.witness_subspace);
    return v;
  }

  ////////////////////////////////////////////////////////////////////////
  // Constructions on actions
  ////////////////////////////////////////////////////////////////////////

  // Projected action on a pi(G)-invariant subspace with orthonormal basis
  // columns, expressed in that basis.
  template <Scalar S>
  AffineAction<S> project_action(AffineAction<S> const& a, Mat<S> const& basis,
                                 ToleranceProfile const& tol = {}) {
    auto d = static_cast<Eigen::Index>(a.dim());
    if (basis.rows() != d) {
      throw std::invalid_argument("project_action: basis has wrong row count");
    }
    Eigen::Index k = basis.cols();
    if ((basis.adjoint() * basis - Mat<S>::Identity(k, k)).norm() > tol.residual) {
      throw PreconditionError("project_action: basis columns are not orthonormal");
    }
    std::vector<Mat<S>> gens;
    Cocycle<S>          b;
    for (std::size_t s = 0; s < a.rep().generator_count(); ++s) {
      Mat<S> moved = a.linear(s) * basis;
      Mat<S> coords = basis.adjoint() * moved;
      if ((moved - basis * coords).norm() > tol.residual) {
        throw PreconditionError("project_action: subspace is not invariant under '"
                                + a.presentation().generator_names()[s] + "'");
      }
      gens.push_back(coords);
      b.values.push_back(basis.adjoint() * a.translation(s));
    }
    return {Representation<S>(a.presentation(), static_cast<std::size_t>(k), std::move(gens)),
            std::move(b)};
  }

  template <Scalar S>
  AffineAction<S> direct_sum(AffineAction<S> const& a1, AffineAction<S> const& a2) {
    if (!(a1.presentation() == a2.presentation())) {
      throw PreconditionError("direct_sum: actions are over different presentations");
    }
    auto                d1 = static_cast<Eigen::Index>(a1.dim());
    auto                d2 = static_cast<Eigen::Index>(a2.dim());
    std::vector<Mat<S>> gens;
    Cocycle<S>          b;
    for (std::size_t s = 0; s < a1.rep().generator_count(); ++s) {
      Mat<S> m = Mat<S>::Zero(d1 + d2, d1 + d2);
      m.topLeftCorner(d1, d1) = a1.linear(s);
      m.bottomRightCorner(d2, d2) = a2.linear(s);
      gens.push_back(m);
      Vec<S> v(d1 + d2);
      v << a1.translation(s), a2.translation(s);
      b.values.push_back(v);
    }
    return {Representation<S>(a1.presentation(), a1.dim() + a2.dim(), std::move(gens)),
            std::move(b)};
  }

  // Cocycle replaced by b + d_v with d_v(g) = pi(g)v - v; the new action is
  // t_v^-1 o alpha o t_v.
  template <Scalar S>
  AffineAction<S> conjugate_by_translation(AffineAction<S> const& a, Vec<S> const& v) {
    if (static_cast<std::size_t>(v.size()) != a.dim()) {
      throw std::invalid_argument("conjugate_by_translation: vector has wrong dimension");
    }
    Cocycle<S> b = a.cocycle();
    for (std::size_t s = 0; s < b.values.size(); ++s) {
      b.values[s] += a.linear(s) * v - v;
    }
    return {a.rep(), std::move(b)};
  }

  // max_s of the scaled residual of A o alpha1(s) = alpha2(s) o A.
  template <Scalar S>
  double intertwining_residual(AffineMap<S> const& m, AffineAction<S> const& a1,
                               AffineAction<S> const& a2) {
    double worst = 0.0;
    double scale = 1.0 + m.linear.norm() + m.translation.norm();
    for (std::size_t s = 0; s < a1.rep().generator_count(); ++s) {
      Mat<S> const& p1 = a1.linear(s);
      Mat<S> const& p2 = a2.linear(s);
      worst = std::max(worst, (m.linear * p1 - p2 * m.linear).norm() / scale);
      Vec<S> lhs = m.linear * a1.translation(s) + m.translation;
      Vec<S> rhs = p2 * m.translation + a2.translation(s);
      worst = std::max(worst, (lhs - rhs).norm() / (scale * (1.0 + a2.translation(s).norm())));
    }
    return worst;
  }

  template <Scalar S>
  struct EquivalenceResult {
    bool                        equivalent = false;
    std::optional<AffineMap<S>> map;
    double                      residual = 0.0;
    bool                        probabilistic = false;  // NotFound after sampling
    std::size_t                 samples = 0;
  };

  // Searches the affine solution set of T pi1(s) = pi2(s) T,
  // T b1(s) - (pi2(s) - I)t = b2(s) for an invertible T: first the
  // minimum-norm solution, then `trials` random points.
  template <Scalar S>
  EquivalenceResult<S> check_equivalence(AffineAction<S> const& a1, AffineAction<S> const& a2,
                                         std::size_t trials = 20, std::uint64_t seed = 0,
                                         ToleranceProfile const& tol = {}) {
    if (!(a1.presentation() == a2.presentation())) {
      throw PreconditionError("check_equivalence: actions are over different presentations");
    }
    EquivalenceResult<S> out;
    auto                 d1 = static_cast<Eigen::Index>(a1.dim());
    auto                 d2 = static_cast<Eigen::Index>(a2.dim());
    if (d1 != d2) {
      return out;
    }
    auto         k = static_cast<Eigen::Index>(a1.rep().generator_count());
    Eigen::Index nt = d2 * d1;
    Mat<S>       sys = Mat<S>::Zero(k * (nt + d2), nt + d2);
    Vec<S>       rhs = Vec<S>::Zero(k * (nt + d2));
    Mat<S>       i1 = Mat<S>::Identity(d1, d1), i2 = Mat<S>::Identity(d2, d2);
    for (Eigen::Index s = 0; s < k; ++s) {
      auto          su = static_cast<std::size_t>(s);
      Mat<S> const& p1 = a1.linear(su);
      Mat<S> const& p2 = a2.linear(su);
      Eigen::Index  r0 = s * (nt + d2);
      sys.block(r0, 0, nt, nt) = kron<S>(p1.transpose(), i2) - kron<S>(i1, p2);
      sys.block(r0 + nt, 0, d2, nt)
          = kron<S>(Mat<S>(a1.translation(su).transpose()), i2);
      sys.block(r0 + nt, nt, d2, d2) = -(p2 - i2);
      rhs.segment(r0 + nt, d2) = a2.translation(su);
    }
    auto sol = solve_affine_system<S>(sys, rhs, tol, 1.0);
    if (!sol) {
      return out;
    }
    std::mt19937_64 rng(seed);
    for (std::size_t trial = 0; trial <= trials; ++trial) {
      Vec<S> x = sol->particular;
      if (trial > 0) {
        if (sol->homogeneous.cols() == 0) {
          break;
        }
        x += sol->homogeneous
             * random_vector<S>(sol->homogeneous.cols(), rng)
             * std::max(1.0, sol->particular.norm());
      }
      ++out.samples;
      AffineMap<S> m{unvec<S>(x.head(nt), d2, d1), x.tail(d2)};
      // Invertibility relative to the size of the whole solution (T, t):
      // a T that is pure roundoff next to t must not pass.
      Eigen::JacobiSVD<Mat<S>> svd(m.linear);
      auto const&              sv = svd.singularValues();
      double                   scale = std::max(sv.size() ? sv(0) : 0.0, x.norm());
      if (sv.size() == 0 || scale <= 0.0 || sv(sv.size() - 1) <= tol.rank * scale) {
        continue;
      }
      double res = intertwining_residual(m, a1, a2);
      if (res <= tol.residual) {
        out.equivalent = true;
        out.map = std::move(m);
        out.residual = res;
        return out;
      }
    }
    out.probabilistic = true;
    return out;
  }

  template <Scalar S>
  struct DirectSumAnalysis {
    bool                     irreducible_sum = false;
    IrreducibilityVerdict<S> sum_verdict;
    // EquivalentProjections: orthonormal bases of the invariant subspaces
    // V1, V2 and an invertible affine map between the projected actions,
    // written in those bases.
    Mat<S>       v1;
    Mat<S>       v2;
    AffineMap<S> map;
    double       residual = 0.0;
  };

  // For irreducible a1, a2: either a1 + a2 is irreducible, or returns
  // equivalent projected actions extracted from a reducing subspace of the
  // sum. The reducing subspace K is the orthogonal complement of the common
  // kernel of the non-translation commutant elements; after conjugating by
  // the fixed point of the projected action on K the cocycle is orthogonal
  // to K, and the graph of K over its first projection yields the
  // intertwiner.
  template <Scalar S>
  DirectSumAnalysis<S> analyze_direct_sum(AffineAction<S> const& a1, AffineAction<S> const& a2,
                                          ToleranceProfile const& tol = {}) {
    if (!is_irreducible(a1, tol).irreducible || !is_irreducible(a2, tol).irreducible) {
      throw PreconditionError("analyze_direct_sum: both summands must be irreducible");
    }
    DirectSumAnalysis<S> out;
    AffineAction<S>      sum = direct_sum(a1, a2);
    out.sum_verdict = is_irreducible(sum, tol);
    if (out.sum_verdict.irreducible) {
      out.irreducible_sum = true;
      return out;
    }
    auto               d1 = static_cast<Eigen::Index>(a1.dim());
    auto               d2 = static_cast<Eigen::Index>(a2.dim());
    Eigen::Index       d = d1 + d2;
    AffineCommutant<S> ac = affine_commutant(sum, tol);
    Mat<S>             m = Mat<S>::Zero(d, d);
    Vec<S>             w = Vec<S>::Zero(d);
    for (std::size_t j = 0; j < ac.nontranslation_count; ++j) {
      Mat<S> const& u = ac.basis[j].u;
      m += u.adjoint() * u;
      w += u.adjoint() * ac.basis[j].t;
    }
    m = (m + m.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Mat<S>> es(m);
    double const top = es.eigenvalues().cwiseAbs().maxCoeff();
    Eigen::Index kdim = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
      kdim += es.eigenvalues()(i) > tol.eig * std::max(1.0, top) ? 1 : 0;
    }
    Mat<S> kb = es.eigenvectors().rightCols(kdim);
    Vec<S> lam = es.eigenvalues().tail(kdim).template cast<S>();
    // Fixed point of the projected action on K is p = -M^+ w.
    Vec<S> p = -kb * (lam.cwiseInverse().asDiagonal() * (kb.adjoint() * w));

    Mat<S> k1 = kb.topRows(d1), k2 = kb.bottomRows(d2);
    if (numerical_rank<S>(k1, tol) != kdim || numerical_rank<S>(k2, tol) != kdim) {
      throw ConsistencyError("analyze_direct_sum: reducing subspace is not transverse to the"
                             " summands");
    }
    Eigen::HouseholderQR<Mat<S>> qr1(k1), qr2(k2);
    out.v1 = qr1.householderQ() * Mat<S>::Identity(d1, kdim);
    out.v2 = qr2.householderQ() * Mat<S>::Identity(d2, kdim);
    Mat<S> r1 = out.v1.adjoint() * k1;
    Mat<S> r2 = out.v2.adjoint() * k2;
    // Graph map S: k1 c -> k2 c; the projected cocycles satisfy
    // beta2 = -R2^-* R1^* beta1 in the conjugated frame.
    Mat<S> lin = -r2.adjoint().fullPivLu().solve(Mat<S>(r1.adjoint()));
    Vec<S> q1 = out.v1.adjoint() * p.head(d1);
    Vec<S> q2 = out.v2.adjoint() * p.tail(d2);
    out.map = {lin, q2 - lin * q1};

    AffineAction<S> proj1 = project_action(a1, out.v1, tol);
    AffineAction<S> proj2 = project_action(a2, out.v2, tol);
    out.residual = intertwining_residual(out.map, proj1, proj2);
    if (out.residual > tol.residual) {
      throw ConsistencyError("analyze_direct_sum: extracted map does not intertwine"
                             " (residual "
                             + std::to_string(out.residual) + ")");
    }
    return out;
  }

}  // namespace affirr

#endif  // AFFIRR_AFFINE_HPP_
