// Does a representation occur as the linear part of an irreducible affine
// action? Equivalent to H^1 containing a separating vector for the
// commutant; searched for by random sampling.

#ifndef AFFIRR_SEPARATING_HPP_
#define AFFIRR_SEPARATING_HPP_

#include <cstdint>
#include <optional>
#include <random>

#include "affine.hpp"
#include "numkernel.hpp"
#include "repcoh.hpp"

namespace affirr {

  template <Scalar S>
  struct SeparatingResult {
    bool                       found = false;
    std::optional<Cocycle<S>> witness;
    std::size_t                trials_used = 0;
    std::size_t                dim_h1 = 0;
    std::size_t                commutant_dim = 0;
    // A negative answer is probabilistic unless H^1 is too small to hold a
    // separating vector at all.
    bool probabilistic = false;
  };

  // A class xi is separating iff T -> [T xi] is injective on the commutant,
  // i.e. the columns M_T xi over a commutant basis are independent. The
  // set of separating classes is empty or Zariski-dense, so random samples
  // decide with probability one.
  template <Scalar S>
  SeparatingResult<S> exists_irreducible_linear_part(Representation<S> const& rep,
                                                     std::size_t trials, std::uint64_t seed,
                                                     ToleranceProfile const& tol = {}) {
    if (trials < 1) {
      throw PreconditionError("exists_irreducible_linear_part: trials must be >= 1");
    }
    if (rep.dim() == 0) {
      throw PreconditionError("exists_irreducible_linear_part: dimension must be >= 1");
    }
    auto report = verify_representation(rep, tol);
    if (!report.passed()) {
      throw PreconditionError("exists_irreducible_linear_part: not a valid isometric"
                              " representation");
    }
    SeparatingResult<S> out;
    CohomologyBasis<S>  basis = cohomology(rep, tol);
    std::vector<Mat<S>> comm = commutant_basis(rep, tol);
    std::vector<Mat<S>> acts = commutant_action_on_h1(rep, basis, comm);
    out.dim_h1 = basis.dim_h1();
    out.commutant_dim = comm.size();
    if (out.dim_h1 < out.commutant_dim) {
      return out;  // m independent vectors cannot fit in H^1
    }
    auto            h = static_cast<Eigen::Index>(out.dim_h1);
    auto            m = static_cast<Eigen::Index>(comm.size());
    std::mt19937_64 rng(seed);
    for (std::size_t trial = 0; trial < trials; ++trial) {
      ++out.trials_used;
      Vec<S> xi = random_vector<S>(h, rng);
      xi.normalize();
      Mat<S> cols(h, m);
      for (Eigen::Index j = 0; j < m; ++j) {
        cols.col(j) = acts[static_cast<std::size_t>(j)] * xi;
      }
      if (numerical_rank<S>(cols, tol) != m) {
        continue;
      }
      Cocycle<S> b = Cocycle<S>::unflatten(basis.h1 * xi, rep.generator_count(), rep.dim());
      if (is_irreducible(AffineAction<S>(rep, b), tol).irreducible) {
        out.found = true;
        out.witness = std::move(b);
        return out;
      }
    }
    out.probabilistic = true;
    return out;
  }

}  // namespace affirr

#endif  // AFFIRR_SEPARATING_HPP_
