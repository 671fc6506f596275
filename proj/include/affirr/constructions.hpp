// Restriction to and induction from finite-index subgroups, central
// translations, the quadratic-form and nilpotent characterisations, and an
// enveloping-orbit probe.

#ifndef AFFIRR_CONSTRUCTIONS_HPP_
#define AFFIRR_CONSTRUCTIONS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "affine.hpp"
#include "presentation.hpp"
#include "repcoh.hpp"

namespace affirr {

  // H = <words> inside the ambient group. The optional presentation names
  // the subgroup generators (one per word) and may carry relators.
  struct SubgroupSpec {
    std::vector<Word>                words;
    std::optional<GroupPresentation> presentation;

    GroupPresentation group() const {
      if (presentation) {
        if (presentation->generator_count() != words.size()) {
          throw std::invalid_argument("subgroup presentation has "
                                      + std::to_string(presentation->generator_count())
                                      + " generators for " + std::to_string(words.size())
                                      + " words");
        }
        return *presentation;
      }
      std::vector<std::string> names;
      for (std::size_t i = 0; i < words.size(); ++i) {
        names.push_back("h" + std::to_string(i + 1));
      }
      return GroupPresentation::free(std::move(names));
    }

    bool operator==(SubgroupSpec const&) const = default;
  };

  struct InducedSetup {
    GroupPresentation ambient;
    GroupPresentation subgroup;
    CosetTable        table;

    bool operator==(InducedSetup const&) const = default;
  };

  struct PropertyReport {
    std::vector<CheckResult> checks;
    bool                     applicable = true;

    bool passed() const {
      return std::all_of(checks.begin(), checks.end(), [](auto const& c) {
        return c.passed;
      });
    }
    void add(std::string name, bool ok, std::string detail = {}) {
      checks.push_back({std::move(name), ok, std::move(detail)});
    }
  };

  namespace detail {
    inline std::string fmt_residual(double r) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "residual %.3g", r);
      return buf;
    }
  }  // namespace detail

  template <Scalar S>
  AffineAction<S> restrict_action(AffineAction<S> const& a, SubgroupSpec const& sub,
                                  ToleranceProfile const& tol = {}) {
    GroupPresentation   grp = sub.group();
    std::vector<Mat<S>> gens;
    Cocycle<S>          b;
    for (Word const& w : sub.words) {
      AffineMap<S> m = action_evaluate(a, w);
      gens.push_back(std::move(m.linear));
      b.values.push_back(std::move(m.translation));
    }
    AffineAction<S> out(Representation<S>(std::move(grp), a.dim(), std::move(gens)),
                        std::move(b));
    if (!verify_action(out, tol).passed()) {
      throw PreconditionError("restrict_action: the subgroup relators do not hold in the"
                              " restricted action");
    }
    return out;
  }

  // Induction along left cosets r_x H: with s r_x = r_{sigma_s(x)} u_{s,x},
  // the ambient generator s carries the component at coset x to the
  // component at sigma_s(x) by alpha(u_{s,x}).
  template <Scalar S>
  AffineAction<S> induce_action(AffineAction<S> const& a, InducedSetup const& setup,
                                ToleranceProfile const& tol = {}) {
    if (!(a.presentation() == setup.subgroup)) {
      throw PreconditionError("induce_action: the action is not over the subgroup"
                              " presentation");
    }
    CosetTableReport ct = validate_coset_table(setup.ambient, setup.table);
    if (!ct.passed()) {
      for (auto const& c : ct.checks) {
        if (!c.passed) {
          throw PreconditionError("induce_action: coset table fails '" + c.name
                                  + "': " + c.detail);
        }
      }
    }
    auto                d = static_cast<Eigen::Index>(a.dim());
    std::size_t const   n = setup.table.cosets;
    auto                nd = static_cast<Eigen::Index>(n) * d;
    std::vector<Mat<S>> gens;
    Cocycle<S>          b;
    for (std::size_t s = 0; s < setup.ambient.generator_count(); ++s) {
      Mat<S> m = Mat<S>::Zero(nd, nd);
      Vec<S> v = Vec<S>::Zero(nd);
      for (std::size_t x = 0; x < n; ++x) {
        Word const&  u = setup.table.schreier[s][x];
        setup.subgroup.check(u);
        AffineMap<S> au = action_evaluate(a, u);
        auto         to = static_cast<Eigen::Index>(setup.table.action[s][x]) * d;
        auto         from = static_cast<Eigen::Index>(x) * d;
        m.block(to, from, d, d) = au.linear;
        v.segment(to, d) = au.translation;
      }
      gens.push_back(std::move(m));
      b.values.push_back(std::move(v));
    }
    AffineAction<S> out(Representation<S>(setup.ambient, static_cast<std::size_t>(nd),
                                          std::move(gens)),
                        std::move(b));
    auto rep = verify_action(out, tol);
    if (!rep.passed()) {
      double worst = 0.0;
      for (double r : rep.relator_residuals) {
        worst = std::max(worst, r);
      }
      for (double r : rep.cocycle_residuals) {
        worst = std::max(worst, r);
      }
      throw PreconditionError("induce_action: induced action violates an ambient relator ("
                              + detail::fmt_residual(worst) + "); bad Schreier data");
    }
    return out;
  }

  // Irreducible action + finite index certificate => irreducible
  // restriction. The certificate's Schreier words are checked numerically:
  // alpha(s r_x) = alpha(r_{sigma_s(x)} u_{s,x}) with u read through the
  // subgroup words.
  template <Scalar S>
  PropertyReport check_restriction_theorem(AffineAction<S> const& a, SubgroupSpec const& sub,
                                           CosetTable const&       table,
                                           ToleranceProfile const& tol = {}) {
    PropertyReport out;
    if (!is_irreducible(a, tol).irreducible) {
      throw PreconditionError("check_restriction_theorem: the action is not irreducible");
    }
    CosetTableReport ct = validate_coset_table(a.presentation(), table);
    std::string      why;
    for (auto const& c : ct.checks) {
      if (!c.passed) {
        why = c.name + ": " + c.detail;
        break;
      }
    }
    out.add("coset table", ct.passed(), why);
    if (!ct.passed()) {
      return out;
    }
    double worst = 0.0;
    for (std::size_t s = 0; s < a.presentation().generator_count(); ++s) {
      for (std::size_t x = 0; x < table.cosets; ++x) {
        Word lhs = compose(Word::generator(s), table.transversal[x]);
        Word rhs = compose(table.transversal[table.action[s][x]],
                           substitute(table.schreier[s][x], sub.words));
        AffineMap<S> l = action_evaluate(a, lhs);
        AffineMap<S> r = action_evaluate(a, rhs);
        worst = std::max(worst, (l.linear - r.linear).norm());
        worst = std::max(worst, (l.translation - r.translation).norm()
                                    / (1.0 + l.translation.norm()));
      }
    }
    out.add("schreier words", worst <= tol.residual, detail::fmt_residual(worst));
    auto restricted = is_irreducible(restrict_action(a, sub, tol), tol);
    out.add("restriction irreducible", restricted.irreducible,
            restricted.irreducible ? "" : "restricted action is reducible");
    return out;
  }

  // Central elements act by translations along the fixed space.
  template <Scalar S>
  PropertyReport check_center_translations(AffineAction<S> const&  a,
                                           std::vector<Word> const& central,
                                           ToleranceProfile const& tol = {}) {
    if (!is_irreducible(a, tol).irreducible) {
      throw PreconditionError("check_center_translations: the action is not irreducible");
    }
    auto const&    p = a.presentation();
    auto           d = static_cast<Eigen::Index>(a.dim());
    PropertyReport out;
    for (Word const& z : central) {
      std::string name = p.format_word(z);
      double      rep_res = 0.0, aff_res = 0.0;
      for (std::size_t s = 0; s < p.generator_count(); ++s) {
        AffineMap<S> zs = action_evaluate(a, compose(z, Word::generator(s)));
        AffineMap<S> sz = action_evaluate(a, compose(Word::generator(s), z));
        rep_res = std::max(rep_res, (zs.linear - sz.linear).norm());
        aff_res = std::max(aff_res, (zs.translation - sz.translation).norm()
                                        / (1.0 + zs.translation.norm()));
      }
      if (rep_res > tol.residual) {
        throw PreconditionError("check_center_translations: '" + name
                                + "' is not central in the representation ("
                                + detail::fmt_residual(rep_res) + ")");
      }
      out.add(name + ": central in the action", aff_res <= tol.residual,
              detail::fmt_residual(aff_res));
      AffineMap<S> az = action_evaluate(a, z);
      double       lin = (az.linear - Mat<S>::Identity(d, d)).norm();
      out.add(name + ": linear part trivial", lin <= tol.residual, detail::fmt_residual(lin));
      double fix = 0.0;
      for (std::size_t s = 0; s < p.generator_count(); ++s) {
        fix = std::max(fix, (a.linear(s) * az.translation - az.translation).norm());
      }
      fix /= 1.0 + az.translation.norm();
      out.add(name + ": translation in the fixed space", fix <= tol.residual,
              detail::fmt_residual(fix));
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Quadratic form test
  ////////////////////////////////////////////////////////////////////////

  struct QuadraticResult {
    bool                                 quadratic = true;
    std::vector<long>                    x, y;  // first violating pair
    double                               defect = 0.0;
    std::size_t                          pairs_checked = 0;
  };

  // t_1^{x_1} ... t_k^{x_k}
  inline Word lattice_word(std::vector<long> const& x) {
    std::vector<Letter> ls;
    for (std::size_t i = 0; i < x.size(); ++i) {
      int sign = x[i] >= 0 ? 1 : -1;
      for (long n = 0; n < std::labs(x[i]); ++n) {
        ls.push_back({i, sign});
      }
    }
    return Word(std::move(ls));
  }

  // psi(x) = |b(x)|^2 checked against the parallelogram law for all lattice
  // pairs in the window |x|_inf, |y|_inf <= R. Coordinates are enumerated
  // in the order 0, 1, -1, 2, -2, ... so the first violation reported is a
  // small one.
  template <Scalar S>
  QuadraticResult quadratic_form_test(AffineAction<S> const& a, long window = 3,
                                      ToleranceProfile const& tol = {}) {
    auto const& p = a.presentation();
    if (!is_free_abelian(p)) {
      throw PreconditionError("quadratic_form_test: presentation is not free abelian");
    }
    if (window < 0) {
      throw std::invalid_argument("quadratic_form_test: window must be >= 0");
    }
    auto   d = static_cast<Eigen::Index>(a.dim());
    auto   k = p.generator_count();
    Mat<S> span(d, static_cast<Eigen::Index>(k));
    for (std::size_t s = 0; s < k; ++s) {
      span.col(static_cast<Eigen::Index>(s)) = a.translation(s);
    }
    if (numerical_rank<S>(span, tol) != d) {
      throw PreconditionError("quadratic_form_test: cocycle values do not span the space");
    }

    std::vector<long> order{0};
    for (long n = 1; n <= window; ++n) {
      order.push_back(n);
      order.push_back(-n);
    }
    std::vector<std::vector<long>> points;
    std::vector<long>              cur(k, 0);
    std::function<void(std::size_t)> gen = [&](std::size_t i) {
      if (i == k) {
        points.push_back(cur);
        return;
      }
      for (long v : order) {
        cur[i] = v;
        gen(i + 1);
      }
    };
    gen(0);

    std::map<std::vector<long>, double> cache;
    auto psi = [&](std::vector<long> const& x) {
      auto it = cache.find(x);
      if (it != cache.end()) {
        return it->second;
      }
      double v = cocycle_extend(a.rep(), a.cocycle(), lattice_word(x)).squaredNorm();
      cache.emplace(x, v);
      return v;
    };

    QuadraticResult out;
    for (auto const& x : points) {
      for (auto const& y : points) {
        std::vector<long> sum(k), diff(k);
        for (std::size_t i = 0; i < k; ++i) {
          sum[i] = x[i] + y[i];
          diff[i] = x[i] - y[i];
        }
        double lhs = psi(sum) + psi(diff);
        double rhs = 2.0 * (psi(x) + psi(y));
        double defect = std::abs(lhs - rhs);
        ++out.pairs_checked;
        if (defect > tol.residual * (1.0 + lhs + rhs)) {
          out.quadratic = false;
          out.x = x;
          out.y = y;
          out.defect = defect;
          return out;
        }
        out.defect = std::max(out.defect, defect);
      }
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Translation characterisation
  ////////////////////////////////////////////////////////////////////////

  enum class GroupClass { abelian, nilpotent };

  // In the abelian and nilpotent classes an irreducible action has trivial
  // linear part and cocycle values spanning the space. Presentations not
  // recognisably in the class yield applicable = false.
  template <Scalar S>
  PropertyReport check_translation_characterization(AffineAction<S> const& a, GroupClass cls,
                                                    ToleranceProfile const& tol = {}) {
    PropertyReport out;
    bool in_class = cls == GroupClass::abelian ? has_abelian_shape(a.presentation())
                                               : has_nilpotent_shape(a.presentation());
    if (!in_class) {
      out.applicable = false;
      return out;
    }
    if (!is_irreducible(a, tol).irreducible) {
      out.add("reducible (nothing to check)", true);
      return out;
    }
    auto   d = static_cast<Eigen::Index>(a.dim());
    auto   k = static_cast<Eigen::Index>(a.rep().generator_count());
    double lin = 0.0;
    Mat<S> span(d, k);
    for (Eigen::Index s = 0; s < k; ++s) {
      auto su = static_cast<std::size_t>(s);
      lin = std::max(lin, (a.linear(su) - Mat<S>::Identity(d, d)).norm());
      span.col(s) = a.translation(su);
    }
    out.add("linear part trivial", lin <= tol.residual, detail::fmt_residual(lin));
    Eigen::Index r = numerical_rank<S>(span, tol);
    out.add("cocycle values span", r == d,
            "rank " + std::to_string(r) + " of " + std::to_string(d));
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Orbit hull probe
  ////////////////////////////////////////////////////////////////////////

  struct ProbeSample {
    Eigen::VectorXd point;
    double          distance;
  };

  struct OrbitProbeReport {
    std::size_t              orbit_points = 0;
    std::vector<ProbeSample> probes;
    double                   max_distance = 0.0;
    Eigen::VectorXd          lower, upper;  // coordinate ranges of the orbit sample
  };

  // Distance from p to conv(points) by Gilbert's nearest-point iteration
  // with exact line search. Evidence grade: the value returned is an upper
  // bound that converges from above.
  inline double hull_distance(std::vector<Eigen::VectorXd> const& points,
                              Eigen::VectorXd const& p, int max_iter = 2000) {
    Eigen::VectorXd x = points.front() - p;
    for (int it = 0; it < max_iter; ++it) {
      double          best = std::numeric_limits<double>::infinity();
      Eigen::VectorXd v;
      for (auto const& q : points) {
        double score = x.dot(q - p);
        if (score < best) {
          best = score;
          v = q - p;
        }
      }
      double gap = x.squaredNorm() - best;
      if (gap <= 1e-14 * (1.0 + x.squaredNorm())) {
        break;
      }
      Eigen::VectorXd dir = v - x;
      double          len2 = dir.squaredNorm();
      if (len2 == 0.0) {
        break;
      }
      double lambda = std::clamp(-x.dot(dir) / len2, 0.0, 1.0);
      x += lambda * dir;
    }
    return x.norm();
  }

  template <Scalar S>
  OrbitProbeReport orbit_hull_probe(AffineAction<S> const& a, Vec<S> const& origin,
                                    std::size_t budget, double radius, std::uint64_t seed,
                                    std::size_t max_word_length = 64,
                                    std::size_t grid_per_axis = 5) {
    if constexpr (scalar_traits<S>::is_complex) {
      throw PreconditionError("orbit_hull_probe: only real actions are supported");
    } else {
      auto d = static_cast<Eigen::Index>(a.dim());
      if (budget < 1) {
        throw PreconditionError("orbit_hull_probe: budget must be >= 1");
      }
      if (origin.size() != d) {
        throw std::invalid_argument("orbit_hull_probe: origin has wrong dimension");
      }
      if (!(radius >= 0.0) || grid_per_axis < 1) {
        throw std::invalid_argument("orbit_hull_probe: bad probe grid");
      }
      double probes = std::pow(static_cast<double>(grid_per_axis), static_cast<double>(d));
      if (probes > 1e5) {
        throw PreconditionError("orbit_hull_probe: probe grid too large for this dimension");
      }
      std::mt19937_64                            rng(seed);
      std::uniform_int_distribution<std::size_t> len_dist(0, max_word_length);
      std::size_t const                          k = a.rep().generator_count();
      std::vector<Eigen::VectorXd>               pts;
      for (std::size_t i = 0; i < budget; ++i) {
        std::vector<Letter> ls;
        if (k > 0) {
          std::uniform_int_distribution<std::size_t> gen_dist(0, 2 * k - 1);
          std::size_t                                len = len_dist(rng);
          for (std::size_t j = 0; j < len; ++j) {
            std::size_t c = gen_dist(rng);
            ls.push_back({c / 2, c % 2 == 0 ? 1 : -1});
          }
        }
        pts.push_back(action_evaluate(a, Word(std::move(ls)))(origin));
      }

      OrbitProbeReport out;
      out.orbit_points = pts.size();
      out.lower = out.upper = pts.front();
      for (auto const& q : pts) {
        out.lower = out.lower.cwiseMin(q);
        out.upper = out.upper.cwiseMax(q);
      }
      auto            total = static_cast<std::size_t>(probes);
      Eigen::VectorXd p(d);
      for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rest = idx;
        for (Eigen::Index c = 0; c < d; ++c) {
          std::size_t g = rest % grid_per_axis;
          rest /= grid_per_axis;
          p(c) = grid_per_axis == 1 ? 0.0
                                    : -radius
                                          + 2.0 * radius * static_cast<double>(g)
                                                / static_cast<double>(grid_per_axis - 1);
        }
        double dist = hull_distance(pts, p);
        out.probes.push_back({p, dist});
        out.max_distance = std::max(out.max_distance, dist);
      }
      return out;
    }
  }

}  // namespace affirr

#endif  // AFFIRR_CONSTRUCTIONS_HPP_
