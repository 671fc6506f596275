// Command-line front end. Every verb reads problem files, runs one
// operation, re-verifies any witness it is about to print and writes a
// result document: JSON on stdout with --machine, text otherwise.
//
// Exit codes:
//   0  ok / Irreducible / pass       10  Reducible, ProbablyNo, NotFound, Violated
//   1  a check or validation failed  11  usage error
//   12 parse error                   13  precondition not met
//   14 internal error

#ifndef AFFIRR_CLI_HPP_
#define AFFIRR_CLI_HPP_

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "affine.hpp"
#include "constructions.hpp"
#include "io.hpp"
#include "separating.hpp"

namespace affirr::cli {

  using json = nlohmann::json;

  enum Exit : int {
    ok = 0,
    failed = 1,
    negative = 10,
    usage = 11,
    parse = 12,
    precondition = 13,
    internal = 14,
  };

  struct Options {
    std::string                 verb;
    std::vector<std::string>    files;
    std::optional<double>       tol_rank, tol_residual;
    std::optional<std::uint64_t> seed;
    std::size_t                 trials = 20;
    long                        window = 3;
    std::size_t                 budget = 100;
    double                      radius = 1.0;
    bool                        machine = false;
    std::string                 batch;
    std::string                 cls = "nilpotent";
  };

  // What a verb hands back: the verb-specific part of the result document,
  // a few lines for humans and the exit code.
  struct Outcome {
    std::string              verdict;
    int                      code = Exit::ok;
    std::string              field;
    json                     result = json::object();
    json                     residuals = json::object();
    bool                     probabilistic = false;
    std::vector<std::string> lines;
  };

  namespace detail {

    template <typename F>
    decltype(auto) with_field(Field f, F&& fn) {
      if (f == Field::real) {
        return fn.template operator()<double>();
      }
      return fn.template operator()<complex_t>();
    }

    inline ToleranceProfile tolerances(io::ProblemFile const& pf, Options const& o) {
      ToleranceProfile tol = pf.tolerances.value_or(ToleranceProfile{});
      if (o.tol_rank) {
        tol.rank = *o.tol_rank;
      }
      if (o.tol_residual) {
        tol.residual = *o.tol_residual;
      }
      tol.validate();
      return tol;
    }

    inline std::uint64_t seed(io::ProblemFile const& pf, Options const& o) {
      return o.seed.value_or(pf.seed.value_or(0));
    }

    inline std::string num(double x) {
      std::ostringstream ss;
      ss << std::setprecision(6) << x;
      return ss.str();
    }

    inline std::string num(complex_t z) {
      if (z.imag() == 0.0) {
        return num(z.real());
      }
      std::ostringstream ss;
      ss << std::setprecision(6) << z.real() << (z.imag() < 0 ? "-" : "+")
         << std::abs(z.imag()) << "i";
      return ss.str();
    }

    template <typename Derived>
    std::string show(Eigen::MatrixBase<Derived> const& v) {
      std::string out = "(";
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        // Tidy signed zeros and roundoff in displayed values only.
        auto x = v(i);
        if (std::abs(x) < 1e-13) {
          x = 0;
        }
        out += (i ? ", " : "") + num(complex_t(x));
      }
      return out + ")";
    }

    template <typename Derived>
    std::string show_columns(Eigen::MatrixBase<Derived> const& m) {
      std::string out = "[";
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        out += (j ? ", " : "") + show(m.col(j));
      }
      return out + "]";
    }

    template <Scalar S>
    json map_json(AffineMap<S> const& m) {
      Field f = scalar_traits<S>::field;
      return {{"rows", m.linear.rows()},
              {"cols", m.linear.cols()},
              {"linear", io::matrix_json(m.linear, f)},
              {"translation", io::vector_json(m.translation, f)}};
    }

    template <Scalar S>
    json subspace_json(AffineSubspace<S> const& k) {
      Field f = scalar_traits<S>::field;
      return {{"base", io::vector_json(k.base, f)},
              {"directions", io::columns_json(k.directions, f)}};
    }

    template <Scalar S>
    json cocycle_json(Cocycle<S> const& b, GroupPresentation const& p) {
      json out = json::object();
      for (std::size_t s = 0; s < b.values.size(); ++s) {
        out[p.generator_names()[s]] = io::vector_json(b.values[s], scalar_traits<S>::field);
      }
      return out;
    }

    template <Scalar S>
    json action_json(AffineAction<S> const& a) {
      io::ProblemFile pf;
      pf.set_action(a);
      return io::to_json(pf);
    }

    inline json report_json(PropertyReport const& r) {
      json checks = json::array();
      for (auto const& c : r.checks) {
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
      }
      return checks;
    }

    inline void report_lines(PropertyReport const& r, Outcome& out) {
      for (auto const& c : r.checks) {
        out.lines.push_back(std::string(c.passed ? "  ok    " : "  FAIL  ") + c.name
                            + (c.detail.empty() ? "" : " (" + c.detail + ")"));
      }
    }

    // Fills the irreducibility part of an outcome, re-verifying the witness.
    template <Scalar S>
    void irreducibility(AffineAction<S> const& a, ToleranceProfile const& tol, Outcome& out) {
      auto v = is_irreducible(a, tol);
      out.field = to_string(scalar_traits<S>::field);
      if (v.irreducible) {
        out.verdict = "Irreducible";
        out.code = Exit::ok;
        out.result["translation_directions"]
            = io::columns_json(v.translation_directions, scalar_traits<S>::field);
        out.result["translations_match_fixed_space"] = v.translations_match_fixed_space;
        out.residuals["translation"] = v.translation_residual;
        out.lines.push_back("Irreducible");
        out.lines.push_back("commutant translations along "
                            + show_columns(v.translation_directions));
        if (!v.translations_match_fixed_space) {
          throw ConsistencyError("commutant translations do not span the fixed space");
        }
        return;
      }
      out.verdict = "Reducible";
      out.code = Exit::negative;
      auto const& k = *v.witness_subspace;
      double      res = invariance_residual(a, k);
      if (res > tol.residual || k.dim() >= static_cast<Eigen::Index>(a.dim())) {
        throw ConsistencyError("witness subspace failed re-verification");
      }
      if (commutant_residual(a, Mat<S>(v.witness_commutant->linear
                                       - Mat<S>::Identity(k.base.size(), k.base.size())),
                             v.witness_commutant->translation)
          > tol.residual) {
        throw ConsistencyError("witness commutant element failed re-verification");
      }
      out.result["witness_commutant"] = map_json(*v.witness_commutant);
      out.result["witness_subspace"] = subspace_json(k);
      out.residuals["invariance"] = res;
      out.lines.push_back("Reducible");
      out.lines.push_back("invariant affine subspace: base " + show(k.base) + ", directions "
                          + show_columns(k.directions));
      out.lines.push_back("invariance residual " + num(res));
    }

    ////////////////////////////////////////////////////////////////////
    // Verbs
    ////////////////////////////////////////////////////////////////////

    inline Outcome verify(io::ProblemFile const& pf, Options const& o) {
      auto tol = tolerances(pf, o);
      return with_field(pf.field, [&]<Scalar S>() {
        Outcome out;
        out.field = to_string(pf.field);
        auto rep = pf.cocycle ? verify_cocycle(pf.action<S>().rep(), pf.action<S>().cocycle(), tol)
                              : verify_representation(pf.representation<S>(), tol);
        auto const& names = pf.presentation.generator_names();
        json        iso = json::object(), rel = json::array(), coc = json::array();
        for (std::size_t s = 0; s < rep.isometry_residuals.size(); ++s) {
          iso[names[s]] = rep.isometry_residuals[s];
        }
        for (double r : rep.relator_residuals) {
          rel.push_back(r);
        }
        for (double r : rep.cocycle_residuals) {
          coc.push_back(r);
        }
        out.residuals = {{"isometry", iso}, {"relators", rel}, {"cocycle", coc}};
        json failed = json::array();
        auto note = [&](char const* name, bool good, std::vector<double> const& rs) {
          double worst = 0.0;
          for (double r : rs) {
            worst = std::max(worst, r);
          }
          out.lines.push_back(std::string(good ? "  ok    " : "  FAIL  ") + name
                              + " (max residual " + num(worst) + ")");
          if (!good) {
            failed.push_back(name);
          }
        };
        note("isometry", rep.isometry_ok, rep.isometry_residuals);
        note("relators", rep.relators_ok, rep.relator_residuals);
        if (pf.cocycle) {
          note("cocycle", rep.cocycle_ok, rep.cocycle_residuals);
        }
        out.result["failed"] = failed;
        out.verdict = rep.passed() ? "pass" : "fail";
        out.code = rep.passed() ? Exit::ok : Exit::failed;
        out.lines.insert(out.lines.begin(), out.verdict);
        return out;
      });
    }

    template <Scalar S>
    AffineAction<S> checked_action(io::ProblemFile const& pf, ToleranceProfile const& tol) {
      AffineAction<S> a = pf.action<S>();
      auto            rep = verify_action(a, tol);
      if (!rep.passed()) {
        std::string what = !rep.isometry_ok   ? "generator matrices are not isometries"
                           : !rep.relators_ok ? "a relator does not hold in the representation"
                                              : "the cocycle identity fails on a relator";
        throw PreconditionError("invalid action: " + what + " (run 'verify' for details)");
      }
      return a;
    }

    inline Outcome irreducible(io::ProblemFile const& pf, Options const& o) {
      auto tol = tolerances(pf, o);
      return with_field(pf.field, [&]<Scalar S>() {
        Outcome out;
        irreducibility(checked_action<S>(pf, tol), tol, out);
        return out;
      });
    }

    inline Outcome commutant(io::ProblemFile const& pf, Options const& o) {
      auto tol = tolerances(pf, o);
      return with_field(pf.field, [&]<Scalar S>() {
        Outcome out;
        out.field = to_string(pf.field);
        auto a = checked_action<S>(pf, tol);
        auto ac = affine_commutant(a, tol);
        json basis = json::array();
        out.lines.push_back("affine commutant: dimension " + std::to_string(ac.basis.size())
                            + ", " + std::to_string(ac.nontranslation_count)
                            + " with nonzero linear part");
        double worst = 0.0;
        for (auto const& p : ac.basis) {
          worst = std::max(worst, commutant_residual(a, p.u, p.t));
          basis.push_back({{"u", io::matrix_json(p.u, pf.field)},
                           {"t", io::vector_json(p.t, pf.field)},
                           {"u_norm", p.u_norm}});
        }
        if (worst > tol.residual) {
          throw ConsistencyError("commutant basis failed re-verification");
        }
        out.result["basis"] = basis;
        out.result["nontranslation_count"] = ac.nontranslation_count;
        out.residuals["commutant"] = worst;
        out.verdict = "ok";
        return out;
      });
    }

    inline Outcome fixed_points(io::ProblemFile const& pf, Options const& o) {
      auto tol = tolerances(pf, o);
      return with_field(pf.field, [&]<Scalar S>() {
        Outcome out;
        out.field = to_string(pf.field);
        auto a = checked_action<S>(pf, tol);
        auto k = affirr::fixed_points(a, tol);
        if (!k) {
          out.verdict = "Empty";
          out.code = Exit::negative;
          out.lines.push_back("no fixed point");
          return out;
        }
        double res = 0.0;
        for (std::size_t s = 0; s < a.rep().generator_count(); ++s) {
          res = std::max(res, (generator_map(a, s)(k->base) - k->base).norm());
        }
        if (res > tol.residual * (1.0 + k->base.norm())) {
          throw ConsistencyError("fixed point failed re-verification");
        }
        out.verdict = "Found";
        out.result["fixed_points"] = subspace_json(*k);
        out.residuals["fixed"] = res;
        out.lines.push_back("fixed points: base " + show(k->base) + ", directions "
                            + show_columns(k->directions));
        return out;
      });
    }

    inline Outcome cohomology(io::ProblemFile const& pf, Options const& o) {
      auto tol = tolerances(pf, o);
      return with_field(pf.field, [&]<Scalar S>() {
        Outcome out;
        out.field = to_string(pf.field);
        auto rep = pf.representation<S>();
        if (!verify_representation(rep, tol).passed()) {
          throw PreconditionError("invalid representation (run 'verify' for details)");
        }
        auto b = affirr::cohomology(rep, tol);
        out.result["dim_z1"] = b.dim_z1();
        out.result["dim_b1"] = b.dim_b1();
        out.result["dim_h1"] = b.dim_h1();
        json reps = json::array();
        out.lines.push_back("dim Z1 = " + std::to_string(b.dim_z1()) + ", dim B1 = "
                            + std::to_string(b.dim_b1()) + ", dim H1 = "
                            + std::to_string(b.dim_h1()));
        for (auto const& c : b.cocycles(b.h1, rep.generator_count(), rep.dim())) {
          if (!verify_cocycle(rep, c, tol).cocycle_ok) {
            throw ConsistencyError("cohomology representative failed re-verification");
          }
          reps.push_back(cocycle_json(c, rep.presentation()));
          std::string line = "  class:";
          for (std::size_t s = 0; s < c.values.size(); ++s) {
            line += " " + rep.presentation().generator_names()[s] + " -> " + show(c.values[s]);
          }
          out.lines.push_back(line);
        }
        out.result["h1_representatives"] = reps;
        out.verdict = "ok";
        return out;
      });
    }

    inline Outcome exists_irreducible(io::ProblemFile const& pf, Options const& o) {
      auto tol = tolerances(pf, o);
      return with_field(pf.field, [&]<Scalar S>() {
        Outcome out;
        out.field = to_string(pf.field);
        auto rep = pf.representation<S>();
        auto r = exists_irreducible_linear_part(rep, o.trials, seed(pf, o), tol);
        out.result["dim_h1"] = r.dim_h1;
        out.result["commutant_dim"] = r.commutant_dim;
        out.result["trials_used"] = r.trials_used;
        if (r.found) {
          AffineAction<S> a(rep, *r.witness);
          if (!verify_action(a, tol).passed() || !is_irreducible(a, tol).irreducible) {
            throw ConsistencyError("separating witness failed re-verification");
          }
          out.verdict = "Yes";
          out.result["witness_cocycle"] = cocycle_json(*r.witness, rep.presentation());
          out.lines.push_back("Yes: an irreducible action with this linear part exists");
          std::string line = "  cocycle:";
          for (std::size_t s = 0; s < r.witness->values.size(); ++s) {
            line += " " + rep.presentation().generator_names()[s] + " -> "
                    + show(r.witness->values[s]);
          }
          out.lines.push_back(line);
        } else {
          out.verdict = "ProbablyNo";
          out.code = Exit::negative;
          out.probabilistic = r.probabilistic;
          out.lines.push_back(r.probabilistic ? "ProbablyNo (no separating class in "
                                                    + std::to_string(r.trials_used)
                                                    + " random samples)"
                                              : "No: H1 is too small for a separating class");
        }
        out.lines.push_back("dim H1 = " + std::to_string(r.dim_h1) + ", dim commutant = "
                            + std::to_string(r.commutant_dim));
        return out;
      });
    }

    inline void same_field(io::ProblemFile const& a, io::ProblemFile const& b) {
      if (a.field != b.field) {
        throw PreconditionError("the two files use different fields");
      }
    }

    inline Outcome direct_sum(io::ProblemFile const& p1, io::ProblemFile const& p2,
                              Options const& o) {
      same_field(p1, p2);
      auto tol = tolerances(p1, o);
      return with_field(p1.field, [&]<Scalar S>() {
        Outcome out;
        out.field = to_string(p1.field);
        auto a1 = checked_action<S>(p1, tol);
        auto a2 = checked_action<S>(p2, tol);
        auto r = analyze_direct_sum(a1, a2, tol);
        if (r.irreducible_sum) {
          out.verdict = "IrreducibleSum";
          out.lines.push_back("IrreducibleSum: the direct sum is irreducible");
          return out;
        }
        auto   pr1 = project_action(a1, r.v1, tol);
        auto   pr2 = project_action(a2, r.v2, tol);
        double res = intertwining_residual(r.map, pr1, pr2);
        if (res > tol.residual) {
          throw ConsistencyError("intertwiner failed re-verification");
        }
        out.verdict = "EquivalentProjections";
        out.code = Exit::negative;
        out.result["v1"] = io::columns_json(r.v1, p1.field);
        out.result["v2"] = io::columns_json(r.v2, p1.field);
        out.result["intertwiner"] = map_json(r.map);
        out.result["sum_witness_subspace"] = subspace_json(*r.sum_verdict.witness_subspace);
        out.residuals["intertwining"] = res;
        out.lines.push_back("Reducible: equivalent projected actions");
        out.lines.push_back("  V1 = span " + show_columns(r.v1));
        out.lines.push_back("  V2 = span " + show_columns(r.v2));
        out.lines.push_back("  A: linear " + show_columns(r.map.linear) + ", translation "
                            + show(r.map.translation));
        out.lines.push_back("  intertwining residual " + num(res));
        return out;
      });
    }

    inline Outcome equivalence(io::ProblemFile const& p1, io::ProblemFile const& p2,
                               Options const& o) {
      same_field(p1, p2);
      auto tol = tolerances(p1, o);
      return with_field(p1.field, [&]<Scalar S>() {
        Outcome out;
        out.field = to_string(p1.field);
        auto a1 = checked_action<S>(p1, tol);
        auto a2 = checked_action<S>(p2, tol);
        auto r = check_equivalence(a1, a2, o.trials, seed(p1, o), tol);
        out.result["samples"] = r.samples;
        if (!r.equivalent) {
          out.verdict = "NotFound";
          out.code = Exit::negative;
          out.probabilistic = r.probabilistic;
          out.lines.push_back("NotFound: no invertible affine intertwiner found");
          return out;
        }
        double res = intertwining_residual(*r.map, a1, a2);
        if (res > tol.residual) {
          throw ConsistencyError("intertwiner failed re-verification");
        }
        out.verdict = "Equivalent";
        out.result["map"] = map_json(*r.map);
        out.residuals["intertwining"] = res;
        out.lines.push_back("Equivalent");
        out.lines.push_back("  A: linear " + show_columns(r.map->linear) + ", translation "
                            + show(r.map->translation));
        return out;
      });
    }

    inline Outcome restrict(io::ProblemFile const& pf, Options const& o) {
      if (!pf.subgroup) {
        throw PreconditionError("the file has no subgroup");
      }
      auto tol = tolerances(pf, o);
      return with_field(pf.field, [&]<Scalar S>() {
        Outcome out;
        auto a = checked_action<S>(pf, tol);
        auto r = restrict_action(a, *pf.subgroup, tol);
        irreducibility(r, tol, out);
        out.result["restricted_action"] = action_json(r);
        if (pf.coset_table && is_irreducible(a, tol).irreducible) {
          auto rep = check_restriction_theorem(a, *pf.subgroup, *pf.coset_table, tol);
          out.result["restriction_theorem"] = report_json(rep);
          out.lines.push_back("finite-index restriction check:");
          report_lines(rep, out);
          if (!rep.passed()) {
            out.code = Exit::failed;
          }
        }
        return out;
      });
    }

    inline Outcome induce(io::ProblemFile const& pf, InducedSetup const& setup,
                          Options const& o) {
      auto tol = tolerances(pf, o);
      return with_field(pf.field, [&]<Scalar S>() {
        Outcome out;
        auto a = checked_action<S>(pf, tol);
        auto ind = induce_action(a, setup, tol);
        if (!verify_action(ind, tol).passed()) {
          throw ConsistencyError("induced action failed re-verification");
        }
        irreducibility(ind, tol, out);
        out.result["induced_action"] = action_json(ind);
        out.lines.insert(out.lines.begin(), "induced action on dimension "
                                                + std::to_string(ind.dim()) + ":");
        return out;
      });
    }

    inline Outcome center_check(io::ProblemFile const& pf, Options const& o) {
      auto tol = tolerances(pf, o);
      return with_field(pf.field, [&]<Scalar S>() {
        Outcome out;
        out.field = to_string(pf.field);
        auto a = checked_action<S>(pf, tol);
        auto rep = check_center_translations(a, pf.central_words, tol);
        out.result["checks"] = report_json(rep);
        out.verdict = rep.passed() ? "pass" : "fail";
        out.code = rep.passed() ? Exit::ok : Exit::failed;
        out.lines.push_back(out.verdict + " (" + std::to_string(pf.central_words.size())
                            + " central words)");
        report_lines(rep, out);
        return out;
      });
    }

    inline Outcome abelian_test(io::ProblemFile const& pf, Options const& o) {
      auto tol = tolerances(pf, o);
      return with_field(pf.field, [&]<Scalar S>() {
        Outcome out;
        out.field = to_string(pf.field);
        auto a = checked_action<S>(pf, tol);
        auto q = quadratic_form_test(a, o.window, tol);
        bool irr = is_irreducible(a, tol).irreducible;
        out.result["quadratic"] = q.quadratic;
        out.result["irreducible"] = irr;
        out.result["pairs_checked"] = q.pairs_checked;
        out.residuals["defect"] = q.defect;
        if (q.quadratic) {
          out.verdict = "Quadratic";
          out.lines.push_back("Quadratic (window " + std::to_string(o.window) + ")");
        } else {
          out.verdict = "Violated";
          out.code = Exit::negative;
          out.result["violation"] = {{"x", q.x}, {"y", q.y}};
          std::string xs, ys;
          for (std::size_t i = 0; i < q.x.size(); ++i) {
            xs += (i ? ", " : "") + std::to_string(q.x[i]);
            ys += (i ? ", " : "") + std::to_string(q.y[i]);
          }
          out.lines.push_back("Violated at x = (" + xs + "), y = (" + ys + "), defect "
                              + num(q.defect));
        }
        out.lines.push_back(std::string("irreducibility: ") + (irr ? "Irreducible" : "Reducible"));
        out.result["agree"] = irr == q.quadratic;
        if (irr != q.quadratic) {
          out.code = Exit::failed;
          out.lines.push_back("MISMATCH between the quadratic-form test and irreducibility");
        }
        return out;
      });
    }

    inline Outcome nilpotent_check(io::ProblemFile const& pf, Options const& o) {
      auto tol = tolerances(pf, o);
      GroupClass cls;
      if (o.cls == "abelian") {
        cls = GroupClass::abelian;
      } else if (o.cls == "nilpotent") {
        cls = GroupClass::nilpotent;
      } else {
        throw CLI::ValidationError("--class", "expected 'abelian' or 'nilpotent'");
      }
      return with_field(pf.field, [&]<Scalar S>() {
        Outcome out;
        out.field = to_string(pf.field);
        auto a = checked_action<S>(pf, tol);
        auto rep = check_translation_characterization(a, cls, tol);
        out.result["class"] = o.cls;
        if (!rep.applicable) {
          out.verdict = "NotApplicable";
          out.code = Exit::precondition;
          out.lines.push_back("NotApplicable: the presentation is not recognisably " + o.cls);
          return out;
        }
        out.result["checks"] = report_json(rep);
        out.verdict = rep.passed() ? "pass" : "fail";
        out.code = rep.passed() ? Exit::ok : Exit::failed;
        out.lines.push_back(out.verdict);
        report_lines(rep, out);
        return out;
      });
    }

    inline Outcome orbit_probe(io::ProblemFile const& pf, Options const& o) {
      auto tol = tolerances(pf, o);
      if (pf.field != Field::real) {
        throw PreconditionError("orbit-probe needs a real action");
      }
      Outcome out;
      out.field = "real";
      auto            a = checked_action<double>(pf, tol);
      Vec<double>     origin = pf.origin ? Vec<double>(pf.origin->real())
                                         : Vec<double>(Vec<double>::Zero(a.dim()));
      auto            r = orbit_hull_probe(a, origin, o.budget, o.radius, seed(pf, o));
      json            probes = json::array();
      for (auto const& p : r.probes) {
        probes.push_back({{"point", io::vector_json(p.point, Field::real)},
                          {"distance", p.distance}});
      }
      out.verdict = "ok";
      out.probabilistic = true;
      out.result = {{"orbit_points", r.orbit_points},
                    {"probes", probes},
                    {"max_distance", r.max_distance},
                    {"lower", io::vector_json(r.lower, Field::real)},
                    {"upper", io::vector_json(r.upper, Field::real)},
                    {"evidence_only", true}};
      out.lines.push_back("orbit sample of " + std::to_string(r.orbit_points)
                          + " points spans the box " + show(r.lower) + " .. " + show(r.upper));
      out.lines.push_back(std::to_string(r.probes.size()) + " probes, max hull distance "
                          + num(r.max_distance) + " (evidence only)");
      return out;
    }

    inline bool two_files(std::string const& verb) {
      return verb == "direct-sum" || verb == "equivalence" || verb == "induce";
    }

    inline Outcome dispatch(Options const& o, std::vector<std::string> const& files) {
      auto const& v = o.verb;
      if (two_files(v)) {
        auto p1 = io::load_problem(files.at(0));
        if (v == "induce") {
          return induce(p1, io::load_setup(files.at(1)), o);
        }
        auto p2 = io::load_problem(files.at(1));
        return v == "direct-sum" ? direct_sum(p1, p2, o) : equivalence(p1, p2, o);
      }
      auto pf = io::load_problem(files.at(0));
      if (v == "verify") return verify(pf, o);
      if (v == "irreducible") return irreducible(pf, o);
      if (v == "commutant") return commutant(pf, o);
      if (v == "fixed-points") return fixed_points(pf, o);
      if (v == "cohomology") return cohomology(pf, o);
      if (v == "exists-irreducible") return exists_irreducible(pf, o);
      if (v == "restrict") return restrict(pf, o);
      if (v == "center-check") return center_check(pf, o);
      if (v == "abelian-test") return abelian_test(pf, o);
      if (v == "nilpotent-check") return nilpotent_check(pf, o);
      if (v == "orbit-probe") return orbit_probe(pf, o);
      throw CLI::ValidationError("verb", "unknown verb '" + v + "'");
    }

    struct Error {
      int         code;
      std::string kind;
      std::string message;
    };

    // Runs one command and converts exceptions into exit codes.
    inline std::pair<json, int> run_one(Options const& o, std::vector<std::string> const& files,
                                        std::vector<std::string>& lines,
                                        std::optional<Error>&     error) {
      auto  start = std::chrono::steady_clock::now();
      json  doc;
      int   code = Exit::ok;
      doc["format_version"] = "1";
      doc["command"] = {{"verb", o.verb}, {"files", files}};
      try {
        Outcome out = dispatch(o, files);
        code = out.code;
        doc["verdict"] = out.verdict;
        doc["field"] = out.field;
        doc["result"] = out.result;
        doc["residuals"] = out.residuals;
        doc["probabilistic"] = out.probabilistic;
        lines = std::move(out.lines);
      } catch (io::ParseError const& e) {
        error = Error{Exit::parse, "parse", e.what()};
      } catch (CLI::Error const& e) {
        error = Error{Exit::usage, "usage", e.what()};
      } catch (PreconditionError const& e) {
        error = Error{Exit::precondition, "precondition", e.what()};
      } catch (ConsistencyError const& e) {
        error = Error{Exit::internal, "internal", e.what()};
      } catch (std::invalid_argument const& e) {
        error = Error{Exit::precondition, "precondition", e.what()};
      } catch (std::out_of_range const& e) {
        error = Error{Exit::precondition, "precondition", e.what()};
      } catch (std::runtime_error const& e) {
        error = Error{Exit::parse, "io", e.what()};
      } catch (std::exception const& e) {
        error = Error{Exit::internal, "internal", e.what()};
      }
      if (error) {
        code = error->code;
        doc["verdict"] = "error";
        doc["error"] = {{"kind", error->kind}, {"message", error->message}};
      }
      doc["exit_code"] = code;
      doc["wall_time_ms"]
          = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                .count();
      return {doc, code};
    }

    inline std::vector<std::string> batch_files(std::string const& dir) {
      std::vector<std::string> out;
      for (auto const& e : std::filesystem::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".json") {
          out.push_back(e.path().string());
        }
      }
      std::sort(out.begin(), out.end());
      return out;
    }

    inline char const* verb_help(std::string const& v) {
      static std::map<std::string, char const*> const h{
          {"verify", "check isometry, relators and the cocycle identity"},
          {"irreducible", "decide irreducibility, with a witness subspace if reducible"},
          {"commutant", "basis of the affine commutant"},
          {"fixed-points", "common fixed points of the action"},
          {"cohomology", "dimensions of Z1, B1 and H1"},
          {"exists-irreducible", "search H1 for an irreducible action with this linear part"},
          {"direct-sum", "analyse the direct sum of two actions"},
          {"equivalence", "search for an affine equivalence between two actions"},
          {"restrict", "restrict to a finite-index subgroup (setup file)"},
          {"induce", "induce from a finite-index subgroup (setup file)"},
          {"center-check", "check central elements act by fixed-space translations"},
          {"abelian-test", "quadratic-form test for abelian groups"},
          {"nilpotent-check", "irreducibility check for abelian or nilpotent groups"},
          {"orbit-probe", "sample an orbit and estimate its hull"}};
      auto it = h.find(v);
      return it == h.end() ? "" : it->second;
    }

  }  // namespace detail

  inline std::vector<std::string> const& verbs() {
    static std::vector<std::string> const v{
        "verify",       "irreducible", "commutant",    "fixed-points",    "cohomology",
        "exists-irreducible", "direct-sum", "equivalence", "restrict",    "induce",
        "center-check", "abelian-test", "nilpotent-check", "orbit-probe"};
    return v;
  }

  // argv-style entry point; returns the process exit code.
  inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    Options  o;
    CLI::App app{"Irreducibility of affine isometric actions of finitely presented groups",
                 "affirr"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--tol-rank", o.tol_rank, "relative singular-value cutoff (default 1e-8)");
    app.add_option("--tol-residual", o.tol_residual, "identity-check bound (default 1e-8)");
    app.add_option("--seed", o.seed, "random seed (default: file seed or 0)");
    app.add_option("--trials", o.trials, "random samples for searches")->check(CLI::PositiveNumber);
    app.add_option("--window", o.window, "lattice window for abelian-test")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--budget", o.budget, "orbit points for orbit-probe")
        ->check(CLI::PositiveNumber);
    app.add_option("--radius", o.radius, "probe radius for orbit-probe")
        ->check(CLI::NonNegativeNumber);
    app.add_flag("--machine", o.machine, "emit the JSON result document only");
    app.add_option("--batch", o.batch, "run a single-file verb on every *.json in a directory");
    app.add_option("--class", o.cls, "abelian or nilpotent (nilpotent-check)")
        ->check(CLI::IsMember({"abelian", "nilpotent"}));

    for (auto const& v : verbs()) {
      auto* sub = app.add_subcommand(v, detail::verb_help(v));
      sub->fallthrough();
      std::size_t need = detail::two_files(v) ? 2 : 1;
      sub->add_option("files", o.files, need == 2 ? "two input files" : "input file")
          ->expected(0, static_cast<int>(need));
      sub->callback([&o, v] { o.verb = v; });
    }

    std::vector<char*> argv;
    for (auto& a : args) {
      argv.push_back(a.data());
    }
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
      if (!o.batch.empty() && detail::two_files(o.verb)) {
        throw CLI::ValidationError("--batch", "only single-file verbs support batch mode");
      }
      if (o.batch.empty() && o.files.size() != (detail::two_files(o.verb) ? 2u : 1u)) {
        throw CLI::ValidationError("files", "wrong number of input files for '" + o.verb + "'");
      }
      if (o.tol_rank || o.tol_residual) {
        ToleranceProfile t;
        t.rank = o.tol_rank.value_or(t.rank);
        t.residual = o.tol_residual.value_or(t.residual);
        t.validate();
      }
    } catch (CLI::CallForHelp const& e) {
      out << app.help();
      return Exit::ok;
    } catch (CLI::CallForAllHelp const& e) {
      out << app.help("", CLI::AppFormatMode::All);
      return Exit::ok;
    } catch (CLI::Error const& e) {
      err << "usage error: " << e.what() << "\n";
      return Exit::usage;
    } catch (std::invalid_argument const& e) {
      err << "usage error: " << e.what() << "\n";
      return Exit::usage;
    }

    std::vector<std::vector<std::string>> jobs;
    if (o.batch.empty()) {
      jobs.push_back(o.files);
    } else {
      try {
        for (auto const& f : detail::batch_files(o.batch)) {
          jobs.push_back({f});
        }
      } catch (std::filesystem::filesystem_error const& e) {
        err << "usage error: " << e.what() << "\n";
        return Exit::usage;
      }
    }

    int  worst = Exit::ok;
    json docs = json::array();
    for (auto const& files : jobs) {
      std::vector<std::string>     lines;
      std::optional<detail::Error> error;
      auto [doc, code] = detail::run_one(o, files, lines, error);
      worst = std::max(worst, code);
      if (error) {
        err << (files.empty() ? std::string() : files.front() + ": ") << error->kind
            << " error: " << error->message << "\n";
      }
      if (o.machine) {
        docs.push_back(doc);
      } else if (!error) {
        if (!o.batch.empty()) {
          out << "== " << files.front() << "\n";
        }
        for (auto const& l : lines) {
          out << l << "\n";
        }
      }
    }
    if (o.machine) {
      out << (o.batch.empty() ? docs.at(0) : docs).dump(2) << "\n";
    }
    return worst;
  }

  inline int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    return run(std::vector<std::string>(argv, argv + argc), out, err);
  }

}  // namespace affirr::cli

#endif  // AFFIRR_CLI_HPP_
