#include <catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace affirr;
using namespace testing_support;

namespace {

  // Homogeneous (d+1)x(d+1) matrix of x -> m x + t.
  template <Scalar S>
  Mat<S> homogeneous(Mat<S> const& m, Vec<S> const& t) {
    auto   d = m.rows();
    Mat<S> h = Mat<S>::Identity(d + 1, d + 1);
    h.topLeftCorner(d, d) = m;
    h.topRightCorner(d, 1) = t;
    return h;
  }

  // dim H^1 computed from products of homogeneous matrices: the relator's
  // translation part is linear in the generator values, so its matrix is
  // read off column by column. LU ranks, no SVD.
  // Entries are O(1) here, so pivots are compared against an absolute
  // cutoff. Eigen's own threshold is relative to the largest pivot and
  // would count pure roundoff as rank.
  template <Scalar S>
  Eigen::Index lu_rank(Mat<S> const& m) {
    Eigen::FullPivLU<Mat<S>> lu(m);
    Eigen::Index             r = 0;
    for (Eigen::Index i = 0; i < std::min(m.rows(), m.cols()); ++i) {
      r += std::abs(lu.matrixLU()(i, i)) > 1e-9 ? 1 : 0;
    }
    return r;
  }

  template <Scalar S>
  std::size_t h1_oracle(Representation<S> const& rep) {
    auto         d = static_cast<Eigen::Index>(rep.dim());
    auto         k = static_cast<Eigen::Index>(rep.generator_count());
    auto const&  rels = rep.presentation().relators();
    Eigen::Index rows = static_cast<Eigen::Index>(rels.size()) * d;
    Mat<S>       c = Mat<S>::Zero(std::max<Eigen::Index>(rows, 1), k * d);
    for (Eigen::Index j = 0; j < k * d; ++j) {
      std::vector<Mat<S>> gen, inv;
      for (Eigen::Index s = 0; s < k; ++s) {
        Vec<S> t = Vec<S>::Zero(d);
        if (j / d == s) {
          t(j % d) = 1.0;
        }
        gen.push_back(homogeneous<S>(rep.generator(static_cast<std::size_t>(s)), t));
        inv.push_back(gen.back().inverse());
      }
      for (std::size_t r = 0; r < rels.size(); ++r) {
        Mat<S> h = Mat<S>::Identity(d + 1, d + 1);
        for (auto const& l : rels[r]) {
          h = h * (l.sign > 0 ? gen[l.generator] : inv[l.generator]);
        }
        c.block(static_cast<Eigen::Index>(r) * d, j, d, 1) = h.topRightCorner(d, 1);
      }
    }
    Mat<S> b(k * d, d);
    for (Eigen::Index s = 0; s < k; ++s) {
      b.middleRows(s * d, d) = rep.generator(static_cast<std::size_t>(s)) - Mat<S>::Identity(d, d);
    }
    return static_cast<std::size_t>(k * d - lu_rank(c) - lu_rank(b));
  }

  template <Scalar S>
  Representation<S> one_dim(GroupPresentation p, std::vector<S> values) {
    std::vector<Mat<S>> gens;
    for (S v : values) {
      gens.push_back(scalar_mat<S>(v));
    }
    return Representation<S>(std::move(p), 1, std::move(gens));
  }

}  // namespace

TEST_CASE("representation shape checks", "[repcoh]") {
  CHECK_THROWS_AS(Representation<double>(pres_f2(), 1, {scalar_mat<double>(1.0)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Representation<double>(pres_z(), 2, {scalar_mat<double>(1.0)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Representation<double>(pres_z(), 1, {scalar_mat<double>(std::nan(""))}),
                  std::invalid_argument);
}

TEST_CASE("word evaluation and cocycle extension", "[repcoh]") {
  Rng  rng(31);
  auto rep = random_free_rep<complex_t>(pres_f2(), 3, rng);
  auto b = random_values<complex_t>(2, 3, rng);
  auto p = rep.presentation();
  for (int i = 0; i < 50; ++i) {
    std::vector<Letter> ls, ms;
    for (std::size_t j = 0; j < 1 + pick(rng, 5); ++j) {
      ls.push_back({pick(rng, 2), pick(rng, 2) ? 1 : -1});
    }
    for (std::size_t j = 0; j < 1 + pick(rng, 5); ++j) {
      ms.push_back({pick(rng, 2), pick(rng, 2) ? 1 : -1});
    }
    Word u(ls), v(ms);
    // pi is a homomorphism and b satisfies b(uv) = b(u) + pi(u) b(v).
    CHECK((rep_evaluate(rep, compose(u, v)) - rep_evaluate(rep, u) * rep_evaluate(rep, v)).norm()
          < 1e-12);
    Vec<complex_t> lhs = cocycle_extend(rep, b, compose(u, v));
    Vec<complex_t> rhs = cocycle_extend(rep, b, u) + rep_evaluate(rep, u) * cocycle_extend(rep, b, v);
    CHECK((lhs - rhs).norm() < 1e-10);
    CHECK(cocycle_extend(rep, b, compose(u, inverse(u))).norm() < 1e-12);
  }
  CHECK(cocycle_extend(rep, b, p.parse_word("a")) == b.values[0]);
}

TEST_CASE("verification flags the failing identity", "[repcoh]") {
  auto good = one_dim<double>(pres_dihedral(), {1.0, -1.0});
  CHECK(verify_representation(good).passed());

  auto stretched = one_dim<double>(pres_z(), {2.0});
  auto r1 = verify_representation(stretched);
  CHECK_FALSE(r1.isometry_ok);
  CHECK(r1.relators_ok);

  auto wrong = one_dim<double>(pres_dihedral(), {-1.0, 1.0});
  // s t s t = 1 holds, s s = 1 holds: still a representation.
  CHECK(verify_representation(wrong).passed());
  auto c3_bad = one_dim<double>(pres_c3(), {-1.0});
  auto r2 = verify_representation(c3_bad);
  CHECK_FALSE(r2.relators_ok);
  CHECK(r2.relator_residuals[0] > 1.0);

  Cocycle<double> b{{Vec<double>::Constant(1, 1.0), Vec<double>::Constant(1, 0.5)}};
  CHECK(verify_cocycle(good, b).passed());
  auto triv = one_dim<double>(pres_dihedral(), {1.0, 1.0});
  auto r3 = verify_cocycle(triv, b);
  CHECK_FALSE(r3.cocycle_ok);
  CHECK(r3.cocycle_residuals[0] == Catch::Approx(1.0));  // b(s s) = 2 b(s)
}

TEST_CASE("cohomology of known examples", "[repcoh]") {
  // Values from the dimension count dim H^1 = dim Z^1 - dim B^1 done by hand.
  CHECK(cohomology(one_dim<double>(pres_z(), {1.0})).dim_h1() == 1);
  CHECK(cohomology(one_dim<double>(pres_z(), {-1.0})).dim_h1() == 0);
  CHECK(cohomology(one_dim<double>(pres_f2(), {1.0, 1.0})).dim_h1() == 2);
  CHECK(cohomology(one_dim<double>(pres_f2(), {-1.0, 1.0})).dim_h1() == 1);
  CHECK(cohomology(one_dim<double>(pres_dihedral(), {1.0, -1.0})).dim_h1() == 1);
  CHECK(cohomology(one_dim<double>(pres_dihedral(), {1.0, 1.0})).dim_h1() == 0);
  CHECK(cohomology(one_dim<double>(pres_dihedral(), {-1.0, -1.0})).dim_h1() == 0);
  CHECK(cohomology(one_dim<double>(pres_heisenberg(), {1.0, 1.0, 1.0})).dim_h1() == 2);
  CHECK(cohomology(one_dim<double>(pres_zk(2), {1.0, 1.0})).dim_h1() == 2);
  CHECK(cohomology(one_dim<complex_t>(pres_zk(2), {complex_t(0, 1), 1.0})).dim_h1() == 0);
  Mat<double> rot = rotation<double>(2.0 * std::numbers::pi / 3.0);
  CHECK(cohomology(Representation<double>(pres_c3(), 2, {rot})).dim_h1() == 0);
}

TEST_CASE("cohomology matches the homogeneous-matrix oracle", "[repcoh]") {
  Rng rng(32);
  for (int i = 0; i < 40; ++i) {
    auto rc = random_block_rep<complex_t>(pres_heisenberg(), heisenberg_block<complex_t>, 4, rng);
    CHECK(cohomology(rc).dim_h1() == h1_oracle(rc));
    auto rd = random_block_rep<double>(
        pres_dihedral(), [](Rng& r, std::size_t) { return dihedral_block<double>(r); }, 4, rng);
    CHECK(cohomology(rd).dim_h1() == h1_oracle(rd));
    auto rs = random_block_rep<complex_t>(
        pres_s3(), [](Rng& r, std::size_t) { return s3_block<complex_t>(r); }, 4, rng);
    CHECK(cohomology(rs).dim_h1() == 0);
    CHECK(h1_oracle(rs) == 0);
  }
}

TEMPLATE_TEST_CASE("free group cohomology has the Euler characteristic dimension", "[repcoh]",
                   double, complex_t) {
  using S = TestType;
  Rng rng(33);
  for (int i = 0; i < 30; ++i) {
    std::size_t d = 1 + pick(rng, 4);
    // Sometimes a trivial block so the fixed space is nonzero.
    std::vector<Block<S>> blocks{{random_unitary<S>(static_cast<Eigen::Index>(d), rng),
                                  random_unitary<S>(static_cast<Eigen::Index>(d), rng)}};
    if (pick(rng, 2)) {
      blocks.push_back({scalar_mat<S>(1.0), scalar_mat<S>(1.0)});
    }
    auto        rep = assemble(pres_f2(), blocks, rng);
    auto        fix = fixed_subspace(rep);
    std::size_t expect = rep.dim() + static_cast<std::size_t>(fix.cols());
    auto        h = cohomology(rep);
    CHECK(h.dim_h1() == expect);
    CHECK(h.dim_z1() == 2 * rep.dim());
    CHECK(h.dim_b1() == rep.dim() - static_cast<std::size_t>(fix.cols()));
  }
}

TEMPLATE_TEST_CASE("cohomology bases are orthonormal and consistent", "[repcoh]", double,
                   complex_t) {
  using S = TestType;
  Rng rng(34);
  for (int i = 0; i < 20; ++i) {
    auto rep = random_block_rep<S>(pres_heisenberg(), heisenberg_block<S>, 3, rng);
    auto h = cohomology(rep);
    auto k = rep.generator_count();
    auto d = rep.dim();
    for (Mat<S> const* m : {&h.z1, &h.b1, &h.h1}) {
      if (m->cols() > 0) {
        CHECK((m->adjoint() * *m - Mat<S>::Identity(m->cols(), m->cols())).norm() < 1e-10);
      }
    }
    if (h.b1.cols() > 0 && h.h1.cols() > 0) {
      CHECK((h.b1.adjoint() * h.h1).norm() < 1e-10);
    }
    // Every basis cocycle passes verification; every coboundary is a cocycle.
    for (auto const& b : h.cocycles(h.z1, k, d)) {
      CHECK(verify_cocycle(rep, b).cocycle_ok);
    }
    auto db = coboundary(rep, random_vector<S>(static_cast<Eigen::Index>(d), rng));
    CHECK(verify_cocycle(rep, db).cocycle_ok);
    Vec<S> flat = db.flatten();
    CHECK((flat - h.z1 * (h.z1.adjoint() * flat)).norm() < 1e-9 * (1.0 + flat.norm()));
    CHECK(Cocycle<S>::unflatten(flat, k, d) == db);
  }
}

TEST_CASE("fixed space and commutant", "[repcoh]") {
  Rng  rng(35);
  auto rep = assemble<complex_t>(pres_f2(),
                                 {{random_unitary<complex_t>(2, rng), random_unitary<complex_t>(2, rng)},
                                  {scalar_mat<complex_t>(1.0), scalar_mat<complex_t>(1.0)},
                                  {scalar_mat<complex_t>(1.0), scalar_mat<complex_t>(1.0)}},
                                 rng);
  auto fix = fixed_subspace(rep);
  CHECK(fix.cols() == 2);
  for (std::size_t s = 0; s < 2; ++s) {
    CHECK((rep.generator(s) * fix - fix).norm() < 1e-10);
  }
  // Irreducible 2-block plus a 2-dim trivial block: 1 + 4 commuting matrices.
  auto comm = commutant_basis(rep);
  CHECK(comm.size() == 5);
  for (auto const& t : comm) {
    for (std::size_t s = 0; s < 2; ++s) {
      CHECK((t * rep.generator(s) - rep.generator(s) * t).norm() < 1e-10);
    }
  }
  // Over the reals a rotation block has a 2-dim commutant.
  Mat<double> rot = rotation<double>(2.0 * std::numbers::pi / 3.0);
  CHECK(commutant_basis(Representation<double>(pres_c3(), 2, {rot})).size() == 2);
  CHECK(fixed_subspace(Representation<double>(pres_c3(), 2, {rot})).cols() == 0);
}

TEST_CASE("commutant acts on H1", "[repcoh]") {
  // Trivial 2-dim rep of Z: the commutant is all of M_2 and acts on
  // H^1 = C^2 by matrix multiplication.
  Representation<complex_t> rep(pres_z(), 2, {Mat<complex_t>::Identity(2, 2)});
  auto                       h = cohomology(rep);
  auto                       comm = commutant_basis(rep);
  REQUIRE(h.dim_h1() == 2);
  auto act = commutant_action_on_h1(rep, h, comm);
  REQUIRE(act.size() == 4);
  for (std::size_t i = 0; i < comm.size(); ++i) {
    CHECK((act[i] - h.h1.adjoint() * comm[i] * h.h1).norm() < 1e-12);
  }
}
