#include <catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace affirr;
using namespace testing_support;

namespace {

  Word random_word(Rng& rng, std::size_t gens, std::size_t len) {
    std::vector<Letter> ls;
    for (std::size_t i = 0; i < len; ++i) {
      ls.push_back({pick(rng, gens), pick(rng, 2) ? 1 : -1});
    }
    return Word(ls);
  }

  CosetTable dihedral_table(GroupPresentation const& p) {
    CosetTable ct;
    ct.cosets = 2;
    ct.transversal = {Word{}, p.parse_word("s")};
    ct.action = {{0, 1}, {1, 0}};
    ct.schreier = {{Word::generator(0), Word::generator(0, -1)}, {Word{}, Word{}}};
    return ct;
  }

  std::vector<std::string> failed_checks(CosetTableReport const& r) {
    std::vector<std::string> out;
    for (auto const& c : r.checks) {
      if (!c.passed) {
        out.push_back(c.name);
      }
    }
    return out;
  }

}  // namespace

TEST_CASE("words are freely reduced on construction", "[presentation]") {
  Word w{{0, 1}, {1, 1}, {1, -1}, {0, -1}};
  CHECK(w.empty());
  Word v{{0, 1}, {1, -1}, {1, -1}};
  CHECK(v.size() == 3);
  CHECK(compose(v, inverse(v)).empty());
  CHECK(compose(Word::generator(1), Word::generator(1, -1)).empty());
}

TEST_CASE("parse and format round-trip", "[presentation]") {
  auto p = pres_heisenberg();
  for (std::string text : {"x", "x^-1 y z", "z z z^-1 y", "1", "y^-1 x^-1"}) {
    Word w = p.parse_word(text);
    CHECK(p.parse_word(p.format_word(w)) == w);
  }
  CHECK(p.format_word(p.parse_word("x y y^-1")) == "x");
  CHECK(p.format_word(Word{}) == "1");
  CHECK(p.parse_word("  x\ty  ") == compose(Word::generator(0), Word::generator(1)));
}

TEST_CASE("malformed words are rejected", "[presentation]") {
  auto p = pres_dihedral();
  CHECK_THROWS_AS(p.parse_word("s^2"), std::invalid_argument);
  CHECK_THROWS_AS(p.parse_word("s^+1"), std::invalid_argument);
  CHECK_THROWS_AS(p.parse_word("q"), std::out_of_range);
  CHECK_THROWS_AS(p.parse_word("1 s"), std::invalid_argument);
  CHECK_THROWS_AS(p.parse_word(""), std::invalid_argument);
  CHECK_THROWS_AS(p.parse_word("   "), std::invalid_argument);
  CHECK_THROWS_AS(p.format_word(Word::generator(5)), std::out_of_range);
}

TEST_CASE("generator names are validated", "[presentation]") {
  CHECK_THROWS_AS(GroupPresentation::free({"a", "a"}), std::invalid_argument);
  CHECK_THROWS_AS(GroupPresentation::free({"1a"}), std::invalid_argument);
  CHECK_THROWS_AS(GroupPresentation::free({"a^"}), std::invalid_argument);
  CHECK_THROWS_AS(GroupPresentation::free({""}), std::invalid_argument);
  CHECK_NOTHROW(GroupPresentation::free({"a_1", "B2"}));
  CHECK_THROWS_AS(GroupPresentation({"a"}, {Word::generator(1)}), std::out_of_range);
  CHECK(pres_f2().index_of("b") == 1);
  CHECK_THROWS_AS(pres_f2().index_of("c"), std::out_of_range);
}

TEST_CASE("substitution is a homomorphism of free groups", "[presentation]") {
  Rng               rng(11);
  std::vector<Word> images{random_word(rng, 3, 4), random_word(rng, 3, 5)};
  for (int i = 0; i < 100; ++i) {
    Word a = random_word(rng, 2, 1 + pick(rng, 6));
    Word b = random_word(rng, 2, 1 + pick(rng, 6));
    CHECK(substitute(compose(a, b), images) == compose(substitute(a, images), substitute(b, images)));
    CHECK(substitute(inverse(a), images) == inverse(substitute(a, images)));
  }
  CHECK_THROWS_AS(substitute(Word::generator(2), images), std::out_of_range);
}

TEST_CASE("random words survive format and parse", "[presentation]") {
  Rng  rng(12);
  auto p = pres_heisenberg();
  for (int i = 0; i < 200; ++i) {
    Word w = random_word(rng, 3, pick(rng, 10));
    CHECK(p.parse_word(p.format_word(w)) == w);
    CHECK(inverse(inverse(w)) == w);
  }
}

TEST_CASE("presentation shapes", "[presentation]") {
  CHECK(is_free_abelian(pres_zk(1)));
  CHECK(is_free_abelian(pres_zk(3)));
  CHECK(is_free_abelian(pres_z()));
  CHECK_FALSE(is_free_abelian(pres_f2()));
  CHECK_FALSE(is_free_abelian(pres_heisenberg()));
  // Commutators written in other rotations or inverted still count.
  auto rotated = GroupPresentation::parse({"a", "b"}, {"b a^-1 b^-1 a"});
  CHECK(is_free_abelian(rotated));

  CHECK(has_abelian_shape(pres_zk(2)));
  auto torsion = GroupPresentation::parse({"a", "b"}, {"a b a^-1 b^-1", "a a"});
  CHECK(has_abelian_shape(torsion));
  CHECK_FALSE(is_free_abelian(torsion));
  CHECK_FALSE(has_abelian_shape(pres_dihedral()));

  CHECK(has_nilpotent_shape(pres_heisenberg()));
  CHECK(has_nilpotent_shape(pres_zk(3)));
  CHECK_FALSE(has_abelian_shape(pres_heisenberg()));
  CHECK_FALSE(has_nilpotent_shape(pres_dihedral()));
  CHECK_FALSE(has_nilpotent_shape(pres_f2()));
  // The tail must use later generators only.
  auto bad = GroupPresentation::parse({"x", "y", "z"},
                                      {"x y x^-1 y^-1 x^-1", "x z x^-1 z^-1", "y z y^-1 z^-1"});
  CHECK_FALSE(has_nilpotent_shape(bad));
}

TEST_CASE("coset table for the infinite dihedral group", "[presentation]") {
  auto p = pres_dihedral();
  auto ct = dihedral_table(p);
  auto rep = validate_coset_table(p, ct);
  CHECK(rep.passed());
  CHECK(act_on_coset(ct, p.parse_word("s t s"), 0) == 0);
  CHECK(act_on_coset(ct, p.parse_word("s t"), 0) == 1);
  CHECK(act_on_coset(ct, p.parse_word("s^-1"), 1) == 0);
}

TEST_CASE("broken coset tables name the failing check", "[presentation]") {
  auto p = pres_dihedral();

  auto shape = dihedral_table(p);
  shape.transversal.pop_back();
  CHECK(failed_checks(validate_coset_table(p, shape)) == std::vector<std::string>{"structure"});

  auto bij = dihedral_table(p);
  bij.action[1] = {0, 0};
  CHECK(failed_checks(validate_coset_table(p, bij)) == std::vector<std::string>{"bijection"});

  // With s fixing both cosets nothing reaches coset 1.
  auto trans = dihedral_table(p);
  trans.action[1] = {0, 1};
  CHECK(failed_checks(validate_coset_table(p, trans)) == std::vector<std::string>{"transitivity", "transversal"});

  auto rel = GroupPresentation::parse({"t", "s"}, {"s s", "s t s t", "t s"});
  CHECK(failed_checks(validate_coset_table(rel, dihedral_table(rel)))
        == std::vector<std::string>{"relators"});

  auto tr = dihedral_table(p);
  tr.transversal[1] = p.parse_word("t");
  CHECK(failed_checks(validate_coset_table(p, tr)) == std::vector<std::string>{"transversal"});
}
