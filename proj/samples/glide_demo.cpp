// The glide reflection (x, y) -> (x + 1, 2 - y) of the plane: no fixed
// point, yet its axis y = 1 is an invariant line.

#include <iostream>

#include "affirr/affirr.hpp"

using namespace affirr;

int main() {
  auto        z = GroupPresentation::free({"t"});
  Mat<double> m(2, 2);
  m << 1, 0, 0, -1;
  Vec<double> b(2);
  b << 1, 2;
  AffineAction<double> glide(Representation<double>(z, 2, {m}), Cocycle<double>{{b}});

  std::cout << "fixed point: " << (fixed_points(glide) ? "yes" : "none") << "\n";

  auto v = is_irreducible(glide);
  if (v.irreducible) {
    std::cout << "irreducible\n";
    return 0;
  }
  auto const& k = *v.witness_subspace;
  std::cout << "reducible; invariant line through " << k.base.transpose()
            << " along " << k.directions.transpose() << "\n";

  // Twice the glide is a pure translation.
  auto tt = action_evaluate(glide, z.parse_word("t t"));
  std::cout << "t t: linear\n" << tt.linear << "\ntranslation " << tt.translation.transpose()
            << "\n";
}
