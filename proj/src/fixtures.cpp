#include "plumbcalc/fixtures.hpp"

namespace plumbcalc {

const std::vector<Fixture>& fixtures() {
  static const std::vector<Fixture> pack = {
      {"trefoil",
       "right-handed trefoil presented on the E8-style tree with a -1 center",
       "a -3\n"
       "b -2\n"
       "c -1\n"
       "v0 *\n"
       "edges:\n"
       "a c\n"
       "b c\n"
       "v0 c\n"},
      {"unknot",
       "unknot on a single -1 vertex",
       "k -1\n"
       "v0 *\n"
       "edges:\n"
       "v0 k\n"},
      {"rp3",
       "core of the -2 surgery solid torus, two classes on the single vertex",
       "v -2\n"
       "v0 *\n"
       "edges:\n"
       "v0 v\n"},
      {"chain22",
       "length-two -2 chain with the unframed vertex at one end",
       "c -2\n"
       "v -2\n"
       "v0 *\n"
       "edges:\n"
       "c v\n"
       "v0 c\n"},
      {"chain222",
       "length-three -2 chain with the unframed vertex at one end",
       "a -2\n"
       "b -2\n"
       "c -2\n"
       "v0 *\n"
       "edges:\n"
       "a b\n"
       "b c\n"
       "v0 a\n"},
      {"doublecover",
       "knot in the lens space L(3,2) lifting to the trefoil in the double branched cover",
       "p -3\n"
       "q -3\n"
       "r -1\n"
       "x -2\n"
       "v0 *\n"
       "edges:\n"
       "p x\n"
       "q x\n"
       "r x\n"
       "v0 x\n"},
      {"t25",
       "torus knot T(2,5) on a star with legs -2 and -3,-2",
       "l1 -2\n"
       "m1 -3\n"
       "m2 -2\n"
       "z -1\n"
       "v0 *\n"
       "edges:\n"
       "l1 z\n"
       "m1 z\n"
       "m2 m1\n"
       "v0 z\n"},
      {"t34",
       "torus knot T(3,4) on a star with legs -2,-2 and -4",
       "l1 -2\n"
       "l2 -2\n"
       "m1 -4\n"
       "z -1\n"
       "v0 *\n"
       "edges:\n"
       "l1 z\n"
       "l2 l1\n"
       "m1 z\n"
       "v0 z\n"},
      {"twobad",
       "path with two overloaded vertices, the smallest type-2 example here",
       "a -2\n"
       "b -1\n"
       "c -4\n"
       "d -1\n"
       "e -3\n"
       "v0 *\n"
       "edges:\n"
       "a b\n"
       "b c\n"
       "c d\n"
       "d e\n"
       "v0 a\n"},
  };
  return pack;
}

const Fixture* find_fixture(std::string_view name) {
  for (const auto& f : fixtures()) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

PlumbingGraph fixture_graph(std::string_view name) {
  const Fixture* f = find_fixture(name);
  if (!f) throw ParseError("unknown fixture '" + std::string(name) + "'");
  return parse_plumbing(f->text);
}

}  // namespace plumbcalc
