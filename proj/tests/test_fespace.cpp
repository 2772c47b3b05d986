#include <catch2/catch.hpp>
#include <algorithm>
#include <set>

#include "lorfem/fespace.hpp"

using namespace lorfem;

namespace {

CartMesh unit_cube_mesh(int n) {
  return build_cart_mesh(3, {n, n, n}, {0, 0, 0}, {1, 1, 1});
}

}  // namespace

TEST_CASE("global DOF counts") {
  auto m222 = unit_cube_mesh(2);
  CHECK(build_space(SpaceKind::H1, 2, m222).n_dofs == 125);

  auto single = unit_cube_mesh(1);
  CHECK(build_space(SpaceKind::HCurl, 1, single).n_dofs == 12);
  CHECK(build_space(SpaceKind::HDiv, 1, single).n_dofs == 6);
  CHECK(build_space(SpaceKind::L2, 2, single).n_dofs == 8);
  CHECK(build_space(SpaceKind::DG, 2, single).n_dofs == 27);

  // Closed-form counts on a 3x2x1 mesh at p=3.
  auto m = build_cart_mesh(3, {3, 2, 1}, {0, 0, 0}, {3, 2, 1});
  int p = 3;
  auto grid = [&](int a) { return m.counts[a] * p + 1; };
  auto gaps = [&](int a) { return m.counts[a] * p; };
  CHECK(build_space(SpaceKind::H1, p, m).n_dofs == grid(0) * grid(1) * grid(2));
  CHECK(build_space(SpaceKind::HCurl, p, m).n_dofs ==
        gaps(0) * grid(1) * grid(2) + grid(0) * gaps(1) * grid(2) +
            grid(0) * grid(1) * gaps(2));
  CHECK(build_space(SpaceKind::HDiv, p, m).n_dofs ==
        grid(0) * gaps(1) * gaps(2) + gaps(0) * grid(1) * gaps(2) +
            gaps(0) * gaps(1) * grid(2));
  CHECK(build_space(SpaceKind::L2, p, m).n_dofs == m.n_elements() * p * p * p);
}

TEST_CASE("element maps cover all DOFs and share interface DOFs") {
  auto m = build_cart_mesh(3, {2, 1, 1}, {0, 0, 0}, {2, 1, 1});
  for (auto kind : {SpaceKind::H1, SpaceKind::HCurl, SpaceKind::HDiv, SpaceKind::L2}) {
    auto s = build_space(kind, 2, m);
    std::set<int> seen;
    std::vector<int> d0, d1;
    s.element_dofs(0, d0);
    s.element_dofs(1, d1);
    for (int v : d0) {
      REQUIRE(v >= 0);
      REQUIRE(v < s.n_dofs);
      seen.insert(v);
    }
    for (int v : d1) seen.insert(v);
    CHECK(static_cast<int>(seen.size()) == s.n_dofs);

    std::set<int> s0(d0.begin(), d0.end()), s1(d1.begin(), d1.end());
    std::vector<int> shared;
    std::set_intersection(s0.begin(), s0.end(), s1.begin(), s1.end(),
                          std::back_inserter(shared));
    int p = 2;
    int expect = 0;
    if (kind == SpaceKind::H1) expect = (p + 1) * (p + 1);           // nodal face
    if (kind == SpaceKind::HCurl) expect = 2 * p * (p + 1);          // tangential
    if (kind == SpaceKind::HDiv) expect = p * p;                     // normal
    if (kind == SpaceKind::L2) expect = 0;
    CHECK(static_cast<int>(shared.size()) == expect);
  }
}

TEST_CASE("boundary DOF sets") {
  auto single = unit_cube_mesh(1);
  CHECK(build_space(SpaceKind::HCurl, 1, single).boundary_dofs().size() == 12);
  CHECK(build_space(SpaceKind::HDiv, 1, single).boundary_dofs().size() == 6);
  CHECK(build_space(SpaceKind::L2, 3, single).boundary_dofs().empty());

  auto m = unit_cube_mesh(2);
  auto h1 = build_space(SpaceKind::H1, 2, m);
  CHECK(h1.boundary_dofs().size() == 125 - 27);

  // 2D HCurl at p=1 on one element: all 4 tangential edge DOFs.
  auto sq = build_cart_mesh(2, {1, 1, 1}, {0, 0, 0}, {1, 1, 1});
  CHECK(build_space(SpaceKind::HCurl, 1, sq).boundary_dofs().size() == 4);
}

TEST_CASE("constructor guards") {
  auto line = build_cart_mesh(1, {2, 1, 1}, {0, 0, 0}, {1, 1, 1});
  CHECK_THROWS_AS(build_space(SpaceKind::HCurl, 2, line), std::invalid_argument);
  CHECK_THROWS_AS(build_space(SpaceKind::H1, 0, line), std::invalid_argument);
}
