#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "lowrankq/index_space.hpp"

using namespace lowrankq;

TEST_CASE("flatten examples") {
  const Dims d34{3, 4};
  CHECK(flatten(d34, Dims{0, 0}) == 0);
  CHECK(flatten(d34, Dims{1, 2}) == 6);
  CHECK(flatten(Dims{2, 2, 2}, Dims{1, 1, 1}) == 7);
  CHECK_THROWS_AS(flatten(d34, Dims{3, 0}), std::out_of_range);
  CHECK_THROWS_AS(flatten(d34, Dims{0}), std::invalid_argument);
}

TEST_CASE("unflatten examples") {
  CHECK(unflatten(Dims{3, 4}, 6) == Dims{1, 2});
  CHECK(unflatten(Dims{5, 2, 9}, 0) == Dims{0, 0, 0});
  CHECK_THROWS_AS(unflatten(Dims{3, 4}, 12), std::out_of_range);
}

TEST_CASE("flatten and unflatten are inverse") {
  const Dims d{5, 7, 3};
  for (std::size_t f = 0; f < cardinality(d); ++f) CHECK(flatten(d, unflatten(d, f)) == f);

  // exhaustive up to 1e6 cells
  const Dims big{10, 10, 10, 10, 10, 10};
  bool ok = true;
  for (std::size_t f = 0; f < cardinality(big) && ok; ++f) ok = flatten(big, unflatten(big, f)) == f;
  CHECK(ok);

  // randomized beyond
  const Dims acro{10, 10, 10, 10, 26, 26};
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10000; ++i) {
    const std::size_t f = rng() % cardinality(acro);
    CHECK(flatten(acro, unflatten(acro, f)) == f);
  }
  CHECK(cardinality(acro) == 6760000);
}

TEST_CASE("plan shapes") {
  const ReshapePlan pend(2121, 41, PlanMode::flat_near_square);
  CHECK(pend.rows() == 295);
  CHECK(pend.cols() == 295);
  CHECK(pend.padding() == 295 * 295 - 86961);

  const ReshapePlan fl = plan(ProductSpace{{4, 4}, {4}}, PlanMode::classic);
  CHECK(fl.rows() == 16);
  CHECK(fl.cols() == 4);
  CHECK(fl.table_parameters() == 64);
  CHECK(fl.factor_parameters(2) == 40);

  const ReshapePlan sq(4, 4, PlanMode::flat_near_square);
  CHECK(sq.rows() == 4);
  CHECK(sq.cols() == 4);
  CHECK(sq.padding() == 0);

  const ReshapePlan acro(6760000, 3, PlanMode::flat_near_square);
  CHECK(acro.rows() == 4504);
  CHECK(acro.cols() == 4503);
  CHECK(acro.factor_parameters(2) == 18014);

  CHECK(ReshapePlan(2121, 5, PlanMode::classic).table_parameters() == 10605);
  CHECK(ReshapePlan(2121, 41, PlanMode::classic).table_parameters() == 86961);
  CHECK(ReshapePlan(2121, 41, PlanMode::classic).factor_parameters(3) == 6486);
  CHECK(ReshapePlan(2121, 41, PlanMode::classic).factor_parameters(5) == 10810);
  CHECK(pend.factor_parameters(10) == 5900);
}

TEST_CASE("near-square padding is minimal") {
  for (std::size_t ds = 1; ds < 300; ds += 7)
    for (std::size_t da = 1; da < 50; da += 3) {
      const ReshapePlan p(ds, da, PlanMode::flat_near_square);
      const std::size_t total = ds * da;
      CHECK(p.rows() == static_cast<std::size_t>(std::ceil(std::sqrt(double(total)) - 1e-12)));
      CHECK(p.rows() * p.cols() >= total);
      CHECK(p.padding() < p.rows());
    }
}

TEST_CASE("cell_of examples") {
  const ReshapePlan classic(10, 4, PlanMode::classic);
  CHECK(classic.cell_of(3, 1) == Cell{3, 1});
  const ReshapePlan sq(3, 3, PlanMode::flat_near_square);
  CHECK(sq.cell_of(1, 1) == Cell{1, 1});
  CHECK_THROWS_AS(sq.cell_of(3, 0), std::out_of_range);
  CHECK_THROWS_AS(sq.cell_of(0, 3), std::out_of_range);
  CHECK(sq.action_cells(2) == std::vector<Cell>{{2, 0}, {2, 1}, {2, 2}});
  const auto cc = classic.action_cells(5);
  CHECK(cc == std::vector<Cell>{{5, 0}, {5, 1}, {5, 2}, {5, 3}});
  CHECK(sq.cell_unchecked(1, 1) == sq.cell_of(1, 1));
}

TEST_CASE("cell_of is a bijection onto the non-padded cells") {
  for (auto [ds, da] : {std::pair<std::size_t, std::size_t>{7, 3}, {16, 4}, {2121, 41}, {50, 7}}) {
    const ReshapePlan p(ds, da, PlanMode::flat_near_square);
    std::set<std::pair<Index, Index>> seen;
    for (std::size_t s = 0; s < ds; ++s) {
      const auto cells = p.action_cells(s);
      REQUIRE(cells.size() == da);
      for (std::size_t a = 0; a < da; ++a) {
        const Cell c = p.cell_of(s, a);
        CHECK(cells[a] == c);
        CHECK(static_cast<std::size_t>(c.row) * p.cols() + static_cast<std::size_t>(c.col) <
              p.total_cells());
        seen.insert({c.row, c.col});
      }
    }
    CHECK(seen.size() == p.total_cells());
  }
}

TEST_CASE("discretize and bin_center") {
  const GridSpec g{-1.0, 1.0, 2};
  CHECK(discretize(g, -0.5) == 0);
  CHECK(discretize(g, 0.5) == 1);
  CHECK(discretize(g, -7.0) == 0);
  CHECK(discretize(g, 7.0) == 1);
  CHECK(discretize(g, 1.0) == 1);
  CHECK(discretize(g, std::nan("")) == 0);
  const GridSpec fine{-8.0, 8.0, 101};
  for (std::size_t i = 0; i < fine.bins; ++i) CHECK(discretize(fine, bin_center(fine, i)) == i);
  CHECK(bin_center(g, 0) == doctest::Approx(-0.5));
  CHECK_THROWS(GridSpec{1.0, 1.0, 3}.validate());
  CHECK_THROWS(GridSpec{0.0, 1.0, 0}.validate());
}

TEST_CASE("plan mode strings") {
  CHECK(plan_mode_from_string("classic") == PlanMode::classic);
  CHECK(plan_mode_from_string("flat_near_square") == PlanMode::flat_near_square);
  CHECK(to_string(PlanMode::flat_near_square) == "flat_near_square");
  CHECK_THROWS(plan_mode_from_string("diagonal"));
}
