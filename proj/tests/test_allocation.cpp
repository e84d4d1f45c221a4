#include "catch2/catch_amalgamated.hpp"
#include "solon/solon.hpp"

using namespace solon;

TEST_CASE("single group allocation is all ones", "[allocation]") {
  const MechanismConfig cfg = validate_config(4, 1, 2, 2);
  const AllocationMatrix a = build_allocation(cfg);
  CHECK(a.entries == Eigen::MatrixXi::Ones(4, 4));
}

TEST_CASE("block identity structure and redundancy ratio", "[allocation]") {
  const MechanismConfig cfg = validate_config(100, 5, 10, 200);
  const AllocationMatrix a = build_allocation(cfg);
  REQUIRE(a.entries.rows() == 100);
  REQUIRE(a.entries.cols() == 100);
  CHECK(a.entries.sum() == 2000);  // ||A||_0 = P * r
  CHECK(a.entries.sum() / cfg.workers == cfg.redundancy);
  for (int col = 0; col < 100; ++col)
    CHECK(a.entries.col(col).sum() == cfg.redundancy);
  // A[j,k] = 1 iff j and k belong to the same group.
  for (int j = 0; j < 100; j += 7)
    for (int k = 0; k < 100; ++k)
      CHECK(a.entries(j, k) ==
            ((j / cfg.redundancy == k / cfg.redundancy) ? 1 : 0));
}

TEST_CASE("rows agree within a group and have disjoint support across groups",
          "[allocation]") {
  const MechanismConfig cfg = validate_config(12, 2, 2, 8);
  const AllocationMatrix a = build_allocation(cfg);
  const int r = cfg.redundancy;
  for (int g = 0; g < cfg.group_count; ++g)
    for (int k = 1; k < r; ++k)
      CHECK(a.entries.row(g * r) == a.entries.row(g * r + k));
  for (int g1 = 0; g1 < cfg.group_count; ++g1)
    for (int g2 = g1 + 1; g2 < cfg.group_count; ++g2) {
      const auto overlap =
          a.entries.row(g1 * r).cwiseProduct(a.entries.row(g2 * r));
      CHECK(overlap.sum() == 0);
    }
}
