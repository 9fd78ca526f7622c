#include <doctest.h>

#include "actube/anchors.hpp"
#include "actube/sim.hpp"
#include "oracles.hpp"

using namespace actube;

namespace {

TransitionMatrix random_stochastic(SimRng& rng, int level, double density) {
  const int n = kGridSides[static_cast<std::size_t>(level - 1)] * kGridSides[static_cast<std::size_t>(level - 1)];
  std::vector<std::vector<double>> a(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
  for (auto& row : a) {
    if (rng.uniform() < 0.2) continue;
    for (auto& v : row)
      if (rng.uniform() < density) v = rng.uniform(0.1, 1.0);
  }
  return row_normalize(oracle::from_dense(level, a));
}

}  // namespace

TEST_CASE("anchor census") {
  const auto pyr = generate_grids(300, 300);
  REQUIRE(pyr.size() == 6);
  const std::vector<std::size_t> expect{5776, 2166, 600, 150, 36, 4};
  for (std::size_t k = 0; k < 6; ++k) CHECK(pyr[k].anchors.size() == expect[k]);
  CHECK(total_anchors(pyr) == 8732);
  CHECK(pyr[1].offset == 5776);
  CHECK(pyr[5].offset == 8728);
  CHECK_THROWS(generate_grids(0, 10));
}

TEST_CASE("anchors are centred on their cells") {
  const auto pyr = generate_grids(320, 240);
  const auto& g = pyr[3];
  const Box& a = g.anchor(5 * 1 + 2, 0);
  CHECK((a.x_min + a.x_max) / 2 == doctest::Approx(2.5 * 320 / 5));
  CHECK((a.y_min + a.y_max) / 2 == doctest::Approx(1.5 * 240 / 5));
  CHECK(a.width() == doctest::Approx(a.height()));
  CHECK(a.width() == doctest::Approx((0.1 + 0.8 * 3 / 5.0) * 240));
}

TEST_CASE("gt matching agrees with the exhaustive pair scan") {
  const auto pyr = generate_grids(320, 240);
  SimRng rng(31);
  for (int trial = 0; trial < 12; ++trial) {
    const double w = rng.uniform(10, 200);
    const double h = rng.uniform(10, 200);
    const double x = rng.uniform(0, 320 - w);
    const double y = rng.uniform(0, 240 - h);
    const double dx = rng.uniform(-20, 20);
    const GtMicroTube gt{1, 0, 1, {x, y, x + w, y + h}, {x + dx, y, x + dx + w, y + h}};
    const auto got = match_gt(gt, pyr);
    const auto expect = oracle::match(gt, pyr);
    CHECK(got.level == expect.level);
    CHECK(got.slot == expect.slot);
    CHECK(got.cell_from == expect.cell_from);
    CHECK(got.cell_to == expect.cell_to);
    CHECK(got.anchor == expect.anchor);
    CHECK(got.overlap == doctest::Approx(expect.overlap));
  }
}

TEST_CASE("estimated transitions are row stochastic counts") {
  const auto pyr = generate_grids(320, 240);
  std::vector<GtMicroTube> gts;
  for (int k = 0; k < 4; ++k) gts.push_back({1, k, 2, {100, 100, 140, 140}, {100, 100, 140, 140}});
  gts.push_back({1, 9, 2, {100, 100, 140, 140}, {180, 100, 220, 140}});
  const auto counts = count_transitions(gts, pyr);
  const auto probs = estimate_transitions(gts, pyr);
  REQUIRE(probs.size() == 6);
  double total = 0.0;
  for (const auto& m : counts) total += m.probs.sum();
  CHECK(total == doctest::Approx(5.0));
  for (const auto& m : probs) {
    CHECK(m.delta == 2);
    for (int i = 0; i < m.cells(); ++i) {
      const double s = m.row_sum(i);
      CHECK((s == doctest::Approx(1.0) || s == 0.0));
    }
  }
  const auto m = match_gt(gts[0], pyr);
  CHECK(probs[static_cast<std::size_t>(m.level - 1)].at(m.cell_from, m.cell_from) >= 0.8 - 1e-12);

  std::vector<GtMicroTube> mixed = gts;
  mixed[0].delta = 1;
  CHECK_THROWS_AS(count_transitions(mixed, pyr), TransitionError);
  CHECK_THROWS_AS(count_transitions({}, pyr), TransitionError);
}

TEST_CASE("two-step composition equals the explicit two-hop sum") {
  SimRng rng(37);
  for (int level : {4, 5, 6}) {
    const auto a = random_stochastic(rng, level, 0.3);
    const auto got = oracle::dense(compose(a, 2).matrix);
    const auto expect = oracle::two_hop(oracle::dense(a));
    for (std::size_t i = 0; i < got.size(); ++i)
      for (std::size_t j = 0; j < got.size(); ++j) CHECK(got[i][j] == doctest::Approx(expect[i][j]).epsilon(1e-12));
  }
}

TEST_CASE("composition identities") {
  SimRng rng(41);
  const auto a = random_stochastic(rng, 4, 0.25);
  const auto lhs = oracle::dense(compose(a, 5).matrix);
  const auto a2 = compose(a, 2).matrix;
  const auto a3 = compose(a, 3).matrix;
  TransitionMatrix prod = a2;
  prod.probs = a2.probs * a3.probs;
  const auto rhs = oracle::dense(prod);
  const auto pow = oracle::dense(compose(a2, 3).matrix);
  const auto a6 = oracle::dense(compose(a, 6).matrix);
  for (std::size_t i = 0; i < lhs.size(); ++i)
    for (std::size_t j = 0; j < lhs.size(); ++j) {
      CHECK(lhs[i][j] == doctest::Approx(rhs[i][j]).epsilon(1e-12));
      CHECK(pow[i][j] == doctest::Approx(a6[i][j]).epsilon(1e-12));
    }
  CHECK(compose(a, 5).matrix.delta == 5);
  CHECK_THROWS_AS(compose(a, 0), TransitionError);
}

TEST_CASE("composed rows keep their mass unless they enter empty rows") {
  SimRng rng(43);
  const auto a = random_stochastic(rng, 5, 0.3);
  const auto res = compose(a, 3);
  for (int i = 0; i < a.cells(); ++i) {
    const double before = a.row_sum(i);
    const double after = res.matrix.row_sum(i);
    CHECK(after <= before + 1e-12);
    CHECK(before - after == doctest::Approx(res.dropped_mass[static_cast<std::size_t>(i)]).epsilon(1e-9));
  }
  const auto id = identity_transitions();
  for (const auto& m : id) {
    const auto r = compose(m, 4);
    CHECK(oracle::dense(r.matrix) == oracle::dense(m));
  }
}

TEST_CASE("thresholding matches a dense scan") {
  SimRng rng(47);
  const auto a = random_stochastic(rng, 4, 0.4);
  const auto d = oracle::dense(a);
  for (double theta : {0.0, 0.05, 0.2, 0.5, 1.0}) {
    std::vector<CellPair> expect;
    for (std::size_t i = 0; i < d.size(); ++i)
      for (std::size_t j = 0; j < d.size(); ++j)
        if (d[i][j] > 0.0 && d[i][j] >= theta) expect.push_back({4, static_cast<int>(i), static_cast<int>(j)});
    CHECK(threshold_transitions(a, theta) == expect);
    const auto b = oracle::dense(binarize(a, theta));
    for (const auto& p : expect) CHECK(b[static_cast<std::size_t>(p.i)][static_cast<std::size_t>(p.j)] == 1.0);
    CHECK(binarize(a, theta).probs.nonZeros() == static_cast<long>(expect.size()));
  }
  CHECK_THROWS_AS(threshold_transitions(a, 1.5), TransitionError);
}

TEST_CASE("augmentation masks") {
  TransitionMatrix m = oracle::from_dense(4, std::vector<std::vector<double>>(25, std::vector<double>(25, 0.0)));
  m.probs.coeffRef(0, 1) = 0.5;
  m.probs.makeCompressed();

  const auto diag = oracle::dense(augment(m, AugmentMode::diagonal));
  for (std::size_t i = 0; i < 25; ++i) CHECK(diag[i][i] == 1.0);
  CHECK(diag[0][1] == 0.5);

  const auto nb = oracle::dense(augment(m, AugmentMode::neighbors));
  CHECK(nb[12][6] == 1.0);
  CHECK(nb[12][18] == 1.0);
  CHECK(nb[12][0] == 0.0);
  CHECK(nb[0][1] == 1.0);

  const auto off = oracle::dense(augment(m, AugmentMode::relative_offsets, 0.1));
  CHECK(off[12][13] == 1.0);
  CHECK(off[4][5] == 0.0);
  CHECK(off[3][4] == 1.0);
  CHECK(parse_augment_mode("neighbors") == AugmentMode::neighbors);
  CHECK_THROWS_AS(parse_augment_mode("nope"), TransitionError);
}

TEST_CASE("cyclic permutation returns to the identity") {
  const int n = 9;
  std::vector<std::vector<double>> p(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)][static_cast<std::size_t>((i + 1) % n)] = 1.0;
  const auto a = oracle::from_dense(5, p);
  CHECK(oracle::dense(compose(a, 1).matrix) == p);
  const auto full = oracle::dense(compose(a, n).matrix);
  for (int i = 0; i < n; ++i) CHECK(full[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] == 1.0);
  CHECK(compose(a, n).matrix.probs.nonZeros() == n);
}

TEST_CASE("threshold then offset augmentation is idempotent") {
  SimRng rng(53);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_stochastic(rng, 4, 0.05);
    const double theta = 0.2;
    const auto once = augment(binarize(a, theta), AugmentMode::relative_offsets, theta);
    const auto twice = augment(binarize(once, theta), AugmentMode::relative_offsets, theta);
    CHECK(oracle::dense(once) == oracle::dense(twice));
  }
}
