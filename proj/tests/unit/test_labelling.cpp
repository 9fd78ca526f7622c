#include <doctest.h>

#include "actube/labelling.hpp"
#include "actube/sim.hpp"
#include "oracles.hpp"

using namespace actube;

TEST_CASE("labelling examples") {
  const PottsParams p{1.0, 0.4};
  const std::vector<double> s{0.1, 0.9, 0.9, 0.2, 0.8, 0.9, 0.1};
  const auto l = potts_labelling(s, p);
  CHECK(l == std::vector<Label>{0, 1, 1, 1, 1, 1, 0});
  CHECK(potts_labelling(s, {1.0, 0.0}) == std::vector<Label>{0, 1, 1, 0, 1, 1, 0});
  CHECK(potts_labelling(s, {1.0, 10.0}) == std::vector<Label>{1, 1, 1, 1, 1, 1, 1});
  CHECK(potts_labelling(std::vector<double>{}, p).empty());
  CHECK(potts_labelling(std::vector<double>{0.5}, p) == std::vector<Label>{0});
}

TEST_CASE("labelling matches exhaustive search") {
  SimRng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const int T = rng.uniform_int(1, 12);
    std::vector<double> s;
    for (int t = 0; t < T; ++t) s.push_back(rng.uniform_int(0, 8) / 8.0);
    const double alpha = std::vector<double>{0.0, 0.125, 0.25, 1.0, 3.0}[static_cast<std::size_t>(rng.uniform_int(0, 4))];
    const PottsParams p{1.0, alpha};
    CHECK(potts_labelling(s, p) == oracle::best_labelling(s, p.switch_cost()));
  }
}

TEST_CASE("positive runs") {
  const std::vector<Label> l{1, 1, 0, 0, 1, 0, 1};
  CHECK(positive_runs(l) == std::vector<std::pair<int, int>>{{0, 1}, {4, 4}, {6, 6}});
  CHECK(positive_runs(std::vector<Label>{0, 0}).empty());
}

TEST_CASE("online labeller with a long lookback equals offline") {
  SimRng rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    const int T = rng.uniform_int(1, 30);
    std::vector<double> s;
    for (int t = 0; t < T; ++t) s.push_back(rng.uniform());
    const PottsParams p{1.0, rng.uniform(0.0, 2.0)};
    OnlineLabeller ol(p, T);
    for (double v : s) ol.push(v);
    CHECK(ol.committed().empty());
    CHECK(ol.labels() == potts_labelling(s, p));
  }
}

TEST_CASE("online labeller commits once past the lookback") {
  const PottsParams p{1.0, 0.5};
  OnlineLabeller ol(p, 3);
  const std::vector<double> s{0.9, 0.9, 0.1, 0.1, 0.1, 0.9};
  for (std::size_t t = 0; t < s.size(); ++t) {
    ol.push(s[t]);
    CHECK(ol.size() == t + 1);
    CHECK(ol.committed_size() == (t + 1 > 3 ? t + 1 - 3 : 0));
  }
  const auto committed = ol.committed();
  ol.push(0.9);
  CHECK(std::equal(committed.begin(), committed.end(), ol.committed().begin()));
  CHECK_THROWS(OnlineLabeller(p, 0));
}

TEST_CASE("trellis primitives") {
  const auto c0 = potts_first(0.7);
  CHECK(c0.value[0] == doctest::Approx(0.3));
  CHECK(c0.value[1] == doctest::Approx(0.7));
  CHECK(best_final_label(c0) == 1);
  const auto c1 = potts_advance(c0, 0.5, 1.0);
  CHECK(c1.value[0] == doctest::Approx(0.8));
  CHECK(c1.back[0] == 0);
  CHECK(c1.value[1] == doctest::Approx(1.2));
  CHECK(c1.back[1] == 1);
  CHECK(best_final_label(TrellisColumn{{1.0, 1.0}, {0, 0}}) == 0);
}
