#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "ccsim/ccsim.hpp"

using namespace ccsim;

TEST_CASE("old placement trivial quotas") {
  SUBCASE("M = N caches every packet") {
    SystemParams p{3, 4, 4, 4, 0};
    auto config = place_old(p, 11);
    for (int u = 0; u < 3; ++u)
      for (int n = 0; n < 4; ++n)
        for (int f = 0; f < 4; ++f) CHECK(config.cached_by(u, {n, f}));
  }
  SUBCASE("K=1, N=2, M=1, F=2 stores one packet per file") {
    SystemParams p{1, 2, 1, 2, 0};
    auto config = place_old(p, 3);
    CHECK(config.cached_count(0, 0) == 1);
    CHECK(config.cached_count(0, 1) == 1);
  }
  SUBCASE("M = 0 is the empty-cache baseline") {
    SystemParams p{2, 3, 0, 3, 0};
    auto config = place_old(p, 3);
    for (int u = 0; u < 2; ++u) CHECK(config.cached_total(u) == 0);
  }
}

TEST_CASE("old placement refuses a fractional quota") {
  SystemParams p{2, 3, 1, 4, 0};  // M*F/N = 4/3
  CHECK_THROWS_AS(place_old(p, 1), InstanceError);
}

TEST_CASE("old placement marginal frequency matches M/N") {
  // Pr[packet in cache] = M/N = 0.25, estimated over seeds for a fixed slot.
  SystemParams p{4, 8, 2, 8, 0};
  const int seeds = 10000;
  int hits = 0;
  for (int s = 0; s < seeds; ++s) {
    auto config = place_old(p, static_cast<std::uint64_t>(s));
    if (config.cached_by(0, {0, 0})) ++hits;
  }
  double freq = static_cast<double>(hits) / seeds;
  CHECK(std::abs(freq - 0.25) <= 0.01);
}

TEST_CASE("random placements are reproducible and seed-sensitive") {
  SystemParams p{4, 8, 2, 8, 0};
  auto a = place_old(p, 1234);
  auto b = place_old(p, 1234);
  auto c = place_old(p, 1235);
  CHECK(a.store == b.store);
  CHECK(a.store != c.store);

  SystemParams q{4, 8, 4, 2 * 6, 6};
  auto d = place_new(q, 99);
  auto e = place_new(q, 99);
  auto f = place_new(q, 100);
  CHECK(d.store == e.store);
  CHECK(d.store != f.store);
}

TEST_CASE("new placement trivial cases") {
  SUBCASE("group size 1 caches everything") {
    SystemParams p{3, 4, 4, 5, 5};  // ceil(N/M) = 1
    auto config = place_new(p, 8);
    for (int u = 0; u < 3; ++u) CHECK(config.cached_total(u) == 4 * 5);
  }
  SUBCASE("one packet per (file, group)") {
    SystemParams p{8, 16, 4, 4 * 100, 100};
    auto config = place_new(p, 8);
    for (int u = 0; u < 8; ++u)
      for (int n = 0; n < 16; ++n) {
        CHECK(config.cached_count(u, n) == 100);
        // exactly one packet inside every group of four
        for (int g = 0; g < 100; ++g) {
          int in_group = 0;
          for (int j = 0; j < 4; ++j)
            if (config.cached_by(u, {n, g * 4 + j})) ++in_group;
          CHECK(in_group == 1);
        }
      }
  }
  SUBCASE("flat layout is a mode mismatch") {
    SystemParams p{2, 4, 2, 8, 0};
    CHECK_THROWS_AS(place_new(p, 1), InstanceError);
  }
  SUBCASE("M = 0 has no group size") {
    SystemParams p{2, 4, 0, 8, 4};
    CHECK_THROWS_AS(place_new(p, 1), InstanceError);
  }
}

TEST_CASE("new placement exact-storage-set probabilities") {
  // Pr[packet stored exactly at S] = (1/4)^|S| * (3/4)^(8-|S|); estimate over
  // F' * seeds groups and compare within 3 standard errors.
  SystemParams p{8, 16, 4, 4 * 250, 250};
  const int seeds = 40;
  const UserSet target01 = UserSet::single(0).with(1);

  long long exact_01 = 0, exact_empty = 0;
  long long cells = 0;
  for (int s = 0; s < seeds; ++s) {
    auto config = place_new(p, 1000 + static_cast<std::uint64_t>(s));
    for (int g = 0; g < p.groups_per_file; ++g) {
      // first packet of each group of file 0
      const UserSet& holders = config.users({0, g * 4});
      ++cells;
      if (holders == target01) ++exact_01;
      if (holders.empty()) ++exact_empty;
    }
  }
  double p01 = std::pow(0.25, 2) * std::pow(0.75, 6);
  double p_empty = std::pow(0.75, 8);
  auto within3se = [&](long long hits, double prob) {
    double freq = static_cast<double>(hits) / static_cast<double>(cells);
    double se = std::sqrt(prob * (1 - prob) / static_cast<double>(cells));
    return std::abs(freq - prob) <= 3 * se;
  };
  CHECK(within3se(exact_01, p01));
  CHECK(within3se(exact_empty, p_empty));
}

TEST_CASE("new placement picks are independent across groups") {
  // chi-square over the joint picks of groups 0 and 1 for one (user, file)
  SystemParams p{2, 2, 1, 2 * 2, 2};  // c = 2, two groups
  const int seeds = 8000;
  std::map<std::pair<int, int>, int> counts;
  for (int s = 0; s < seeds; ++s) {
    auto config = place_new(p, static_cast<std::uint64_t>(s));
    int pick0 = config.cached_by(0, {0, 0}) ? 0 : 1;
    int pick1 = config.cached_by(0, {0, 2}) ? 0 : 1;
    ++counts[{pick0, pick1}];
  }
  double expected = seeds / 4.0;
  double chi2 = 0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      double diff = counts[{a, b}] - expected;
      chi2 += diff * diff / expected;
    }
  CHECK(chi2 < 11.34);  // chi-square df=3 at the 1% level
}

TEST_CASE("deterministic grouped placement structure") {
  SUBCASE("g=2, ceil(N/M)=4 gives K'=8, F=28, quota N/4") {
    SystemParams p{8, 16, 4, 28, 0};
    auto [config, grouping] = place_deterministic_grouped(p, 2);
    CHECK(grouping.group_size == 8);
    CHECK(grouping.groups() == 1);
    for (int n = 0; n < 16; ++n)
      for (int f = 0; f < 28; ++f) CHECK(config.users({n, f}).count() == 2);
    for (int u = 0; u < 8; ++u)
      CHECK(config.cached_total(u) == 16LL * 7);  // N * C(K'-1, g-1)
  }
  SUBCASE("two groups of 8 users, contiguous blocks") {
    SystemParams p{16, 16, 4, 28, 0};
    auto [config, grouping] = place_deterministic_grouped(p, 2);
    CHECK(grouping.groups() == 2);
    CHECK(grouping.group_of(7) == 0);
    CHECK(grouping.group_of(8) == 1);
    UserSet low8 = UserSet::first_n(8);
    for (int n = 0; n < 16; ++n)
      for (int f = 0; f < 28; ++f) {
        const UserSet& holders = config.users({n, f});
        CHECK((holders & low8).count() == 2);  // g users within each group
        CHECK(holders.count() == 4);
      }
  }
  SUBCASE("degenerate single-user groups at ceil(N/M)=1, g=1") {
    SystemParams p{2, 2, 2, 1, 0};
    auto [config, grouping] = place_deterministic_grouped(p, 1);
    CHECK(grouping.group_size == 1);
    CHECK(config.users({0, 0}).count() == 2);  // one user per group, all groups
  }
  SUBCASE("divisibility and packet-count mismatches") {
    SystemParams p{10, 16, 4, 28, 0};  // K' = 8 does not divide 10
    CHECK_THROWS_AS(place_deterministic_grouped(p, 2), InstanceError);
    SystemParams q{8, 16, 4, 27, 0};  // F != C(8, 2)
    CHECK_THROWS_AS(place_deterministic_grouped(q, 2), InstanceError);
  }
}

TEST_CASE("both random schemes look like the symmetric placement class") {
  // three properties, checked statistically: marginal Pr[stored] = M/N,
  // independence across caches, independence across files
  const int seeds = 6000;
  auto probe = [&](auto&& place, const SystemParams& p) {
    int u0 = 0, u1 = 0, both_users = 0, f0 = 0, both_files = 0;
    for (int s = 0; s < seeds; ++s) {
      auto config = place(p, static_cast<std::uint64_t>(s));
      bool a = config.cached_by(0, {0, 0});
      bool b = config.cached_by(1, {0, 0});
      bool c = config.cached_by(0, {1, 0});
      u0 += a;
      u1 += b;
      both_users += a && b;
      f0 += c;
      both_files += a && c;
    }
    double pu0 = static_cast<double>(u0) / seeds;
    double pu1 = static_cast<double>(u1) / seeds;
    double pf0 = static_cast<double>(f0) / seeds;
    double marginal = p.cache_files / p.num_files;
    double se = std::sqrt(marginal * (1 - marginal) / seeds);
    CHECK(std::abs(pu0 - marginal) <= 4 * se);
    CHECK(std::abs(pu1 - marginal) <= 4 * se);
    double joint_se = 4 * std::sqrt(marginal * marginal / seeds);
    CHECK(std::abs(static_cast<double>(both_users) / seeds - pu0 * pu1) <= joint_se);
    CHECK(std::abs(static_cast<double>(both_files) / seeds - pu0 * pf0) <= joint_se);
  };
  probe([](const SystemParams& p, std::uint64_t s) { return place_old(p, s); },
        SystemParams{4, 8, 2, 8, 0});
  probe([](const SystemParams& p, std::uint64_t s) { return place_new(p, s); },
        SystemParams{4, 8, 2, 4 * 3, 3});
}

TEST_CASE("colex subset indexing is a bijection") {
  int n = 8, k = 3;
  auto subset = first_subset(k);
  long long rank = 0;
  do {
    CHECK(colex_rank(subset) == rank);
    CHECK(colex_unrank(rank, k, n) == subset);
    ++rank;
  } while (next_subset_colex(subset, n));
  CHECK(rank == binomial(n, k));
}
