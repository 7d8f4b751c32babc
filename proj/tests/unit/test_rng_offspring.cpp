#include <stdexcept>
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "kbbm/offspring.hpp"
#include "kbbm/rng.hpp"
#include "kbbm/spine.hpp"

using namespace kbbm;

TEST_CASE("philox matches the Random123 known-answer vectors") {
  const auto zero = philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(zero[0] == 0x6627e8d5U);
  CHECK(zero[1] == 0xe169c58dU);
  CHECK(zero[2] == 0xbc57ac4cU);
  CHECK(zero[3] == 0x9b00dbd8U);
  const auto pi = philox4x32({0x243f6a88U, 0x85a308d3U, 0x13198a2eU, 0x03707344U}, {0xa4093822U, 0x299f31d0U});
  CHECK(pi[0] == 0xd16cfe09U);
  CHECK(pi[1] == 0x94fdccebU);
  CHECK(pi[2] == 0x5001e420U);
  CHECK(pi[3] == 0x24126ea1U);
}

TEST_CASE("streams are pure functions of key and position") {
  Stream a(stream_key(42, 1));
  std::vector<std::uint64_t> draws;
  for (int i = 0; i < 10; ++i) draws.push_back(a.next_u64());
  Stream b(stream_key(42, 1), 5);
  for (int i = 5; i < 10; ++i) CHECK(b.next_u64() == draws[i]);
  Stream c(stream_key(43, 1));
  CHECK(c.next_u64() != draws[0]);
  CHECK(std::set<std::uint64_t>(draws.begin(), draws.end()).size() == draws.size());
}

TEST_CASE("uniforms, exponentials and normals have the right moments") {
  Stream s(stream_key(1, 2));
  const int n = 200000;
  double su = 0, se = 0, sn = 0, sn2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    su += u;
    se += s.exponential(2.0);
    const double z = s.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(std::abs(su / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(se / n - 0.5) < 4.0 * 0.5 / std::sqrt(n));
  CHECK(std::abs(sn / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(sn2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("offspring law validation and parsing") {
  CHECK(OffspringLaw::binary().mean() == 2.0);
  CHECK(OffspringLaw::parse("binary").prob(2) == 1.0);
  const auto law = OffspringLaw::parse("0.25,0,0.75");
  CHECK(law.mean() == doctest::Approx(1.5));
  CHECK(law.max_offspring() == 2);
  CHECK(law.prob(7) == 0.0);
  CHECK(OffspringLaw::parse(law.to_string()).probabilities() == law.probabilities());
  CHECK_THROWS_AS(OffspringLaw({0.5, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(OffspringLaw({-0.1, 1.1}), std::invalid_argument);
  CHECK_THROWS_AS(OffspringLaw::parse("0.5,abc"), std::invalid_argument);
  CHECK_THROWS_AS(OffspringLaw::parse(""), std::invalid_argument);
}

TEST_CASE("inverse-CDF sampling hits every atom with the right frequency") {
  const OffspringLaw law({0.1, 0.2, 0.3, 0.4});
  CHECK(law.sample(1e-12) == 0);
  CHECK(law.sample(1.0 - 1e-12) == 3);
  Stream s(99);
  std::vector<int> hist(4, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++hist[law.sample(s.uniform())];
  for (int k = 0; k < 4; ++k) {
    const double p = law.prob(k);
    CHECK(std::abs(hist[k] / double(n) - p) < 4.0 * std::sqrt(p * (1 - p) / n));
  }
}

TEST_CASE("size-biased sampling") {
  auto frequencies = [](const OffspringLaw& law, std::uint64_t seed) {
    Stream s(seed);
    std::vector<long> counts(law.max_offspring() + 1, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[sample_size_biased(law, s)];
    std::vector<double> hist;
    for (long c : counts) hist.push_back(static_cast<double>(c) / n);
    return hist;
  };
  const int n = 100000;

  const auto binary = frequencies(OffspringLaw::binary(), 1);
  CHECK(binary[2] == 1.0);

  const OffspringLaw odd({0.0, 0.5, 0.0, 0.5});
  CHECK(odd.size_biased_prob(1) == doctest::Approx(0.25));
  const auto f = frequencies(odd, 2);
  CHECK(std::abs(f[1] - 0.25) < 4.0 * std::sqrt(0.25 * 0.75 / n));
  CHECK(std::abs(f[3] - 0.75) < 4.0 * std::sqrt(0.25 * 0.75 / n));

  std::vector<double> p(11, 0.0);
  p[0] = 0.9;
  p[10] = 0.1;
  const auto g = frequencies(OffspringLaw(p), 3);
  CHECK(g[10] == 1.0);

  const OffspringLaw mixed({0.2, 0.1, 0.3, 0.15, 0.25});
  const auto h = frequencies(mixed, 4);
  CHECK(h[0] == 0.0);
  for (int k = 1; k <= 4; ++k) {
    const double q = mixed.size_biased_prob(k);
    CHECK(std::abs(h[k] - q) < 4.0 * std::sqrt(q * (1 - q) / n));
  }

  Stream s(5);
  CHECK_THROWS_AS(sample_size_biased(OffspringLaw({1.0}), s), std::invalid_argument);
}
