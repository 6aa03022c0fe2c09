#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "wigchar/rng.hpp"
#include "wigchar/stats.hpp"

using namespace wigchar;

// Known-answer vectors from the Random123 distribution (kat_vectors).
TEST(Philox, KnownAnswerZero) {
  const auto out = Philox4x32::encrypt({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerOnes) {
  const auto out = Philox4x32::encrypt({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi) {
  const auto out = Philox4x32::encrypt({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(RandomStream, SameIdSameSequence) {
  const StreamId id{7, 3, StreamPurpose::Increments, 11};
  RandomStream a(id), b(id);
  for (int k = 0; k < 1000; ++k) ASSERT_EQ(a(), b());
  for (int k = 0; k < 1000; ++k) ASSERT_EQ(a.normal(), b.normal());
}

TEST(RandomStream, EveryKeyComponentSeparatesStreams) {
  const StreamId base{7, 3, StreamPurpose::Increments, 11};
  std::vector<StreamId> ids(5, base);
  ids[1].seed = 8;
  ids[2].trial = 4;
  ids[3].purpose = StreamPurpose::Reference;
  ids[4].block = 12;
  std::set<std::uint64_t> first;
  for (const auto& id : ids) {
    RandomStream s(id);
    first.insert(s());
  }
  EXPECT_EQ(first.size(), ids.size());
}

TEST(RandomStream, UniformIsOpenInterval) {
  RandomStream s(StreamId{1, 0, StreamPurpose::Auxiliary, 0});
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double u = s.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_NEAR(sum / n, 0.5, 4.0 / std::sqrt(12.0 * n));
}

TEST(RandomStream, NormalPassesKs) {
  RandomStream s(StreamId{2, 0, StreamPurpose::Auxiliary, 0});
  std::vector<double> xs(50000);
  for (double& x : xs) x = s.normal();
  const KsResult ks = ks_one_sample(xs, [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); });
  EXPECT_GT(ks.p_value, 0.001);
  EXPECT_NEAR(mean(xs), 0.0, 4.0 / std::sqrt(50000.0));
  EXPECT_NEAR(stddev(xs), 1.0, 0.02);
}
