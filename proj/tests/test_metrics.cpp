// Copyright 2026 The cpsflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>

#include "cpsflow/metrics.hpp"
#include "support.hpp"

using namespace cpsflow;
namespace m = cpsflow::metrics;
using V = std::vector<double>;

TEST_CASE("regression metric examples") {
  CHECK(m::mae(V{1, 2, 3}, V{1, 2, 3}) == 0.0);
  CHECK(m::mae(V{0, 0}, V{1, 3}) == 2.0);
  CHECK(m::mse(V{0, 0}, V{1, 3}) == 5.0);
  CHECK(m::mse(V{1, 2}, V{1, 2}) == 0.0);
  CHECK(m::mse(V{2}, V{5}) == 9.0);
  CHECK(m::max_error(V{0, 0}, V{1, 3}) == 3.0);
  CHECK(m::max_error(V{4, 4}, V{4, 4}) == 0.0);
  CHECK(m::max_error(V{5}, V{2}) == 3.0);
  CHECK(m::r2(V{1, 2, 3}, V{1, 2, 3}) == 1.0);
  CHECK(m::r2(V{2, 2, 2}, V{1, 2, 3}) == 0.0);
  CHECK(m::r2(V{1, 1}, V{1, 1}) == 1.0);
}

TEST_CASE("metric errors") {
  CHECK(testing::error_code_of([] { m::mae(V{1}, V{1, 2}); }) == ErrorCode::LengthMismatch);
  CHECK(testing::error_code_of([] { m::mse(V{}, V{}); }) == ErrorCode::EmptyInput);
  CHECK(testing::error_code_of([] { m::r2(V{1, 2}, V{1, 1}); }) == ErrorCode::ConstantActuals);
  CHECK(testing::error_code_of([] { m::accuracy(V{0.5}, V{1}); }) == ErrorCode::NonBinaryValue);
  CHECK(testing::error_code_of([] { m::precision(V{1, 0}, V{1}); }) == ErrorCode::LengthMismatch);
  CHECK(testing::error_code_of([] { m::f_beta(V{1}, V{1}, 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("classification metric examples") {
  const V same{1, 0, 1};
  CHECK(m::accuracy(same, same) == 1.0);
  CHECK(m::precision(same, same).value == 1.0);
  CHECK(m::recall(same, same).value == 1.0);
  CHECK(m::f_beta(same, same).value == 1.0);

  const V p{1, 1, 0, 0}, a{1, 0, 1, 0};
  CHECK(m::precision(p, a).value == 0.5);
  CHECK(m::recall(p, a).value == 0.5);
  CHECK(m::accuracy(p, a) == 0.5);
  CHECK(m::f_beta(p, a, 1.0).value == 0.5);

  const V zeros{0, 0}, ones{1, 1};
  const auto prec = m::precision(zeros, ones);
  CHECK(prec.value == 0.0);
  CHECK(prec.zero_division);
  CHECK(m::recall(zeros, ones).value == 0.0);
  CHECK_FALSE(m::recall(zeros, ones).zero_division);
  CHECK(m::recall(ones, zeros).zero_division);
  CHECK(m::f_beta(zeros, ones).value == 0.0);
}

TEST_CASE("oracle equivalence: bit-for-bit on random inputs") {
  testing::Rng rng(41);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = rng.between(1, 20);
    const V p = testing::random_values(rng, n), a = testing::random_values(rng, n);
    CHECK(m::mae(p, a) == testing::oracle::mae(p, a));
    CHECK(m::mse(p, a) == testing::oracle::mse(p, a));
    CHECK(m::max_error(p, a) == testing::oracle::max_error(p, a));
    if (n > 1) CHECK(m::r2(p, a) == testing::oracle::r2(p, a));

    const V pb = testing::random_binary(rng, n), ab = testing::random_binary(rng, n);
    const double beta = rng.uniform(0.1, 3.0);
    CHECK(m::accuracy(pb, ab) == testing::oracle::accuracy(pb, ab));
    CHECK(m::precision(pb, ab).value == testing::oracle::precision(pb, ab));
    CHECK(m::recall(pb, ab).value == testing::oracle::recall(pb, ab));
    CHECK(m::f_beta(pb, ab, beta).value == testing::oracle::f_beta(pb, ab, beta));
  }
}

TEST_CASE("property: metric inequalities and shift invariance") {
  testing::Rng rng(42);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = rng.between(1, 20);
    const V p = testing::random_values(rng, n, -1, 1), a = testing::random_values(rng, n, -1, 1);
    const double mae = m::mae(p, a), mse = m::mse(p, a), mx = m::max_error(p, a);
    CHECK(mae >= 0.0);
    CHECK(mae <= mx + 1e-15);
    CHECK(mae * mae <= mse * (1 + 1e-12) + 1e-300);

    // Shift by a power of two keeps differences exact in this range.
    const double c = 4.0;
    V ps = p, as = a;
    for (auto& x : ps) x += c;
    for (auto& x : as) x += c;
    CHECK(m::mae(ps, as) == doctest::Approx(mae).epsilon(1e-12));
    CHECK(m::mse(ps, as) == doctest::Approx(mse).epsilon(1e-12));
    CHECK(m::max_error(ps, as) == doctest::Approx(mx).epsilon(1e-12));

    const V pb = testing::random_binary(rng, n), ab = testing::random_binary(rng, n);
    CHECK(m::accuracy(pb, ab) == doctest::Approx(1.0 - m::mae(pb, ab)).epsilon(1e-15));
    const double pr = m::precision(pb, ab).value, rc = m::recall(pb, ab).value;
    if (pr > 0 && rc > 0) {
      const double f = m::f_beta(pb, ab, rng.uniform(0.1, 5.0)).value;
      CHECK(f >= std::min(pr, rc) - 1e-15);
      CHECK(f <= std::max(pr, rc) + 1e-15);
    }
  }
}

TEST_CASE("metric registry") {
  CHECK(m::known_metrics().size() == 8);
  CHECK(m::is_known_metric("f_beta"));
  CHECK_FALSE(m::is_known_metric("rmse"));
  CHECK(m::compute({"f_beta", 2.0}, V{1, 1, 0, 0}, V{1, 0, 1, 0}).value == 0.5);
  CHECK(m::compute({"mae"}, V{0, 0}, V{1, 3}).value == 2.0);
  CHECK(testing::error_code_of([] { m::compute({"rmse"}, V{1}, V{1}); }) == ErrorCode::InvalidArgument);
}
