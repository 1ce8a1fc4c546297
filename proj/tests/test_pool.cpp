#include <gtest/gtest.h>

#include <atomic>
#include <stdexcept>

#include "mchull/pool.hpp"

using namespace mchull;

TEST(Pool, ResultsStoredByIndex) {
  for (int jobs : {1, 2, 4}) {
    const auto out = parallel_map<int>(100, jobs, [](std::size_t i) { return static_cast<int>(i * i); });
    ASSERT_EQ(out.size(), 100u);
    for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], static_cast<int>(i * i));
  }
}

TEST(Pool, EveryItemRunsOnce) {
  std::atomic<int> calls{0};
  parallel_map<int>(57, 3, [&](std::size_t) { return ++calls; });
  EXPECT_EQ(calls.load(), 57);
}

TEST(Pool, EmptyAndResolveJobs) {
  EXPECT_TRUE(parallel_map<int>(0, 4, [](std::size_t) { return 1; }).empty());
  EXPECT_EQ(resolve_jobs(3), 3);
  EXPECT_GE(resolve_jobs(0), 1);
}

TEST(Pool, ExceptionPropagates) {
  auto fail_at = [](std::size_t i) -> int {
    if (i == 13) throw std::runtime_error("item 13");
    return 0;
  };
  EXPECT_THROW(parallel_map<int>(40, 1, fail_at), std::runtime_error);
  EXPECT_THROW(parallel_map<int>(40, 3, fail_at), std::runtime_error);
}
