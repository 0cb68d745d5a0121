#include <catch2/catch_amalgamated.hpp>

#include <stdexcept>
#include <string>

#include "cpppkit/parallel.hpp"
#include "cpppkit/random.hpp"

using namespace cpppkit;

TEST_CASE("serial and OpenMP loops fill identical slots", "[parallel]") {
  const std::size_t n = 257;
  auto fill = [n](Execution exec) {
    std::vector<double> out(n);
    for_each_index(n, exec, [&out](std::size_t i) {
      RandomStream rng(42, stream_id(StreamPurpose::replicate, i));
      double s = 0.0;
      for (int t = 0; t < 100; ++t) s += rng.uniform();
      out[i] = s;
    });
    return out;
  };
  const auto serial = fill({Backend::serial, 1});
  CHECK(fill({Backend::openmp, 1}) == serial);
  CHECK(fill({Backend::openmp, 4}) == serial);
  CHECK(fill({Backend::openmp, 16}) == serial);
  CHECK(fill({Backend::serial, 8}) == serial);
}

TEST_CASE("the lowest failing index is rethrown", "[parallel]") {
  for (auto exec : {Execution{Backend::serial, 1}, Execution{Backend::openmp, 4}}) {
    try {
      for_each_index(100, exec, [](std::size_t i) {
        if (i == 17 || i == 63) throw std::runtime_error(std::to_string(i));
      });
      FAIL("no exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "17");
    }
  }
}

TEST_CASE("empty and single-index loops", "[parallel]") {
  int calls = 0;
  for_each_index(0, {Backend::openmp, 4}, [&calls](std::size_t) { ++calls; });
  CHECK(calls == 0);
  for_each_index(1, {Backend::openmp, 4}, [&calls](std::size_t i) { calls += static_cast<int>(i) + 1; });
  CHECK(calls == 1);
}
