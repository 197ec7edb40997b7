#include <doctest.h>

#include <algorithm>
#include <map>
#include <tuple>

#include "qsadapt/rng.hpp"
#include "qsadapt/severity_heap.hpp"
#include "support.hpp"

using namespace qsa;
using namespace qsa::queue;

namespace {

AnomalyEvent ev(std::uint64_t id, double severity, double arrival = 0.0) {
  AnomalyEvent e;
  e.id = id;
  e.severity = severity;
  e.arrival_time = arrival;
  return e;
}

// Independent ordering used as the oracle: a plain sort on the documented key.
void oracle_sort(std::vector<AnomalyEvent>& v) {
  auto key = [](const AnomalyEvent& e) { return std::make_tuple(-e.severity, e.arrival_time, e.id); };
  std::sort(v.begin(), v.end(),
            [&](const AnomalyEvent& a, const AnomalyEvent& b) { return key(a) < key(b); });
}

}  // namespace

TEST_CASE("extracts the most severe event") {
  SeverityHeap h;
  h.insert(ev(1, 5));
  h.insert(ev(2, 30));
  h.insert(ev(3, 12));
  CHECK(h.peek_max().severity == 30);
  CHECK(h.extract_max().severity == 30);
  CHECK(h.size() == 2);
}

TEST_CASE("empty heap errors") {
  SeverityHeap h;
  h.insert(ev(1, 5));
  h.extract_max();
  CHECK(test::error_code_of([&] { h.extract_max(); }) == ErrorCode::EmptyQueue);
  CHECK(test::error_code_of([&] { h.peek_max(); }) == ErrorCode::EmptyQueue);
  CHECK(test::error_code_of([&] { h.remove_lowest(); }) == ErrorCode::EmptyQueue);
  CHECK(test::error_code_of([&] { h.remove(7); }) == ErrorCode::NotFound);
}

TEST_CASE("duplicate ids are refused") {
  SeverityHeap h;
  h.insert(ev(1, 5));
  CHECK(test::error_code_of([&] { h.insert(ev(1, 9)); }) == ErrorCode::InvalidArgument);
  CHECK(h.size() == 1);
}

TEST_CASE("ties break on arrival then id") {
  SeverityHeap h;
  h.insert(ev(9, 10, 2.0));
  h.insert(ev(4, 10, 1.0));
  h.insert(ev(3, 10, 2.0));
  CHECK(h.extract_max().id == 4);
  CHECK(h.extract_max().id == 3);
  CHECK(h.extract_max().id == 9);
}

TEST_CASE("lowest event is found and removed") {
  SeverityHeap h;
  for (std::uint64_t i = 1; i <= 20; ++i) h.insert(ev(i, static_cast<double>((i * 7) % 20)));
  const auto low = h.peek_lowest();
  CHECK(low.severity == 0);
  CHECK(h.remove_lowest().id == low.id);
  CHECK(h.valid());
  CHECK(h.peek_lowest().severity == 1);
}

TEST_CASE("1000 random events come out in sorted order") {
  Rng rng(4);
  SeverityHeap h;
  std::vector<AnomalyEvent> all;
  for (std::uint64_t i = 1; i <= 1000; ++i) {
    all.push_back(ev(i, std::floor(rng.uniform(0, 50)), std::floor(rng.uniform(0, 100))));
    h.insert(all.back());
  }
  oracle_sort(all);
  for (const auto& want : all) CHECK(h.extract_max().id == want.id);
}

TEST_CASE("property: random insert/extract/remove matches a sorted-multiset oracle") {
  Rng rng(12345);
  for (int trial = 0; trial < 300; ++trial) {
    SeverityHeap h;
    std::map<std::uint64_t, AnomalyEvent> live;
    std::uint64_t next = 1;
    for (int op = 0; op < 200; ++op) {
      const double u = rng.uniform();
      if (u < 0.5 || live.empty()) {
        auto e = ev(next++, static_cast<double>(rng.uniform_int(0, 9)),
                    static_cast<double>(rng.uniform_int(0, 20)));
        live[e.id] = e;
        h.insert(e);
      } else if (u < 0.75) {
        std::vector<AnomalyEvent> v;
        for (auto& [id, e] : live) v.push_back(e);
        oracle_sort(v);
        const auto got = h.extract_max();
        REQUIRE(got.id == v.front().id);
        live.erase(got.id);
      } else {
        auto it = live.begin();
        std::advance(it, rng.uniform_int(0, static_cast<std::int64_t>(live.size()) - 1));
        CHECK(h.remove(it->first).id == it->first);
        live.erase(it);
        REQUIRE(h.valid());
      }
      REQUIRE(h.size() == live.size());
    }
  }
}

TEST_CASE("clear empties the heap") {
  SeverityHeap h;
  h.insert(ev(1, 1));
  h.clear();
  CHECK(h.empty());
  CHECK_FALSE(h.contains(1));
  h.insert(ev(1, 1));
  CHECK(h.contains(1));
}
