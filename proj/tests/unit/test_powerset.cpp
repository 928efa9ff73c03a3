#include <doctest.h>

#include <bit>

#include "cep/catalog.hpp"
#include "cep/classify.hpp"
#include "cep/powerset.hpp"
#include "support.hpp"

using namespace cep;
using namespace cep::testing;

TEST_CASE("power semiring tables") {
  for (const auto& sg : {cyclic_group(2), cyclic_group(3), meet_semilattice2(), symmetric_group(3)}) {
    CAPTURE(sg.name);
    const auto p = build_power(sg);
    CHECK(p.name == "P(" + sg.name + ")");
    CHECK(p.size() == (std::size_t{1} << sg.size()) - 1);
    CHECK(validate_semiring(p).ok());
    for (Elem x = 0; x < p.size(); ++x) {
      CHECK(subset_elem(subset_mask(x)) == x);
      CHECK(p.plus(x, x) == x);
      for (Elem y = 0; y < p.size(); ++y) {
        CHECK(subset_mask(p.plus(x, y)) == (subset_mask(x) | subset_mask(y)));
        std::uint64_t prod = 0;
        for (Elem a = 0; a < sg.size(); ++a)
          for (Elem b = 0; b < sg.size(); ++b)
            if ((subset_mask(x) >> a & 1) && (subset_mask(y) >> b & 1)) prod |= std::uint64_t{1} << sg(a, b);
        CHECK(subset_mask(p.times(x, y)) == prod);
      }
    }
  }
}

TEST_CASE("power semiring element names") {
  const auto p = build_power(cyclic_group(3));
  CHECK(p.elements.front() == "{0}");
  CHECK(p.elements.back() == "{0,1,2}");
  CHECK(subset_mask(p.index_of("{0,2}")) == 0b101);
}

TEST_CASE("power semiring cap") {
  CHECK_THROWS_AS(build_power(cyclic_group(5), 4), DomainError);
  CHECK_THROWS_AS(build_power(FiniteSemigroup{}), DomainError);
  const auto v = power_verdict(cyclic_group(5), 4);
  CHECK_FALSE(v.via_power);
  CHECK(v.direct == Verdict::DET);
  CHECK(v.note.find("cap") != std::string::npos);
}

TEST_CASE("semigroups up to isomorphism") {
  const std::vector<std::size_t> counts{1, 5, 24, 188};
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto all = all_semigroups(n);
    CHECK(all.size() == counts[n - 1]);
    for (const auto& sg : all) {
      CHECK(sg.size() == n);
      CHECK(validate_semigroup(sg).ok());
    }
  }
  CHECK_THROWS_AS(all_semigroups(0), DomainError);
  CHECK_THROWS_AS(all_semigroups(6), DomainError);
}

TEST_CASE("verdict through S and through P(S)") {
  for (std::size_t n = 1; n <= 3; ++n)
    for (const auto& sg : all_semigroups(n)) {
      CAPTURE(sg.name);
      const auto v = power_verdict(sg);
      REQUIRE(v.via_power);
      CHECK(v.agree);
      CHECK((v.direct == Verdict::DET) == (v.local_group && v.solvable));
      if (v.direct == Verdict::DET) CHECK(*v.via_power != Verdict::PComplete);
    }
  const auto s3 = power_verdict(symmetric_group(3));
  CHECK(s3.local_group);
  CHECK(s3.solvable);
  CHECK(s3.direct == Verdict::DET);
  const auto sl = power_verdict(meet_semilattice2());
  CHECK_FALSE(sl.local_group);
  CHECK(sl.direct == Verdict::PComplete);
  CHECK(sl.via_power == Verdict::PComplete);
}
