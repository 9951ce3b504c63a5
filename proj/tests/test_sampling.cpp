#include <doctest.h>

#include <map>
#include <set>

#include "hsd/errors.hpp"
#include "hsd/sampling.hpp"

using namespace hsd;
using namespace hsd::sampling;

namespace {

Dataset labeled(std::size_t no_hate, std::size_t hate, const std::string& name = "base") {
  Dataset ds{name, {}};
  for (std::size_t i = 0; i < no_hate + hate; ++i) {
    ds.examples.push_back({name + "-" + std::to_string(i), "text " + std::to_string(i),
                           i < no_hate ? Label::NoHate : Label::Hate, name});
  }
  return ds;
}

SamplingSpec spec(std::uint32_t n, std::uint32_t h, Mode mode, std::uint64_t seed = 3) {
  return {{n, h}, mode, seed};
}

std::multiset<std::string> ids_of(const Dataset& ds) {
  std::multiset<std::string> out;
  for (const auto& ex : ds) out.insert(ex.id);
  return out;
}

}  // namespace

TEST_CASE("reference sampling rows") {
  const auto en = labeled(9018, 1281, "EN-TRAIN");
  const auto de = labeled(3345, 855, "DE-TRAIN");
  struct Row {
    const Dataset* base;
    SamplingSpec s;
    ClassCounts want;
  };
  const std::vector<Row> rows{
      {&en, spec(2, 1, Mode::Undersample), {2562, 1281}},
      {&en, spec(1, 1, Mode::Undersample), {1281, 1281}},
      {&en, spec(1, 1, Mode::Oversample), {9018, 9018}},
      {&de, spec(7, 1, Mode::Oversample), {5985, 855}},
      {&de, spec(2, 1, Mode::Undersample), {1710, 855}},
      {&de, spec(1, 1, Mode::Undersample), {855, 855}},
      {&de, spec(1, 1, Mode::Oversample), {3345, 3345}},
  };
  for (const auto& r : rows) {
    CAPTURE(format_spec(r.s));
    CHECK(target_counts(class_counts(*r.base), r.s) == r.want);
    CHECK(class_counts(resample(*r.base, r.s)) == r.want);
  }
}

TEST_CASE("oversampling keeps every original and only duplicates") {
  const auto de = labeled(3345, 855);
  const auto out = resample(de, spec(7, 1, Mode::Oversample));
  const auto ids = ids_of(out);
  std::set<std::string> distinct(ids.begin(), ids.end());
  CHECK(distinct.size() == de.size());
  std::map<std::string, const Example*> by_id;
  for (const auto& ex : de) by_id[ex.id] = &ex;
  for (const auto& ex : out) {
    REQUIRE(by_id.contains(ex.id));
    CHECK(ex.text == by_id[ex.id]->text);
    CHECK(ex.label == by_id[ex.id]->label);
  }
  // Only the noHate side grows for 7:1.
  for (const auto& ex : de) {
    if (ex.label == Label::Hate) CHECK(ids.count(ex.id) == 1);
  }
}

TEST_CASE("undersampling removes without duplicating") {
  const auto en = labeled(9018, 1281);
  const auto out = resample(en, spec(2, 1, Mode::Undersample));
  const auto ids = ids_of(out);
  std::set<std::string> distinct(ids.begin(), ids.end());
  CHECK(distinct.size() == out.size());
  std::size_t hate = 0;
  for (const auto& ex : out) hate += ex.label == Label::Hate;
  CHECK(hate == 1281);
}

TEST_CASE("already at target is the identity multiset") {
  const auto ds = labeled(20, 10);
  for (Mode m : {Mode::Oversample, Mode::Undersample}) {
    CHECK(ids_of(resample(ds, spec(2, 1, m))) == ids_of(ds));
  }
}

TEST_CASE("seed determinism") {
  const auto ds = labeled(300, 41);
  const auto a = resample(ds, spec(1, 1, Mode::Oversample, 9));
  const auto b = resample(ds, spec(1, 1, Mode::Oversample, 9));
  const auto c = resample(ds, spec(1, 1, Mode::Oversample, 10));
  CHECK(format_tsv(a) == format_tsv(b));
  CHECK(format_tsv(a) != format_tsv(c));
}

TEST_CASE("non-integral targets take the floor") {
  const auto ds = labeled(10, 7);
  // Oversample 2:1 grows noHate to 14 exactly; 3:2 grows it to floor(7*3/2) = 10, no change.
  CHECK(target_counts(class_counts(ds), spec(2, 1, Mode::Oversample)) == ClassCounts{14, 7});
  CHECK(target_counts(class_counts(ds), spec(3, 2, Mode::Oversample)) == ClassCounts{10, 7});
  CHECK(target_counts(class_counts(labeled(10, 3)), spec(1, 2, Mode::Oversample)) == ClassCounts{10, 20});
  CHECK(target_counts(class_counts(labeled(10, 7)), spec(1, 3, Mode::Oversample)) == ClassCounts{10, 30});
  // Undersample 3:2 on 10/7: Hate is excess, floor(10*2/3) = 6.
  CHECK(target_counts(class_counts(ds), spec(3, 2, Mode::Undersample)) == ClassCounts{10, 6});
  // Undersample 4:3 on 10/3: noHate is excess, floor(3*4/3) = 4.
  CHECK(target_counts(class_counts(labeled(10, 3)), spec(4, 3, Mode::Undersample)) == ClassCounts{4, 3});
}

TEST_CASE("resample errors") {
  CHECK_THROWS_AS(resample(labeled(10, 0), spec(1, 1, Mode::Oversample)), ValidationError);
  CHECK_THROWS_AS(resample(labeled(3, 1), spec(1, 5, Mode::Undersample)), ValidationError);
}

TEST_CASE("spec parsing") {
  const auto s = parse_spec("ratio=7:1 mode=oversample seed=12");
  CHECK(s == spec(7, 1, Mode::Oversample, 12));
  CHECK(parse_spec(format_spec(s)) == s);
  CHECK(sampled_name("DE", s) == "DE-OS[7:1]");
  CHECK(sampled_name("EN", spec(2, 1, Mode::Undersample)) == "EN-US[2:1]");
  CHECK_THROWS_AS(parse_spec("ratio=7 mode=oversample"), ValidationError);
  CHECK_THROWS_AS(parse_spec("ratio=7:1 mode=sideways"), ValidationError);
  CHECK_THROWS_AS(parse_spec("ratio=7:1"), ValidationError);
  CHECK_THROWS_AS(parse_spec("ratio=0:1 mode=oversample"), ValidationError);
}
