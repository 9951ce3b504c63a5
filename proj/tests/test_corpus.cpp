#include <doctest.h>

#include <set>

#include "hsd/corpus.hpp"
#include "hsd/errors.hpp"
#include "hsd/forum_text.hpp"
#include "support.hpp"

using namespace hsd;
namespace fs = std::filesystem;
using namespace hsd::corpus;

namespace {

std::vector<RawGermevalRecord> germeval_records(std::size_t other, std::size_t abuse,
                                                std::size_t insult, std::size_t profanity) {
  std::vector<RawGermevalRecord> out;
  auto add = [&](std::size_t n, const char* coarse, const char* fine) {
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back({"g" + std::to_string(out.size()), "text", coarse, fine});
    }
  };
  add(other, "OTHER", "OTHER");
  add(abuse, "OFFENSE", "ABUSE");
  add(insult, "OFFENSE", "INSULT");
  add(profanity, "OFFENSE", "PROFANITY");
  return out;
}

Dataset labeled(std::size_t no_hate, std::size_t hate) {
  Dataset ds{"x", {}};
  for (std::size_t i = 0; i < no_hate + hate; ++i) {
    ds.examples.push_back({"e" + std::to_string(i), "t", i < no_hate ? Label::NoHate : Label::Hate, "x"});
  }
  return ds;
}

}  // namespace

TEST_CASE("relabel_stormfront maps the four raw labels") {
  const std::vector<RawStormfrontRecord> recs{
      {"a", "x", "skip"}, {"b", "y", "hate"}, {"c", "z", "relation"}, {"d", "w", "noHate"}};
  const auto ds = relabel_stormfront(recs);
  REQUIRE(ds.size() == 4);
  CHECK(ds[0].label == Label::NoHate);
  CHECK(ds[1].label == Label::Hate);
  CHECK(ds[2].label == Label::Hate);
  CHECK(ds[3].label == Label::NoHate);
  CHECK(ds[2].id == "c");
  CHECK(ds[2].text == "z");
}

TEST_CASE("relabel_stormfront rejects an unknown label by id") {
  const std::vector<RawStormfrontRecord> recs{{"a", "x", "hate"}, {"bad-7", "y", "spam"}};
  CHECK_THROWS_WITH_AS(relabel_stormfront(recs), doctest::Contains("bad-7"), ValidationError);
}

TEST_CASE("relabel_stormfront on the full label counts") {
  std::vector<RawStormfrontRecord> recs;
  auto add = [&](std::size_t n, const char* label) {
    for (std::size_t i = 0; i < n; ++i) recs.push_back({std::to_string(recs.size()), "t", label});
  };
  add(9488, "noHate");
  add(1196, "hate");
  add(168, "relation");
  add(92, "skip");
  const auto counts = class_counts(relabel_stormfront(recs));
  CHECK(counts.no_hate == 9580);
  CHECK(counts.hate == 1364);
}

TEST_CASE("relabel_germeval") {
  SUBCASE("official test counts") {
    const auto counts = class_counts(relabel_germeval(germeval_records(2330, 773, 381, 48)));
    CHECK(counts.no_hate == 2759);
    CHECK(counts.hate == 773);
  }
  SUBCASE("abuse is hate") {
    const auto ds = relabel_germeval({{"1", "t", "OFFENSE", "ABUSE"}, {"2", "t", "OFFENSE", "INSULT"}});
    CHECK(ds[0].label == Label::Hate);
    CHECK(ds[1].label == Label::NoHate);
  }
  SUBCASE("empty input") { CHECK(relabel_germeval({}).empty()); }
  SUBCASE("unknown fine label") {
    CHECK_THROWS_WITH_AS(relabel_germeval({{"g-42", "t", "OFFENSE", "RUDE"}}),
                         doctest::Contains("g-42"), ValidationError);
  }
  SUBCASE("deterministic and text preserving") {
    const auto recs = germeval_records(5, 3, 2, 1);
    const auto a = relabel_germeval(recs);
    const auto b = relabel_germeval(recs);
    CHECK(format_tsv(a) == format_tsv(b));
    for (std::size_t i = 0; i < recs.size(); ++i) {
      CHECK(a[i].id == recs[i].id);
      CHECK(a[i].text == recs[i].text);
    }
  }
}

TEST_CASE("split_german takes the last 809 examples as dev") {
  const auto ds = relabel_germeval(germeval_records(3321, 1022, 595, 71));
  REQUIRE(ds.size() == 5009);
  const auto split = split_german(ds);
  CHECK(split.train.size() == 4200);
  CHECK(split.dev.size() == 809);
  CHECK(split.train.examples.back().id == ds[4199].id);
  CHECK(split.dev[0].id == ds[4200].id);
  CHECK_THROWS_AS(split_german(labeled(800, 9)), ValidationError);
  CHECK_NOTHROW(split_german(labeled(801, 9)));
}

TEST_CASE("GermEval fixture reproduces the German split counts") {
  test::TempDir dir("corpus-de");
  const auto f = test::write_germeval_fixture(dir.path());
  const auto train = relabel_germeval(read_germeval(f.train));
  const auto test_set = relabel_germeval(read_germeval(f.test));
  CHECK(class_counts(train) == ClassCounts{3987, 1022});
  const auto split = split_german(train);
  CHECK(class_counts(split.train) == ClassCounts{3345, 855});
  CHECK(class_counts(split.dev) == ClassCounts{642, 167});
  CHECK(class_counts(test_set) == ClassCounts{2759, 773});
}

TEST_CASE("split_english on the Stormfront fixture") {
  test::TempDir dir("corpus-en");
  const auto csv = test::write_stormfront_fixture(dir.path());
  const auto full = relabel_stormfront(read_stormfront(csv));
  REQUIRE(class_counts(full) == ClassCounts{9580, 1364});

  const auto split = split_english(full, {}, 42);
  CHECK(class_counts(split.test) == ClassCounts{427, 63});
  CHECK(class_counts(split.dev) == ClassCounts{134, 20});
  CHECK(class_counts(split.train) == ClassCounts{9018, 1281});
  CHECK(class_counts(split.excluded) == ClassCounts{1, 0});

  std::set<std::string> seen;
  for (const Dataset* part : {&split.train, &split.dev, &split.test, &split.excluded}) {
    for (const auto& ex : *part) CHECK(seen.insert(ex.id).second);
  }
  CHECK(seen.size() == full.size());

  const auto again = split_english(full, {}, 42);
  CHECK(again.train.ids() == split.train.ids());
  CHECK(again.test.ids() == split.test.ids());
  const auto other = split_english(full, {}, 43);
  CHECK(other.test.ids() != split.test.ids());

  EnglishSplitCounts remainder;
  remainder.train.reset();
  CHECK(class_counts(split_english(full, remainder, 42).train) == ClassCounts{9019, 1281});

  EnglishSplitCounts too_many;
  too_many.test = {427, 2000};
  CHECK_THROWS_WITH_AS(split_english(full, too_many, 1), doctest::Contains("short by"), ValidationError);
}

TEST_CASE("read_germeval rejects malformed lines") {
  test::TempDir dir("corpus-bad");
  write_file(dir / "a.tsv", "only text\tOTHER\n");
  CHECK_THROWS_AS(read_germeval(dir / "a.tsv"), ValidationError);
}

TEST_CASE("TSV round trip keeps awkward text") {
  Dataset ds{"rt", {{"1", "tab\there\nnewline \\ back", Label::Hate, "rt"},
                    {"2", "Straße über alles", std::nullopt, "rt"},
                    {"3", "", Label::NoHate, "rt"}}};
  const auto back = parse_tsv(format_tsv(ds), "rt");
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(back[i] == ds[i]);
  CHECK(escape_field("a\tb") == "a\\tb");
  CHECK(unescape_field(escape_field("x\\ny")) == "x\\ny");
}

TEST_CASE("class_counts") {
  CHECK(class_counts(Dataset{}) == ClassCounts{0, 0});
  Dataset ds{"u", {{"1", "t", std::nullopt, ""}}};
  CHECK_THROWS_AS(class_counts(ds), ValidationError);
}

TEST_CASE("forum corrections") {
  CHECK(apply_forum_corrections("Das tut mir\nleid, wirklich.") == "Das tut mir leid, wirklich.");
  CHECK(apply_forum_corrections("Tut mir   leid") == "Tut mir leid");
  CHECK(apply_forum_corrections("tut mir leidlich") == "tut mir leidlich");
  CHECK(apply_forum_corrections("ich glaube, d a\xC3\x9F es so ist") ==
        "ich glaube, da\xC3\x9F es so ist");
  CHECK(apply_forum_corrections("und a\xC3\x9F") == "und a\xC3\x9F");
}

TEST_CASE("forum preprocessing") {
  const std::string article = "Das ist ein Zitat aus der Zeitung und " + std::string(1500, 'a') + ".";
  const std::vector<std::string> posts{
      "Es tut mir\nleid, aber das ist nicht richtig.",
      article,
      "Danke",
      "- das ist ein Punkt der Liste\n1. und noch ein Punkt hier",
      "This is clearly an English sentence with the words.",
      "Das ist ein Satz der mitten im",
      "Der Satz ist nicht fertig,",
      "Die Party war echt nice und der DJ hat abgeliefert.",
      "Frage: Wie geht es dir heute?\nAntwort: Mir geht es gut, danke der Nachfrage.",
  };
  std::vector<DroppedLine> dropped;
  const auto ds = preprocess_forum_text(posts, {}, &dropped);
  std::vector<std::string> texts;
  for (const auto& ex : ds) texts.push_back(ex.text);

  CHECK(std::count(texts.begin(), texts.end(), "Es tut mir leid, aber das ist nicht richtig.") == 1);
  CHECK(std::count(texts.begin(), texts.end(), "Die Party war echt nice und der DJ hat abgeliefert.") == 1);
  CHECK(std::count(texts.begin(), texts.end(), "Frage: Wie geht es dir heute?") == 1);
  CHECK(std::count(texts.begin(), texts.end(), "Antwort: Mir geht es gut, danke der Nachfrage.") == 1);
  CHECK(std::count(texts.begin(), texts.end(), "Das ist ein Satz der mitten im") == 1);

  auto reason_of = [&](std::size_t post) -> std::optional<DropReason> {
    for (const auto& d : dropped) {
      if (d.line.post == post) return d.reason;
    }
    return std::nullopt;
  };
  CHECK(reason_of(1) == DropReason::TooLong);
  CHECK(reason_of(2) == DropReason::TooShort);
  CHECK(reason_of(3) == DropReason::BulletList);
  CHECK(reason_of(4) == DropReason::NonGerman);
  CHECK(reason_of(6) == DropReason::CutOff);
  CHECK(ds.size() + dropped.size() == 11);
  for (const auto& ex : ds) CHECK_FALSE(ex.label.has_value());
}

TEST_CASE("forum preprocessing yields nothing for invalid UTF-8") {
  CHECK(preprocess_forum_text({std::string("Das ist \xFF kaputt und so")}).empty());
}

TEST_CASE("language predicates") {
  CHECK(looks_german("Wir wollen das nicht."));
  CHECK_FALSE(looks_german("We do not want that here."));
  CHECK(looks_german("Das Meeting ist cancelled, sorry."));
  CHECK(has_non_ascii_german("Schöne Grüße"));
  CHECK_FALSE(has_non_ascii_german("plain ascii words only"));
}
