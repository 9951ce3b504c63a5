#include <doctest.h>

#include <cstdio>
#include <sys/wait.h>

#include "hsd/dataset.hpp"
#include "support.hpp"

using namespace hsd;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run hsd_cli(const std::string& args) {
  const std::string cmd = std::string(HSD_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) r.out += buf;
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(hsd_cli("").code == 2);
  CHECK(hsd_cli("frobnicate").code == 2);
  CHECK(hsd_cli("prepare").code == 2);
  CHECK(hsd_cli("prepare --config /no/such.ini").code == 2);
  CHECK(hsd_cli("encode --emb x --max-len 0").code == 2);
  CHECK(hsd_cli("--help").code == 0);
}

TEST_CASE("prepare, sample and report") {
  test::TempDir dir("cli");
  const auto w = test::write_world(dir.path());
  const auto cfg = w.write_config("c.ini", "crosslingual");

  const auto prep = hsd_cli("prepare --config " + q(cfg) + " --out " + q(dir / "o"));
  CHECK(prep.code == 0);
  CHECK(prep.out.find("DE-TRAIN            3345     855") != std::string::npos);
  CHECK(prep.out.find("DE-DEV               642     167") != std::string::npos);
  CHECK(prep.out.find("DE-TEST             2759     773") != std::string::npos);
  CHECK(fs::exists(dir / "o/data/EN-TRAIN.tsv"));

  const auto s = hsd_cli("sample --input " + q(dir / "o/data/DE-TRAIN.tsv") +
                         " --spec 'ratio=7:1 mode=oversample seed=1' --out " + q(dir / "s"));
  CHECK(s.code == 0);
  CHECK(class_counts(read_tsv(dir / "s/DE-OS[7:1].tsv")) == ClassCounts{5985, 855});

  write_file(dir / "bad.ini", w.config("crosslingual", "[cnn]\nmystery = 3\n"));
  CHECK(hsd_cli("prepare --config " + q(dir / "bad.ini")).code == 2);
  CHECK(hsd_cli("sample --input " + q(dir / "o/data/DE-TRAIN.tsv") + " --spec 'ratio=1:9000 mode=undersample' --out " +
                q(dir / "s")).code == 2);
  CHECK(hsd_cli("report --out " + q(dir / "o")).code == 2);
  // Output that cannot be written is a runtime failure.
  write_file(dir / "blocker", "x");
  CHECK(hsd_cli("prepare --config " + q(cfg) + " --out " + q(dir / "blocker/sub")).code == 1);
}

TEST_CASE("encode") {
  test::TempDir dir("cli-encode");
  write_file(dir / "v.vec", "2 2\nwir 1 0\nhier 0 1\n");
  const auto r = hsd_cli("encode --emb " + q(dir / "v.vec") + " --max-len 8 --text 'Wir wollen keine Russen hier!'");
  CHECK(r.code == 0);
  CHECK(r.out == "wir wollen keine russen hier !\t2 1 1 1 3 1 0 0\t6\n");
}
