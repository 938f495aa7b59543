#include <doctest.h>

#include <filesystem>
#include <regex>
#include <sstream>
#include <unistd.h>

#include "cli.hpp"
#include "keystore.hpp"
#include "tcred/testing.hpp"

using namespace tcred;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result tcred_run(std::vector<std::string> args) {
  args.insert(args.begin(), "tcred");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("tcred-cli-" + name + "-" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& leaf) const { return (path / leaf).string(); }
};

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

// keygen t-of-n with q attributes, then aggregate-keys over the first t.
std::string make_store(const TempDir& dir, int t, int n, int q) {
  const auto store = dir / "store";
  const auto r = tcred_run({"keygen", "--threshold", std::to_string(t), "--authorities", std::to_string(n),
                            "--attributes", std::to_string(q), "--out", store});
  REQUIRE(r.code == cli::kOk);
  REQUIRE(tcred_run({"aggregate-keys", "--store", store}).code == cli::kOk);
  return store;
}

}  // namespace

TEST_CASE("attribute parsing") {
  testing::SeededRng rng(80);
  CHECK(cli::parse_attribute("0") == Scalar());
  CHECK(cli::parse_attribute("42") == Scalar::from_u64(42));
  CHECK(cli::parse_attribute("0x2a") == Scalar::from_u64(42));
  CHECK(cli::parse_attribute("0x02A") == Scalar::from_u64(42));
  // The group order itself reduces to zero; one less is -1.
  const std::string order = "52435875175126190479447740508185965837690552500527637822603658699938581184513";
  CHECK(cli::parse_attribute(order) == Scalar());
  CHECK(cli::parse_attribute("52435875175126190479447740508185965837690552500527637822603658699938581184512") ==
        Scalar() - Scalar::from_u64(1));
  CHECK(cli::parse_attribute("str:alice") == cli::parse_attribute("str:alice"));
  CHECK_FALSE(cli::parse_attribute("str:alice") == cli::parse_attribute("str:bob"));
  CHECK_FALSE(cli::parse_attribute("random", rng) == cli::parse_attribute("random", rng));

  const std::vector<std::string> bad_inputs = {
      "", "-1", "1.5", "12a", "0x", "0xzz", "0x73eda753299d7d483339d80809a1d80553bda402fffe5bfeffffffff00000001",
      order + "0"};
  for (const auto& bad : bad_inputs)
    CHECK_THROWS_AS(cli::parse_attribute(bad), cli::UsageError);
}

TEST_CASE("keygen output and store layout") {
  const TempDir dir("keygen");
  const auto store = dir / "store";
  const auto r = tcred_run({"keygen", "--threshold", "2", "--authorities", "3", "--attributes", "2", "--out", store});
  REQUIRE(r.code == cli::kOk);
  CHECK(std::regex_search(r.out, std::regex("^params [0-9a-f]{64}\nwrote sk-1 vk-1\nwrote sk-2 vk-2\nwrote sk-3 vk-3\n$")));
  CHECK(r.err.find("warning:") == 0);
  for (const char* f : {"store.json", "params", "sk-1", "sk-2", "sk-3", "vk-1", "vk-2", "vk-3"})
    CHECK(fs::exists(fs::path(store) / f));
  CHECK((fs::status(fs::path(store) / "sk-1").permissions() & fs::perms::others_read) == fs::perms::none);

  const auto ks = cli::KeyStore::open(store);
  CHECK(ks.threshold == 2);
  CHECK(ks.authorities == 3);
  CHECK(ks.params.q() == 2);

  // Refuses to overwrite, and rejects impossible thresholds.
  CHECK(tcred_run({"keygen", "--threshold", "2", "--authorities", "3", "--attributes", "2", "--out", store}).code ==
        cli::kUsage);
  CHECK(tcred_run({"keygen", "--threshold", "4", "--authorities", "3", "--attributes", "2", "--out", dir / "x"}).code ==
        cli::kUsage);
  CHECK(tcred_run({"keygen", "--threshold", "0", "--authorities", "3", "--attributes", "2", "--out", dir / "x"}).code ==
        cli::kUsage);
}

TEST_CASE("aggregate-keys is independent of the subset") {
  const TempDir dir("aggkeys");
  const auto store = dir / "store";
  REQUIRE(tcred_run({"keygen", "--threshold", "2", "--authorities", "3", "--attributes", "1", "--out", store}).code ==
          cli::kOk);
  const auto a = tcred_run({"aggregate-keys", "--store", store, "--indices", "1,2"});
  const auto b = tcred_run({"aggregate-keys", "--store", store, "--indices", "2,3"});
  REQUIRE(a.code == cli::kOk);
  CHECK(std::regex_match(a.out, std::regex("vk [0-9a-f]{64}\n")));
  CHECK(a.out == b.out);
  CHECK(tcred_run({"aggregate-keys", "--store", store, "--indices", "1"}).code != cli::kOk);
  CHECK(tcred_run({"aggregate-keys", "--store", store, "--indices", "1,9"}).code != cli::kOk);
}

TEST_CASE("issue, aggregate, show, verify") {
  const TempDir dir("lifecycle");
  const auto store = make_store(dir, 2, 3, 3);

  const auto issued = tcred_run({"issue-local", "--store", store, "--attr", "str:alice", "--attr", "1990",
                                 "--attr", "random", "--public", "2", "--out", dir / "issued"});
  REQUIRE(issued.code == cli::kOk);
  CHECK(issued.out == "gathered 2 partial credentials\n");

  REQUIRE(tcred_run({"aggregate", "--store", store, "--in", dir / "issued", "--out", dir / "cred"}).code == cli::kOk);
  const auto shown = tcred_run({"show", "--store", store, "--credential", dir / "cred", "--attributes",
                                dir / "issued/attributes", "--reveal", "2", "--out", dir / "show"});
  REQUIRE(shown.code == cli::kOk);

  SUBCASE("valid show prints the disclosed attributes") {
    const auto v = tcred_run({"verify", "--store", store, "--show", dir / "show", "--require", "2"});
    CHECK(v.code == cli::kOk);
    CHECK(v.out == "VALID\nm2 = " + to_hex(Scalar::from_u64(1990).to_bytes()) + "\n");
    CHECK(v.err.empty());
  }
  SUBCASE("policy demands an undisclosed attribute") {
    const auto v = tcred_run({"verify", "--store", store, "--show", dir / "show", "--require", "1"});
    CHECK(v.code == cli::kRejected);
    CHECK(v.out == "INVALID\n");
    CHECK(v.err.find("error: ") == 0);
  }
  SUBCASE("every flipped byte is INVALID") {
    const Bytes good = wire::read_file(dir / "show");
    for (std::size_t i = 0; i < good.size(); i += 7) {
      Bytes bad = good;
      bad[i] ^= 0x20;
      wire::write_file(dir / "bad", bad);
      const auto v = tcred_run({"verify", "--store", store, "--show", dir / "bad"});
      REQUIRE(v.code == cli::kRejected);
      CHECK(v.out == "INVALID\n");
    }
  }
  SUBCASE("show from another store") {
    const TempDir other("lifecycle-other");
    const auto store2 = make_store(other, 2, 3, 3);
    const auto v = tcred_run({"verify", "--store", store2, "--show", dir / "show"});
    CHECK(v.code == cli::kRejected);
    CHECK(v.out == "INVALID\n");
  }
  SUBCASE("aggregation below the threshold") {
    for (const auto& e : fs::directory_iterator(dir / "issued"))
      if (e.path().filename().string().starts_with("partial-")) {
        fs::remove(e.path());
        break;
      }
    const auto r = tcred_run({"aggregate", "--store", store, "--in", dir / "issued", "--out", dir / "cred2"});
    CHECK(r.code == cli::kRejected);
    CHECK(r.err.find("error: threshold-unreachable") == 0);
  }
}

TEST_CASE("issue-local rejects bad attribute flags") {
  const TempDir dir("badattrs");
  const auto store = make_store(dir, 1, 1, 2);
  const auto base = std::vector<std::string>{"issue-local", "--store", store, "--out", dir / "o"};
  auto with = [&](std::vector<std::string> extra) {
    auto args = base;
    args.insert(args.end(), extra.begin(), extra.end());
    return tcred_run(args).code;
  };
  CHECK(with({"--attr", "1"}) == cli::kUsage);                               // too few
  CHECK(with({"--attr", "1", "--attr", "2", "--attr", "3"}) == cli::kUsage);  // too many
  CHECK(with({"--attr", "1", "--attr", "nope"}) == cli::kUsage);
  CHECK(with({"--attr", "1", "--attr", "2", "--public", "3"}) == cli::kUsage);
  CHECK(with({"--attr", "1", "--attr", "2", "--public", "1,2"}) == cli::kOk);  // all public is allowed
}

TEST_CASE("petition commands") {
  const TempDir dir("petition");
  const auto store = make_store(dir, 2, 3, 2);
  auto citizen = [&](const std::string& name) {
    const auto out = dir / name;
    REQUIRE(tcred_run({"issue-local", "--store", store, "--attr", "random", "--attr", "7", "--public", "2", "--out",
                       out})
                .code == cli::kOk);
    REQUIRE(tcred_run({"aggregate", "--store", store, "--in", out, "--out", out + "/cred"}).code == cli::kOk);
    return out;
  };
  const auto state = dir / "state";
  const auto init = tcred_run({"petition", "init", "--store", store, "--id", "library-hours", "--option", "yes",
                               "--option", "no", "--out", state});
  REQUIRE(init.code == cli::kOk);
  CHECK(std::regex_match(init.out, std::regex("petition library-hours g_s [0-9a-f]{96}\n")));
  CHECK(tcred_run({"petition", "init", "--store", store, "--id", "x", "--option", "a", "--out", state}).code ==
        cli::kUsage);

  auto sign = [&](const std::string& who, const std::string& option, const std::string& out) {
    return tcred_run({"petition", "sign", "--state", state, "--credential", who + "/cred", "--attributes",
                      who + "/attributes", "--key-position", "1", "--option", option, "--out", out});
  };
  const auto alice = citizen("alice");
  const auto bob = citizen("bob");

  const auto s1 = sign(alice, "yes", dir / "p1");
  REQUIRE(s1.code == cli::kOk);
  CHECK(std::regex_match(s1.out, std::regex("zeta [0-9a-f]{96}\n")));
  const auto submit = tcred_run({"petition", "submit", "--state", state, "--packet", dir / "p1"});
  CHECK(submit.code == cli::kOk);
  CHECK(submit.out == "accepted\n");

  REQUIRE(sign(alice, "no", dir / "p2").code == cli::kOk);
  const auto dup = tcred_run({"petition", "submit", "--state", state, "--packet", dir / "p2"});
  CHECK(dup.code == cli::kRejected);
  CHECK(dup.err.find("error: double-sign") == 0);

  REQUIRE(sign(bob, "no", dir / "p3").code == cli::kOk);
  CHECK(tcred_run({"petition", "submit", "--state", state, "--packet", dir / "p3"}).code == cli::kOk);

  const auto unknown = sign(bob, "maybe", dir / "p4");
  CHECK(unknown.code == cli::kRejected);
  CHECK(unknown.err.find("error: unknown-option") == 0);

  const auto tally = tcred_run({"petition", "tally", "--state", state});
  CHECK(tally.code == cli::kOk);
  CHECK(tally.out == "yes\t1\nno\t1\ntotal\t2\n");
}

TEST_CASE("bench output") {
  const auto plain = tcred_run({"bench", "--op", "unblind", "--iters", "3"});
  CHECK(plain.code == cli::kOk);
  CHECK(std::regex_match(plain.out, std::regex("unblind: 3 iters, mean [0-9.]+ ms, stddev [0-9.]+ ms\n")));
  const auto csv = tcred_run({"bench", "--op", "verify", "--iters", "2", "--csv"});
  CHECK(csv.code == cli::kOk);
  CHECK(std::regex_match(csv.out, std::regex("op,iters,mean_ms,stddev_ms\nverify,2,[0-9]+\\.[0-9]{4},[0-9]+\\.[0-9]{4}\n")));
  CHECK(count_lines(csv.out) == 2);
  CHECK(tcred_run({"bench", "--op", "verify", "--iters", "0"}).code == cli::kUsage);
  CHECK(tcred_run({"bench", "--op", "dance", "--iters", "1"}).code == cli::kUsage);
}

TEST_CASE("usage errors") {
  CHECK(tcred_run({}).code == cli::kUsage);
  CHECK(tcred_run({"frobnicate"}).code == cli::kUsage);
  CHECK(tcred_run({"keygen"}).code == cli::kUsage);
  CHECK(tcred_run({"--help"}).code == cli::kOk);
  const TempDir dir("usage");
  CHECK(tcred_run({"verify", "--store", dir / "missing", "--show", dir / "x"}).code == cli::kUsage);
  CHECK(tcred_run({"serve", "--config", dir / "missing.json"}).code == cli::kUsage);
}
