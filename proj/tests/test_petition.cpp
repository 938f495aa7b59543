#include <doctest.h>

#include <atomic>
#include <fstream>
#include <set>
#include <thread>
#include <unistd.h>

#include "fixtures.hpp"
#include "tcred/petition.hpp"
#include "tcred/wire.hpp"

using namespace tcred;
using namespace tcred::petition;
using fixtures::random_attrs;

namespace {

// One issuer set and a helper to hand out credentials under it.
struct Issuer {
  Params params = setup(128, 2);
  KeyGenOutput keys;
  AggregatedVerificationKey vk;

  explicit Issuer(Rng& rng) {
    keys = ttp_keygen(params, 2, 3, rng);
    vk = aggregate_keys(keys.verification_shares);
  }

  // Attribute 1 is the private key k, attribute 2 is public.
  std::pair<AttributeVector, Credential> citizen(Rng& rng) const {
    const auto attrs = random_attrs(2, 1, rng);
    const auto prepared = prepare_blind_sign(params, attrs, Predicate::any(), rng);
    std::vector<PartialCredential> ps;
    for (std::size_t i = 0; i < 2; ++i)
      ps.push_back(unblind(blind_sign(params, keys.secret_shares[i], prepared.request), prepared.d));
    return {attrs, aggregate_credentials(ps)};
  }
};

std::filesystem::path temp_file(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("tcred-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove(p);
  return p;
}

const std::vector<std::string> kOptions = {"yes", "no"};

Bytes bytes_of(std::string_view s) {
  const auto v = as_bytes(s);
  return Bytes(v.begin(), v.end());
}

}  // namespace

TEST_CASE("petition tag") {
  CHECK(petition_tag(as_bytes("p1")) == petition_tag(as_bytes("p1")));
  std::set<std::string> seen;
  for (int i = 0; i < 100; ++i) seen.insert(to_hex(petition_tag(as_bytes("petition-" + std::to_string(i))).to_bytes()));
  CHECK(seen.size() == 100);
  CHECK_FALSE(petition_tag(as_bytes("p1")) == hash_bytes_to_g1(as_bytes("p1"), "OTHER-DOMAIN"));
}

TEST_CASE("petition init preconditions") {
  testing::SeededRng rng(70);
  const Issuer issuer(rng);
  CHECK_THROWS_AS(Petition(Bytes{1}, issuer.vk, {}), std::invalid_argument);
  CHECK_THROWS_AS(Petition(Bytes{1}, issuer.vk, {"a", "a"}), std::invalid_argument);
  const Petition p(Bytes{1}, issuer.vk, kOptions);
  CHECK(p.tally().total == 0);
  CHECK(p.tally().counts == std::vector<std::size_t>{0, 0});
}

TEST_CASE("sign, verify and record") {
  testing::SeededRng rng(71);
  const Issuer issuer(rng);
  Petition p(bytes_of("budget-2027"), issuer.vk, kOptions);
  const auto [attrs, cred] = issuer.citizen(rng);

  const auto packet = petition_sign(p, cred, attrs, 1, 0, rng);
  CHECK(packet.zeta == p.tag() * attrs.at(1));
  CHECK(p.verify(packet).accepted);

  SUBCASE("first accepted, duplicate rejected") {
    CHECK(p.verify_and_record(packet).accepted);
    CHECK(p.spent(packet.zeta));
    const auto again = p.verify_and_record(packet);
    CHECK_FALSE(again.accepted);
    CHECK(*again.reason == Reason::double_sign);
    // A fresh, unlinkable signature by the same key is still a duplicate.
    const auto fresh = petition_sign(p, cred, attrs, 1, 1, rng);
    CHECK_FALSE(fresh.show.sigma.h == packet.show.sigma.h);
    CHECK(*p.verify_and_record(fresh).reason == Reason::double_sign);
    CHECK(p.tally().counts == std::vector<std::size_t>{1, 0});
  }
  SUBCASE("option swapped on replay") {
    auto replay = packet;
    replay.option = 1;
    const auto o = p.verify_and_record(replay);
    CHECK(*o.reason == Reason::proof_invalid);
    CHECK_FALSE(p.spent(packet.zeta));
    CHECK(p.verify_and_record(packet).accepted);
  }
  SUBCASE("unknown option") {
    auto bad = packet;
    bad.option = 7;
    CHECK(*p.verify_and_record(bad).reason == Reason::unknown_option);
    CHECK_THROWS_AS(petition_sign(p, cred, attrs, 1, 2, rng), std::invalid_argument);
  }
  SUBCASE("zeta from a different key") {
    auto bad = packet;
    bad.zeta = p.tag() * (attrs.at(1) + Scalar::from_u64(1));
    CHECK(*p.verify_and_record(bad).reason == Reason::proof_invalid);
  }
  SUBCASE("k not matching the credential") {
    AttributeVector lied({attrs.at(1) + Scalar::from_u64(1), attrs.at(2)}, std::vector<std::size_t>{2});
    const auto forged = petition_sign(p, cred, lied, 1, 0, rng);
    CHECK(*p.verify_and_record(forged).reason == Reason::proof_invalid);
  }
  SUBCASE("credential from another issuer") {
    const Issuer other(rng);
    const auto [a2, c2] = other.citizen(rng);
    CHECK(*p.verify_and_record(petition_sign(p, c2, a2, 1, 0, rng)).reason == Reason::proof_invalid);
  }
  SUBCASE("key must be private") {
    CHECK_THROWS_AS(petition_sign(p, cred, attrs, 2, 0, rng), std::invalid_argument);
    auto bad = packet;
    bad.key_position = 2;
    CHECK(*p.verify_and_record(bad).reason == Reason::proof_invalid);
  }
  SUBCASE("packet is bound to the petition") {
    Petition other(bytes_of("budget-2028"), issuer.vk, kOptions);
    CHECK(*other.verify_and_record(packet).reason == Reason::proof_invalid);
  }
}

TEST_CASE("packet encoding") {
  testing::SeededRng rng(72);
  const Issuer issuer(rng);
  const Petition p(bytes_of("enc"), issuer.vk, kOptions);
  const auto [attrs, cred] = issuer.citizen(rng);
  const auto packet = petition_sign(p, cred, attrs, 1, 1, rng);
  const Bytes enc = encode(packet);
  CHECK(encode(decode_packet(enc)) == enc);
  CHECK(p.verify(decode_packet(enc)).accepted);
  for (std::size_t n = 0; n < enc.size(); ++n) REQUIRE_THROWS_AS(decode_packet(ByteView(enc.data(), n)), wire::WireError);
}

TEST_CASE("10 citizens x 3 petitions: one signature per key and petition") {
  testing::SeededRng rng(73);
  const Issuer issuer(rng);
  std::vector<std::unique_ptr<Petition>> petitions;
  for (int i = 0; i < 3; ++i)
    petitions.push_back(std::make_unique<Petition>(bytes_of("petition-" + std::to_string(i)), issuer.vk, kOptions));

  std::set<std::string> zetas;
  std::vector<std::vector<std::size_t>> expected(3, std::vector<std::size_t>(2, 0));
  for (int c = 0; c < 10; ++c) {
    const auto [attrs, cred] = issuer.citizen(rng);
    for (int i = 0; i < 3; ++i) {
      const std::size_t option = (c + i) % 2;
      const auto first = petition_sign(*petitions[i], cred, attrs, 1, option, rng);
      REQUIRE(petitions[i]->verify_and_record(first).accepted);
      ++expected[i][option];
      zetas.insert(to_hex(first.zeta.to_bytes()));
      const auto second = petition_sign(*petitions[i], cred, attrs, 1, 1 - option, rng);
      CHECK(second.zeta == first.zeta);
      const auto o = petitions[i]->verify_and_record(second);
      REQUIRE_FALSE(o.accepted);
      CHECK(*o.reason == Reason::double_sign);
    }
  }
  CHECK(zetas.size() == 30);
  for (int i = 0; i < 3; ++i) {
    CHECK(petitions[i]->tally().counts == expected[i]);
    CHECK(petitions[i]->tally().total == 10);
  }
}

TEST_CASE("concurrent duplicate submissions are accepted once") {
  testing::SeededRng rng(74);
  const Issuer issuer(rng);
  for (int round = 0; round < 5; ++round) {
    Petition p(bytes_of("race-" + std::to_string(round)), issuer.vk, kOptions);
    const auto [attrs, cred] = issuer.citizen(rng);
    const auto packet = petition_sign(p, cred, attrs, 1, 0, rng);
    std::atomic<int> accepted{0}, doubled{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t)
      threads.emplace_back([&] {
        const auto o = p.verify_and_record(packet);
        if (o.accepted) ++accepted;
        if (o.reason == Reason::double_sign) ++doubled;
      });
    for (auto& t : threads) t.join();
    CHECK(accepted == 1);
    CHECK(doubled == 7);
    CHECK(p.tally().total == 1);
  }
}

TEST_CASE("persistence") {
  testing::SeededRng rng(75);
  const Issuer issuer(rng);
  const auto path = temp_file("petition-state");
  Petition p(bytes_of("persist"), issuer.vk, {"a", "b", "c"});
  p.create_journal(path);
  CHECK_THROWS(p.create_journal(path));

  std::vector<SignaturePacket> packets;
  for (int c = 0; c < 4; ++c) {
    const auto [attrs, cred] = issuer.citizen(rng);
    packets.push_back(petition_sign(p, cred, attrs, 1, c % 3, rng));
    REQUIRE(p.verify_and_record(packets.back()).accepted);
  }
  REQUIRE_FALSE(p.verify_and_record(packets[0]).accepted);  // not journaled

  auto loaded = Petition::load(path);
  CHECK(loaded->id() == p.id());
  CHECK(loaded->options() == p.options());
  CHECK(loaded->tally().counts == p.tally().counts);
  CHECK(loaded->tally().total == 4);
  for (const auto& pk : packets) CHECK(loaded->spent(pk.zeta));
  CHECK(*loaded->verify_and_record(packets[1]).reason == Reason::double_sign);

  SUBCASE("appends after reload survive the next reload") {
    const auto [attrs, cred] = issuer.citizen(rng);
    REQUIRE(loaded->verify_and_record(petition_sign(*loaded, cred, attrs, 1, 2, rng)).accepted);
    CHECK(Petition::load(path)->tally().total == 5);
  }
  SUBCASE("torn final record is dropped") {
    const auto size = std::filesystem::file_size(path);
    {
      std::ofstream out(path, std::ios::binary | std::ios::app);
      out.write("\x00\x00\x10\x00partial", 11);
    }
    auto recovered = Petition::load(path);
    CHECK(recovered->tally().total == 4);
    CHECK(std::filesystem::file_size(path) == size);
  }
  SUBCASE("damage inside the file is detected") {
    Bytes raw = wire::read_file(path);
    raw[raw.size() / 2] ^= 0x01;
    wire::write_file(path, raw);
    CHECK_THROWS(Petition::load(path));
  }
  SUBCASE("not a petition file") {
    wire::write_file(path, Bytes{1, 2, 3});
    CHECK_THROWS(Petition::load(path));
  }
  std::filesystem::remove(path);
}
