#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <unistd.h>
#include <thread>
#include <type_traits>

#include <json.hpp>

#include "fixtures.hpp"
#include "tcred/service.hpp"
#include "tcred/wire.hpp"

using namespace tcred;
using namespace tcred::service;
using namespace std::chrono_literals;
using fixtures::random_attrs;
using json = nlohmann::json;

namespace {

std::string issue_body(const Digest& digest, const BlindSignRequest& req) {
  return json{{"params_digest", to_hex(digest)}, {"envelope", wire::to_base64(wire::encode(req))}}.dump();
}

std::string error_of(const HttpResponse& r) { return json::parse(r.body).value("error", std::string()); }

Bytes envelope_of(const HttpResponse& r) {
  return wire::from_base64(json::parse(r.body).at("envelope").get<std::string>());
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("tcred-test-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

struct Network {
  Params params;
  KeyGenOutput keys;
  std::vector<std::shared_ptr<LocalAuthority>> authorities;

  GatherPolicy policy(std::size_t t) const {
    GatherPolicy p;
    p.threshold = t;
    for (const auto& a : authorities) p.targets.push_back({a, keys.verification_shares[a->index() - 1]});
    return p;
  }
};

Network local_network(std::size_t q, std::size_t t, const std::vector<std::chrono::milliseconds>& delays,
                      const std::vector<LocalAuthority::Fault>& faults, Rng& rng) {
  Network net{setup(128, q), {}, {}};
  net.keys = ttp_keygen(net.params, t, delays.size(), rng);
  for (std::size_t i = 0; i < delays.size(); ++i)
    net.authorities.push_back(std::make_shared<LocalAuthority>(net.params, net.keys.secret_shares[i], delays[i],
                                                               faults.empty() ? LocalAuthority::Fault::none : faults[i]));
  return net;
}

}  // namespace

// The handlers take only public material: no decryption key, no private
// attribute, no PreparedRequest.
static_assert(std::is_same_v<decltype(&AuthorityService::handle_issue),
                             HttpResponse (AuthorityService::*)(std::string_view, const std::string&)>);
static_assert(std::is_same_v<decltype(&AuthorityService::handle_vk), HttpResponse (AuthorityService::*)() const>);
static_assert(std::is_constructible_v<AuthorityService, Params, SecretKeyShare, unsigned>);
static_assert(!std::is_constructible_v<AuthorityService, Params, SecretKeyShare, Scalar>);

TEST_CASE("issue handler matches the library and the direct oracle") {
  testing::SeededRng rng(60);
  const Params params = setup(128, 3);
  const auto keys = ttp_keygen(params, 2, 3, rng);
  AuthorityService svc(params, keys.secret_shares[1]);
  const auto attrs = random_attrs(3, 2, rng);
  const auto prepared = prepare_blind_sign(params, attrs, Predicate::any(), rng);

  const auto res = svc.handle_issue(issue_body(params.digest(), prepared.request), "src");
  REQUIRE(res.status == 200);
  const Bytes env = envelope_of(res);
  CHECK(env == wire::encode(blind_sign(params, keys.secret_shares[1], prepared.request)));

  const auto partial = unblind(wire::decode<BlindedPartial>(env), prepared.d);
  const auto& sk = keys.secret_shares[1];
  Scalar e = sk.x;
  for (std::size_t j = 0; j < 3; ++j) e += sk.y[j] * attrs.values()[j];
  CHECK(partial.credential.s == prepared.h * e);
  CHECK(partial.index == 2);

  // Idempotent.
  CHECK(envelope_of(svc.handle_issue(issue_body(params.digest(), prepared.request), "src")) == env);
}

TEST_CASE("issue handler rejections") {
  testing::SeededRng rng(61);
  const Params params = setup(128, 2);
  const auto keys = ttp_keygen(params, 1, 1, rng);
  AuthorityService svc(params, keys.secret_shares[0]);
  const auto prepared = prepare_blind_sign(params, random_attrs(2, 1, rng), Predicate::any(), rng);

  auto tampered = prepared.request;
  tampered.proof.responses[0] += Scalar::from_u64(1);
  auto res = svc.handle_issue(issue_body(params.digest(), tampered), "src");
  CHECK(res.status == 422);
  CHECK(error_of(res) == "proof-invalid");
  CHECK_FALSE(json::parse(res.body).contains("envelope"));

  res = svc.handle_issue(issue_body(setup(128, 3).digest(), prepared.request), "src");
  CHECK(res.status == 409);
  CHECK(error_of(res) == "params-mismatch");

  res = svc.handle_issue("{not json", "src");
  CHECK(res.status == 400);
  CHECK(error_of(res) == "malformed");

  const std::string truncated =
      json{{"params_digest", to_hex(params.digest())}, {"envelope", wire::to_base64(Bytes{1, 6, 0})}}.dump();
  res = svc.handle_issue(truncated, "src");
  CHECK(error_of(res) == "malformed");
}

TEST_CASE("vk and params digest endpoints are stable") {
  testing::SeededRng rng(62);
  const Params params = setup(128, 2);
  const auto keys = ttp_keygen(params, 2, 3, rng);
  AuthorityService svc(params, keys.secret_shares[2]);
  CHECK(svc.handle_vk().body == svc.handle_vk().body);
  const auto vk = wire::decode<VerificationKeyShare>(envelope_of(svc.handle_vk()));
  CHECK(vk.index == 3);
  CHECK(vk.alpha == keys.verification_shares[2].alpha);
  CHECK(wire::decode<wire::ParamsDigest>(envelope_of(svc.handle_params_digest())).value == params.digest());
}

TEST_CASE("rate limit per source") {
  testing::SeededRng rng(63);
  const Params params = setup(128, 1);
  const auto keys = ttp_keygen(params, 1, 1, rng);
  AuthorityService svc(params, keys.secret_shares[0], 2);
  const auto prepared = prepare_blind_sign(params, random_attrs(1, 1, rng), Predicate::any(), rng);
  const auto body = issue_body(params.digest(), prepared.request);
  CHECK(svc.handle_issue(body, "a").status == 200);
  CHECK(svc.handle_issue(body, "a").status == 200);
  const auto third = svc.handle_issue(body, "a");
  CHECK(third.status == 429);
  CHECK(error_of(third) == "rate-limited");
  CHECK(svc.handle_issue(body, "b").status == 200);
}

TEST_CASE("config loading") {
  testing::SeededRng rng(64);
  const auto dir = temp_dir("config");
  const Params params = setup(128, 2);
  const auto keys = ttp_keygen(params, 1, 2, rng);
  wire::write_file(dir / "sk-2", wire::bind(params.digest(), wire::encode(keys.secret_shares[1])));

  auto write_config = [&](AuthorityIndex index, const std::string& digest) {
    std::ofstream(dir / "authority.json") << json{{"listen", "127.0.0.1:0"},
                                                  {"index", index},
                                                  {"share", "sk-2"},
                                                  {"params_digest", digest},
                                                  {"max_requests_per_minute", 5}}
                                                 .dump();
    return dir / "authority.json";
  };

  const auto cfg = AuthorityConfig::load(write_config(2, to_hex(params.digest())));
  CHECK(cfg.host == "127.0.0.1");
  CHECK(cfg.port == 0);
  CHECK(cfg.share_path == dir / "sk-2");
  CHECK(cfg.max_requests_per_minute == 5);
  const auto svc = AuthorityService::from_config(cfg);
  CHECK(svc->index() == 2);

  CHECK_THROWS_AS(AuthorityService::from_config(AuthorityConfig::load(write_config(1, to_hex(params.digest())))),
                  ConfigError);
  CHECK_THROWS_AS(
      AuthorityService::from_config(AuthorityConfig::load(write_config(2, to_hex(setup(128, 3).digest())))),
      ConfigError);
  CHECK_THROWS_AS(AuthorityConfig::load(write_config(2, "abc")), ConfigError);
  CHECK_THROWS_AS(AuthorityConfig::load(dir / "missing.json"), ConfigError);

  ::setenv("TCRED_LISTEN", "0.0.0.0:9999", 1);
  ::setenv("TCRED_SHARE", (dir / "elsewhere").c_str(), 1);
  const auto overridden = AuthorityConfig::load(write_config(2, to_hex(params.digest())));
  ::unsetenv("TCRED_LISTEN");
  ::unsetenv("TCRED_SHARE");
  CHECK(overridden.host == "0.0.0.0");
  CHECK(overridden.port == 9999);
  CHECK(overridden.share_path == dir / "elsewhere");

  CHECK_THROWS_AS(parse_listen("nohost"), ConfigError);
  CHECK_THROWS_AS(parse_listen("h:70000"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("HTTP round trip and gather over sockets") {
  testing::SeededRng rng(65);
  const Params params = setup(128, 2);
  const auto keys = ttp_keygen(params, 2, 3, rng);

  std::vector<std::unique_ptr<AuthorityService>> services;
  std::vector<std::thread> threads;
  GatherPolicy policy;
  policy.threshold = 2;
  for (const auto& sk : keys.secret_shares) {
    services.push_back(std::make_unique<AuthorityService>(params, sk));
    const auto port = services.back()->bind("127.0.0.1", 0);
    REQUIRE(port);
    threads.emplace_back([svc = services.back().get()] { svc->run(); });
    auto ep = std::make_shared<HttpAuthorityEndpoint>(sk.index, "http://127.0.0.1:" + std::to_string(*port));
    policy.targets.push_back({ep, ep->fetch_vk()});
    CHECK(ep->fetch_params_digest() == params.digest());
  }

  const auto attrs = random_attrs(2, 1, rng);
  const auto prepared = prepare_blind_sign(params, attrs, Predicate::any(), rng);
  const auto partials = gather(params, policy, prepared, attrs);
  REQUIRE(partials.size() == 2);
  const auto vk = aggregate_keys(keys.verification_shares);
  CHECK(verify_signature(params, vk, aggregate_credentials(partials), attrs.values()));

  auto tampered = prepared.request;
  tampered.proof.challenge += Scalar::from_u64(1);
  auto& ep = dynamic_cast<HttpAuthorityEndpoint&>(*policy.targets[0].endpoint);
  try {
    ep.issue(params.digest(), wire::encode(tampered), 2s, {});
    FAIL("tampered request accepted");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).starts_with("proof-invalid"));
  }

  // A second authority on an occupied port fails to bind.
  AuthorityService clash(params, keys.secret_shares[0]);
  const auto taken = parse_listen(ep.name()).second;
  CHECK_FALSE(clash.bind("127.0.0.1", taken).has_value());

  for (auto& s : services) s->stop();
  for (auto& t : threads) t.join();

  try {
    ep.issue(params.digest(), wire::encode(prepared.request), 500ms, {});
    FAIL("stopped service answered");
  } catch (const std::runtime_error&) {
  }
}

TEST_CASE("gather returns after the t-th response") {
  testing::SeededRng rng(66);
  std::vector<std::chrono::milliseconds> delays;
  for (int i = 0; i < 10; ++i) delays.push_back(std::chrono::milliseconds(600 - 50 * i));  // 600 .. 150
  auto net = local_network(1, 3, delays, {}, rng);
  const auto attrs = random_attrs(1, 1, rng);
  const auto prepared = prepare_blind_sign(net.params, attrs, Predicate::any(), rng);

  const auto start = std::chrono::steady_clock::now();
  const auto partials = gather(net.params, net.policy(3), prepared, attrs);
  const auto elapsed = std::chrono::steady_clock::now() - start;
  CHECK(elapsed >= 250ms);
  CHECK(elapsed < 350ms);  // third-smallest delay is 250 ms
  std::set<AuthorityIndex> got;
  for (const auto& p : partials) got.insert(p.index);
  CHECK(got == std::set<AuthorityIndex>{8, 9, 10});
  CHECK(verify_signature(net.params, aggregate_keys(net.keys.verification_shares), aggregate_credentials(partials),
                         attrs.values()));
}

TEST_CASE("gather screens faulty authorities") {
  testing::SeededRng rng(67);
  using F = LocalAuthority::Fault;
  const auto attrs = random_attrs(2, 1, rng);

  for (F bad : {F::garbage, F::wrong_key, F::reject, F::unresponsive}) {
    CAPTURE(static_cast<int>(bad));
    auto net = local_network(2, 2, {5ms, 10ms, 15ms}, {bad, F::none, F::none}, rng);
    const auto prepared = prepare_blind_sign(net.params, attrs, Predicate::any(), rng);
    const auto partials = gather(net.params, net.policy(2), prepared, attrs);
    REQUIRE(partials.size() == 2);
    for (const auto& p : partials) CHECK(p.index != 1);
  }
}

TEST_CASE("gather reports threshold-unreachable per endpoint") {
  testing::SeededRng rng(68);
  using F = LocalAuthority::Fault;
  const auto attrs = random_attrs(1, 1, rng);

  SUBCASE("all down") {
    auto net = local_network(1, 2, {1ms, 1ms, 1ms}, {F::reject, F::garbage, F::unresponsive}, rng);
    const auto prepared = prepare_blind_sign(net.params, attrs, Predicate::any(), rng);
    auto policy = net.policy(2);
    policy.deadline = 300ms;
    const auto start = std::chrono::steady_clock::now();
    try {
      gather(net.params, policy, prepared, attrs);
      FAIL("gather succeeded");
    } catch (const ProtocolError& e) {
      CHECK(e.reason() == Reason::threshold_unreachable);
      const std::string what = e.what();
      CHECK(what.find("local-1: refused") != std::string::npos);
      CHECK(what.find("local-2:") != std::string::npos);
      CHECK(what.find("local-3: no answer by the deadline") != std::string::npos);
    }
    CHECK(std::chrono::steady_clock::now() - start < 1s);
  }
  SUBCASE("policy preconditions") {
    auto net = local_network(1, 2, {1ms, 1ms}, {}, rng);
    const auto prepared = prepare_blind_sign(net.params, attrs, Predicate::any(), rng);
    CHECK_THROWS_AS(gather(net.params, net.policy(3), prepared, attrs), std::invalid_argument);
    CHECK_THROWS_AS(gather(net.params, net.policy(0), prepared, attrs), std::invalid_argument);
    auto dup = net.policy(2);
    dup.targets[1] = dup.targets[0];
    CHECK_THROWS_AS(gather(net.params, dup, prepared, attrs), std::invalid_argument);
  }
  SUBCASE("partials checked against the user's own attributes") {
    auto net = local_network(1, 2, {1ms, 1ms}, {}, rng);
    const auto prepared = prepare_blind_sign(net.params, attrs, Predicate::any(), rng);
    const auto other = random_attrs(1, 1, rng);
    CHECK_THROWS_AS(gather(net.params, net.policy(2), prepared, other), ProtocolError);
  }
}
