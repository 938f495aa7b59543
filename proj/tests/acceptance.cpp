// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. `acceptance 4 7` runs only criteria 4 and 7.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include "fixtures.hpp"
#include "tcred/bench.hpp"
#include "tcred/petition.hpp"
#include "tcred/service.hpp"
#include "tcred/testing.hpp"
#include "tcred/wire.hpp"

using namespace tcred;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;

  // Records the first failure only; later ones are usually consequences.
  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
  void expect(bool cond, const std::string& why) {
    if (!cond) fail(why);
  }
};

std::vector<std::vector<std::size_t>> subsets_of_size(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) s.push_back(i);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<PartialCredential> pick(const std::vector<PartialCredential>& all, const std::vector<std::size_t>& idx) {
  std::vector<PartialCredential> out;
  for (auto i : idx) out.push_back(all[i]);
  return out;
}

AttributeVector mixed_attrs(std::size_t q, std::mt19937_64& gen, Rng& rng) {
  std::vector<std::size_t> pub;
  for (std::size_t pos = 1; pos <= q; ++pos)
    if (gen() & 1) pub.push_back(pos);
  return AttributeVector(fixtures::random_values(q, rng), pub);
}

// ------------------------------------------------------------ criteria 1 & 3

struct GridResult {
  Verdict oracle;
  Verdict under_threshold;
  std::size_t subsets = 0;
  std::size_t strict_subsets = 0;
};

// Shares the issued partials between the oracle and under-threshold checks.
const GridResult& grid() {
  static const GridResult result = [] {
    GridResult r;
    testing::SeededRng rng(1001);
    std::mt19937_64 gen(1001);
    for (std::size_t q : {1u, 3u, 5u}) {
      const Params params = setup(128, q);
      for (std::size_t n = 1; n <= 5; ++n)
        for (std::size_t t = 1; t <= n; ++t) {
          const auto dealer = testing::ttp_keygen_with_dealer(params, t, n, rng);
          const auto vk = testing::master_verification_key(params, dealer.master);
          for (int v = 0; v < 20; ++v) {
            const auto attrs = mixed_attrs(q, gen, rng);
            const auto prepared = prepare_blind_sign(params, attrs, Predicate::any(), rng);
            std::vector<PartialCredential> all;
            for (const auto& sk : dealer.keys.secret_shares)
              all.push_back(unblind(blind_sign(params, sk, prepared.request), prepared.d));
            const Bytes oracle = wire::encode(testing::sign_with_master(dealer.master, prepared.h, attrs.values()));
            const std::string where =
                "t=" + std::to_string(t) + " n=" + std::to_string(n) + " q=" + std::to_string(q);
            for (const auto& s : subsets_of_size(n, t)) {
              ++r.subsets;
              r.oracle.expect(wire::encode(aggregate_credentials(pick(all, s))) == oracle,
                              "aggregate differs from the dealer signature at " + where);
            }
            for (std::size_t k = 1; k < t; ++k)
              for (const auto& s : subsets_of_size(n, k)) {
                ++r.strict_subsets;
                const auto cred = aggregate_credentials(pick(all, s));
                const auto show = prove_cred(params, vk, cred, attrs, Predicate::any(), rng);
                r.under_threshold.expect(!verify_cred(params, vk, show),
                                         "subset of size " + std::to_string(k) + " verified at " + where);
                r.under_threshold.expect(!verify_signature(params, vk, cred, attrs.values()),
                                         "subset signature verified at " + where);
              }
          }
        }
    }
    return r;
  }();
  return result;
}

Verdict oracle_equivalence() {
  Verdict v = grid().oracle;
  if (v.ok) v.detail = std::to_string(grid().subsets) + " t-subsets byte-equal the dealer signature";
  return v;
}

Verdict under_threshold() {
  Verdict v = grid().under_threshold;
  if (v.ok) v.detail = std::to_string(grid().strict_subsets) + " strict subsets rejected (issued alongside criterion 1)";
  return v;
}

// ------------------------------------------------------------------ 2

Verdict end_to_end() {
  Verdict v;
  testing::SeededRng rng(1002);
  std::mt19937_64 gen(1002);
  for (int run = 0; run < 100; ++run) {
    const std::size_t q = 1 + gen() % 5;
    const Params params = setup(128, q);
    const auto keys = ttp_keygen(params, 2, 3, rng);

    service::GatherPolicy policy;
    policy.threshold = 2;
    for (const auto& sk : keys.secret_shares) {
      auto local = std::make_shared<service::LocalAuthority>(params, sk);
      policy.targets.push_back({local, local->vk()});
    }
    const auto vk = aggregate_keys(std::span(keys.verification_shares).first(2));

    const auto attrs = mixed_attrs(q, gen, rng);
    const auto prepared = prepare_blind_sign(params, attrs, Predicate::any(), rng);
    const auto partials = service::gather(params, policy, prepared, attrs);
    const auto cred = aggregate_credentials(partials);

    std::vector<std::size_t> reveal;
    for (std::size_t pos = 1; pos <= q; ++pos)
      if (gen() & 1) reveal.push_back(pos);
    const auto show = prove_cred(params, vk, cred, attrs.with_public(reveal), Predicate::reveal(reveal), rng);
    v.expect(verify_cred(params, vk, show, Predicate::reveal(reveal)), "run " + std::to_string(run) + " INVALID");
  }
  if (v.ok) v.detail = "100 runs VALID";
  return v;
}

// ------------------------------------------------------------------ 4

// Byte range of `needle` inside `haystack`.
std::pair<std::size_t, std::size_t> locate(const Bytes& haystack, ByteView needle) {
  const auto it = std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end());
  if (it == haystack.end()) throw std::logic_error("component not found in the encoding");
  const auto begin = static_cast<std::size_t>(it - haystack.begin());
  return {begin, begin + needle.size()};
}

template <std::size_t N>
ByteView view(const std::array<std::uint8_t, N>& a) {
  return ByteView(a.data(), N);
}

bool show_accepted(const Params& params, const AggregatedVerificationKey& vk, ByteView bytes,
                   const Predicate& policy) {
  ShowMaterial show;
  try {
    show = wire::decode<ShowMaterial>(bytes);
  } catch (const wire::WireError&) {
    return false;
  }
  return verify_cred(params, vk, show, policy);
}

Verdict pairing_rejection() {
  Verdict v;
  testing::SeededRng rng(1004);
  const Params params = setup(128, 2);
  std::size_t mutations = 0;
  for (int instance = 0; instance < 50; ++instance) {
    const auto attrs = fixtures::random_attrs(2, 1, rng);
    const auto issued = fixtures::issue(params, attrs, 2, 3, rng);
    const auto policy = Predicate::reveal({2});
    const auto show = prove_cred(params, issued.vk, issued.credential, attrs, policy, rng);
    v.expect(verify_cred(params, issued.vk, show, policy), "honest show rejected");

    auto trivial = show;
    trivial.sigma.h = G1::identity();
    v.expect(!verify_cred(params, issued.vk, trivial, policy), "h' = identity accepted");
    trivial.sigma.s = G1::identity();
    trivial.nu = G1::identity();
    v.expect(!verify_cred(params, issued.vk, trivial, policy), "all-identity show accepted");

    const Bytes enc = wire::encode(show);
    const auto kappa = show.kappa.to_bytes();
    const auto nu = show.nu.to_bytes();
    const auto h = show.sigma.h.to_bytes();
    const auto s = show.sigma.s.to_bytes();
    std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> fields = {
        {"kappa", locate(enc, view(kappa))},
        {"nu", locate(enc, view(nu))},
        {"h'", locate(enc, view(h))},
        {"s'", locate(enc, view(s))}};
    const auto c = show.proof.challenge.to_bytes();
    fields.push_back({"pi_v challenge", locate(enc, view(c))});
    for (std::size_t i = 0; i < show.proof.responses.size(); ++i) {
      const auto r = show.proof.responses[i].to_bytes();
      fields.push_back({"pi_v response " + std::to_string(i), locate(enc, view(r))});
    }

    for (const auto& [name, range] : fields)
      for (std::size_t byte = range.first; byte < range.second; ++byte)
        for (int bit = 0; bit < 8; ++bit) {
          Bytes bad = enc;
          bad[byte] ^= static_cast<std::uint8_t>(1u << bit);
          ++mutations;
          if (show_accepted(params, issued.vk, bad, policy))
            v.fail("bit " + std::to_string(bit) + " of byte " + std::to_string(byte - range.first) + " in " + name +
                   " accepted");
        }
  }
  if (v.ok) v.detail = "identity h' and " + std::to_string(mutations) + " single-bit mutations rejected";
  return v;
}

// ------------------------------------------------------------------ 5

Verdict nizk_tamper() {
  Verdict v;
  testing::SeededRng rng(1005);
  const Scalar one = Scalar::from_u64(1);
  std::size_t honest = 0, tampered = 0;
  for (std::size_t q_priv : {1u, 3u}) {
    const std::size_t q = q_priv + 1;  // one public attribute so its value can be tampered with too
    const Params params = setup(128, q);
    for (int instance = 0; instance < 100; ++instance) {
      const auto attrs = fixtures::random_attrs(q, q_priv, rng);

      // Issuance proof.
      const auto iss = fixtures::honest_issuance(params, attrs, rng);
      const auto ps = prove_issuance(params, iss.statement, iss.witness, rng);
      ++honest;
      v.expect(verify_issuance(params, iss.statement, ps), "honest issuance proof rejected");
      std::vector<std::function<void(IssuanceStatement&, IssuanceProof&)>> iss_mutations = {
          [&](auto&, auto& p) { p.challenge += one; },
          [&](auto& s, auto&) { s.gamma += params.g1; },
          [&](auto& s, auto&) { s.commitment += params.g1; },
          [&](auto& s, auto&) { s.h += params.g1; },
          [&](auto& s, auto&) { s.public_attrs[0].value += one; },
      };
      for (std::size_t i = 0; i < ps.responses.size(); ++i)
        iss_mutations.push_back([i, &one](auto&, auto& p) { p.responses[i] += one; });
      for (std::size_t i = 0; i < q_priv; ++i) {
        iss_mutations.push_back([i, &params](auto& s, auto&) { s.ciphertexts[i].a += params.g1; });
        iss_mutations.push_back([i, &params](auto& s, auto&) { s.ciphertexts[i].b += params.g1; });
      }
      for (std::size_t m = 0; m < iss_mutations.size(); ++m) {
        auto s = iss.statement;
        auto p = ps;
        iss_mutations[m](s, p);
        ++tampered;
        v.expect(!verify_issuance(params, s, p), "pi_s mutation " + std::to_string(m) + " accepted at q_priv=" +
                                                     std::to_string(q_priv));
      }

      // Show proof.
      const auto vk = fixtures::random_vk(params, rng);
      const auto sh = fixtures::honest_show(params, vk, attrs, rng);
      const auto pv = prove_show(params, vk, sh.statement, sh.witness, rng);
      ++honest;
      v.expect(verify_show(params, vk, sh.statement, pv), "honest show proof rejected");
      std::vector<std::function<void(ShowStatement&, ShowProof&)>> show_mutations = {
          [&](auto&, auto& p) { p.challenge += one; },
          [&](auto& s, auto&) { s.kappa += params.g2; },
          [&](auto& s, auto&) { s.nu += params.g1; },
          [&](auto& s, auto&) { s.sigma.h += params.g1; },
          [&](auto& s, auto&) { s.sigma.s += params.g1; },
          [&](auto& s, auto&) { s.public_attrs[0].value += one; },
      };
      for (std::size_t i = 0; i < pv.responses.size(); ++i)
        show_mutations.push_back([i, &one](auto&, auto& p) { p.responses[i] += one; });
      for (std::size_t m = 0; m < show_mutations.size(); ++m) {
        auto s = sh.statement;
        auto p = pv;
        show_mutations[m](s, p);
        ++tampered;
        v.expect(!verify_show(params, vk, s, p), "pi_v mutation " + std::to_string(m) + " accepted at q_priv=" +
                                                      std::to_string(q_priv));
      }
    }
  }
  if (v.ok)
    v.detail = std::to_string(honest) + " honest proofs accepted, " + std::to_string(tampered) + " mutations rejected";
  return v;
}

// ------------------------------------------------------------------ 6

Verdict unlinkability() {
  Verdict v;
  testing::SeededRng rng(1006);
  const Params params = setup(128, 3);
  const auto keys = ttp_keygen(params, 2, 3, rng);
  const auto vk = aggregate_keys(std::span(keys.verification_shares).first(2));
  const auto attrs = fixtures::random_attrs(3, 2, rng);

  // The issuance transcript: request, blinded and unblinded partials, credential.
  const auto prepared = prepare_blind_sign(params, attrs, Predicate::any(), rng);
  std::set<std::string> issuance;
  auto add_g1 = [](std::set<std::string>& set, const G1& p) { set.insert(to_hex(p.to_bytes())); };
  add_g1(issuance, prepared.request.gamma);
  add_g1(issuance, prepared.request.commitment);
  for (const auto& c : prepared.request.ciphertexts) {
    add_g1(issuance, c.a);
    add_g1(issuance, c.b);
  }
  std::vector<PartialCredential> partials;
  for (std::size_t i = 0; i < 2; ++i) {
    const auto blinded = blind_sign(params, keys.secret_shares[i], prepared.request);
    add_g1(issuance, blinded.h);
    add_g1(issuance, blinded.c.a);
    add_g1(issuance, blinded.c.b);
    partials.push_back(unblind(blinded, prepared.d));
    add_g1(issuance, partials.back().credential.s);
  }
  const auto cred = aggregate_credentials(partials);
  add_g1(issuance, cred.h);
  add_g1(issuance, cred.s);

  // Every group element of every show must be new.
  std::set<std::string> seen = issuance;
  std::size_t elements = 0;
  for (int i = 0; i < 10; ++i) {
    const auto show = prove_cred(params, vk, cred, attrs, Predicate::any(), rng);
    v.expect(verify_cred(params, vk, show), "show " + std::to_string(i) + " does not verify");
    for (const std::string& e :
         {to_hex(show.kappa.to_bytes()), to_hex(show.nu.to_bytes()), to_hex(show.sigma.h.to_bytes()),
          to_hex(show.sigma.s.to_bytes())}) {
      ++elements;
      v.expect(seen.insert(e).second, "show " + std::to_string(i) + " repeats a group element");
    }
  }
  if (v.ok)
    v.detail = std::to_string(elements) + " show elements distinct from each other and from " +
               std::to_string(issuance.size()) + " issuance elements";
  return v;
}

// ------------------------------------------------------------------ 7

Verdict constant_size() {
  Verdict v;
  testing::SeededRng rng(1007);
  std::set<std::size_t> sizes;
  for (std::size_t q : {1u, 5u})
    for (std::size_t n : {1u, 10u})
      for (std::size_t t : {std::size_t{1}, n}) {
        const Params params = setup(128, q);
        const auto issued = fixtures::issue(params, fixtures::random_attrs(q, q / 2, rng), t, n, rng);
        const auto size = wire::encode(issued.credential).size();
        sizes.insert(size);
        v.expect(size == 2 * G1::kEncodedSize + wire::kEnvelopeOverhead,
                 "credential is " + std::to_string(size) + " bytes at q=" + std::to_string(q) +
                     " n=" + std::to_string(n) + " t=" + std::to_string(t));
      }
  v.expect(sizes.size() == 1, "credential size varies");
  if (v.ok) v.detail = std::to_string(*sizes.begin()) + " bytes = 2 x 48 + " + std::to_string(wire::kEnvelopeOverhead);
  return v;
}

// ------------------------------------------------------------------ 8

Verdict fixed_h_forgery() {
  Verdict v;
  testing::SeededRng rng(1008);
  const Params params = setup(128, 1);
  const auto dealer = testing::ttp_keygen_with_dealer(params, 1, 1, rng);
  const auto& sk = dealer.keys.secret_shares[0];
  const auto vk = aggregate_keys(dealer.keys.verification_shares);
  const AttributeVector m0({Scalar::from_u64(0)}), m1({Scalar::from_u64(1)}), m2({Scalar::from_u64(2)});

  // Fixed h: sigma_0^-1 * sigma_1^2 signs m = 2.
  const G1 h = hash_to_g1(params.g1 * Scalar::random(rng));
  const auto r0 = testing::prepare_blind_sign_fixed_h(params, m0, h, rng);
  const auto r1 = testing::prepare_blind_sign_fixed_h(params, m1, h, rng);
  const auto s0 = unblind(testing::blind_sign_fixed_h(params, sk, r0.request, h), r0.d).credential;
  const auto s1 = unblind(testing::blind_sign_fixed_h(params, sk, r1.request, h), r1.d).credential;
  const Credential forged{h, -s0.s + s1.s + s1.s};
  v.expect(verify_signature(params, vk, forged, m2.values()), "fixed-h forgery did not verify");
  v.expect(verify_cred(params, vk, prove_cred(params, vk, forged, m2, Predicate::any(), rng)),
           "fixed-h forgery show did not verify");

  // Public API: h is derived from each commitment, so the construction fails.
  const auto p0 = prepare_blind_sign(params, m0, Predicate::any(), rng);
  const auto p1 = prepare_blind_sign(params, m1, Predicate::any(), rng);
  const auto c0 = unblind(blind_sign(params, sk, p0.request), p0.d).credential;
  const auto c1 = unblind(blind_sign(params, sk, p1.request), p1.d).credential;
  v.expect(!(c0.h == c1.h), "two issuances shared h");
  for (const G1& hh : {c0.h, c1.h}) {
    const Credential attempt{hh, -c0.s + c1.s + c1.s};
    v.expect(!verify_signature(params, vk, attempt, m2.values()), "public-API forgery verified");
    v.expect(!verify_cred(params, vk, prove_cred(params, vk, attempt, m2, Predicate::any(), rng)),
             "public-API forgery show verified");
  }
  if (v.ok) v.detail = "forgery verifies with fixed h, fails with derived h";
  return v;
}

// ------------------------------------------------------------------ 9

Verdict petition_double_sign() {
  Verdict v;
  testing::SeededRng rng(1009);
  const Params params = setup(128, 2);
  const auto keys = ttp_keygen(params, 2, 3, rng);
  const auto vk = aggregate_keys(keys.verification_shares);
  const std::vector<std::string> options = {"yes", "no"};

  auto citizen = [&] {
    const auto attrs = fixtures::random_attrs(2, 1, rng);
    const auto prepared = prepare_blind_sign(params, attrs, Predicate::any(), rng);
    std::vector<PartialCredential> ps;
    for (std::size_t i = 0; i < 2; ++i)
      ps.push_back(unblind(blind_sign(params, keys.secret_shares[i], prepared.request), prepared.d));
    return std::make_pair(attrs, aggregate_credentials(ps));
  };
  auto id_of = [](const std::string& s) { return Bytes(s.begin(), s.end()); };

  std::vector<std::unique_ptr<petition::Petition>> petitions;
  for (int i = 0; i < 3; ++i)
    petitions.push_back(std::make_unique<petition::Petition>(id_of("petition-" + std::to_string(i)), vk, options));
  std::vector<std::vector<std::size_t>> expected(3, std::vector<std::size_t>(2, 0));
  for (int c = 0; c < 10; ++c) {
    const auto [attrs, cred] = citizen();
    for (int i = 0; i < 3; ++i) {
      const std::size_t option = static_cast<std::size_t>(c + i) % 2;
      const auto first = petition::petition_sign(*petitions[i], cred, attrs, 1, option, rng);
      v.expect(petitions[i]->verify_and_record(first).accepted, "first signature rejected");
      ++expected[i][option];
      for (const std::size_t again : {option, 1 - option}) {
        const auto o = petitions[i]->verify_and_record(petition::petition_sign(*petitions[i], cred, attrs, 1, again, rng));
        v.expect(!o.accepted && o.reason == Reason::double_sign, "duplicate not rejected as double-sign");
      }
    }
  }
  for (int i = 0; i < 3; ++i) {
    v.expect(petitions[i]->tally().counts == expected[i], "tally mismatch");
    v.expect(petitions[i]->tally().total == 10, "tally total mismatch");
  }

  // Concurrent duplicate submissions of one packet.
  int races = 0;
  for (int round = 0; round < 10; ++round, ++races) {
    petition::Petition p(id_of("race-" + std::to_string(round)), vk, options);
    const auto [attrs, cred] = citizen();
    const auto packet = petition::petition_sign(p, cred, attrs, 1, 0, rng);
    std::atomic<int> accepted{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t)
      threads.emplace_back([&] {
        if (p.verify_and_record(packet).accepted) ++accepted;
      });
    for (auto& t : threads) t.join();
    v.expect(accepted == 1, "concurrent duplicate accepted " + std::to_string(accepted.load()) + " times");
  }
  if (v.ok) v.detail = "30 first signatures accepted, 60 duplicates rejected, " + std::to_string(races) +
                       " races accepted once";
  return v;
}

// ------------------------------------------------------------------ 10

Verdict gather_liveness() {
  Verdict v;
  testing::SeededRng rng(1010);
  std::mt19937_64 gen(1010);
  std::uniform_int_distribution<int> delay_ms(10, 500);
  const Params params = setup(128, 2);
  const auto keys = ttp_keygen(params, 3, 10, rng);
  double worst_slack = 1e9;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t unresponsive = static_cast<std::size_t>(trial) % 8;  // 0..7
    std::vector<std::size_t> order(10);
    for (std::size_t i = 0; i < 10; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), gen);

    service::GatherPolicy policy;
    policy.threshold = 3;
    policy.deadline = std::chrono::milliseconds(5000);
    std::vector<int> live_delays;
    for (std::size_t k = 0; k < 10; ++k) {
      const std::size_t i = order[k];
      const int d = delay_ms(gen);
      const bool dead = k < unresponsive;
      if (!dead) live_delays.push_back(d);
      auto local = std::make_shared<service::LocalAuthority>(
          params, keys.secret_shares[i], std::chrono::milliseconds(d),
          dead ? service::LocalAuthority::Fault::unresponsive : service::LocalAuthority::Fault::none);
      policy.targets.push_back({local, local->vk()});
    }
    std::sort(live_delays.begin(), live_delays.end());
    const double bound = live_delays[2] + 100.0;

    const auto attrs = fixtures::random_attrs(2, 1, rng);
    const auto prepared = prepare_blind_sign(params, attrs, Predicate::any(), rng);
    const auto start = Clock::now();
    try {
      const auto partials = service::gather(params, policy, prepared, attrs);
      const double elapsed = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
      v.expect(partials.size() == 3, "wrong number of partials");
      v.expect(elapsed < bound, "trial " + std::to_string(trial) + " took " + std::to_string(elapsed) +
                                    " ms, bound " + std::to_string(bound) + " ms");
      worst_slack = std::min(worst_slack, bound - elapsed);
    } catch (const std::exception& e) {
      v.fail("trial " + std::to_string(trial) + " with " + std::to_string(unresponsive) +
             " unresponsive failed: " + e.what());
    }
  }
  if (v.ok) {
    std::ostringstream os;
    os << "20 trials with 0..7 unresponsive, tightest margin " << static_cast<int>(worst_slack) << " ms";
    v.detail = os.str();
  }
  return v;
}

// ------------------------------------------------------------------ 11

// 10,000 iterations of each op, run in alternating chunks of 1,000 so that
// background load drifting over the run hits both means alike.
Verdict benchmark_sanity() {
  Verdict v;
  testing::SeededRng rng(1011);
  const bench::Config config;
  double sign_ms = 0, verify_ms = 0;
  for (int chunk = 0; chunk < 10; ++chunk) {
    sign_ms += bench::run(bench::Op::sign, 1000, config, rng).mean_ms / 10;
    verify_ms += bench::run(bench::Op::verify, 1000, config, rng).mean_ms / 10;
  }
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(3);
  os << "sign " << sign_ms << " ms, verify " << verify_ms << " ms over 10000 iterations each";
  v.expect(verify_ms >= 1.0 && verify_ms <= 100.0, "verify mean out of [1, 100] ms: " + os.str());
  v.expect(sign_ms < verify_ms, "sign not faster than verify: " + os.str());
  if (v.ok) v.detail = os.str();
  return v;
}

// ------------------------------------------------------------------ 12

// 10,000 inputs: a third uniformly random (half of them behind a valid
// envelope header), a third truncations, a third 1..4 byte mutations.
template <class Accepts>
std::size_t fuzz_kind(const std::string& name, const Bytes& valid, Accepts accepts, Verdict& v, std::mt19937_64& gen) {
  std::size_t decoded = 0;
  for (int i = 0; i < 10000; ++i) {
    Bytes input;
    switch (i % 3) {
      case 0: {
        input.resize(gen() % (2 * valid.size() + 1));
        for (auto& b : input) b = static_cast<std::uint8_t>(gen());
        if ((i / 3) % 2 == 0 && input.size() >= 2) std::copy(valid.begin(), valid.begin() + 2, input.begin());
        break;
      }
      case 1:
        input.assign(valid.begin(), valid.begin() + static_cast<std::ptrdiff_t>(gen() % valid.size()));
        break;
      default: {
        input = valid;
        const int edits = 1 + static_cast<int>(gen() % 4);
        for (int e = 0; e < edits; ++e) input[gen() % input.size()] ^= static_cast<std::uint8_t>(1 + gen() % 255);
        if (input == valid) input[0] ^= 0x80;
      }
    }
    try {
      if (accepts(ByteView(input.data(), input.size()))) v.fail(name + " input " + std::to_string(i) + " accepted");
      ++decoded;
    } catch (const wire::WireError&) {
    } catch (const std::exception& e) {
      v.fail(name + " input " + std::to_string(i) + " threw a non-wire error: " + e.what());
    }
  }
  return decoded;
}

Verdict wire_fuzz() {
  Verdict v;
  testing::SeededRng rng(1012);
  std::mt19937_64 gen(1012);
  const Params params = setup(128, 3);
  const auto keys = ttp_keygen(params, 2, 3, rng);
  const auto vk = aggregate_keys(keys.verification_shares);
  const auto& sk = keys.secret_shares[0];
  const auto& vk1 = keys.verification_shares[0];
  const auto attrs = fixtures::random_attrs(3, 2, rng);
  const auto prepared = prepare_blind_sign(params, attrs, Predicate::any(), rng);
  const auto blinded = blind_sign(params, sk, prepared.request);
  const auto partial = unblind(blinded, prepared.d);
  std::vector<PartialCredential> partials{partial, unblind(blind_sign(params, keys.secret_shares[1], prepared.request),
                                                           prepared.d)};
  const auto cred = aggregate_credentials(partials);
  const auto show = prove_cred(params, vk, cred, attrs, Predicate::any(), rng);

  std::ostringstream detail;
  auto report = [&](const std::string& name, std::size_t decoded) {
    detail << name << " " << decoded << " decoded; ";
  };

  // Accepted means the object would be acted on by its consumer.
  report("request", fuzz_kind(
                        "request", wire::encode(prepared.request),
                        [&](ByteView b) {
                          const auto req = wire::decode<BlindSignRequest>(b);
                          try {
                            blind_sign(params, sk, req);
                            return true;
                          } catch (const ProtocolError&) {
                            return false;
                          }
                        },
                        v, gen));
  report("partial", fuzz_kind(
                        "partial", wire::encode(blinded),
                        [&](ByteView b) {
                          const auto p = wire::decode<BlindedPartial>(b);
                          return p.index == sk.index && p.h == prepared.h &&
                                 verify_partial(params, vk1, unblind(p, prepared.d).credential, attrs.values());
                        },
                        v, gen));
  report("show", fuzz_kind(
                     "show", wire::encode(show),
                     [&](ByteView b) { return verify_cred(params, vk, wire::decode<ShowMaterial>(b)); }, v, gen));
  report("vk_share", fuzz_kind(
                         "vk_share", wire::encode(vk1),
                         [&](ByteView b) {
                           const auto k = wire::decode<VerificationKeyShare>(b);
                           return k.index == vk1.index && k.beta.size() == params.q() &&
                                  verify_partial(params, k, partial.credential, attrs.values());
                         },
                         v, gen));
  report("params_digest", fuzz_kind(
                              "params_digest", wire::encode(wire::ParamsDigest{params.digest()}),
                              [&](ByteView b) { return wire::decode<wire::ParamsDigest>(b).value == params.digest(); },
                              v, gen));
  if (v.ok) v.detail = "5 kinds x 10000 inputs, none accepted (" + detail.str().substr(0, detail.str().size() - 2) + ")";
  return v;
}

struct Criterion {
  int number;
  const char* name;
  Verdict (*run)();
};

const Criterion kCriteria[] = {
    {1, "oracle equivalence", oracle_equivalence},
    {2, "end-to-end completeness", end_to_end},
    {3, "under-threshold rejection", under_threshold},
    {4, "pairing-equation rejection", pairing_rejection},
    {5, "NIZK tamper", nizk_tamper},
    {6, "unlinkability", unlinkability},
    {7, "constant credential size", constant_size},
    {8, "forgery with fixed h", fixed_h_forgery},
    {9, "petition double-sign", petition_double_sign},
    {10, "threshold gather liveness", gather_liveness},
    {11, "benchmark sanity", benchmark_sanity},
    {12, "wire fuzz", wire_fuzz},
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : kCriteria) {
    if (!only.empty() && !only.count(c.number)) continue;
    const auto start = Clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    std::printf("%s %2d %-28s %7.1fs  %s\n", v.ok ? "PASS" : "FAIL", c.number, c.name, secs, v.detail.c_str());
    std::fflush(stdout);
    if (!v.ok) ++failed;
  }
  return failed ? 1 : 0;
}
