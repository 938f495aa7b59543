#include "tcred/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>

#include "tcred/scheme.hpp"

namespace tcred::bench {

namespace {

constexpr std::pair<Op, std::string_view> kNames[] = {
    {Op::prepare, "prepare"}, {Op::sign, "sign"},   {Op::unblind, "unblind"},
    {Op::aggcred, "aggcred"}, {Op::prove, "prove"}, {Op::verify, "verify"},
};

// Keeps results observable so the optimizer cannot drop the work.
volatile std::uint8_t g_sink;

void sink(const G1& p) { g_sink = p.to_bytes()[1]; }

}  // namespace

std::string_view to_string(Op op) {
  for (const auto& [o, name] : kNames)
    if (o == op) return name;
  return "unknown";
}

std::optional<Op> parse_op(std::string_view name) {
  for (const auto& [o, n] : kNames)
    if (n == name) return o;
  return std::nullopt;
}

Result run(Op op, std::size_t iters, const Config& config, Rng& rng) {
  if (iters == 0) throw std::invalid_argument("iterations must be >= 1");
  if (config.private_attributes > config.attributes || config.attributes == 0)
    throw std::invalid_argument("need 1 <= attributes and private <= attributes");

  const Params params = setup(128, config.attributes);
  const auto keys = ttp_keygen(params, config.threshold, config.authorities, rng);
  const auto vk = aggregate_keys(keys.verification_shares);

  std::vector<Scalar> values(config.attributes);
  for (auto& v : values) v = Scalar::random(rng);
  std::vector<std::size_t> pub;
  for (std::size_t pos = config.private_attributes + 1; pos <= config.attributes; ++pos) pub.push_back(pos);
  const AttributeVector attrs(values, pub);

  const auto prepared = prepare_blind_sign(params, attrs, Predicate::any(), rng);
  const auto blinded = blind_sign(params, keys.secret_shares[0], prepared.request);
  std::vector<PartialCredential> partials;
  for (std::size_t i = 0; i < config.threshold; ++i)
    partials.push_back(unblind(blind_sign(params, keys.secret_shares[i], prepared.request), prepared.d));
  const Credential cred = aggregate_credentials(partials);
  const ShowMaterial show = prove_cred(params, vk, cred, attrs, Predicate::any(), rng);
  if (!verify_cred(params, vk, show)) throw std::logic_error("benchmark fixture does not verify");

  std::function<void()> body;
  switch (op) {
    case Op::prepare: body = [&] { sink(prepare_blind_sign(params, attrs, Predicate::any(), rng).h); }; break;
    case Op::sign: body = [&] { sink(blind_sign(params, keys.secret_shares[0], prepared.request).c.b); }; break;
    case Op::unblind: body = [&] { sink(unblind(blinded, prepared.d).credential.s); }; break;
    case Op::aggcred: body = [&] { sink(aggregate_credentials(partials).s); }; break;
    case Op::prove: body = [&] { sink(prove_cred(params, vk, cred, attrs, Predicate::any(), rng).nu); }; break;
    case Op::verify:
      body = [&] {
        if (!verify_cred(params, vk, show)) throw std::logic_error("verification failed during benchmark");
      };
      break;
  }

  // Welford's running mean and variance.
  double mean = 0, m2 = 0;
  for (std::size_t i = 0; i < iters; ++i) {
    const auto start = std::chrono::steady_clock::now();
    body();
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    const double delta = ms - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (ms - mean);
  }
  return Result{op, iters, mean, iters > 1 ? std::sqrt(m2 / static_cast<double>(iters - 1)) : 0.0};
}

std::string csv_header() { return "op,iters,mean_ms,stddev_ms"; }

std::string csv_row(const Result& r) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s,%zu,%.4f,%.4f", std::string(to_string(r.op)).c_str(), r.iters, r.mean_ms,
                r.stddev_ms);
  return buf;
}

}  // namespace tcred::bench
