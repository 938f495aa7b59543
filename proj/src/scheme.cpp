#include "tcred/scheme.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "nizk_detail.hpp"
#include "scheme_detail.hpp"

namespace tcred {

std::string_view to_string(Reason reason) {
  switch (reason) {
    case Reason::proof_invalid: return "proof-invalid";
    case Reason::params_mismatch: return "params-mismatch";
    case Reason::malformed: return "malformed";
    case Reason::threshold_unreachable: return "threshold-unreachable";
    case Reason::double_sign: return "double-sign";
    case Reason::rate_limited: return "rate-limited";
    case Reason::unknown_option: return "unknown-option";
  }
  return "unknown";
}

Digest AggregatedVerificationKey::digest() const {
  Transcript t;
  t.append_label("tcred-vk-v1").append(alpha).append_u64(beta.size());
  for (const auto& b : beta) t.append(b);
  return sha256(t.bytes());
}

namespace {

Scalar eval_poly(const std::vector<Scalar>& coeffs, const Scalar& at) {
  Scalar acc;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * at + *it;
  return acc;
}

void check_distinct(std::span<const AuthorityIndex> indices) {
  std::set<AuthorityIndex> seen;
  for (auto i : indices) {
    if (i == 0) throw std::invalid_argument("authority index 0 is reserved");
    if (!seen.insert(i).second) throw std::invalid_argument("duplicate authority index " + std::to_string(i));
  }
}

}  // namespace

namespace detail {

KeyGenOutput ttp_keygen(const Params& params, std::size_t t, std::size_t n, Rng& rng, MasterKey* master_out) {
  if (t == 0) throw std::invalid_argument("threshold must be at least 1");
  if (t > n) throw std::invalid_argument("threshold exceeds number of authorities");
  if (n > 0xffffffffu) throw std::invalid_argument("too many authorities");

  const std::size_t q = params.q();
  // polys[0] = v, polys[1 + j] = w_{j+1}; each has t coefficients.
  std::vector<std::vector<Scalar>> polys(q + 1, std::vector<Scalar>(t));
  for (auto& p : polys)
    for (auto& c : p) c = Scalar::random(rng);

  KeyGenOutput out;
  for (std::size_t i = 1; i <= n; ++i) {
    const Scalar at = Scalar::from_u64(i);
    SecretKeyShare sk;
    sk.index = static_cast<AuthorityIndex>(i);
    sk.x = eval_poly(polys[0], at);
    for (std::size_t j = 1; j <= q; ++j) sk.y.push_back(eval_poly(polys[j], at));
    out.verification_shares.push_back(verification_share(params, sk));
    out.secret_shares.push_back(std::move(sk));
  }

  if (master_out != nullptr) {
    master_out->x = polys[0][0];
    master_out->y.clear();
    for (std::size_t j = 1; j <= q; ++j) master_out->y.push_back(polys[j][0]);
  }
  for (auto& p : polys)
    for (auto& c : p) c.wipe();
  return out;
}

PreparedRequest prepare_blind_sign(const Params& params, const AttributeVector& attrs, const Predicate& predicate,
                                   Rng& rng, const std::optional<G1>& forced_h) {
  if (attrs.size() != params.q()) throw std::invalid_argument("attribute count must equal q");

  PreparedRequest out;
  const ElGamalKeyPair keys = elgamal_keygen(params, rng);
  out.d = keys.d;

  IssuanceWitness witness;
  witness.d = keys.d;
  witness.o = Scalar::random(rng);

  auto& req = out.request;
  req.gamma = keys.gamma;
  req.commitment = commit(params, attrs.values(), witness.o);
  req.public_attrs = attrs.public_attributes();
  req.predicate = predicate;
  out.h = forced_h ? *forced_h : hash_to_g1(req.commitment);

  for (const auto& m : attrs.private_values()) {
    Encryption enc = elgamal_encrypt(params, keys.gamma, out.h, m, rng);
    req.ciphertexts.push_back(enc.ciphertext);
    witness.private_attrs.push_back(m);
    witness.k.push_back(enc.k);
  }
  req.proof = prove_issuance(params, req.statement(out.h), witness, rng);

  witness.o.wipe();
  for (auto& k : witness.k) k.wipe();
  return out;
}

BlindedPartial sign_ciphertexts(const Params& params, const SecretKeyShare& sk, const BlindSignRequest& request,
                                const G1& h) {
  if (sk.y.size() != params.q()) throw ProtocolError(Reason::malformed, "secret key size does not match q");
  std::vector<std::size_t> priv;
  try {
    priv = private_positions_for(params.q(), request.public_attrs);
  } catch (const std::invalid_argument& e) {
    throw ProtocolError(Reason::malformed, e.what());
  }
  if (priv.size() != request.ciphertexts.size())
    throw ProtocolError(Reason::malformed, "ciphertext count does not match private attributes");

  BlindedPartial out;
  out.index = sk.index;
  out.h = h;
  Scalar public_exponent = sk.x;
  for (const auto& a : request.public_attrs) public_exponent += sk.y[a.position - 1] * a.value;
  out.c.b = h * public_exponent;
  for (std::size_t i = 0; i < priv.size(); ++i) {
    const Scalar& y = sk.y[priv[i] - 1];
    out.c.a += request.ciphertexts[i].a * y;
    out.c.b += request.ciphertexts[i].b * y;
  }
  public_exponent.wipe();
  return out;
}

}  // namespace detail

KeyGenOutput ttp_keygen(const Params& params, std::size_t t, std::size_t n, Rng& rng) {
  return detail::ttp_keygen(params, t, n, rng, nullptr);
}

VerificationKeyShare verification_share(const Params& params, const SecretKeyShare& sk) {
  VerificationKeyShare vk;
  vk.index = sk.index;
  vk.alpha = params.g2 * sk.x;
  for (const auto& y : sk.y) vk.beta.push_back(params.g2 * y);
  return vk;
}

std::vector<Scalar> lagrange_coefficients(std::span<const AuthorityIndex> indices) {
  if (indices.empty()) throw std::invalid_argument("empty index set");
  check_distinct(indices);
  std::vector<Scalar> out;
  out.reserve(indices.size());
  for (auto i : indices) {
    Scalar num = Scalar::from_u64(1);
    Scalar den = Scalar::from_u64(1);
    const Scalar si = Scalar::from_u64(i);
    for (auto j : indices) {
      if (j == i) continue;
      const Scalar sj = Scalar::from_u64(j);
      num *= -sj;
      den *= si - sj;
    }
    out.push_back(num * den.inverse());
  }
  return out;
}

IssuanceStatement BlindSignRequest::statement(const G1& h) const {
  return IssuanceStatement{gamma, commitment, h, ciphertexts, public_attrs, predicate};
}

PreparedRequest prepare_blind_sign(const Params& params, const AttributeVector& attrs, const Predicate& predicate,
                                   Rng& rng) {
  return detail::prepare_blind_sign(params, attrs, predicate, rng, std::nullopt);
}

BlindedPartial blind_sign(const Params& params, const SecretKeyShare& sk, const BlindSignRequest& request,
                          const Predicate& policy) {
  const G1 h = hash_to_g1(request.commitment);
  if (!policy.admits(request.public_attrs))
    throw ProtocolError(Reason::proof_invalid, "issuance policy requires disclosed attributes");
  if (h.is_identity()) throw ProtocolError(Reason::proof_invalid, "commitment hashes to the identity");
  bool ok = false;
  try {
    ok = detail::verify_issuance_trusted_h(params, request.statement(h), request.proof);
  } catch (const std::invalid_argument& e) {
    throw ProtocolError(Reason::malformed, e.what());
  }
  if (!ok) throw ProtocolError(Reason::proof_invalid, "issuance proof rejected");
  return detail::sign_ciphertexts(params, sk, request, h);
}

PartialCredential unblind(const BlindedPartial& partial, const Scalar& d) {
  return PartialCredential{partial.index, Credential{partial.h, elgamal_decrypt(d, partial.c)}};
}

AggregatedVerificationKey aggregate_keys(std::span<const VerificationKeyShare> shares) {
  if (shares.empty()) throw std::invalid_argument("no verification key shares");
  std::vector<AuthorityIndex> indices;
  for (const auto& s : shares) indices.push_back(s.index);
  const auto l = lagrange_coefficients(indices);

  const std::size_t q = shares.front().beta.size();
  AggregatedVerificationKey vk;
  vk.beta.resize(q);
  vk.indices = indices;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    if (shares[i].beta.size() != q) throw std::invalid_argument("verification key shares differ in size");
    vk.alpha += shares[i].alpha * l[i];
    for (std::size_t j = 0; j < q; ++j) vk.beta[j] += shares[i].beta[j] * l[i];
  }
  return vk;
}

Credential aggregate_credentials(std::span<const PartialCredential> partials) {
  if (partials.empty()) throw std::invalid_argument("no partial credentials");
  std::vector<AuthorityIndex> indices;
  for (const auto& p : partials) {
    if (!(p.credential.h == partials.front().credential.h))
      throw std::invalid_argument("partial credentials disagree on h");
    indices.push_back(p.index);
  }
  const auto l = lagrange_coefficients(indices);
  Credential out{partials.front().credential.h, G1()};
  for (std::size_t i = 0; i < partials.size(); ++i) out.s += partials[i].credential.s * l[i];
  return out;
}

Credential randomize(const Credential& cred, Rng& rng) {
  Scalar r = Scalar::random(rng);
  Credential out{cred.h * r, cred.s * r};
  r.wipe();
  return out;
}

namespace {

bool check_signature(const Params& params, const G2& alpha, const std::vector<G2>& beta, const Credential& cred,
                     std::span<const Scalar> values) {
  if (values.size() != beta.size() || beta.size() != params.q()) return false;
  if (cred.h.is_identity()) return false;
  G2 key = alpha;
  for (std::size_t j = 0; j < values.size(); ++j) key += beta[j] * values[j];
  return pairing_equal(cred.h, key, cred.s, params.g2);
}

}  // namespace

bool verify_signature(const Params& params, const AggregatedVerificationKey& vk, const Credential& cred,
                      std::span<const Scalar> values) {
  return check_signature(params, vk.alpha, vk.beta, cred, values);
}

bool verify_partial(const Params& params, const VerificationKeyShare& vk, const Credential& cred,
                    std::span<const Scalar> values) {
  return check_signature(params, vk.alpha, vk.beta, cred, values);
}

ShowStatement ShowMaterial::statement() const { return ShowStatement{kappa, nu, sigma, public_attrs, predicate}; }

namespace detail {

ShowMaterial begin_show(const Params& params, const AggregatedVerificationKey& vk, const Credential& cred,
                        const AttributeVector& attrs, const Predicate& predicate, Rng& rng, ShowWitness& witness) {
  if (attrs.size() != params.q() || vk.beta.size() != params.q())
    throw std::invalid_argument("attribute count must equal q");

  ShowMaterial show;
  show.sigma = randomize(cred, rng);
  show.public_attrs = attrs.public_attributes();
  show.predicate = predicate;

  witness = ShowWitness{attrs.private_values(), Scalar::random(rng)};
  show.kappa = vk.alpha + params.g2 * witness.r;
  const auto priv = attrs.private_positions();
  for (std::size_t i = 0; i < priv.size(); ++i) show.kappa += vk.beta[priv[i] - 1] * witness.private_attrs[i];
  show.nu = show.sigma.h * witness.r;
  return show;
}

void wipe(ShowWitness& witness) {
  witness.r.wipe();
  for (auto& m : witness.private_attrs) m.wipe();
}

}  // namespace detail

ShowMaterial prove_cred(const Params& params, const AggregatedVerificationKey& vk, const Credential& cred,
                        const AttributeVector& attrs, const Predicate& predicate, Rng& rng) {
  ShowWitness witness;
  ShowMaterial show = detail::begin_show(params, vk, cred, attrs, predicate, rng, witness);
  show.proof = prove_show(params, vk, show.statement(), witness, rng);
  detail::wipe(witness);
  return show;
}

bool show_pairing_holds(const Params& params, const AggregatedVerificationKey& vk, const ShowMaterial& show) {
  if (show.sigma.h.is_identity()) return false;
  G2 key = show.kappa;
  for (const auto& a : show.public_attrs) {
    if (a.position == 0 || a.position > vk.beta.size()) return false;
    key += vk.beta[a.position - 1] * a.value;
  }
  return pairing_equal(show.sigma.h, key, show.sigma.s + show.nu, params.g2);
}

bool verify_cred(const Params& params, const AggregatedVerificationKey& vk, const ShowMaterial& show,
                 const Predicate& policy) {
  if (show.sigma.h.is_identity()) return false;
  if (!policy.admits(show.public_attrs)) return false;
  try {
    if (!verify_show(params, vk, show.statement(), show.proof)) return false;
  } catch (const std::invalid_argument&) {
    return false;
  }
  return show_pairing_holds(params, vk, show);
}

}  // namespace tcred
