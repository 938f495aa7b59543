#include "tcred/nizk.hpp"

#include "nizk_detail.hpp"

#include <algorithm>
#include <stdexcept>

namespace tcred {

namespace {

// lhs = sum_i base_i * witness[index_i]
template <class Group>
struct Equation {
  Group lhs;
  std::vector<std::pair<Group, std::size_t>> terms;
};

struct LinearRelation {
  std::size_t witness_count = 0;
  std::vector<Equation<G1>> g1;
  std::vector<Equation<G2>> g2;
};

template <class Group>
Group combine(const std::vector<std::pair<Group, std::size_t>>& terms, const std::vector<Scalar>& values) {
  Group acc;
  for (const auto& [base, idx] : terms) acc += base * values.at(idx);
  return acc;
}

void append_commitments(Transcript& t, const LinearRelation& rel, const std::vector<G1>& c1,
                        const std::vector<G2>& c2) {
  t.append_label("commitments").append_u64(rel.g1.size()).append_u64(rel.g2.size());
  for (const auto& p : c1) t.append(p);
  for (const auto& p : c2) t.append(p);
}

// `statement` already holds the tag-specific statement encoding.
std::pair<Scalar, std::vector<Scalar>> prove_relation(std::string_view tag, Transcript statement,
                                                      const LinearRelation& rel, const std::vector<Scalar>& witness,
                                                      Rng& rng) {
  std::vector<Scalar> blinds(rel.witness_count);
  for (auto& b : blinds) b = Scalar::random(rng);

  std::vector<G1> c1;
  std::vector<G2> c2;
  for (const auto& eq : rel.g1) c1.push_back(combine(eq.terms, blinds));
  for (const auto& eq : rel.g2) c2.push_back(combine(eq.terms, blinds));
  append_commitments(statement, rel, c1, c2);
  const Scalar c = hash_to_scalar(tag, statement.bytes());

  std::vector<Scalar> responses(rel.witness_count);
  for (std::size_t i = 0; i < rel.witness_count; ++i) responses[i] = blinds[i] - c * witness[i];
  for (auto& b : blinds) b.wipe();
  return {c, std::move(responses)};
}

bool verify_relation(std::string_view tag, Transcript statement, const LinearRelation& rel, const Scalar& challenge,
                     const std::vector<Scalar>& responses) {
  if (responses.size() != rel.witness_count) throw std::invalid_argument("proof response count mismatch");
  std::vector<G1> c1;
  std::vector<G2> c2;
  for (const auto& eq : rel.g1) c1.push_back(combine(eq.terms, responses) + eq.lhs * challenge);
  for (const auto& eq : rel.g2) c2.push_back(combine(eq.terms, responses) + eq.lhs * challenge);
  append_commitments(statement, rel, c1, c2);
  return hash_to_scalar(tag, statement.bytes()) == challenge;
}

void append_public(Transcript& t, const std::vector<PublicAttribute>& attrs, const Predicate& predicate) {
  t.append_label("public").append_u64(attrs.size());
  for (const auto& a : attrs) t.append_u64(a.position).append(a.value);
  t.append_label("predicate").append_bytes(predicate.descriptor());
}

// ------------------------------------------------------------ issuance

struct IssuanceLayout {
  std::vector<std::size_t> priv;
  LinearRelation rel;
  Transcript transcript;
};

IssuanceLayout issuance_layout(const Params& params, const IssuanceStatement& stmt) {
  IssuanceLayout out;
  out.priv = private_positions_for(params.q(), stmt.public_attrs);
  const std::size_t k = out.priv.size();
  if (stmt.ciphertexts.size() != k) throw std::invalid_argument("ciphertext count must equal private attribute count");

  // witness layout: d, o, m[0..k), k[0..k)
  const std::size_t kD = 0, kO = 1, kM = 2, kK = 2 + k;
  auto& rel = out.rel;
  rel.witness_count = 2 + 2 * k;

  rel.g1.push_back({stmt.gamma, {{params.g1, kD}}});

  G1 lhs = stmt.commitment;
  for (const auto& a : stmt.public_attrs) lhs = lhs - params.hs[a.position - 1] * a.value;
  Equation<G1> cm{lhs, {{params.g1, kO}}};
  for (std::size_t i = 0; i < k; ++i) cm.terms.emplace_back(params.hs[out.priv[i] - 1], kM + i);
  rel.g1.push_back(std::move(cm));

  for (std::size_t i = 0; i < k; ++i) {
    rel.g1.push_back({stmt.ciphertexts[i].a, {{params.g1, kK + i}}});
    rel.g1.push_back({stmt.ciphertexts[i].b, {{stmt.gamma, kK + i}, {stmt.h, kM + i}}});
  }

  auto& t = out.transcript;
  const Digest pd = params.digest();
  t.append_label("issuance").append_bytes(pd).append(stmt.gamma).append(stmt.commitment).append(stmt.h);
  t.append_u64(stmt.ciphertexts.size());
  for (const auto& c : stmt.ciphertexts) t.append(c.a).append(c.b);
  append_public(t, stmt.public_attrs, stmt.predicate);
  return out;
}

// ------------------------------------------------------------ show

struct ShowLayout {
  std::vector<std::size_t> priv;
  LinearRelation rel;
  Transcript transcript;
};

ShowLayout show_layout(const Params& params, const AggregatedVerificationKey& vk, const ShowStatement& stmt,
                       const NullifierStatement* nullifier) {
  if (vk.beta.size() != params.q()) throw std::invalid_argument("verification key size does not match q");
  ShowLayout out;
  out.priv = private_positions_for(params.q(), stmt.public_attrs);
  const std::size_t k = out.priv.size();
  const std::size_t kR = k;
  auto& rel = out.rel;
  rel.witness_count = k + 1;

  Equation<G2> kappa{stmt.kappa - vk.alpha, {}};
  for (std::size_t i = 0; i < k; ++i) kappa.terms.emplace_back(vk.beta[out.priv[i] - 1], i);
  kappa.terms.emplace_back(params.g2, kR);
  rel.g2.push_back(std::move(kappa));
  rel.g1.push_back({stmt.nu, {{stmt.sigma.h, kR}}});

  auto& t = out.transcript;
  const Digest vd = vk.digest();
  t.append_label("show").append_bytes(params.digest()).append_bytes(vd);
  t.append(stmt.kappa).append(stmt.nu).append(stmt.sigma.h).append(stmt.sigma.s);
  append_public(t, stmt.public_attrs, stmt.predicate);

  if (nullifier != nullptr) {
    auto it = std::find(out.priv.begin(), out.priv.end(), nullifier->key_position);
    if (it == out.priv.end()) throw std::invalid_argument("nullifier key position must be a private attribute");
    rel.g1.push_back({nullifier->zeta, {{nullifier->tag, static_cast<std::size_t>(it - out.priv.begin())}}});
    t.append_label("nullifier").append(nullifier->tag).append(nullifier->zeta).append_u64(nullifier->key_position);
    t.append_bytes(nullifier->payload);
  }
  return out;
}

std::vector<Scalar> show_witness_vector(const ShowLayout& layout, const ShowWitness& witness) {
  if (witness.private_attrs.size() != layout.priv.size())
    throw std::invalid_argument("witness private attribute count mismatch");
  std::vector<Scalar> w = witness.private_attrs;
  w.push_back(witness.r);
  return w;
}

}  // namespace

IssuanceProof prove_issuance(const Params& params, const IssuanceStatement& stmt, const IssuanceWitness& witness,
                             Rng& rng) {
  if (!stmt.predicate.admits(stmt.public_attrs)) throw std::invalid_argument("predicate not satisfied");
  auto layout = issuance_layout(params, stmt);
  const std::size_t k = layout.priv.size();
  if (witness.private_attrs.size() != k || witness.k.size() != k)
    throw std::invalid_argument("issuance witness length mismatch");

  std::vector<Scalar> w;
  w.reserve(2 + 2 * k);
  w.push_back(witness.d);
  w.push_back(witness.o);
  w.insert(w.end(), witness.private_attrs.begin(), witness.private_attrs.end());
  w.insert(w.end(), witness.k.begin(), witness.k.end());

  auto [c, responses] = prove_relation(kIssuanceProofTag, std::move(layout.transcript), layout.rel, w, rng);
  for (auto& s : w) s.wipe();
  return {c, std::move(responses)};
}

namespace {

bool verify_issuance_impl(const Params& params, const IssuanceStatement& stmt, const IssuanceProof& proof,
                          bool check_h) {
  auto layout = issuance_layout(params, stmt);
  if (proof.responses.size() != layout.rel.witness_count)
    throw std::invalid_argument("issuance proof response count mismatch");
  if (!stmt.predicate.admits(stmt.public_attrs)) return false;
  if (check_h && (stmt.h.is_identity() || !(stmt.h == hash_to_g1(stmt.commitment)))) return false;
  return verify_relation(kIssuanceProofTag, std::move(layout.transcript), layout.rel, proof.challenge,
                         proof.responses);
}

}  // namespace

bool verify_issuance(const Params& params, const IssuanceStatement& stmt, const IssuanceProof& proof) {
  return verify_issuance_impl(params, stmt, proof, true);
}

bool detail::verify_issuance_trusted_h(const Params& params, const IssuanceStatement& stmt,
                                       const IssuanceProof& proof) {
  return verify_issuance_impl(params, stmt, proof, false);
}

ShowProof prove_show(const Params& params, const AggregatedVerificationKey& vk, const ShowStatement& stmt,
                     const ShowWitness& witness, Rng& rng) {
  if (!stmt.predicate.admits(stmt.public_attrs)) throw std::invalid_argument("predicate not satisfied");
  auto layout = show_layout(params, vk, stmt, nullptr);
  auto w = show_witness_vector(layout, witness);
  auto [c, responses] = prove_relation(kShowProofTag, std::move(layout.transcript), layout.rel, w, rng);
  for (auto& s : w) s.wipe();
  return {c, std::move(responses)};
}

bool verify_show(const Params& params, const AggregatedVerificationKey& vk, const ShowStatement& stmt,
                 const ShowProof& proof) {
  auto layout = show_layout(params, vk, stmt, nullptr);
  if (proof.responses.size() != layout.rel.witness_count)
    throw std::invalid_argument("show proof response count mismatch");
  if (!stmt.predicate.admits(stmt.public_attrs)) return false;
  return verify_relation(kShowProofTag, std::move(layout.transcript), layout.rel, proof.challenge, proof.responses);
}

ShowProof prove_petition_show(const Params& params, const AggregatedVerificationKey& vk, const ShowStatement& stmt,
                              const NullifierStatement& nullifier, const ShowWitness& witness, Rng& rng) {
  if (!stmt.predicate.admits(stmt.public_attrs)) throw std::invalid_argument("predicate not satisfied");
  auto layout = show_layout(params, vk, stmt, &nullifier);
  auto w = show_witness_vector(layout, witness);
  auto [c, responses] = prove_relation(kPetitionProofTag, std::move(layout.transcript), layout.rel, w, rng);
  for (auto& s : w) s.wipe();
  return {c, std::move(responses)};
}

bool verify_petition_show(const Params& params, const AggregatedVerificationKey& vk, const ShowStatement& stmt,
                          const NullifierStatement& nullifier, const ShowProof& proof) {
  auto layout = show_layout(params, vk, stmt, &nullifier);
  if (proof.responses.size() != layout.rel.witness_count)
    throw std::invalid_argument("show proof response count mismatch");
  if (!stmt.predicate.admits(stmt.public_attrs)) return false;
  if (nullifier.tag.is_identity()) return false;
  return verify_relation(kPetitionProofTag, std::move(layout.transcript), layout.rel, proof.challenge,
                         proof.responses);
}

}  // namespace tcred
