#include "tcred/petition.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <system_error>

#include "scheme_detail.hpp"
#include "tcred/wire.hpp"

namespace tcred::petition {

namespace {

constexpr std::array<std::uint8_t, 8> kMagic = {'T', 'C', 'R', 'P', 'E', 'T', 0, 1};
constexpr std::uint8_t kHeaderRecord = 1;
constexpr std::uint8_t kVoteRecord = 2;
constexpr std::size_t kChecksumSize = 8;

Bytes zeta_key(const G1& zeta) {
  const auto b = zeta.to_bytes();
  return Bytes(b.begin(), b.end());
}

Bytes frame(ByteView payload) {
  wire::Writer w;
  w.u32(static_cast<std::uint32_t>(payload.size())).raw(payload);
  const Digest sum = sha256(payload);
  w.raw(ByteView(sum.data(), kChecksumSize));
  return w.take();
}

void write_all(int fd, ByteView data) {
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::system_error(errno, std::generic_category(), "petition journal write");
    }
    done += static_cast<std::size_t>(n);
  }
}

void append_durably(const std::filesystem::path& path, ByteView data, bool create) {
  const int flags = O_WRONLY | O_APPEND | O_CLOEXEC | (create ? O_CREAT | O_EXCL : 0);
  const int fd = ::open(path.c_str(), flags, 0600);
  if (fd < 0) throw std::system_error(errno, std::generic_category(), "open " + path.string());
  try {
    write_all(fd, data);
    if (::fsync(fd) != 0) throw std::system_error(errno, std::generic_category(), "fsync " + path.string());
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
}

Outcome reject(Reason reason, std::string detail) { return Outcome{false, reason, std::move(detail)}; }

}  // namespace

G1 petition_tag(ByteView id) { return hash_bytes_to_g1(id, kTagDomain); }

Bytes encode(const SignaturePacket& packet) {
  wire::Writer w;
  w.g1(packet.zeta).u16(packet.option).u16(packet.key_position);
  wire::write_show(w, packet.show);
  return wire::seal(wire::Kind::petition_packet, w.take());
}

SignaturePacket decode_packet(ByteView bytes) {
  wire::Reader r(wire::open_as(bytes, wire::Kind::petition_packet));
  SignaturePacket p;
  p.zeta = r.g1();
  p.option = r.u16();
  p.key_position = r.u16();
  p.show = wire::read_show(r);
  r.finish();
  return p;
}

Bytes option_payload(std::size_t option, std::string_view text) {
  Transcript t;
  t.append_label("petition-option").append_u64(option).append_bytes(as_bytes(text));
  return t.bytes();
}

Petition::Petition(Bytes id, AggregatedVerificationKey vk, std::vector<std::string> options)
    : id_(std::move(id)), tag_(petition_tag(id_)), vk_(std::move(vk)), options_(std::move(options)) {
  if (options_.empty()) throw std::invalid_argument("a petition needs at least one option");
  if (options_.size() > 0xffff) throw std::invalid_argument("too many options");
  auto sorted = options_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("duplicate petition option");
  if (vk_.beta.empty()) throw std::invalid_argument("verification key has no attributes");
  params_ = setup(128, vk_.beta.size());
  counts_.assign(options_.size(), 0);
}

Outcome Petition::verify(const SignaturePacket& packet) const {
  if (packet.option >= options_.size())
    return reject(Reason::unknown_option, "option " + std::to_string(packet.option) + " does not exist");
  const NullifierStatement nullifier{tag_, packet.zeta, packet.key_position,
                                     option_payload(packet.option, options_[packet.option])};
  try {
    if (!verify_petition_show(params_, vk_, packet.show.statement(), nullifier, packet.show.proof))
      return reject(Reason::proof_invalid, "petition proof does not verify");
  } catch (const std::invalid_argument& e) {
    return reject(Reason::proof_invalid, e.what());
  }
  if (!show_pairing_holds(params_, vk_, packet.show))
    return reject(Reason::proof_invalid, "credential does not verify");
  return Outcome{true, std::nullopt, {}};
}

Outcome Petition::verify_and_record(const SignaturePacket& packet) {
  Outcome outcome = verify(packet);  // outside the lock; verification runs in parallel
  if (!outcome.accepted) return outcome;

  const Bytes key = zeta_key(packet.zeta);
  std::unique_lock lock(mutex_);
  if (spent_.count(key)) return reject(Reason::double_sign, "zeta already spent for this petition");
  if (journal_) {
    wire::Writer w;
    w.u8(kVoteRecord).blob(encode(packet));
    append_durably(*journal_, frame(w.take()), false);
  }
  spent_.insert(key);
  ++counts_[packet.option];
  return outcome;
}

Tally Petition::tally() const {
  std::shared_lock lock(mutex_);
  Tally t{counts_, spent_.size()};
  return t;
}

bool Petition::spent(const G1& zeta) const {
  std::shared_lock lock(mutex_);
  return spent_.count(zeta_key(zeta)) > 0;
}

void Petition::create_journal(const std::filesystem::path& path) {
  wire::Writer w;
  w.u8(kHeaderRecord).blob(id_).u16(options_.size());
  for (const auto& o : options_) w.blob(as_bytes(o));
  w.blob(wire::encode(vk_));

  std::unique_lock lock(mutex_);
  if (!spent_.empty()) throw std::logic_error("journal must be created before any signature is recorded");
  Bytes data(kMagic.begin(), kMagic.end());
  const Bytes header = frame(w.take());
  data.insert(data.end(), header.begin(), header.end());
  append_durably(path, data, true);
  journal_ = path;
}

std::unique_ptr<Petition> Petition::load(const std::filesystem::path& path) {
  const Bytes file = wire::read_file(path);
  if (file.size() < kMagic.size() || !std::equal(kMagic.begin(), kMagic.end(), file.begin()))
    throw std::runtime_error(path.string() + ": not a petition state file");

  // Split into records, stopping at a torn tail.
  std::vector<ByteView> records;
  std::size_t pos = kMagic.size(), good_end = pos;
  while (pos < file.size()) {
    if (file.size() - pos < 4) break;
    const std::uint32_t len = static_cast<std::uint32_t>(file[pos]) << 24 | static_cast<std::uint32_t>(file[pos + 1]) << 16 |
                              static_cast<std::uint32_t>(file[pos + 2]) << 8 | file[pos + 3];
    if (file.size() - pos - 4 < std::size_t{len} + kChecksumSize) break;
    const ByteView payload(file.data() + pos + 4, len);
    const Digest sum = sha256(payload);
    const bool last = pos + 4 + len + kChecksumSize == file.size();
    if (!std::equal(sum.begin(), sum.begin() + kChecksumSize, file.begin() + pos + 4 + len)) {
      if (last) break;
      throw std::runtime_error(path.string() + ": checksum mismatch at offset " + std::to_string(pos));
    }
    records.push_back(payload);
    pos += 4 + len + kChecksumSize;
    good_end = pos;
  }
  if (records.empty()) throw std::runtime_error(path.string() + ": missing header");

  std::unique_ptr<Petition> p;
  try {
    wire::Reader r(records[0]);
    if (r.u8() != kHeaderRecord) throw std::runtime_error("first record is not a header");
    const ByteView id = r.blob();
    std::vector<std::string> options(r.u16());
    for (auto& o : options) {
      const ByteView b = r.blob();
      o.assign(b.begin(), b.end());
    }
    auto vk = wire::decode<AggregatedVerificationKey>(r.blob());
    r.finish();
    p = std::make_unique<Petition>(Bytes(id.begin(), id.end()), std::move(vk), std::move(options));
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": bad header: " + e.what());
  }

  for (std::size_t i = 1; i < records.size(); ++i) {
    SignaturePacket packet;
    try {
      wire::Reader r(records[i]);
      if (r.u8() != kVoteRecord) throw std::runtime_error("unexpected record type");
      packet = decode_packet(r.blob());
      r.finish();
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ": record " + std::to_string(i) + ": " + e.what());
    }
    const Outcome o = p->verify_and_record(packet);
    if (!o.accepted)
      throw std::runtime_error(path.string() + ": record " + std::to_string(i) + " rejected on replay: " +
                               std::string(to_string(*o.reason)));
  }

  if (good_end < file.size()) std::filesystem::resize_file(path, good_end);
  p->journal_ = path;
  return p;
}

SignaturePacket petition_sign(const Petition& petition, const Credential& cred, const AttributeVector& attrs,
                              std::size_t key_position, std::size_t option, Rng& rng) {
  if (option >= petition.options().size()) throw std::invalid_argument("no such option");
  if (key_position == 0 || key_position > attrs.size() || attrs.is_public(key_position))
    throw std::invalid_argument("key attribute must be a private position");

  SignaturePacket packet;
  packet.option = static_cast<std::uint16_t>(option);
  packet.key_position = static_cast<std::uint16_t>(key_position);
  packet.zeta = petition.tag() * attrs.at(key_position);

  ShowWitness witness;
  packet.show = detail::begin_show(petition.params(), petition.vk(), cred, attrs, Predicate::any(), rng, witness);
  const NullifierStatement nullifier{petition.tag(), packet.zeta, key_position,
                                     option_payload(option, petition.options()[option])};
  packet.show.proof = prove_petition_show(petition.params(), petition.vk(), packet.show.statement(), nullifier,
                                          witness, rng);
  detail::wipe(witness);
  return packet;
}

}  // namespace tcred::petition
