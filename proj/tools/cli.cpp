#include "cli.hpp"

#include <signal.h>

#include <atomic>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "keystore.hpp"
#include "tcred/bench.hpp"
#include "tcred/petition.hpp"
#include "tcred/service.hpp"

namespace tcred::cli {

namespace {

constexpr std::string_view kStringAttributeTag = "TCRED-ATTR-STR";

std::vector<std::size_t> parse_positions(const std::string& csv) {
  std::vector<std::size_t> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || v == 0) throw UsageError("bad position '" + item + "'");
    out.push_back(v);
  }
  return out;
}

AttributeVector build_attributes(const std::vector<std::string>& specs, const std::string& public_csv,
                                 std::size_t q) {
  if (specs.size() != q)
    throw UsageError("the key store expects " + std::to_string(q) + " attributes, got " + std::to_string(specs.size()));
  std::vector<Scalar> values;
  for (const auto& s : specs) values.push_back(parse_attribute(s));
  const auto pub = parse_positions(public_csv);
  for (auto p : pub)
    if (p > q) throw UsageError("public position " + std::to_string(p) + " exceeds " + std::to_string(q));
  return AttributeVector(std::move(values), pub);
}

struct Issued {
  AttributeVector attrs;
  std::vector<PartialCredential> partials;
};

void write_issued(const fs::path& out, const Digest& digest, const Issued& issued) {
  fs::create_directories(out);
  save_bound(out / "attributes", digest, issued.attrs);
  for (const auto& p : issued.partials) save_bound(out / ("partial-" + std::to_string(p.index)), digest, p);
}

// --------------------------------------------------------------- commands

struct Io {
  std::ostream& out;
  std::ostream& err;
};

int cmd_keygen(Io io, std::size_t t, std::size_t n, std::size_t q, const fs::path& dir) {
  const auto ks = KeyStore::create(dir, t, n, q);
  io.err << "warning: secret key shares in " << dir.string() << " are stored unencrypted\n";
  io.out << "params " << to_hex(ks.digest()) << "\n";
  for (AuthorityIndex i = 1; i <= n; ++i) io.out << "wrote sk-" << i << " vk-" << i << "\n";
  return kOk;
}

int cmd_aggregate_keys(Io io, const fs::path& dir, const std::string& indices_csv) {
  const auto ks = KeyStore::open(dir);
  std::vector<VerificationKeyShare> shares;
  if (indices_csv.empty()) {
    shares = ks.verification_shares();
  } else {
    for (auto i : parse_positions(indices_csv)) shares.push_back(ks.verification_share(static_cast<AuthorityIndex>(i)));
  }
  if (shares.size() < ks.threshold) throw UsageError("need at least " + std::to_string(ks.threshold) + " vk shares");
  const auto vk = aggregate_keys(shares);
  save_bound(ks.agg_vk_path(), ks.digest(), vk);
  io.out << "vk " << to_hex(vk.digest()) << "\n";
  return kOk;
}

struct RequestFlags {
  fs::path store;
  std::vector<std::string> attrs;
  std::string public_csv;
  std::vector<std::string> authorities;  // i=URL
  std::size_t threshold = 0;
  unsigned timeout_ms = 5000;
  unsigned deadline_ms = 10000;
  fs::path out;
};

int cmd_request(Io io, const RequestFlags& f) {
  const auto ks = KeyStore::open(f.store);
  const auto attrs = build_attributes(f.attrs, f.public_csv, ks.params.q());

  service::GatherPolicy policy;
  policy.threshold = f.threshold ? f.threshold : ks.threshold;
  policy.per_request_timeout = std::chrono::milliseconds(f.timeout_ms);
  policy.deadline = std::chrono::milliseconds(f.deadline_ms);
  for (const auto& spec : f.authorities) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw UsageError("--authority expects INDEX=URL, got '" + spec + "'");
    const auto idx = parse_positions(spec.substr(0, eq));
    if (idx.size() != 1) throw UsageError("bad authority index in '" + spec + "'");
    const auto i = static_cast<AuthorityIndex>(idx[0]);
    auto ep = std::make_shared<service::HttpAuthorityEndpoint>(i, spec.substr(eq + 1));
    // Prefer the locally stored share; fall back to asking the authority.
    const auto vk = fs::exists(ks.vk_path(i)) ? ks.verification_share(i) : ep->fetch_vk();
    policy.targets.push_back({ep, vk});
  }
  if (policy.targets.size() < policy.threshold)
    throw UsageError("need at least " + std::to_string(policy.threshold) + " --authority flags");

  const auto prepared = prepare_blind_sign(ks.params, attrs);
  Issued issued{attrs, service::gather(ks.params, policy, prepared, attrs)};
  write_issued(f.out, ks.digest(), issued);
  io.out << "gathered " << issued.partials.size() << " partial credentials\n";
  return kOk;
}

int cmd_issue_local(Io io, const RequestFlags& f) {
  const auto ks = KeyStore::open(f.store);
  const auto attrs = build_attributes(f.attrs, f.public_csv, ks.params.q());
  service::GatherPolicy policy;
  policy.threshold = f.threshold ? f.threshold : ks.threshold;
  for (AuthorityIndex i = 1; i <= ks.authorities; ++i) {
    if (!fs::exists(ks.sk_path(i))) continue;
    auto local = std::make_shared<service::LocalAuthority>(ks.params, ks.secret_share(i));
    policy.targets.push_back({local, local->vk()});
  }
  if (policy.targets.size() < policy.threshold) throw UsageError("not enough secret shares in the store");
  const auto prepared = prepare_blind_sign(ks.params, attrs);
  Issued issued{attrs, service::gather(ks.params, policy, prepared, attrs)};
  write_issued(f.out, ks.digest(), issued);
  io.out << "gathered " << issued.partials.size() << " partial credentials\n";
  return kOk;
}

int cmd_aggregate(Io io, const fs::path& store, const fs::path& in, const fs::path& out) {
  const auto ks = KeyStore::open(store);
  const auto attrs = load_bound<AttributeVector>(in / "attributes", ks.digest());
  std::vector<PartialCredential> partials;
  for (const auto& entry : fs::directory_iterator(in))
    if (entry.path().filename().string().starts_with("partial-"))
      partials.push_back(load_bound<PartialCredential>(entry.path(), ks.digest()));
  if (partials.size() < ks.threshold)
    throw ProtocolError(Reason::threshold_unreachable, std::to_string(partials.size()) + " partials, need " +
                                                           std::to_string(ks.threshold));
  const auto cred = aggregate_credentials(partials);
  if (!verify_signature(ks.params, ks.aggregated_key(), cred, attrs.values()))
    throw ProtocolError(Reason::proof_invalid, "aggregated credential does not verify");
  save_bound(out, ks.digest(), cred);
  io.out << "credential " << out.string() << "\n";
  return kOk;
}

int cmd_show(Io io, const fs::path& store, const fs::path& cred_path, const fs::path& attrs_path,
             const std::string& reveal_csv, const fs::path& out) {
  const auto ks = KeyStore::open(store);
  const auto cred = load_bound<Credential>(cred_path, ks.digest());
  const auto reveal = parse_positions(reveal_csv);
  for (auto p : reveal)
    if (p > ks.params.q()) throw UsageError("reveal position " + std::to_string(p) + " out of range");
  const auto attrs = load_bound<AttributeVector>(attrs_path, ks.digest()).with_public(reveal);
  const auto show = prove_cred(ks.params, ks.aggregated_key(), cred, attrs, Predicate::reveal(reveal));
  save_bound(out, ks.digest(), show);
  io.out << "show " << out.string() << "\n";
  return kOk;
}

int cmd_verify(Io io, const fs::path& store, const fs::path& show_path, const std::string& require_csv) {
  const auto ks = KeyStore::open(store);
  const auto policy = Predicate::reveal(parse_positions(require_csv));
  ShowMaterial show;
  try {
    show = load_bound<ShowMaterial>(show_path, ks.digest());
  } catch (const wire::WireError& e) {
    io.out << "INVALID\n";
    io.err << "error: malformed: " << e.what() << "\n";
    return kRejected;
  } catch (const ProtocolError& e) {
    io.out << "INVALID\n";
    io.err << "error: " << e.what() << "\n";
    return kRejected;
  }
  if (!verify_cred(ks.params, ks.aggregated_key(), show, policy)) {
    io.out << "INVALID\n";
    io.err << "error: proof-invalid: show does not verify\n";
    return kRejected;
  }
  io.out << "VALID\n";
  for (const auto& a : show.public_attrs) io.out << "m" << a.position << " = " << to_hex(a.value.to_bytes()) << "\n";
  return kOk;
}

std::atomic<bool> g_serving{false};

int cmd_serve(Io io, const fs::path& config_path) {
  service::AuthorityConfig config;
  std::unique_ptr<service::AuthorityService> svc;
  try {
    config = service::AuthorityConfig::load(config_path);
    svc = service::AuthorityService::from_config(config);
  } catch (const service::ConfigError& e) {
    io.err << "error: bad config: " << e.what() << "\n";
    return kUsage;
  }
  const auto port = svc->bind(config.host, config.port);
  if (!port) {
    io.err << "error: cannot bind " << config.host << ":" << config.port << "\n";
    return kBindFailed;
  }

  // Signals are taken synchronously by a watcher thread.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  g_serving = true;
  std::thread watcher([&] {
    const timespec tick{0, 200'000'000};
    while (g_serving) {
      if (sigtimedwait(&set, nullptr, &tick) > 0) {
        svc->stop();
        return;
      }
    }
  });

  io.out << "authority " << svc->index() << " listening on " << config.host << ":" << *port << std::endl;
  svc->run();
  g_serving = false;
  watcher.join();
  return kOk;
}

int cmd_petition_init(Io io, const fs::path& store, const std::string& id, const std::vector<std::string>& options,
                      const fs::path& out) {
  const auto ks = KeyStore::open(store);
  const auto idb = as_bytes(id);
  petition::Petition p(Bytes(idb.begin(), idb.end()), ks.aggregated_key(), options);
  if (fs::exists(out)) throw UsageError(out.string() + " already exists");
  p.create_journal(out);
  io.out << "petition " << id << " g_s " << to_hex(p.tag().to_bytes()) << "\n";
  return kOk;
}

int cmd_petition_sign(Io io, const fs::path& state, const fs::path& cred_path, const fs::path& attrs_path,
                      std::size_t key_position, const std::string& option, const fs::path& out) {
  const auto p = petition::Petition::load(state);
  const Digest d = p->params().digest();
  const auto cred = load_bound<Credential>(cred_path, d);
  const auto attrs = load_bound<AttributeVector>(attrs_path, d);
  const auto& opts = p->options();
  const auto it = std::find(opts.begin(), opts.end(), option);
  if (it == opts.end()) throw ProtocolError(Reason::unknown_option, "'" + option + "' is not an option");
  // Only the key has to stay hidden; everything else is left as issued.
  std::vector<std::size_t> pub;
  for (std::size_t pos = 1; pos <= attrs.size(); ++pos)
    if (attrs.is_public(pos) && pos != key_position) pub.push_back(pos);
  const auto packet =
      petition::petition_sign(*p, cred, attrs.with_public(pub), key_position, static_cast<std::size_t>(it - opts.begin()));
  wire::write_file(out, wire::bind(d, petition::encode(packet)));
  io.out << "zeta " << to_hex(packet.zeta.to_bytes()) << "\n";
  return kOk;
}

int cmd_petition_submit(Io io, const fs::path& state, const fs::path& packet_path) {
  const auto p = petition::Petition::load(state);
  const Bytes file = wire::read_file(packet_path);
  const auto bound = wire::unbind(file);
  if (bound.params_digest != p->params().digest())
    throw ProtocolError(Reason::params_mismatch, "packet was made for different params");
  const auto outcome = p->verify_and_record(petition::decode_packet(bound.envelope));
  if (!outcome.accepted) throw ProtocolError(*outcome.reason, outcome.detail);
  io.out << "accepted\n";
  return kOk;
}

int cmd_petition_tally(Io io, const fs::path& state) {
  const auto p = petition::Petition::load(state);
  const auto t = p->tally();
  for (std::size_t i = 0; i < t.counts.size(); ++i) io.out << p->options()[i] << "\t" << t.counts[i] << "\n";
  io.out << "total\t" << t.total << "\n";
  return kOk;
}

int cmd_bench(Io io, const std::string& op_name, std::size_t iters, bool csv, const bench::Config& config) {
  const auto op = bench::parse_op(op_name);
  if (!op) throw UsageError("unknown op '" + op_name + "'");
  if (iters == 0) throw UsageError("--iters must be >= 1");
  const auto r = bench::run(*op, iters, config);
  if (csv) {
    io.out << bench::csv_header() << "\n" << bench::csv_row(r) << "\n";
  } else {
    io.out << std::fixed << std::setprecision(3) << bench::to_string(r.op) << ": " << r.iters << " iters, mean "
           << r.mean_ms << " ms, stddev " << r.stddev_ms << " ms\n";
  }
  return kOk;
}

}  // namespace

Scalar parse_attribute(std::string_view text, Rng& rng) {
  if (text == "random") return Scalar::random(rng);
  if (text.starts_with("str:")) return hash_to_scalar(kStringAttributeTag, as_bytes(text.substr(4)));
  if (text.starts_with("0x") || text.starts_with("0X")) {
    auto hex = std::string(text.substr(2));
    if (hex.empty() || hex.size() > 64) throw UsageError("hex attribute must have 1..64 digits");
    if (hex.size() % 2) hex.insert(hex.begin(), '0');
    const auto bytes = from_hex(hex);
    if (!bytes) throw UsageError("bad hex attribute '" + std::string(text) + "'");
    std::array<std::uint8_t, 32> be{};
    std::copy(bytes->begin(), bytes->end(), be.end() - static_cast<std::ptrdiff_t>(bytes->size()));
    const auto s = Scalar::from_bytes(be);
    if (!s) throw UsageError("hex attribute is not below the group order");
    return *s;
  }
  if (text.empty() || text.find_first_not_of("0123456789") != std::string_view::npos)
    throw UsageError("attribute '" + std::string(text) + "' is not decimal, 0x-hex, str:TEXT or random");
  if (text.size() > 77) throw UsageError("decimal attribute too long");  // p has 77 digits
  Scalar acc;
  const Scalar ten = Scalar::from_u64(10);
  for (char c : text) acc = acc * ten + Scalar::from_u64(static_cast<std::uint64_t>(c - '0'));
  return acc;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Threshold-issued anonymous credentials"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::size_t t = 0, n = 0, q = 0;
  fs::path dir;
  auto* keygen = app.add_subcommand("keygen", "Trusted-dealer key generation into a key store");
  keygen->add_option("--threshold", t)->required();
  keygen->add_option("--authorities", n)->required();
  keygen->add_option("--attributes", q)->required();
  keygen->add_option("--out", dir)->required();

  std::string indices;
  auto* aggkeys = app.add_subcommand("aggregate-keys", "Aggregate verification key shares");
  aggkeys->add_option("--store", dir)->required();
  aggkeys->add_option("--indices", indices, "comma-separated subset (default: all)");

  RequestFlags rf;
  auto add_request_flags = [&](CLI::App* sub) {
    sub->add_option("--store", rf.store)->required();
    sub->add_option("--attr", rf.attrs, "decimal | 0x<hex> | str:<text> | random, in position order")->required();
    sub->add_option("--public", rf.public_csv, "positions disclosed to the authorities");
    sub->add_option("--threshold", rf.threshold, "default: the store's threshold");
    sub->add_option("--out", rf.out)->required();
  };
  auto* request = app.add_subcommand("request", "Request a credential from running authorities");
  add_request_flags(request);
  request->add_option("--authority", rf.authorities, "INDEX=URL, repeatable")->required();
  request->add_option("--timeout-ms", rf.timeout_ms);
  request->add_option("--deadline-ms", rf.deadline_ms);
  auto* issue_local = app.add_subcommand("issue-local", "Issue with every authority of the store in-process");
  add_request_flags(issue_local);

  fs::path in, outp, cred, attrs, show_path, state, packet;
  auto* aggregate = app.add_subcommand("aggregate", "Aggregate partial credentials");
  aggregate->add_option("--store", dir)->required();
  aggregate->add_option("--in", in)->required();
  aggregate->add_option("--out", outp)->required();

  std::string reveal;
  auto* show = app.add_subcommand("show", "Produce a show for a credential");
  show->add_option("--store", dir)->required();
  show->add_option("--credential", cred)->required();
  show->add_option("--attributes", attrs)->required();
  show->add_option("--reveal", reveal, "comma-separated positions to disclose");
  show->add_option("--out", outp)->required();

  std::string require;
  auto* verify = app.add_subcommand("verify", "Verify a show; prints VALID or INVALID");
  verify->add_option("--store", dir)->required();
  verify->add_option("--show", show_path)->required();
  verify->add_option("--require", require, "positions that must be disclosed");

  fs::path config;
  auto* serve = app.add_subcommand("serve", "Run an issuing authority");
  serve->add_option("--config", config)->required();

  auto* pet = app.add_subcommand("petition", "Petition commands");
  pet->require_subcommand(1);
  std::string id, option;
  std::vector<std::string> options;
  std::size_t key_position = 1;
  auto* pinit = pet->add_subcommand("init", "Create a petition state file");
  pinit->add_option("--store", dir)->required();
  pinit->add_option("--id", id)->required();
  pinit->add_option("--option", options)->required();
  pinit->add_option("--out", state)->required();
  auto* psign = pet->add_subcommand("sign", "Sign a petition with a credential");
  psign->add_option("--state", state)->required();
  psign->add_option("--credential", cred)->required();
  psign->add_option("--attributes", attrs)->required();
  psign->add_option("--key-position", key_position);
  psign->add_option("--option", option)->required();
  psign->add_option("--out", packet)->required();
  auto* psubmit = pet->add_subcommand("submit", "Verify and record a signature packet");
  psubmit->add_option("--state", state)->required();
  psubmit->add_option("--packet", packet)->required();
  auto* ptally = pet->add_subcommand("tally", "Print the tally");
  ptally->add_option("--state", state)->required();

  std::string op;
  std::size_t iters = 0;
  bool csv = false;
  bench::Config bc;
  auto* benchcmd = app.add_subcommand("bench", "Time one operation");
  benchcmd->add_option("--op", op, "prepare | sign | unblind | aggcred | prove | verify")->required();
  benchcmd->add_option("--iters", iters)->required();
  benchcmd->add_flag("--csv", csv, "print op,iters,mean_ms,stddev_ms");
  benchcmd->add_option("--attributes", bc.attributes);
  benchcmd->add_option("--private", bc.private_attributes);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  const Io io{out, err};
  try {
    if (*keygen) return cmd_keygen(io, t, n, q, dir);
    if (*aggkeys) return cmd_aggregate_keys(io, dir, indices);
    if (*request) return cmd_request(io, rf);
    if (*issue_local) return cmd_issue_local(io, rf);
    if (*aggregate) return cmd_aggregate(io, dir, in, outp);
    if (*show) return cmd_show(io, dir, cred, attrs, reveal, outp);
    if (*verify) return cmd_verify(io, dir, show_path, require);
    if (*serve) return cmd_serve(io, config);
    if (*pinit) return cmd_petition_init(io, dir, id, options, state);
    if (*psign) return cmd_petition_sign(io, state, cred, attrs, key_position, option, packet);
    if (*psubmit) return cmd_petition_submit(io, state, packet);
    if (*ptally) return cmd_petition_tally(io, state);
    if (*benchcmd) return cmd_bench(io, op, iters, csv, bc);
  } catch (const ProtocolError& e) {
    err << "error: " << e.what() << "\n";
    return kRejected;
  } catch (const wire::WireError& e) {
    err << "error: malformed: " << e.what() << "\n";
    return kRejected;
  } catch (const std::exception& e) {
    err << "error: usage: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace tcred::cli
