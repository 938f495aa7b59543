#include "tcred/service.hpp"

#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "tcred/wire.hpp"

namespace tcred::service {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

HttpResponse ok_envelope(ByteView envelope) {
  return {200, json{{"envelope", wire::to_base64(envelope)}}.dump()};
}

HttpResponse rejection(int status, Reason reason, const std::string& detail) {
  return {status, json{{"error", std::string(to_string(reason))}, {"detail", detail}}.dump()};
}

int status_for(Reason reason) {
  switch (reason) {
    case Reason::params_mismatch: return 409;
    case Reason::proof_invalid: return 422;
    case Reason::rate_limited: return 429;
    default: return 400;
  }
}

Digest parse_digest(const std::string& hex) {
  const auto bytes = from_hex(hex);
  if (!bytes || bytes->size() != Digest().size()) throw std::invalid_argument("params digest must be 64 hex digits");
  Digest d;
  std::copy(bytes->begin(), bytes->end(), d.begin());
  return d;
}

// Throws std::runtime_error carrying the server's reason if the response is
// not a success envelope.
Bytes envelope_from_response(const std::string& body, int status) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception&) {
    throw std::runtime_error("HTTP " + std::to_string(status) + " with non-JSON body");
  }
  if (status != 200 || !j.contains("envelope")) {
    const std::string reason = j.value("error", std::string("unexpected-response"));
    throw std::runtime_error(reason + " (HTTP " + std::to_string(status) + ")");
  }
  return wire::from_base64(j.at("envelope").get<std::string>());
}

}  // namespace

std::pair<std::string, std::uint16_t> parse_listen(std::string_view text) {
  if (text.starts_with("http://")) text.remove_prefix(7);
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) throw ConfigError("listen address must be host:port");
  const std::string port_text(text.substr(colon + 1));
  char* end = nullptr;
  const long port = std::strtol(port_text.c_str(), &end, 10);
  if (port_text.empty() || *end != '\0' || port < 0 || port > 65535) throw ConfigError("bad port '" + port_text + "'");
  return {std::string(text.substr(0, colon)), static_cast<std::uint16_t>(port)};
}

AuthorityConfig AuthorityConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  AuthorityConfig c;
  try {
    const json j = json::parse(in);
    std::tie(c.host, c.port) = parse_listen(j.at("listen").get<std::string>());
    c.index = j.at("index").get<AuthorityIndex>();
    c.share_path = j.at("share").get<std::string>();
    c.params_digest = parse_digest(j.at("params_digest").get<std::string>());
    c.max_requests_per_minute = j.value("max_requests_per_minute", 0u);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (const char* listen = std::getenv("TCRED_LISTEN")) std::tie(c.host, c.port) = parse_listen(listen);
  if (const char* share = std::getenv("TCRED_SHARE")) c.share_path = share;
  if (c.share_path.is_relative()) c.share_path = path.parent_path() / c.share_path;
  if (c.index == 0) throw ConfigError("config: index must be >= 1");
  return c;
}

struct AuthorityService::Server {
  httplib::Server http;
};

AuthorityService::AuthorityService(Params params, SecretKeyShare sk, unsigned max_requests_per_minute)
    : params_(std::move(params)),
      sk_(std::move(sk)),
      vk_(verification_share(params_, sk_)),
      max_per_minute_(max_requests_per_minute) {
  if (sk_.y.size() != params_.q()) throw std::invalid_argument("key share does not match params");
}

AuthorityService::~AuthorityService() {
  stop();
  sk_.wipe();
}

std::unique_ptr<AuthorityService> AuthorityService::from_config(const AuthorityConfig& config) {
  SecretKeyShare sk;
  try {
    const Bytes file = wire::read_file(config.share_path);
    const auto bound = wire::unbind(file);
    if (bound.params_digest != config.params_digest)
      throw ConfigError("share file belongs to different params");
    sk = wire::decode<SecretKeyShare>(bound.envelope);
  } catch (const wire::WireError& e) {
    throw ConfigError("share file: " + std::string(e.what()));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  if (sk.index != config.index)
    throw ConfigError("share index " + std::to_string(sk.index) + " does not match configured index " +
                      std::to_string(config.index));
  Params params = setup(128, sk.y.size());
  if (params.digest() != config.params_digest) throw ConfigError("params digest does not match the share");
  return std::make_unique<AuthorityService>(std::move(params), std::move(sk), config.max_requests_per_minute);
}

HttpResponse AuthorityService::handle_params_digest() const {
  return ok_envelope(wire::encode(wire::ParamsDigest{params_.digest()}));
}

HttpResponse AuthorityService::handle_vk() const { return ok_envelope(wire::encode(vk_)); }

bool AuthorityService::admit(const std::string& source) {
  if (max_per_minute_ == 0) return true;
  const auto now = Clock::now();
  std::lock_guard lock(rate_mutex_);
  auto& q = recent_[source];
  while (!q.empty() && now - q.front() >= std::chrono::minutes(1)) q.pop_front();
  if (q.size() >= max_per_minute_) return false;
  q.push_back(now);
  return true;
}

HttpResponse AuthorityService::handle_issue(std::string_view body, const std::string& source) {
  if (!admit(source)) return rejection(429, Reason::rate_limited, "too many requests from " + source);

  Digest claimed;
  Bytes envelope;
  try {
    const json j = json::parse(body);
    claimed = parse_digest(j.at("params_digest").get<std::string>());
    envelope = wire::from_base64(j.at("envelope").get<std::string>());
  } catch (const std::exception& e) {
    return rejection(400, Reason::malformed, e.what());
  }
  if (claimed != params_.digest()) return rejection(409, Reason::params_mismatch, "authority serves other params");

  try {
    const auto request = wire::decode<BlindSignRequest>(envelope);
    return ok_envelope(wire::encode(blind_sign(params_, sk_, request)));
  } catch (const wire::WireError& e) {
    return rejection(400, Reason::malformed, e.what());
  } catch (const ProtocolError& e) {
    return rejection(status_for(e.reason()), e.reason(), e.what());
  }
}

std::optional<std::uint16_t> AuthorityService::bind(const std::string& host, std::uint16_t port) {
  server_ = std::make_unique<Server>();
  auto& http = server_->http;
  http.set_payload_max_length(1 << 20);
  // No SO_REUSEPORT: a second daemon on the same port must fail to bind.
  http.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  auto reply = [](httplib::Response& res, const HttpResponse& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  http.Get("/params-digest", [this, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, handle_params_digest());
  });
  http.Get("/vk", [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, handle_vk()); });
  http.Post("/issue", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, handle_issue(req.body, req.remote_addr));
  });

  if (port == 0) {
    const int bound = http.bind_to_any_port(host);
    if (bound < 0) return std::nullopt;
    return static_cast<std::uint16_t>(bound);
  }
  if (!http.bind_to_port(host, port)) return std::nullopt;
  return port;
}

void AuthorityService::run() {
  if (!server_) throw std::logic_error("run() before bind()");
  server_->http.listen_after_bind();
}

void AuthorityService::stop() {
  if (server_) server_->http.stop();
}

// ------------------------------------------------------------ endpoints

HttpAuthorityEndpoint::HttpAuthorityEndpoint(AuthorityIndex index, std::string url)
    : index_(index), url_(std::move(url)) {
  std::tie(host_, port_) = parse_listen(url_);
}

namespace {

httplib::Client make_client(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout) {
  httplib::Client cli(host, port);
  cli.set_connection_timeout(timeout);
  cli.set_read_timeout(timeout);
  cli.set_write_timeout(timeout);
  return cli;
}

Bytes get_envelope(const std::string& host, std::uint16_t port, const char* path, std::chrono::milliseconds timeout) {
  auto cli = make_client(host, port, timeout);
  const auto res = cli.Get(path);
  if (!res) throw std::runtime_error(httplib::to_string(res.error()));
  return envelope_from_response(res->body, res->status);
}

}  // namespace

Bytes HttpAuthorityEndpoint::issue(const Digest& params_digest, ByteView request, std::chrono::milliseconds timeout,
                                   std::stop_token stop) {
  if (stop.stop_requested()) throw std::runtime_error("cancelled");
  auto cli = make_client(host_, port_, timeout);
  const json body{{"params_digest", to_hex(params_digest)}, {"envelope", wire::to_base64(request)}};
  const auto res = cli.Post("/issue", body.dump(), "application/json");
  if (!res) throw std::runtime_error(httplib::to_string(res.error()));
  return envelope_from_response(res->body, res->status);
}

VerificationKeyShare HttpAuthorityEndpoint::fetch_vk(std::chrono::milliseconds timeout) const {
  auto vk = wire::decode<VerificationKeyShare>(get_envelope(host_, port_, "/vk", timeout));
  if (vk.index != index_)
    throw std::runtime_error(url_ + " serves share " + std::to_string(vk.index) + ", expected " +
                             std::to_string(index_));
  return vk;
}

Digest HttpAuthorityEndpoint::fetch_params_digest(std::chrono::milliseconds timeout) const {
  return wire::decode<wire::ParamsDigest>(get_envelope(host_, port_, "/params-digest", timeout)).value;
}

namespace {

SecretKeyShare maybe_corrupt(SecretKeyShare sk, LocalAuthority::Fault fault) {
  if (fault == LocalAuthority::Fault::wrong_key) sk.x += Scalar::from_u64(1);
  return sk;
}

// Sleeps until `until` unless stopped first; returns false if stopped.
bool sleep_until(Clock::time_point until, std::stop_token stop) {
  std::mutex m;
  std::condition_variable_any cv;
  std::unique_lock lock(m);
  return !cv.wait_until(lock, stop, until, [] { return false; }) && !stop.stop_requested();
}

}  // namespace

LocalAuthority::LocalAuthority(Params params, SecretKeyShare sk, std::chrono::milliseconds delay, Fault fault)
    : service_(std::move(params), maybe_corrupt(std::move(sk), fault)), delay_(delay), fault_(fault) {}

Bytes LocalAuthority::issue(const Digest& params_digest, ByteView request, std::chrono::milliseconds timeout,
                            std::stop_token stop) {
  const auto start = Clock::now();
  switch (fault_) {
    case Fault::unresponsive:
      sleep_until(start + timeout, stop);
      throw std::runtime_error("no response");
    case Fault::reject:
      if (!sleep_until(start + delay_, stop)) throw std::runtime_error("cancelled");
      throw std::runtime_error("refused");
    default:
      break;
  }

  const json body{{"params_digest", to_hex(params_digest)}, {"envelope", wire::to_base64(request)}};
  const auto res = service_.handle_issue(body.dump(), name());
  Bytes out = envelope_from_response(res.body, res.status);
  if (fault_ == Fault::garbage) system_rng().fill(out);

  if (delay_ > timeout) {
    sleep_until(start + timeout, stop);
    throw std::runtime_error("timed out");
  }
  if (!sleep_until(start + delay_, stop)) throw std::runtime_error("cancelled");
  return out;
}

// --------------------------------------------------------------- gather

namespace {

struct GatherState {
  std::mutex mutex;
  std::condition_variable cv;
  std::vector<PartialCredential> partials;
  std::vector<std::string> failures;
  std::size_t pending = 0;
  std::vector<bool> answered;
  bool done = false;
  std::stop_source stop;
};

}  // namespace

std::vector<PartialCredential> gather(const Params& params, const GatherPolicy& policy,
                                      const PreparedRequest& prepared, const AttributeVector& attrs) {
  if (policy.threshold == 0) throw std::invalid_argument("threshold must be >= 1");
  if (policy.targets.size() < policy.threshold) throw std::invalid_argument("fewer endpoints than the threshold");
  std::vector<AuthorityIndex> seen;
  for (const auto& target : policy.targets) {
    if (!target.endpoint) throw std::invalid_argument("null endpoint");
    if (target.vk.index != target.endpoint->index())
      throw std::invalid_argument("vk share index does not match endpoint " + target.endpoint->name());
    if (std::find(seen.begin(), seen.end(), target.vk.index) != seen.end())
      throw std::invalid_argument("duplicate authority index");
    seen.push_back(target.vk.index);
  }

  // Threads outlive this call when they are stragglers, so everything they
  // touch is owned by shared state.
  auto state = std::make_shared<GatherState>();
  state->pending = policy.targets.size();
  state->answered.assign(policy.targets.size(), false);
  const auto request = std::make_shared<const Bytes>(wire::encode(prepared.request));
  const auto values = std::make_shared<const std::vector<Scalar>>(attrs.values());
  const Digest digest = params.digest();
  const auto shared_params = std::make_shared<const Params>(params);
  Scalar d = prepared.d;
  const G1 h = prepared.h;

  for (std::size_t slot = 0; slot < policy.targets.size(); ++slot) {
    const GatherTarget target = policy.targets[slot];
    std::thread([=, stop = state->stop.get_token()]() mutable {
      std::optional<PartialCredential> partial;
      std::string failure;
      try {
        const Bytes reply = target.endpoint->issue(digest, *request, policy.per_request_timeout, stop);
        const auto blinded = wire::decode<BlindedPartial>(reply);
        if (blinded.index != target.vk.index) throw std::runtime_error("partial carries the wrong index");
        if (!(blinded.h == h)) throw std::runtime_error("partial signed a different h");
        auto p = unblind(blinded, d);
        if (!verify_partial(*shared_params, target.vk, p.credential, *values))
          throw std::runtime_error("partial does not verify under its key share");
        partial = std::move(p);
      } catch (const std::exception& e) {
        failure = e.what();
      }
      d.wipe();

      std::lock_guard lock(state->mutex);
      --state->pending;
      state->answered[slot] = true;
      if (state->done) return;  // straggler
      if (partial) {
        state->partials.push_back(std::move(*partial));
      } else {
        state->failures.push_back(target.endpoint->name() + ": " + failure);
      }
      state->cv.notify_all();
    }).detach();
  }
  d.wipe();

  std::unique_lock lock(state->mutex);
  state->cv.wait_for(lock, policy.deadline,
                     [&] { return state->partials.size() >= policy.threshold || state->pending == 0; });
  state->done = true;
  state->stop.request_stop();

  if (state->partials.size() >= policy.threshold) {
    state->partials.resize(policy.threshold);
    return std::move(state->partials);
  }
  std::string detail = std::to_string(state->partials.size()) + " of " + std::to_string(policy.threshold) +
                       " partials before the deadline";
  for (const auto& f : state->failures) detail += "; " + f;
  for (std::size_t i = 0; i < policy.targets.size(); ++i)
    if (!state->answered[i]) detail += "; " + policy.targets[i].endpoint->name() + ": no answer by the deadline";
  throw ProtocolError(Reason::threshold_unreachable, detail);
}

}  // namespace tcred::service
