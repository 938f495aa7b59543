#pragma once

// Authority daemon and the threshold-gathering client.
//
// Every HTTP body is JSON. Binary objects travel as base64 wire envelopes:
//
//   GET  /params-digest  -> {"envelope": <ParamsDigest>}
//   GET  /vk             -> {"envelope": <VerificationKeyShare>}
//   POST /issue          {"params_digest": hex, "envelope": <BlindSignRequest>}
//                        -> {"envelope": <BlindedPartial>}
//
// Rejections are {"error": reason, "detail": text} with a 4xx status.

#include <chrono>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>
#include <vector>

#include "tcred/scheme.hpp"

namespace tcred::service {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AuthorityConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
  AuthorityIndex index = 0;
  std::filesystem::path share_path;
  Digest params_digest{};
  unsigned max_requests_per_minute = 0;  // per source address, 0 = unlimited

  /// JSON file:
  ///   {"listen": "host:port", "index": 1, "share": "sk-1",
  ///    "params_digest": "<hex>", "max_requests_per_minute": 60}
  /// A relative share path resolves against the config file's directory.
  /// TCRED_LISTEN and TCRED_SHARE override the file. Throws ConfigError.
  static AuthorityConfig load(const std::filesystem::path& path);
};

/// "host:port" -> (host, port). Throws ConfigError.
std::pair<std::string, std::uint16_t> parse_listen(std::string_view text);

struct HttpResponse {
  int status = 200;
  std::string body;  // JSON
};

class AuthorityService {
 public:
  AuthorityService(Params params, SecretKeyShare sk, unsigned max_requests_per_minute = 0);
  ~AuthorityService();

  /// Loads and checks the bound share file named by the config.
  static std::unique_ptr<AuthorityService> from_config(const AuthorityConfig& config);

  const Params& params() const { return params_; }
  AuthorityIndex index() const { return sk_.index; }
  const VerificationKeyShare& vk() const { return vk_; }

  // Transport-free handlers; the HTTP server only forwards to these.
  HttpResponse handle_params_digest() const;
  HttpResponse handle_vk() const;
  HttpResponse handle_issue(std::string_view body, const std::string& source);

  /// Binds; port 0 picks a free one. Returns the bound port or nullopt.
  std::optional<std::uint16_t> bind(const std::string& host, std::uint16_t port);
  /// Blocks serving until stop().
  void run();
  void stop();

 private:
  bool admit(const std::string& source);

  Params params_;
  SecretKeyShare sk_;
  VerificationKeyShare vk_;
  unsigned max_per_minute_;
  std::mutex rate_mutex_;
  std::map<std::string, std::deque<std::chrono::steady_clock::time_point>> recent_;
  struct Server;
  std::unique_ptr<Server> server_;
};

/// One authority as seen by the user.
class AuthorityEndpoint {
 public:
  virtual ~AuthorityEndpoint() = default;
  virtual AuthorityIndex index() const = 0;
  virtual std::string name() const = 0;
  /// Sends an encoded request, returns the encoded BlindedPartial. Throws on
  /// any failure; should give up once `stop` is requested.
  virtual Bytes issue(const Digest& params_digest, ByteView request, std::chrono::milliseconds timeout,
                      std::stop_token stop) = 0;
};

class HttpAuthorityEndpoint final : public AuthorityEndpoint {
 public:
  /// `url` is "http://host:port" or "host:port".
  HttpAuthorityEndpoint(AuthorityIndex index, std::string url);

  AuthorityIndex index() const override { return index_; }
  std::string name() const override { return url_; }
  Bytes issue(const Digest& params_digest, ByteView request, std::chrono::milliseconds timeout,
              std::stop_token stop) override;

  VerificationKeyShare fetch_vk(std::chrono::milliseconds timeout = std::chrono::seconds(5)) const;
  Digest fetch_params_digest(std::chrono::milliseconds timeout = std::chrono::seconds(5)) const;

 private:
  AuthorityIndex index_;
  std::string url_;
  std::string host_;
  std::uint16_t port_;
};

/// In-process authority with optional latency and fault injection.
class LocalAuthority final : public AuthorityEndpoint {
 public:
  enum class Fault { none, garbage, unresponsive, reject, wrong_key };

  LocalAuthority(Params params, SecretKeyShare sk, std::chrono::milliseconds delay = {}, Fault fault = Fault::none);

  AuthorityIndex index() const override { return service_.index(); }
  std::string name() const override { return "local-" + std::to_string(index()); }
  const VerificationKeyShare& vk() const { return service_.vk(); }
  /// The response is held back until `delay` after the call started.
  Bytes issue(const Digest& params_digest, ByteView request, std::chrono::milliseconds timeout,
              std::stop_token stop) override;

 private:
  AuthorityService service_;
  std::chrono::milliseconds delay_;
  Fault fault_;
};

struct GatherTarget {
  std::shared_ptr<AuthorityEndpoint> endpoint;
  VerificationKeyShare vk;  // used to screen this authority's partial
};

struct GatherPolicy {
  std::vector<GatherTarget> targets;
  std::size_t threshold = 0;
  std::chrono::milliseconds per_request_timeout{5000};
  std::chrono::milliseconds deadline{10000};
};

/// Sends the request to every target at once and returns the first
/// `threshold` partials that unblind to a valid signature on `attrs` under
/// the sender's own key share. Late responses are dropped. Throws
/// ProtocolError(threshold_unreachable) naming every failed endpoint, and
/// std::invalid_argument if the policy cannot be met even in principle.
std::vector<PartialCredential> gather(const Params& params, const GatherPolicy& policy,
                                      const PreparedRequest& prepared, const AttributeVector& attrs);

}  // namespace tcred::service
