#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tcred/bench.hpp"
#include "tcred/petition.hpp"
#include "tcred/scheme.hpp"
#include "tcred/wire.hpp"

namespace py = pybind11;
using namespace tcred;

namespace {

// Every object crosses the boundary as its wire envelope.
py::bytes to_py(const Bytes& b) { return py::bytes(reinterpret_cast<const char*>(b.data()), b.size()); }

template <class T>
T from_py(const py::bytes& b) {
  const std::string_view s = b;
  return wire::decode<T>(ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

template <class T>
std::vector<T> list_from_py(const std::vector<py::bytes>& items) {
  std::vector<T> out;
  for (const auto& b : items) out.push_back(from_py<T>(b));
  return out;
}

// Python ints in [0, p) to scalars.
Scalar scalar_from_int(const py::int_& v) {
  if (v < py::int_(0)) throw py::value_error("attribute must be non-negative");
  std::array<std::uint8_t, 32> be{};
  py::bytes raw;
  try {
    raw = v.attr("to_bytes")(32, "big");
  } catch (const py::error_already_set&) {
    throw py::value_error("attribute does not fit in 32 bytes");
  }
  const std::string_view s = raw;
  std::copy(s.begin(), s.end(), be.begin());
  const auto scalar = Scalar::from_bytes(be);
  if (!scalar) throw py::value_error("attribute is not below the group order");
  return *scalar;
}

py::int_ int_from_scalar(const Scalar& s) {
  const auto be = s.to_bytes();
  return py::int_(py::module_::import("builtins")
                      .attr("int")
                      .attr("from_bytes")(py::bytes(reinterpret_cast<const char*>(be.data()), be.size()), "big"));
}

AttributeVector attributes(const std::vector<py::int_>& values, const std::vector<std::size_t>& public_positions) {
  std::vector<Scalar> v;
  for (const auto& x : values) v.push_back(scalar_from_int(x));
  for (auto p : public_positions)
    if (p == 0 || p > v.size()) throw py::value_error("public position out of range");
  return AttributeVector(std::move(v), public_positions);
}

// The user's half of a blind issuance: the request plus the ElGamal key.
class Prepared {
 public:
  Prepared(PreparedRequest p, AttributeVector attrs) : p_(std::move(p)), attrs_(std::move(attrs)) {}
  ~Prepared() { p_.d.wipe(); }

  py::bytes request() const { return to_py(wire::encode(p_.request)); }
  py::bytes unblind(const py::bytes& blinded) const {
    return to_py(wire::encode(tcred::unblind(from_py<BlindedPartial>(blinded), p_.d)));
  }
  py::bytes attributes() const { return to_py(wire::encode(attrs_)); }

 private:
  PreparedRequest p_;
  AttributeVector attrs_;
};

}  // namespace

PYBIND11_MODULE(_tcred, m) {
  m.doc() = "Threshold-issued anonymous credentials on BLS12-381.";

  py::register_exception<ProtocolError>(m, "ProtocolError");
  py::register_exception<wire::WireError>(m, "WireError", PyExc_ValueError);

  m.def("setup", [](std::size_t q) { return to_py(wire::encode(setup(128, q))); }, py::arg("q"),
        "Public parameters for q attributes.");
  m.def(
      "params_digest",
      [](const py::bytes& params) {
        const Digest d = from_py<Params>(params).digest();
        return to_py(Bytes(d.begin(), d.end()));
      },
      py::arg("params"));

  m.def(
      "ttp_keygen",
      [](const py::bytes& params, std::size_t t, std::size_t n) {
        auto keys = ttp_keygen(from_py<Params>(params), t, n);
        std::vector<py::bytes> sks, vks;
        for (auto& sk : keys.secret_shares) {
          sks.push_back(to_py(wire::encode(sk)));
          sk.wipe();
        }
        for (const auto& vk : keys.verification_shares) vks.push_back(to_py(wire::encode(vk)));
        return py::make_tuple(sks, vks);
      },
      py::arg("params"), py::arg("t"), py::arg("n"), "Dealer key generation: (secret shares, verification shares).");

  m.def(
      "aggregate_keys",
      [](const std::vector<py::bytes>& shares) {
        return to_py(wire::encode(aggregate_keys(list_from_py<VerificationKeyShare>(shares))));
      },
      py::arg("shares"));

  py::class_<Prepared>(m, "Prepared")
      .def_property_readonly("request", &Prepared::request)
      .def_property_readonly("attributes", &Prepared::attributes)
      .def("unblind", &Prepared::unblind, py::arg("blinded"));

  m.def(
      "prepare_blind_sign",
      [](const py::bytes& params, const std::vector<py::int_>& values, const std::vector<std::size_t>& public_positions) {
        auto attrs = attributes(values, public_positions);
        auto p = prepare_blind_sign(from_py<Params>(params), attrs);
        return Prepared(std::move(p), std::move(attrs));
      },
      py::arg("params"), py::arg("attributes"), py::arg("public") = std::vector<std::size_t>{});

  m.def(
      "blind_sign",
      [](const py::bytes& params, const py::bytes& sk, const py::bytes& request) {
        auto key = from_py<SecretKeyShare>(sk);
        const auto out = blind_sign(from_py<Params>(params), key, from_py<BlindSignRequest>(request));
        key.wipe();
        return to_py(wire::encode(out));
      },
      py::arg("params"), py::arg("sk"), py::arg("request"));

  m.def(
      "aggregate_credentials",
      [](const std::vector<py::bytes>& partials) {
        return to_py(wire::encode(aggregate_credentials(list_from_py<PartialCredential>(partials))));
      },
      py::arg("partials"));

  m.def(
      "verify_signature",
      [](const py::bytes& params, const py::bytes& vk, const py::bytes& cred, const std::vector<py::int_>& values) {
        std::vector<Scalar> v;
        for (const auto& x : values) v.push_back(scalar_from_int(x));
        return verify_signature(from_py<Params>(params), from_py<AggregatedVerificationKey>(vk),
                                from_py<Credential>(cred), v);
      },
      py::arg("params"), py::arg("vk"), py::arg("credential"), py::arg("attributes"));

  m.def(
      "prove_cred",
      [](const py::bytes& params, const py::bytes& vk, const py::bytes& cred, const std::vector<py::int_>& values,
         const std::vector<std::size_t>& reveal) {
        const auto attrs = attributes(values, reveal);
        return to_py(wire::encode(prove_cred(from_py<Params>(params), from_py<AggregatedVerificationKey>(vk),
                                             from_py<Credential>(cred), attrs, Predicate::reveal(reveal))));
      },
      py::arg("params"), py::arg("vk"), py::arg("credential"), py::arg("attributes"),
      py::arg("reveal") = std::vector<std::size_t>{});

  m.def(
      "verify_cred",
      [](const py::bytes& params, const py::bytes& vk, const py::bytes& show, const std::vector<std::size_t>& require) {
        ShowMaterial s;
        try {
          s = from_py<ShowMaterial>(show);
        } catch (const wire::WireError&) {
          return false;
        }
        return verify_cred(from_py<Params>(params), from_py<AggregatedVerificationKey>(vk), s,
                           Predicate::reveal(require));
      },
      py::arg("params"), py::arg("vk"), py::arg("show"), py::arg("require") = std::vector<std::size_t>{});

  m.def(
      "disclosed",
      [](const py::bytes& show) {
        py::dict out;
        for (const auto& a : from_py<ShowMaterial>(show).public_attrs) out[py::int_(a.position)] = int_from_scalar(a.value);
        return out;
      },
      py::arg("show"), "Position -> value of the attributes a show discloses.");

  m.def(
      "bench",
      [](const std::string& op, std::size_t iters) {
        const auto parsed = bench::parse_op(op);
        if (!parsed) throw py::value_error("unknown op '" + op + "'");
        if (iters == 0) throw py::value_error("iters must be >= 1");
        py::gil_scoped_release release;
        const auto r = bench::run(*parsed, iters);
        return std::make_pair(r.mean_ms, r.stddev_ms);
      },
      py::arg("op"), py::arg("iters"), "(mean_ms, stddev_ms)");
}
