#pragma once

// Text file schema shared by states and channels:
//
//   { "kind": "density" | "pure" | "channel", "dim": d, "data": [...] }
//
// density: d*d row-major [re, im] pairs; pure: d pairs; channel: a list of
// Kraus matrices, each d*d row-major pairs. Numbers are written with 17
// significant digits so parse(serialize(x)) reproduces x exactly.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "fidkit/channels.hpp"
#include "fidkit/error.hpp"
#include "fidkit/matrix.hpp"
#include "fidkit/states.hpp"

namespace fidkit::io {

using StateValue = std::variant<DensityMatrix, PureState>;

inline std::string format_value(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string format_residual(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

namespace detail {

inline void write_pairs(std::ostringstream& os, std::span<const cplx> values,
                        const std::string& indent) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    os << indent << '[' << format_value(values[k].real()) << ", "
       << format_value(values[k].imag()) << ']' << (k + 1 < values.size() ? ",\n" : "\n");
  }
}

inline std::string header(const char* kind, std::size_t dim) {
  return std::string("{\n  \"kind\": \"") + kind + "\",\n  \"dim\": " + std::to_string(dim) +
         ",\n  \"data\": [\n";
}

[[noreturn]] inline void parse_fail(const std::string& what) {
  throw Error(ErrorKind::ParseError, what);
}

inline nlohmann::json parse_document(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
      if (text[i] == '\n') ++line;
    parse_fail("line " + std::to_string(line) + ": " + e.what());
  }
}

inline std::size_t read_dim(const nlohmann::json& doc) {
  if (!doc.contains("dim") || !doc["dim"].is_number_unsigned() || doc["dim"].get<std::size_t>() == 0)
    parse_fail("field \"dim\": expected a positive integer");
  return doc["dim"].get<std::size_t>();
}

inline std::string read_kind(const nlohmann::json& doc) {
  if (!doc.is_object()) parse_fail("top level: expected an object");
  if (!doc.contains("kind") || !doc["kind"].is_string())
    parse_fail("field \"kind\": expected a string");
  return doc["kind"].get<std::string>();
}

inline CVector read_pairs(const nlohmann::json& arr, std::size_t expected, const std::string& field) {
  if (!arr.is_array()) parse_fail("field \"" + field + "\": expected an array");
  if (arr.size() != expected) {
    parse_fail("field \"" + field + "\": expected " + std::to_string(expected) +
               " [re, im] entries, got " + std::to_string(arr.size()));
  }
  CVector out(expected);
  for (std::size_t k = 0; k < expected; ++k) {
    const auto& p = arr[k];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      parse_fail("field \"" + field + "\" entry " + std::to_string(k) + ": expected [re, im]");
    out[k] = cplx(p[0].get<double>(), p[1].get<double>());
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_fail("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::ParseError, "cannot write " + path);
  out << text;
}

}  // namespace detail

inline std::string serialize_state(const DensityMatrix& rho) {
  std::ostringstream os;
  os << detail::header("density", rho.dim());
  detail::write_pairs(os, rho.matrix().data(), "    ");
  os << "  ]\n}\n";
  return os.str();
}

inline std::string serialize_state(const PureState& psi) {
  std::ostringstream os;
  os << detail::header("pure", psi.dim());
  detail::write_pairs(os, psi.amplitudes(), "    ");
  os << "  ]\n}\n";
  return os.str();
}

inline std::string serialize_state(const StateValue& x) {
  return std::visit([](const auto& v) { return serialize_state(v); }, x);
}

inline std::string serialize_channel(const KrausChannel& ch) {
  std::ostringstream os;
  os << detail::header("channel", ch.dim());
  for (std::size_t k = 0; k < ch.size(); ++k) {
    os << "    [\n";
    detail::write_pairs(os, ch.kraus()[k].data(), "      ");
    os << "    ]" << (k + 1 < ch.size() ? ",\n" : "\n");
  }
  os << "  ]\n}\n";
  return os.str();
}

inline StateValue parse_state(const std::string& text) {
  const auto doc = detail::parse_document(text);
  const auto kind = detail::read_kind(doc);
  if (kind != "density" && kind != "pure")
    detail::parse_fail("field \"kind\": expected \"density\" or \"pure\", got \"" + kind + "\"");
  const std::size_t d = detail::read_dim(doc);
  if (!doc.contains("data")) detail::parse_fail("missing field \"data\"");
  try {
    if (kind == "density") {
      auto data = detail::read_pairs(doc["data"], d * d, "data");
      return validate_density(ComplexMatrix(d, d, std::move(data)));
    }
    return validate_pure(detail::read_pairs(doc["data"], d, "data"));
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ParseError) throw;
    throw ValidationError(e.kind(), e.message());
  }
}

inline KrausChannel parse_channel(const std::string& text) {
  const auto doc = detail::parse_document(text);
  const auto kind = detail::read_kind(doc);
  if (kind != "channel")
    detail::parse_fail("field \"kind\": expected \"channel\", got \"" + kind + "\"");
  const std::size_t d = detail::read_dim(doc);
  if (!doc.contains("data") || !doc["data"].is_array() || doc["data"].empty())
    detail::parse_fail("field \"data\": expected a nonempty list of Kraus operators");
  std::vector<ComplexMatrix> ops;
  for (std::size_t k = 0; k < doc["data"].size(); ++k) {
    auto data = detail::read_pairs(doc["data"][k], d * d, "data[" + std::to_string(k) + "]");
    ops.emplace_back(d, d, std::move(data));
  }
  try {
    return validate_kraus(std::move(ops));
  } catch (const Error& e) {
    throw ValidationError(e.kind(), e.message());
  }
}

inline StateValue parse_state_file(const std::string& path) {
  return parse_state(detail::read_file(path));
}

inline KrausChannel parse_channel_file(const std::string& path) {
  return parse_channel(detail::read_file(path));
}

inline void serialize_state(const StateValue& x, const std::string& path) {
  detail::write_file(path, serialize_state(x));
}

inline void serialize_channel(const KrausChannel& ch, const std::string& path) {
  detail::write_file(path, serialize_channel(ch));
}

// Pure inputs are accepted wherever a density matrix is expected.
inline DensityMatrix as_density(const StateValue& x) {
  if (const auto* rho = std::get_if<DensityMatrix>(&x)) return *rho;
  return projector(std::get<PureState>(x));
}

inline PureState as_pure(const StateValue& x, const std::string& what) {
  if (const auto* psi = std::get_if<PureState>(&x)) return *psi;
  throw ValidationError(ErrorKind::DimensionMismatch, what + " must be a pure state file");
}

inline nlohmann::ordered_json pairs_json(std::span<const cplx> values) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& z : values) arr.push_back({z.real(), z.imag()});
  return arr;
}

}  // namespace fidkit::io
