#include "nnb/json_io.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>

namespace nnb {

using nlohmann::json;

json rational_to_json(const Rational& q) { return to_fraction_string(q); }

Rational rational_from_json(const json& j) {
  if (j.is_number_integer())
    return Rational(static_cast<long>(j.get<std::int64_t>()));
  if (!j.is_string())
    throw FormatError("rational values must be \"p/q\" strings");
  const auto s = j.get<std::string>();
  auto q = parse_fraction(s);
  if (!q) throw FormatError("bad rational \"" + s + "\"");
  return *q;
}

namespace {

std::int64_t require_int(const json& j, const char* key, std::int64_t lo,
                         std::int64_t hi) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw FormatError(std::string("field \"") + key +
                      "\" must be an integer");
  std::int64_t v = j[key].get<std::int64_t>();
  if (v < lo || v > hi)
    throw FormatError(std::string("field \"") + key + "\" out of range");
  return v;
}

}  // namespace

json function_to_json(const StepFunction& f) {
  json values = json::array();
  for (const auto& v : f.values()) values.push_back(to_fraction_string(v));
  return json{{"support_len", f.support_len()},
              {"resolution", f.resolution()},
              {"values", std::move(values)}};
}

StepFunction function_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("function document must be an object");
  std::int64_t J =
      require_int(j, "support_len", 1, StepFunction::kMaxCells);
  std::int64_t r = require_int(j, "resolution", 0,
                               StepFunction::kMaxResolution);
  std::uint64_t expected = static_cast<std::uint64_t>(J) << r;
  if (expected > StepFunction::kMaxCells)
    throw FormatError("function grid too large");
  if (!j.contains("values") || !j["values"].is_array())
    throw FormatError("field \"values\" must be an array");
  const json& vals = j["values"];
  if (vals.size() != expected)
    throw FormatError("expected " + std::to_string(expected) +
                      " values, got " + std::to_string(vals.size()));
  std::vector<Rational> out;
  out.reserve(vals.size());
  for (const auto& v : vals) out.push_back(rational_from_json(v));
  return StepFunction(static_cast<std::uint32_t>(J),
                      static_cast<std::uint32_t>(r), std::move(out));
}

json haar_index_to_json(const HaarIndex& idx) {
  return json{{"j", idx.j}, {"n", idx.n}, {"i", idx.i}};
}

HaarIndex haar_index_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("Haar index must be an object");
  HaarIndex idx;
  idx.j = static_cast<std::uint32_t>(require_int(j, "j", 1, INT32_MAX));
  idx.n = static_cast<std::uint32_t>(require_int(j, "n", 0, 62));
  idx.i = static_cast<std::uint64_t>(
      require_int(j, "i", 1, std::int64_t(1) << 62));
  if (!idx.valid()) throw FormatError("Haar position i exceeds 2^n");
  return idx;
}

json expansion_to_json(const Expansion& e, const Permutation& pi) {
  json blocks = json::array();
  json schauder = json::array();
  for (const auto& [i, ab] : e.blocks()) {
    blocks.push_back(json{{"i", i},
                          {"a", to_fraction_string(ab.first)},
                          {"b", to_fraction_string(ab.second)}});
    schauder.push_back(
        json{{"k", 2 * i - 1}, {"coeff", to_fraction_string(e.alpha(i))}});
    schauder.push_back(
        json{{"k", 2 * i}, {"coeff", to_fraction_string(e.beta(i))}});
  }
  return json{{"permutation", pi.name()},
              {"blocks", std::move(blocks)},
              {"schauder", std::move(schauder)}};
}

Expansion expansion_from_json(const json& j) {
  if (!j.is_object() || !j.contains("blocks") || !j["blocks"].is_array())
    throw FormatError("expansion document needs a \"blocks\" array");
  Expansion e;
  for (const auto& entry : j["blocks"]) {
    if (!entry.is_object())
      throw FormatError("each block entry must be an object");
    std::int64_t i = require_int(entry, "i", 1,
                                 std::numeric_limits<std::int64_t>::max());
    if (!entry.contains("a") || !entry.contains("b"))
      throw FormatError("block entries need \"a\" and \"b\"");
    e.add(static_cast<std::uint64_t>(i), rational_from_json(entry["a"]),
          rational_from_json(entry["b"]));
  }
  e.prune_zeros();
  return e;
}

json block_to_json(const BasisBlock& blk) {
  return json{{"index", blk.index},
              {"haar", haar_index_to_json(blk.haar)},
              {"pi", blk.pi},
              {"u", function_to_json(blk.u)},
              {"h", function_to_json(blk.h)},
              {"x", function_to_json(blk.x)},
              {"y", function_to_json(blk.y)}};
}

std::string block_to_csv(const BasisBlock& blk) {
  StepFunction h =
      blk.h.refined(blk.u.resolution()).extended(blk.u.support_len());
  std::ostringstream out;
  out << "cell_start,cell_end,u,h,x,y\n";
  std::uint32_t r = blk.u.resolution();
  for (std::uint64_t t = 0; t < blk.u.cell_count(); ++t) {
    Rational start(Rational(static_cast<unsigned long>(t)) *
                   pow2(-static_cast<long>(r)));
    Rational end(Rational(static_cast<unsigned long>(t + 1)) *
                 pow2(-static_cast<long>(r)));
    out << to_fraction_string(start) << ',' << to_fraction_string(end) << ','
        << to_fraction_string(blk.u.values()[t]) << ','
        << to_fraction_string(h.values()[t]) << ','
        << to_fraction_string(blk.x.values()[t]) << ','
        << to_fraction_string(blk.y.values()[t]) << '\n';
  }
  return out.str();
}

json report_to_json(const VerifyReport& r) {
  json margin;
  if (r.worst_margin) {
    if (const auto* q = std::get_if<Rational>(&*r.worst_margin))
      margin = to_fraction_string(*q);
    else
      margin = std::get<double>(*r.worst_margin);
  }
  return json{{"check", r.check},
              {"trials", r.trials},
              {"violations", r.violations},
              {"worst_margin", std::move(margin)},
              {"witness", r.witness}};
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw std::runtime_error("read failure on " + path);
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("write failure on " + path);
}

}  // namespace nnb
