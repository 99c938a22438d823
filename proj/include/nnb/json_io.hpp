#pragma once

#include <stdexcept>
#include <string>

#include "json.hpp"
#include "nnb/basis.hpp"
#include "nnb/haar.hpp"
#include "nnb/stepfn.hpp"
#include "nnb/verify.hpp"

namespace nnb {

/// Malformed input document: wrong value count, bad rational string,
/// missing or mistyped field.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rationals travel as base-10 "numerator/denominator" strings with a
// positive denominator; plain integers are accepted on input.
nlohmann::json rational_to_json(const Rational& q);
Rational rational_from_json(const nlohmann::json& j);

// {"support_len": J, "resolution": r, "values": ["p/q", ...]} with exactly
// J * 2^r values.
nlohmann::json function_to_json(const StepFunction& f);
StepFunction function_from_json(const nlohmann::json& j);

// {"j": int, "n": int, "i": int}
nlohmann::json haar_index_to_json(const HaarIndex& idx);
HaarIndex haar_index_from_json(const nlohmann::json& j);

// {"permutation": name, "blocks": [{"i", "a", "b"}...],
//  "schauder": [{"k", "coeff"}...]}; k = 2i-1 is the x term, k = 2i the y
// term. Input only needs "blocks".
nlohmann::json expansion_to_json(const Expansion& e, const Permutation& pi);
Expansion expansion_from_json(const nlohmann::json& j);

nlohmann::json block_to_json(const BasisBlock& blk);
std::string block_to_csv(const BasisBlock& blk);

// {"check", "trials", "violations", "worst_margin", "witness"}; the margin is
// a "p/q" string for exact checks and a number for float checks.
nlohmann::json report_to_json(const VerifyReport& r);

/// Shortest round-trip decimal form of a double, locale-free.
std::string format_double(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace nnb
