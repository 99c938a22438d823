#include "nnb/rational.hpp"

#include <cctype>

namespace nnb {

namespace {

bool parse_integer(std::string_view text, bool allow_sign, Integer& out) {
  if (text.empty()) return false;
  std::size_t pos = 0;
  if (allow_sign && (text[0] == '+' || text[0] == '-')) pos = 1;
  if (pos == text.size()) return false;
  for (std::size_t k = pos; k < text.size(); ++k)
    if (!std::isdigit(static_cast<unsigned char>(text[k]))) return false;
  // mpz_set_str accepts the optional leading '-'; strip '+' ourselves.
  std::string digits(text[0] == '+' ? text.substr(1) : text);
  return mpz_set_str(out.get_mpz_t(), digits.c_str(), 10) == 0;
}

}  // namespace

std::optional<Rational> parse_fraction(std::string_view text) {
  Integer num, den(1);
  std::size_t slash = text.find('/');
  if (slash == std::string_view::npos) {
    if (!parse_integer(text, true, num)) return std::nullopt;
  } else {
    if (!parse_integer(text.substr(0, slash), true, num)) return std::nullopt;
    if (!parse_integer(text.substr(slash + 1), false, den)) return std::nullopt;
    if (sgn(den) <= 0) return std::nullopt;
  }
  Rational q(num, den);
  q.canonicalize();
  return q;
}

std::optional<Rational> exact_sqrt(const Rational& q) {
  if (sgn(q) < 0) return std::nullopt;
  if (!mpz_perfect_square_p(q.get_num_mpz_t()) ||
      !mpz_perfect_square_p(q.get_den_mpz_t()))
    return std::nullopt;
  Integer num, den;
  mpz_sqrt(num.get_mpz_t(), q.get_num_mpz_t());
  mpz_sqrt(den.get_mpz_t(), q.get_den_mpz_t());
  return Rational(num, den);
}

}  // namespace nnb
