// Exact rational arithmetic for the mixed-goods fair-division engine.
//
// All utilities, cut points and fairness thresholds are carried as exact
// rationals (GMP mpq). Nothing in the combinatorial layers ever touches
// floating point; doubles appear only in the Nash-welfare solver.
#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mixedfair {

using Rat = mpq_class;

class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Parse/validation failure; `path` is the offending field, e.g. "goods[1][2]".
class parse_error : public error {
 public:
  parse_error(const std::string& path, const std::string& message)
      : error(path + ": " + message), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

inline Rat rat(long num, long den = 1) {
  if (den == 0) throw error("rational with zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

// Accepts "p", "-p", "p/q" with arbitrary-precision integer parts.
inline Rat parse_rat(const std::string& text, const std::string& path = "rational") {
  auto is_int = [](const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  };
  std::string num = text, den = "1";
  if (auto slash = text.find('/'); slash != std::string::npos) {
    num = text.substr(0, slash);
    den = text.substr(slash + 1);
  }
  if (!is_int(num) || !is_int(den))
    throw parse_error(path, "malformed rational '" + text + "'");
  Rat r;
  if (r.set_str(num + "/" + den, 10) != 0)
    throw parse_error(path, "malformed rational '" + text + "'");
  if (r.get_den() == 0) throw parse_error(path, "zero denominator in '" + text + "'");
  r.canonicalize();
  return r;
}

// Canonical form: "p/q" reduced, or plain "p" for integers.
inline std::string to_string(const Rat& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline long double to_long_double(const Rat& r) {
  // mpz -> mantissa in [0.5,1) + exponent keeps precision for big integers.
  signed long ne = 0, de = 0;
  double nd = mpz_get_d_2exp(&ne, r.get_num().get_mpz_t());
  double dd = mpz_get_d_2exp(&de, r.get_den().get_mpz_t());
  if (nd == 0.0) return 0.0L;
  return static_cast<long double>(nd) / static_cast<long double>(dd) *
         std::exp2(static_cast<long double>(ne - de));
}

// log of a positive rational, exact up to long-double rounding.
inline long double log_rat(const Rat& r) {
  if (r <= 0) throw error("log of non-positive rational");
  signed long ne = 0, de = 0;
  double nd = mpz_get_d_2exp(&ne, r.get_num().get_mpz_t());
  double dd = mpz_get_d_2exp(&de, r.get_den().get_mpz_t());
  const long double ln2 = 0.6931471805599453094172321214581766L;
  return std::log(static_cast<long double>(nd)) - std::log(static_cast<long double>(dd)) +
         static_cast<long double>(ne - de) * ln2;
}

// Best rational approximation of x with denominator <= max_den (continued
// fractions, Stern-Brocot convergents).
inline Rat rat_from_double(long double x, unsigned long max_den = 1000000000UL) {
  if (!std::isfinite(static_cast<double>(x))) throw error("non-finite value");
  bool neg = x < 0;
  if (neg) x = -x;
  mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;  // previous and current convergent
  mpz_class rp = 0, rq = 1;                  // result
  long double frac = x;
  for (int iter = 0; iter < 64; ++iter) {
    long double fl = std::floor(frac);
    if (fl > 1e18L) break;  // the tail is float noise; keep the convergent
    mpz_class a(static_cast<unsigned long>(fl));
    mpz_class p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > max_den) {
      // The best semiconvergent that still fits, when it beats the last
      // convergent.
      mpz_class k = (mpz_class(max_den) - q0) / q1;
      mpz_class qs = k * q1 + q0;
      if (qs > 0 && k * 2 >= a) {
        rp = k * p1 + p0;
        rq = qs;
      }
      break;
    }
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    rp = p1;
    rq = q1;
    long double rem = frac - fl;
    if (rem < 1e-18L) break;
    frac = 1.0L / rem;
  }
  Rat r(rp, rq);
  r.canonicalize();
  if (neg) r = -r;
  return r;
}

// Smallest-denominator rational within `tol` of x (tries 1, 10, 100, ... up
// to max_den). Recovers exact small-denominator optima from solver floats.
inline Rat snap_rational(long double x, long double tol = 1e-11L,
                         unsigned long max_den = 1000000000UL) {
  for (unsigned long d = 1; d <= max_den; d *= 10) {
    Rat cand = rat_from_double(x, d);
    if (std::fabs(to_long_double(cand) - x) <= tol) return cand;
  }
  return rat_from_double(x, max_den);
}

inline Rat rat_min(const Rat& a, const Rat& b) { return a < b ? a : b; }
inline Rat rat_max(const Rat& a, const Rat& b) { return a > b ? a : b; }

}  // namespace mixedfair
