#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace borelkit {

// Exact rational number. All weight/metric arithmetic in the library is
// carried out in this type; doubles appear only in the fractal-curve code.
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rat q(num, den);
  q.canonicalize();
  return q;
}

// Parses "p", "-p" or "p/q".
inline Rat rat_parse(const std::string& s) {
  Rat q;
  if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
  q.canonicalize();
  return q;
}

inline std::string rat_str(const Rat& q) { return q.get_str(); }

inline double rat_double(const Rat& q) { return q.get_d(); }

inline Rat rat_abs(const Rat& q) { return q < 0 ? Rat(-q) : q; }

// 2^-e as an exact rational, e >= 0.
inline Rat pow2_neg(unsigned e) {
  Rat q(1);
  mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), e);
  return q;
}

}  // namespace borelkit
