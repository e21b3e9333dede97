#pragma once

#include <array>

#include "asdnk/error.hpp"
#include "asdnk/linalg.hpp"

namespace asdnk {

enum class Chirality { Unprimed, Primed };
enum class Variance { Upper, Lower };

struct Spinor2 {
  std::array<double, 2> c{};
  Chirality chirality = Chirality::Unprimed;
  Variance variance = Variance::Upper;
};

// eps_{01} = eps^{01} = 1 for both chiralities. With this choice
// eps^{AB} eps_{CB} = delta^A_C and raise(lower(s)) = s.
struct Epsilon {
  static constexpr double lower[2][2] = {{0.0, 1.0}, {-1.0, 0.0}};
  static constexpr double upper[2][2] = {{0.0, 1.0}, {-1.0, 0.0}};
};

// s_A = s^B eps_{BA}
inline Spinor2 lower(const Spinor2& s) {
  if (s.variance != Variance::Upper) throw Error("lower() needs an upper-index spinor");
  Spinor2 r = s;
  r.variance = Variance::Lower;
  for (int a = 0; a < 2; ++a) {
    r.c[a] = 0.0;
    for (int b = 0; b < 2; ++b) r.c[a] += s.c[b] * Epsilon::lower[b][a];
  }
  return r;
}

// s^A = eps^{AB} s_B
inline Spinor2 raise(const Spinor2& s) {
  if (s.variance != Variance::Lower) throw Error("raise() needs a lower-index spinor");
  Spinor2 r = s;
  r.variance = Variance::Upper;
  for (int a = 0; a < 2; ++a) {
    r.c[a] = 0.0;
    for (int b = 0; b < 2; ++b) r.c[a] += Epsilon::upper[a][b] * s.c[b];
  }
  return r;
}

enum class Direction { Raise, Lower };
inline Spinor2 raise_lower(const Spinor2& s, Direction d) { return d == Direction::Raise ? raise(s) : lower(s); }

// u^A v_A after bringing both to the required variance; same chirality only.
inline double contract(const Spinor2& u, const Spinor2& v) {
  if (u.chirality != v.chirality) throw Error("cannot contract spinors of different chirality");
  Spinor2 up = u.variance == Variance::Upper ? u : raise(u);
  Spinor2 lo = v.variance == Variance::Lower ? v : lower(v);
  return up.c[0] * lo.c[0] + up.c[1] * lo.c[1];
}

using BiSpinor = Mat<double, 2>;

// V^{AA'} of a vector in the (V0, V1, V2, V3) ordering.
inline BiSpinor vector_to_bispinor(const std::array<double, 4>& v) {
  return {{{v[0] + v[3], v[1] + v[2]}, {v[1] - v[2], v[0] - v[3]}}};
}

inline double quadratic_form_22(const std::array<double, 4>& v) {
  return v[0] * v[0] - v[1] * v[1] + v[2] * v[2] - v[3] * v[3];
}

// Frame index a = (AA') ordered 00', 01', 10', 11'.
constexpr int frame_index(int A, int Ap) { return 2 * A + Ap; }

// Symmetric spinor pairs (00), (01), (11) -> 0, 1, 2.
constexpr int pair_index(int A, int B) { return A + B; }

}  // namespace asdnk
