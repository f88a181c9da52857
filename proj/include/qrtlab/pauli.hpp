// Copyright 2026 The qrtlab Authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "qrtlab/errors.hpp"
#include "qrtlab/qcore.hpp"

namespace qrtlab {

inline int popcount(std::uint64_t x) { return std::popcount(x); }

inline cplx i_pow(int e) {
  switch (((e % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

// Pauli string i^phase * (sigma_{q0} (x) ... (x) sigma_{q(n-1)}) with Hermitian
// single-qubit factors. Masks use amplitude-index bits: qubit q <-> bit n-1-q.
struct PauliString {
  int n = 1;
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  int phase = 0;  // exponent of i, 0..3

  static PauliString from_label(const std::string& label) {
    PauliString p;
    std::size_t pos = 0;
    if (!label.empty() && (label[0] == '+' || label[0] == '-')) {
      p.phase = label[0] == '-' ? 2 : 0;
      pos = 1;
    }
    if (label.size() >= pos + 1 && label[pos] == 'i') {
      p.phase = (p.phase + 1) % 4;
      ++pos;
    }
    p.n = static_cast<int>(label.size() - pos);
    require(p.n >= 1 && p.n <= 32, "Pauli label must name 1..32 qubits");
    for (int q = 0; q < p.n; ++q) {
      const std::uint64_t bit = std::uint64_t{1} << (p.n - 1 - q);
      switch (label[pos + q]) {
        case 'I': break;
        case 'X': p.x |= bit; break;
        case 'Y': p.x |= bit; p.z |= bit; break;
        case 'Z': p.z |= bit; break;
        default: throw DomainError("invalid Pauli letter in '" + label + "'");
      }
    }
    return p;
  }

  std::string label() const {
    std::string s;
    static const char* ph[] = {"+", "+i", "-", "-i"};
    s += ph[phase & 3];
    for (int q = 0; q < n; ++q) {
      const std::uint64_t bit = std::uint64_t{1} << (n - 1 - q);
      const bool bx = x & bit, bz = z & bit;
      s.push_back(bx ? (bz ? 'Y' : 'X') : (bz ? 'Z' : 'I'));
    }
    return s;
  }

  bool is_hermitian() const { return (phase & 1) == 0; }
  int weight() const { return popcount(x | z); }

  // Total factor in front of X^x Z^z.
  cplx xz_coefficient() const { return i_pow(phase + popcount(x & z)); }

  Mat dense() const {
    const Index d = pow2(n);
    Mat m = Mat::Zero(d, d);
    const cplx c = xz_coefficient();
    for (Index k = 0; k < d; ++k) {
      const double s = (popcount(static_cast<std::uint64_t>(k) & z) & 1) ? -1.0 : 1.0;
      m(static_cast<Index>(static_cast<std::uint64_t>(k) ^ x), k) = c * s;
    }
    return m;
  }

  void apply_in_place(Vec& v) const {
    const Index d = v.size();
    Vec out(d);
    const cplx c = xz_coefficient();
    for (Index k = 0; k < d; ++k) {
      const double s = (popcount(static_cast<std::uint64_t>(k) & z) & 1) ? -1.0 : 1.0;
      out(static_cast<Index>(static_cast<std::uint64_t>(k) ^ x)) = c * s * v(k);
    }
    v.swap(out);
  }
};

inline bool commutes(const PauliString& a, const PauliString& b) {
  return ((popcount(a.x & b.z) + popcount(a.z & b.x)) & 1) == 0;
}

// Operator product a*b with exact phase.
inline PauliString multiply(const PauliString& a, const PauliString& b) {
  require(a.n == b.n, "Pauli product size mismatch");
  // Convert to X^x Z^z form, multiply, convert back.
  const int ea = a.phase + popcount(a.x & a.z);
  const int eb = b.phase + popcount(b.x & b.z);
  const int e = ea + eb + 2 * popcount(a.z & b.x);
  PauliString r;
  r.n = a.n;
  r.x = a.x ^ b.x;
  r.z = a.z ^ b.z;
  r.phase = ((e - popcount(r.x & r.z)) % 4 + 4) % 4;
  return r;
}

inline cplx pauli_expectation_complex(const StateVector& s, const PauliString& p) {
  require_dim(p.n == s.n_qubits(), "Pauli string size does not match state");
  const Vec& a = s.amps();
  cplx acc = 0.0;
  for (Index k = 0; k < a.size(); ++k) {
    const cplx term = std::conj(a(static_cast<Index>(static_cast<std::uint64_t>(k) ^ p.x))) * a(k);
    acc += (popcount(static_cast<std::uint64_t>(k) & p.z) & 1) ? -term : term;
  }
  return p.xz_coefficient() * acc;
}

// <psi|P|psi> for Hermitian P; O(2^N) without materializing P.
inline double pauli_expectation(const StateVector& s, const PauliString& p) {
  return pauli_expectation_complex(s, p).real();
}

// All 4^n phase-free strings, enumerated by (x, z).
inline std::vector<PauliString> all_pauli_strings(int n) {
  require(n >= 1 && n <= 8, "all_pauli_strings supports n <= 8");
  std::vector<PauliString> out;
  const std::uint64_t d = std::uint64_t{1} << n;
  out.reserve(d * d);
  for (std::uint64_t x = 0; x < d; ++x)
    for (std::uint64_t z = 0; z < d; ++z) out.push_back(PauliString{n, x, z, 0});
  return out;
}

}  // namespace qrtlab
