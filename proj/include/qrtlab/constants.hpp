// Copyright 2026 The qrtlab Authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <cstdint>

namespace qrtlab {

// Numerical tolerances shared by every module.
namespace tol {
inline constexpr double kNorm = 1e-10;           // state normalization
inline constexpr double kUnitary = 1e-10;        // ||U^dag U - I||_max for flagged unitaries
inline constexpr double kHermitian = 1e-12;      // ||A - A^dag||_max for flagged Hermitian ops
inline constexpr double kUnitaryLoad = 1e-8;     // literal matrices read from disk
inline constexpr double kUnitaryInput = 1e-8;    // RGP entry points reject inputs beyond this
inline constexpr double kProjectedProb = 1e-14;  // outcome dropped from a projected ensemble
inline constexpr double kProtocolProb = 1e-12;   // shot skipped for projected-state estimates
inline constexpr double kSingular = 1e-8;        // polar sampler resamples below this singular value
}  // namespace tol

// Size guards.
namespace guard {
// Largest dense replica-space dimension. A dense complex matrix of this size
// takes 256 MiB; larger replica spaces use structured paths.
inline constexpr std::int64_t kReplicaDim = 1 << 12;
inline constexpr int kMaxQubits = 12;
inline constexpr int kMaxCliffordQubits = 12;
inline constexpr std::int64_t kLocalPairDim = 1 << 12;
}  // namespace guard

}  // namespace qrtlab
