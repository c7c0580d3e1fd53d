// Copyright 2026 The qtis Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

// Low-level amplitude kernels. Both namespaces expose the same operations on
// a raw amplitude span of length 2^n; callers validate indices.

#pragma once

#include <complex>
#include <cstdint>
#include <span>

namespace qtis::sim::kernels {

using amplitude = std::complex<double>;

/// 2x2 matrix, row major.
struct Mat2 {
    amplitude m00, m01, m10, m11;
};

/// Registers at least this large use OpenMP work sharing.
inline constexpr std::uint64_t kParallelThreshold = std::uint64_t{1} << 14;

namespace optimized {

void apply_1q(std::span<amplitude> psi, int q, const Mat2& m);
/// Multiplies by d0/d1 depending on bit q, only where all bits of
/// `control_mask` are set.
void apply_diag_1q(std::span<amplitude> psi, int q, std::uint64_t control_mask, amplitude d0,
                   amplitude d1);
/// Multiplies by even/odd depending on the parity of bits a and b.
void apply_diag_zz(std::span<amplitude> psi, int a, int b, std::uint64_t control_mask,
                   amplitude even, amplitude odd);
void apply_swap(std::span<amplitude> psi, int a, int b);
void apply_ccnot(std::span<amplitude> psi, int c0, int c1, int target);

}  // namespace optimized

namespace reference {

void apply_1q(std::span<amplitude> psi, int q, const Mat2& m);
void apply_diag_1q(std::span<amplitude> psi, int q, std::uint64_t control_mask, amplitude d0,
                   amplitude d1);
void apply_diag_zz(std::span<amplitude> psi, int a, int b, std::uint64_t control_mask,
                   amplitude even, amplitude odd);
void apply_swap(std::span<amplitude> psi, int a, int b);
void apply_ccnot(std::span<amplitude> psi, int c0, int c1, int target);

}  // namespace reference

}  // namespace qtis::sim::kernels
