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

// Serial reference kernels. Every output amplitude is computed from a copy of
// the input, one basis state at a time, straight from the gate definition.

#include <vector>

#include "qtis/kernels.hpp"

namespace qtis::sim::kernels::reference {

namespace {

inline int bit(std::uint64_t z, int q) noexcept { return static_cast<int>((z >> q) & 1U); }

inline bool controls_on(std::uint64_t z, std::uint64_t mask) noexcept { return (z & mask) == mask; }

}  // namespace

void apply_1q(std::span<amplitude> psi, int q, const Mat2& m) {
    const std::vector<amplitude> in(psi.begin(), psi.end());
    const std::uint64_t mask = std::uint64_t{1} << q;
    for (std::uint64_t z = 0; z < in.size(); ++z) {
        const amplitude v0 = in[z & ~mask];
        const amplitude v1 = in[z | mask];
        psi[z] = bit(z, q) == 0 ? m.m00 * v0 + m.m01 * v1 : m.m10 * v0 + m.m11 * v1;
    }
}

void apply_diag_1q(std::span<amplitude> psi, int q, std::uint64_t control_mask, amplitude d0,
                   amplitude d1) {
    for (std::uint64_t z = 0; z < psi.size(); ++z) {
        if (!controls_on(z, control_mask)) continue;
        psi[z] *= bit(z, q) == 0 ? d0 : d1;
    }
}

void apply_diag_zz(std::span<amplitude> psi, int a, int b, std::uint64_t control_mask,
                   amplitude even, amplitude odd) {
    for (std::uint64_t z = 0; z < psi.size(); ++z) {
        if (!controls_on(z, control_mask)) continue;
        psi[z] *= bit(z, a) == bit(z, b) ? even : odd;
    }
}

void apply_swap(std::span<amplitude> psi, int a, int b) {
    const std::vector<amplitude> in(psi.begin(), psi.end());
    for (std::uint64_t z = 0; z < in.size(); ++z) {
        std::uint64_t src = z;
        if (bit(z, a) != bit(z, b)) src ^= (std::uint64_t{1} << a) | (std::uint64_t{1} << b);
        psi[z] = in[src];
    }
}

void apply_ccnot(std::span<amplitude> psi, int c0, int c1, int target) {
    const std::vector<amplitude> in(psi.begin(), psi.end());
    for (std::uint64_t z = 0; z < in.size(); ++z) {
        std::uint64_t src = z;
        if (bit(z, c0) && bit(z, c1)) src ^= std::uint64_t{1} << target;
        psi[z] = in[src];
    }
}

}  // namespace qtis::sim::kernels::reference
