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

#include <algorithm>

#include "qtis/kernels.hpp"

namespace qtis::sim::kernels::optimized {

namespace {

// Inserts a zero at bit position q.
inline std::int64_t insert_zero(std::int64_t i, int q) noexcept {
    const std::int64_t low = i & ((std::int64_t{1} << q) - 1);
    return ((i >> q) << (q + 1)) | low;
}

inline std::int64_t insert_two_zeros(std::int64_t i, int lo, int hi) noexcept {
    return insert_zero(insert_zero(i, lo), hi);
}

// Small registers skip the parallel region entirely; entering one costs more
// than the whole loop below the threshold.
template <class Body>
inline void for_each_index(std::int64_t count, std::size_t dim, Body body) {
    if (dim >= kParallelThreshold) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < count; ++i) body(i);
    } else {
        for (std::int64_t i = 0; i < count; ++i) body(i);
    }
}

}  // namespace

void apply_1q(std::span<amplitude> psi, int q, const Mat2& m) {
    const auto half = static_cast<std::int64_t>(psi.size() / 2);
    const std::int64_t stride = std::int64_t{1} << q;
    amplitude* a = psi.data();
    for_each_index(half, psi.size(), [=](std::int64_t i) {
        const std::int64_t i0 = insert_zero(i, q);
        const std::int64_t i1 = i0 | stride;
        const amplitude v0 = a[i0];
        const amplitude v1 = a[i1];
        a[i0] = m.m00 * v0 + m.m01 * v1;
        a[i1] = m.m10 * v0 + m.m11 * v1;
    });
}

void apply_diag_1q(std::span<amplitude> psi, int q, std::uint64_t control_mask, amplitude d0,
                   amplitude d1) {
    const auto dim = static_cast<std::int64_t>(psi.size());
    const auto cmask = static_cast<std::int64_t>(control_mask);
    const amplitude table[2] = {d0, d1};
    amplitude* a = psi.data();
    for_each_index(dim, psi.size(), [=](std::int64_t z) {
        if ((z & cmask) == cmask) a[z] *= table[(z >> q) & 1];
    });
}

void apply_diag_zz(std::span<amplitude> psi, int qa, int qb, std::uint64_t control_mask,
                   amplitude even, amplitude odd) {
    const auto dim = static_cast<std::int64_t>(psi.size());
    const auto cmask = static_cast<std::int64_t>(control_mask);
    const amplitude table[2] = {even, odd};
    amplitude* a = psi.data();
    for_each_index(dim, psi.size(), [=](std::int64_t z) {
        if ((z & cmask) == cmask) a[z] *= table[((z >> qa) ^ (z >> qb)) & 1];
    });
}

void apply_swap(std::span<amplitude> psi, int qa, int qb) {
    const int lo = std::min(qa, qb);
    const int hi = std::max(qa, qb);
    const auto quarter = static_cast<std::int64_t>(psi.size() / 4);
    const std::int64_t ma = std::int64_t{1} << qa;
    const std::int64_t mb = std::int64_t{1} << qb;
    amplitude* a = psi.data();
    for_each_index(quarter, psi.size(), [=](std::int64_t i) {
        const std::int64_t base = insert_two_zeros(i, lo, hi);
        std::swap(a[base | ma], a[base | mb]);
    });
}

void apply_ccnot(std::span<amplitude> psi, int c0, int c1, int target) {
    // Enumerate indices with both controls set and the target clear.
    int bits[3] = {c0, c1, target};
    std::sort(bits, bits + 3);
    const auto eighth = static_cast<std::int64_t>(psi.size() / 8);
    const std::int64_t cm = (std::int64_t{1} << c0) | (std::int64_t{1} << c1);
    const std::int64_t tm = std::int64_t{1} << target;
    amplitude* a = psi.data();
    for_each_index(eighth, psi.size(), [=](std::int64_t i) {
        const std::int64_t base = insert_zero(insert_zero(insert_zero(i, bits[0]), bits[1]), bits[2]) | cm;
        std::swap(a[base], a[base | tm]);
    });
}

}  // namespace qtis::sim::kernels::optimized
