// Data-parallel inner-loop kernels with runtime backend selection.
//
// Every kernel is elementwise or order-preserving per output element, so the
// scalar and SIMD variants produce bit-identical results (integer adds are
// exact; the f64 kernels perform the same per-lane operation sequence).
#pragma once

#include <cstddef>
#include <cstdint>

namespace resparc::kernels {

enum class Backend { Scalar, Avx2, Neon };

struct Ops {
    // acc[j] += row[j], widening int16 levels into the int32 accumulator.
    void (*add_row_i32)(int32_t* acc, const int16_t* row, size_t n);
    // acc[j] += row[j]
    void (*add_row_f64)(double* acc, const double* row, size_t n);
    // Integrate-and-fire update: potential[j] += current[j]; on reaching
    // threshold emit one spike and subtract the threshold (reset by
    // subtraction, overshoot carried).
    void (*if_update)(double* potential, const double* current, double threshold,
                      uint8_t* spike, size_t n);
    // true iff every word is zero.
    bool (*all_zero_u64)(const uint64_t* words, size_t n);
};

const char* backend_name(Backend b);

// Backend actually usable on this machine, honoring the RESPARC_KERNELS
// environment variable ("scalar", "avx2", "neon") as an override.
Backend detect_backend();

// Kernel table for an explicit backend (throws resparc::InputError if the
// backend is not compiled in or not supported by the CPU).
const Ops& ops_for(Backend b);

// Active kernel table (detected once, cached).
const Ops& ops();

// List of backends usable on this machine (always contains Scalar).
// Used by the equivalence tests.
const Backend* available_backends(size_t* count);

} // namespace resparc::kernels
