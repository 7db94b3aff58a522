#include "resparc/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <string>

#include "resparc/errors.hpp"

namespace resparc::kernels {

namespace {

void add_row_i32_scalar(int32_t* acc, const int16_t* row, size_t n)
{
    for (size_t j = 0; j < n; ++j)
        acc[j] += static_cast<int32_t>(row[j]);
}

void add_row_f64_scalar(double* acc, const double* row, size_t n)
{
    for (size_t j = 0; j < n; ++j)
        acc[j] += row[j];
}

void if_update_scalar(double* potential, const double* current, double threshold,
                      uint8_t* spike, size_t n)
{
    for (size_t j = 0; j < n; ++j) {
        double p = potential[j] + current[j];
        uint8_t s = p >= threshold ? 1 : 0;
        potential[j] = s ? p - threshold : p;
        spike[j] = s;
    }
}

bool all_zero_u64_scalar(const uint64_t* words, size_t n)
{
    uint64_t any = 0;
    for (size_t i = 0; i < n; ++i)
        any |= words[i];
    return any == 0;
}

constexpr Ops kScalarOps = {
    &add_row_i32_scalar,
    &add_row_f64_scalar,
    &if_update_scalar,
    &all_zero_u64_scalar,
};

} // namespace

#if defined(RESPARC_HAVE_AVX2)
const Ops& avx2_ops();      // kernels_avx2.cpp
bool avx2_supported();
#endif
#if defined(RESPARC_HAVE_NEON)
const Ops& neon_ops();      // kernels_neon.cpp
#endif

const char* backend_name(Backend b)
{
    switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
    }
    return "?";
}

static bool backend_usable(Backend b)
{
    switch (b) {
    case Backend::Scalar:
        return true;
    case Backend::Avx2:
#if defined(RESPARC_HAVE_AVX2)
        return avx2_supported();
#else
        return false;
#endif
    case Backend::Neon:
#if defined(RESPARC_HAVE_NEON)
        return true;
#else
        return false;
#endif
    }
    return false;
}

Backend detect_backend()
{
    if (const char* env = std::getenv("RESPARC_KERNELS")) {
        std::string want(env);
        if (want == "scalar")
            return Backend::Scalar;
        if (want == "avx2" && backend_usable(Backend::Avx2))
            return Backend::Avx2;
        if (want == "neon" && backend_usable(Backend::Neon))
            return Backend::Neon;
        // Unknown or unusable override falls back to scalar.
        return Backend::Scalar;
    }
    if (backend_usable(Backend::Avx2))
        return Backend::Avx2;
    if (backend_usable(Backend::Neon))
        return Backend::Neon;
    return Backend::Scalar;
}

const Ops& ops_for(Backend b)
{
    switch (b) {
    case Backend::Scalar:
        return kScalarOps;
    case Backend::Avx2:
#if defined(RESPARC_HAVE_AVX2)
        if (avx2_supported())
            return avx2_ops();
#endif
        throw InputError("kernel backend avx2 not available on this machine");
    case Backend::Neon:
#if defined(RESPARC_HAVE_NEON)
        return neon_ops();
#else
        throw InputError("kernel backend neon not available on this machine");
#endif
    }
    throw InputError("unknown kernel backend");
}

const Ops& ops()
{
    static const Ops& active = ops_for(detect_backend());
    return active;
}

const Backend* available_backends(size_t* count)
{
    static Backend avail[3];
    static size_t n = [] {
        size_t k = 0;
        avail[k++] = Backend::Scalar;
        if (backend_usable(Backend::Avx2))
            avail[k++] = Backend::Avx2;
        if (backend_usable(Backend::Neon))
            avail[k++] = Backend::Neon;
        return k;
    }();
    *count = n;
    return avail;
}

} // namespace resparc::kernels
