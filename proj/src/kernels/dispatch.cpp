#include <cstdlib>
#include <cstring>

#include "crynet/kernels.hpp"

namespace crynet::kernels {

namespace {

const Ops* select_default() {
#if defined(__x86_64__) || defined(_M_X64)
    if (const char* env = std::getenv("CRYNET_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return &scalar::ops;
        if (std::strcmp(env, "avx2") == 0 && avx2::supported()) return &avx2::ops;
    }
    if (avx2::supported()) return &avx2::ops;
#endif
    return &scalar::ops;
}

const Ops* g_active = nullptr;

}  // namespace

const Ops& active() {
    if (!g_active) g_active = select_default();
    return *g_active;
}

bool force_backend(const char* name) {
    if (std::strcmp(name, "scalar") == 0) {
        g_active = &scalar::ops;
        return true;
    }
#if defined(__x86_64__) || defined(_M_X64)
    if (std::strcmp(name, "avx2") == 0 && avx2::supported()) {
        g_active = &avx2::ops;
        return true;
    }
#endif
    return false;
}

}  // namespace crynet::kernels
