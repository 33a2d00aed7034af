#include "dft.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

namespace gemtomo::detail {

namespace {
// The FFTW planner is not re-entrant; execution of distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

void dft_inplace(cdouble* data, const std::array<std::size_t, 3>& shape,
                 const std::array<bool, 3>& axes, int sign) {
    std::array<std::size_t, 3> stride{shape[1] * shape[2], shape[2], 1};
    std::vector<fftw_iodim> dims, loops;
    for (int a = 0; a < 3; ++a) {
        if (shape[a] == 1) continue;
        fftw_iodim d{static_cast<int>(shape[a]), static_cast<int>(stride[a]),
                     static_cast<int>(stride[a])};
        (axes[a] ? dims : loops).push_back(d);
    }
    if (dims.empty()) return;

    auto* buf = reinterpret_cast<fftw_complex*>(data);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_guru_dft(static_cast<int>(dims.size()), dims.data(),
                                  static_cast<int>(loops.size()), loops.data(), buf, buf,
                                  sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
}

} // namespace gemtomo::detail
