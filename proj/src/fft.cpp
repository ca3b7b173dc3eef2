#include "synthrf/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace synthrf::dsp {

namespace {

class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(int n, int sign) {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        // Planning on scratch buffers; executed later through the new-array API.
        auto* scratch = fftw_alloc_complex(static_cast<size_t>(n));
        fftw_plan plan =
            fftw_plan_dft_1d(n, scratch, scratch, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(scratch);
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

void execute(std::span<Complex> data, int sign) {
    if (data.empty()) return;
    fftw_plan plan = cache().get(static_cast<int>(data.size()), sign);
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, p, p);
}

}  // namespace

void fft_in_place(std::span<Complex> data) {
    execute(data, FFTW_FORWARD);
}

void ifft_in_place(std::span<Complex> data) {
    execute(data, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(data.size());
    for (auto& v : data) v *= scale;
}

}  // namespace synthrf::dsp
