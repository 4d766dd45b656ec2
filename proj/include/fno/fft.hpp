#pragma once

// Thin FFTW wrapper: cached in-place complex plans, safe to execute from
// several threads (plan creation is serialized). FFTW_ESTIMATE plans are
// deterministic, so results do not depend on timing or thread count.

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fno {

using cplx = std::complex<double>;

class FftPlans {
public:
    static FftPlans& instance() {
        static FftPlans p;
        return p;
    }

    // sign = FFTW_FORWARD (-1) or FFTW_BACKWARD (+1); unnormalized.
    void execute(std::vector<cplx>& a, int sign) {
        if (a.empty()) return;
        fftw_plan p = plan(static_cast<int>(a.size()), sign);
        auto* ptr = reinterpret_cast<fftw_complex*>(a.data());
        fftw_execute_dft(p, ptr, ptr);
    }

    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;

private:
    FftPlans() = default;
    ~FftPlans() {
        for (auto& [_, p] : plans_) fftw_destroy_plan(p);
    }

    fftw_plan plan(int n, int sign) {
        std::lock_guard<std::mutex> lock(mu_);
        auto key = std::make_pair(n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<cplx> buf(n);
        auto* ptr = reinterpret_cast<fftw_complex*>(buf.data());
        fftw_plan p = fftw_plan_dft_1d(n, ptr, ptr, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!p) throw std::runtime_error("fftw plan creation failed");
        plans_.emplace(key, p);
        return p;
    }

    std::mutex mu_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

inline void fft_forward(std::vector<cplx>& a) { FftPlans::instance().execute(a, FFTW_FORWARD); }
inline void fft_backward(std::vector<cplx>& a) { FftPlans::instance().execute(a, FFTW_BACKWARD); }

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Linear convolution; direct for small operands, FFT otherwise.
inline std::vector<cplx> convolve(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.empty() || b.empty()) return {};
    const std::size_t n = a.size() + b.size() - 1;
    if (std::min(a.size(), b.size()) <= 24) {
        std::vector<cplx> out(n);
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
        return out;
    }
    const std::size_t p = next_pow2(n);
    std::vector<cplx> fa(p), fb(p);
    std::copy(a.begin(), a.end(), fa.begin());
    std::copy(b.begin(), b.end(), fb.begin());
    fft_forward(fa);
    fft_forward(fb);
    for (std::size_t i = 0; i < p; ++i) fa[i] *= fb[i];
    fft_backward(fa);
    fa.resize(n);
    const double scale = 1.0 / static_cast<double>(p);
    for (auto& v : fa) v *= scale;
    return fa;
}

}  // namespace fno
