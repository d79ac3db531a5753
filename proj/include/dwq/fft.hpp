/*
   Copyright 2026 The dwq Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <complex>
#include <cstddef>
#include <mutex>
#include <new>
#include <vector>

#include <fftw3.h>

namespace dwq {

/// std::allocator replacement backed by fftw_malloc, so every buffer has the
/// alignment the plans were created with.
template <class T>
struct FftwAllocator {
    using value_type = T;
    FftwAllocator() noexcept = default;
    template <class U>
    FftwAllocator(const FftwAllocator<U>&) noexcept {}
    T* allocate(std::size_t n)
    {
        void* p = fftw_malloc(n * sizeof(T));
        if (!p) throw std::bad_alloc();
        return static_cast<T*>(p);
    }
    void deallocate(T* p, std::size_t) noexcept { fftw_free(p); }
    template <class U>
    bool operator==(const FftwAllocator<U>&) const noexcept { return true; }
};

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex, FftwAllocator<Complex>>;

namespace detail {
inline std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}
inline fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }
} // namespace detail

/// Forward/backward in-place-capable 1D complex plan (unnormalised, like
/// FFTW). Plans use FFTW_ESTIMATE so repeated runs are bit-identical.
class FftPlan {
public:
    FftPlan() = default;
    explicit FftPlan(std::size_t n) : n_(n)
    {
        ComplexVector scratch(n);
        std::lock_guard lock(detail::fftw_planner_mutex());
        auto* p = detail::as_fftw(scratch.data());
        const int len = static_cast<int>(n);
        forward_ = fftw_plan_dft_1d(len, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_1d(len, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
    FftPlan(FftPlan&& o) noexcept { swap(o); }
    FftPlan& operator=(FftPlan&& o) noexcept
    {
        swap(o);
        return *this;
    }
    ~FftPlan()
    {
        if (!forward_) return;
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }

    [[nodiscard]] std::size_t size() const { return n_; }

    void forward(ComplexVector& v) const { fftw_execute_dft(forward_, detail::as_fftw(v.data()), detail::as_fftw(v.data())); }
    void backward(ComplexVector& v) const { fftw_execute_dft(backward_, detail::as_fftw(v.data()), detail::as_fftw(v.data())); }

private:
    void swap(FftPlan& o) noexcept
    {
        std::swap(n_, o.n_);
        std::swap(forward_, o.forward_);
        std::swap(backward_, o.backward_);
    }

    std::size_t n_ = 0;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

} // namespace dwq
