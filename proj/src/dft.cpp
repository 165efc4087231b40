#include "chaosforge/dft.hpp"

#include <cmath>
#include <complex>

namespace chaosforge {

static void fft_inplace(std::vector<std::complex<double>>& a) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        double ang = -2.0 * M_PI / static_cast<double>(len);
        std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t j = 0; j < len / 2; ++j) {
                std::complex<double> u = a[i + j];
                std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

std::vector<double> rdft_magnitude(const double* x, size_t n) {
    const size_t bins = n / 2 + 1;
    std::vector<double> mag(bins, 0.0);
    if (n == 0) return mag;
    if ((n & (n - 1)) == 0) {
        std::vector<std::complex<double>> a(n);
        for (size_t i = 0; i < n; ++i) a[i] = std::complex<double>(x[i], 0.0);
        fft_inplace(a);
        for (size_t k = 0; k < bins; ++k) mag[k] = std::abs(a[k]);
        return mag;
    }
    for (size_t k = 0; k < bins; ++k) {
        double re = 0.0, im = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double ang = -2.0 * M_PI * static_cast<double>(k) * static_cast<double>(i) /
                         static_cast<double>(n);
            re += x[i] * std::cos(ang);
            im += x[i] * std::sin(ang);
        }
        mag[k] = std::hypot(re, im);
    }
    return mag;
}

std::vector<double> rdft_magnitude(const std::vector<double>& x) {
    return rdft_magnitude(x.data(), x.size());
}

}  // namespace chaosforge
