// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "kernels_impl.hpp"

namespace ptint::kernels::detail {

namespace {

inline double hsum(__m256d v)
{
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(const double* a, const double* b, std::size_t n)
{
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double wdot(const double* w, const double* a, const double* b, std::size_t n)
{
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d wa0 = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
        const __m256d wa1 = _mm256_mul_pd(_mm256_loadu_pd(w + i + 4), _mm256_loadu_pd(a + i + 4));
        acc0 = _mm256_fmadd_pd(wa0, _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(wa1, _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        const __m256d wa = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
        acc0 = _mm256_fmadd_pd(wa, _mm256_loadu_pd(b + i), acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += w[i] * a[i] * b[i];
    return s;
}

void axpy(double s, const double* x, double* y, std::size_t n)
{
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(vs, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += s * x[i];
}

void lincomb3(double* out, double c1, const double* x1, double c2, const double* x2, double c3, const double* x3,
              std::size_t n)
{
    const __m256d v1 = _mm256_set1_pd(c1);
    const __m256d v2 = _mm256_set1_pd(c2);
    const __m256d v3 = _mm256_set1_pd(c3);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d acc = _mm256_mul_pd(v1, _mm256_loadu_pd(x1 + i));
        acc = _mm256_fmadd_pd(v2, _mm256_loadu_pd(x2 + i), acc);
        acc = _mm256_fmadd_pd(v3, _mm256_loadu_pd(x3 + i), acc);
        _mm256_storeu_pd(out + i, acc);
    }
    for (; i < n; ++i) out[i] = c1 * x1[i] + c2 * x2[i] + c3 * x3[i];
}

double diff_energy(const double* c, const double* f, std::size_t cells)
{
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= cells; i += 4) {
        const __m256d df = _mm256_sub_pd(_mm256_loadu_pd(f + i + 1), _mm256_loadu_pd(f + i));
        acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(c + i), df), df, acc);
    }
    double s = hsum(acc);
    for (; i < cells; ++i) {
        const double df = f[i + 1] - f[i];
        s += c[i] * df * df;
    }
    return s;
}

// g_i += t_{i-1} - t_i with t_j = 2 c_j (f_{j+1} - f_j), gathered per node.
void diff_energy_grad(const double* c, const double* f, double* g, std::size_t cells)
{
    if (cells == 0) return;
    g[0] -= 2.0 * c[0] * (f[1] - f[0]);
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t i = 1;
    for (; i + 4 <= cells; i += 4) {
        const __m256d fm = _mm256_loadu_pd(f + i - 1);
        const __m256d f0 = _mm256_loadu_pd(f + i);
        const __m256d fp = _mm256_loadu_pd(f + i + 1);
        const __m256d t_left = _mm256_mul_pd(_mm256_loadu_pd(c + i - 1), _mm256_sub_pd(f0, fm));
        const __m256d t_right = _mm256_mul_pd(_mm256_loadu_pd(c + i), _mm256_sub_pd(fp, f0));
        const __m256d delta = _mm256_mul_pd(two, _mm256_sub_pd(t_left, t_right));
        _mm256_storeu_pd(g + i, _mm256_add_pd(_mm256_loadu_pd(g + i), delta));
    }
    for (; i < cells; ++i) g[i] += 2.0 * (c[i - 1] * (f[i] - f[i - 1]) - c[i] * (f[i + 1] - f[i]));
    g[cells] += 2.0 * c[cells - 1] * (f[cells] - f[cells - 1]);
}

}  // namespace

const Table* avx2_table_impl()
{
    static const Table table{Isa::Avx2, dot, wdot, axpy, lincomb3, diff_energy, diff_energy_grad};
    return &table;
}

}  // namespace ptint::kernels::detail
