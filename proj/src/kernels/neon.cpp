// aarch64 only; Advanced SIMD is baseline there, so no runtime check is needed.

#include <arm_neon.h>

#include "kernels_impl.hpp"

namespace ptint::kernels::detail {

namespace {

double dot(const double* a, const double* b, std::size_t n)
{
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double wdot(const double* w, const double* a, const double* b, std::size_t n)
{
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vfmaq_f64(acc, vmulq_f64(vld1q_f64(w + i), vld1q_f64(a + i)), vld1q_f64(b + i));
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) s += w[i] * a[i] * b[i];
    return s;
}

void axpy(double s, const double* x, double* y, std::size_t n)
{
    const float64x2_t vs = vdupq_n_f64(s);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), vs, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += s * x[i];
}

void lincomb3(double* out, double c1, const double* x1, double c2, const double* x2, double c3, const double* x3,
              std::size_t n)
{
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t acc = vmulq_n_f64(vld1q_f64(x1 + i), c1);
        acc = vfmaq_n_f64(acc, vld1q_f64(x2 + i), c2);
        acc = vfmaq_n_f64(acc, vld1q_f64(x3 + i), c3);
        vst1q_f64(out + i, acc);
    }
    for (; i < n; ++i) out[i] = c1 * x1[i] + c2 * x2[i] + c3 * x3[i];
}

double diff_energy(const double* c, const double* f, std::size_t cells)
{
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= cells; i += 2) {
        const float64x2_t df = vsubq_f64(vld1q_f64(f + i + 1), vld1q_f64(f + i));
        acc = vfmaq_f64(acc, vmulq_f64(vld1q_f64(c + i), df), df);
    }
    double s = vaddvq_f64(acc);
    for (; i < cells; ++i) {
        const double df = f[i + 1] - f[i];
        s += c[i] * df * df;
    }
    return s;
}

void diff_energy_grad(const double* c, const double* f, double* g, std::size_t cells)
{
    if (cells == 0) return;
    g[0] -= 2.0 * c[0] * (f[1] - f[0]);
    std::size_t i = 1;
    for (; i + 2 <= cells; i += 2) {
        const float64x2_t fm = vld1q_f64(f + i - 1);
        const float64x2_t f0 = vld1q_f64(f + i);
        const float64x2_t fp = vld1q_f64(f + i + 1);
        const float64x2_t tl = vmulq_f64(vld1q_f64(c + i - 1), vsubq_f64(f0, fm));
        const float64x2_t tr = vmulq_f64(vld1q_f64(c + i), vsubq_f64(fp, f0));
        vst1q_f64(g + i, vfmaq_n_f64(vld1q_f64(g + i), vsubq_f64(tl, tr), 2.0));
    }
    for (; i < cells; ++i) g[i] += 2.0 * (c[i - 1] * (f[i] - f[i - 1]) - c[i] * (f[i + 1] - f[i]));
    g[cells] += 2.0 * c[cells - 1] * (f[cells] - f[cells - 1]);
}

}  // namespace

const Table* neon_table_impl()
{
    static const Table table{Isa::Neon, dot, wdot, axpy, lincomb3, diff_energy, diff_energy_grad};
    return &table;
}

}  // namespace ptint::kernels::detail
