#include "kernels_impl.hpp"

namespace ptint::kernels::detail {

namespace {

double dot(const double* a, const double* b, std::size_t n)
{
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double wdot(const double* w, const double* a, const double* b, std::size_t n)
{
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * a[i] * b[i];
    return s;
}

void axpy(double s, const double* x, double* y, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) y[i] += s * x[i];
}

void lincomb3(double* out, double c1, const double* x1, double c2, const double* x2, double c3, const double* x3,
              std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) out[i] = c1 * x1[i] + c2 * x2[i] + c3 * x3[i];
}

double diff_energy(const double* c, const double* f, std::size_t cells)
{
    double s = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
        const double df = f[i + 1] - f[i];
        s += c[i] * df * df;
    }
    return s;
}

void diff_energy_grad(const double* c, const double* f, double* g, std::size_t cells)
{
    for (std::size_t i = 0; i < cells; ++i) {
        const double t = 2.0 * c[i] * (f[i + 1] - f[i]);
        g[i] -= t;
        g[i + 1] += t;
    }
}

}  // namespace

const Table& scalar_table_impl()
{
    static const Table table{Isa::Scalar, dot, wdot, axpy, lincomb3, diff_energy, diff_energy_grad};
    return table;
}

}  // namespace ptint::kernels::detail
