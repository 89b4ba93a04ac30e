#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_impl.hpp"

namespace ptint::kernels {

const char* to_string(Isa isa)
{
    switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
    }
    return "?";
}

const Table& scalar_table() { return detail::scalar_table_impl(); }

const Table* avx2_table()
{
#if defined(PTINT_HAVE_AVX2)
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? detail::avx2_table_impl() : nullptr;
#else
    return nullptr;
#endif
}

const Table* neon_table()
{
#if defined(PTINT_HAVE_NEON)
    return detail::neon_table_impl();
#else
    return nullptr;
#endif
}

namespace {

const Table& choose()
{
    const char* env = std::getenv("PTINT_KERNELS");
    const std::string want = env ? env : "auto";
    if (want == "scalar") return scalar_table();
    if (want == "avx2") {
        if (const Table* t = avx2_table()) return *t;
        throw std::runtime_error("PTINT_KERNELS=avx2 requested but AVX2/FMA is unavailable");
    }
    if (want == "neon") {
        if (const Table* t = neon_table()) return *t;
        throw std::runtime_error("PTINT_KERNELS=neon requested but NEON is unavailable");
    }
    if (want != "auto") throw std::runtime_error("PTINT_KERNELS must be scalar, avx2, neon or auto");
    if (const Table* t = avx2_table()) return *t;
    if (const Table* t = neon_table()) return *t;
    return scalar_table();
}

void require_len(std::size_t got, std::size_t want, const char* who)
{
    if (got != want) throw std::invalid_argument(std::string("kernels::") + who + ": length mismatch");
}

}  // namespace

const Table& active()
{
    static const Table& table = choose();
    return table;
}

double dot(std::span<const double> a, std::span<const double> b)
{
    require_len(b.size(), a.size(), "dot");
    return active().dot(a.data(), b.data(), a.size());
}

double wdot(std::span<const double> w, std::span<const double> a, std::span<const double> b)
{
    require_len(a.size(), w.size(), "wdot");
    require_len(b.size(), w.size(), "wdot");
    return active().wdot(w.data(), a.data(), b.data(), w.size());
}

void axpy(double s, std::span<const double> x, std::span<double> y)
{
    require_len(y.size(), x.size(), "axpy");
    active().axpy(s, x.data(), y.data(), x.size());
}

void lincomb3(std::span<double> out, double c1, std::span<const double> x1, double c2, std::span<const double> x2,
              double c3, std::span<const double> x3)
{
    require_len(x1.size(), out.size(), "lincomb3");
    require_len(x2.size(), out.size(), "lincomb3");
    require_len(x3.size(), out.size(), "lincomb3");
    active().lincomb3(out.data(), c1, x1.data(), c2, x2.data(), c3, x3.data(), out.size());
}

double diff_energy(std::span<const double> c, std::span<const double> f)
{
    require_len(f.size(), c.size() + 1, "diff_energy");
    return active().diff_energy(c.data(), f.data(), c.size());
}

void diff_energy_grad(std::span<const double> c, std::span<const double> f, std::span<double> g)
{
    require_len(f.size(), c.size() + 1, "diff_energy_grad");
    require_len(g.size(), f.size(), "diff_energy_grad");
    active().diff_energy_grad(c.data(), f.data(), g.data(), c.size());
}

}  // namespace ptint::kernels
