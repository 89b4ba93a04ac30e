#pragma once

// Data-parallel inner loops of the discretized action. Every kernel has a
// scalar reference implementation; AVX2 (x86-64) and NEON (aarch64) variants
// are selected at runtime. PTINT_KERNELS=scalar|avx2|neon overrides the choice.

#include <cstddef>
#include <span>

namespace ptint::kernels {

enum class Isa { Scalar, Avx2, Neon };

const char* to_string(Isa isa);

struct Table {
    Isa isa;
    /// sum a_i b_i
    double (*dot)(const double* a, const double* b, std::size_t n);
    /// sum w_i a_i b_i
    double (*wdot)(const double* w, const double* a, const double* b, std::size_t n);
    /// y_i += s x_i
    void (*axpy)(double s, const double* x, double* y, std::size_t n);
    /// out_i = c1 x1_i + c2 x2_i + c3 x3_i
    void (*lincomb3)(double* out, double c1, const double* x1, double c2, const double* x2, double c3,
                     const double* x3, std::size_t n);
    /// sum_{i<cells} c_i (f_{i+1} - f_i)^2, f has cells + 1 entries
    double (*diff_energy)(const double* c, const double* f, std::size_t cells);
    /// g_i += d/df_i of diff_energy
    void (*diff_energy_grad)(const double* c, const double* f, double* g, std::size_t cells);
};

const Table& scalar_table();
/// nullptr when the variant is not compiled in or the CPU lacks the feature.
const Table* avx2_table();
const Table* neon_table();

/// The table used by the span wrappers below (chosen once per process).
const Table& active();

double dot(std::span<const double> a, std::span<const double> b);
double wdot(std::span<const double> w, std::span<const double> a, std::span<const double> b);
void axpy(double s, std::span<const double> x, std::span<double> y);
void lincomb3(std::span<double> out, double c1, std::span<const double> x1, double c2, std::span<const double> x2,
              double c3, std::span<const double> x3);
double diff_energy(std::span<const double> c, std::span<const double> f);
void diff_energy_grad(std::span<const double> c, std::span<const double> f, std::span<double> g);

}  // namespace ptint::kernels
