#include "ptint/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace ptint::quad {

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights mu0 v_0^2.
Rule golub_welsch(const std::vector<double>& diag, const std::vector<double>& offdiag, double mu0)
{
    const auto n = static_cast<Eigen::Index>(diag.size());
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) jacobi(i, i) = diag[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        jacobi(i, i + 1) = offdiag[static_cast<std::size_t>(i)];
        jacobi(i + 1, i) = offdiag[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    Rule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        rule.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
        const double v0 = solver.eigenvectors()(0, i);
        rule.weights[static_cast<std::size_t>(i)] = mu0 * v0 * v0;
    }
    return rule;
}

// P_n(x) and P_n'(x) by the three-term recurrence.
void legendre(int n, double x, double& pn, double& dpn)
{
    double p0 = 1.0;
    double p1 = x;
    if (n == 0) {
        pn = 1.0;
        dpn = 0.0;
        return;
    }
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    pn = p1;
    dpn = n * (x * p1 - p0) / (x * x - 1.0);
}

// L_n(x), L_{n-1}(x) by recurrence.
void laguerre(int n, double x, double& ln, double& lnm1)
{
    double l0 = 1.0;
    double l1 = 1.0 - x;
    if (n == 0) {
        ln = 1.0;
        lnm1 = 0.0;
        return;
    }
    for (int k = 1; k < n; ++k) {
        const double l2 = ((2.0 * k + 1.0 - x) * l1 - k * l0) / (k + 1.0);
        l0 = l1;
        l1 = l2;
    }
    ln = l1;
    lnm1 = l0;
}

// Nodes come from the Jacobi matrix and are Newton-polished; weights use the
// classical closed forms, which keep relative accuracy for tiny weights.
Rule make_legendre_unit(int n)
{
    std::vector<double> diag(static_cast<std::size_t>(n), 0.0);
    std::vector<double> off(static_cast<std::size_t>(n > 0 ? n - 1 : 0));
    for (int k = 1; k < n; ++k) off[static_cast<std::size_t>(k - 1)] = k / std::sqrt(4.0 * k * k - 1.0);
    Rule r = golub_welsch(diag, off, 2.0);
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        double x = r.nodes[i];
        double pn = 0.0, dpn = 0.0;
        for (int it = 0; it < 3; ++it) {
            legendre(n, x, pn, dpn);
            x -= pn / dpn;
        }
        legendre(n, x, pn, dpn);
        r.nodes[i] = 0.5 * (x + 1.0);
        r.weights[i] = 1.0 / ((1.0 - x * x) * dpn * dpn);
    }
    return r;
}

Rule make_laguerre(int n)
{
    std::vector<double> diag(static_cast<std::size_t>(n));
    std::vector<double> off(static_cast<std::size_t>(n > 0 ? n - 1 : 0));
    for (int k = 0; k < n; ++k) diag[static_cast<std::size_t>(k)] = 2.0 * k + 1.0;
    for (int k = 1; k < n; ++k) off[static_cast<std::size_t>(k - 1)] = k;
    Rule r = golub_welsch(diag, off, 1.0);
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        double x = r.nodes[i];
        double ln = 0.0, lnm1 = 0.0;
        for (int it = 0; it < 3; ++it) {
            laguerre(n, x, ln, lnm1);
            const double dln = n * (ln - lnm1) / x;
            x -= ln / dln;
        }
        // w = x / ((n+1)^2 L_{n+1}(x)^2)
        double lnp1 = 0.0, dummy = 0.0;
        laguerre(n + 1, x, lnp1, dummy);
        r.nodes[i] = x;
        r.weights[i] = x / ((n + 1.0) * (n + 1.0) * lnp1 * lnp1);
    }
    return r;
}

template <class Make>
const Rule& cached(std::map<int, Rule>& cache, std::mutex& mu, int n, Make make)
{
    if (n < 1 || n > 200) throw std::invalid_argument("quadrature rule size out of range");
    std::lock_guard lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make(n)).first;
    return it->second;
}

}  // namespace

const Rule& gauss_legendre_unit(int n)
{
    static std::map<int, Rule> cache;
    static std::mutex mu;
    return cached(cache, mu, n, make_legendre_unit);
}

const Rule& gauss_laguerre(int n)
{
    static std::map<int, Rule> cache;
    static std::mutex mu;
    return cached(cache, mu, n, make_laguerre);
}

std::vector<double> geometric_breaks(double lo, double hi, double ratio)
{
    if (!(lo > 0.0) || !(hi > lo) || !(ratio > 1.0))
        throw std::invalid_argument("geometric_breaks: need 0 < lo < hi and ratio > 1");
    const auto cells = static_cast<std::size_t>(std::ceil(std::log(hi / lo) / std::log(ratio)));
    std::vector<double> b(cells + 1);
    const double step = std::log(hi / lo) / static_cast<double>(cells);
    for (std::size_t j = 0; j <= cells; ++j) b[j] = lo * std::exp(step * static_cast<double>(j));
    b.front() = lo;
    b.back() = hi;
    return b;
}

Rule singular_cell_rule(double rho, double c, int n)
{
    if (!(rho > 0.0) || !(c > 0.0)) throw std::invalid_argument("singular_cell: need rho > 0 and c > 0");
    const Rule& lag = gauss_laguerre(n);
    // int_0^rho g(r) dr = int_0^inf g(rho e^{-s}) rho e^{-s} ds
    //                   = (1/c) int_0^inf [g(r) r e^{c s}]_{s = t/c} e^{-t} dt
    // Nodes whose radius underflows carry Laguerre weights below 1e-40 and are dropped.
    Rule rule;
    for (std::size_t j = 0; j < lag.nodes.size(); ++j) {
        const double s = lag.nodes[j] / c;
        const double r = rho * std::exp(-s);
        if (r < 1e-280) break;
        rule.nodes.push_back(r);
        rule.weights.push_back(lag.weights[j] / c * r * std::exp(lag.nodes[j]));
    }
    return rule;
}

double singular_cell(const std::function<double(double)>& fn, double rho, double c, int n)
{
    const Rule rule = singular_cell_rule(rho, c, n);
    double sum = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) sum += rule.weights[j] * fn(rule.nodes[j]);
    return sum;
}

double composite(const std::function<double(double)>& fn, const std::vector<double>& breaks, int n)
{
    const Rule& gl = gauss_legendre_unit(n);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i];
        const double h = breaks[i + 1] - a;
        double cell = 0.0;
        for (std::size_t j = 0; j < gl.nodes.size(); ++j) cell += gl.weights[j] * fn(a + h * gl.nodes[j]);
        sum += h * cell;
    }
    return sum;
}

}  // namespace ptint::quad
