#pragma once

// Numerical Siegel theta constants f_{a,q}(Z) = sum over Z^g of
// exp(pi i q Z[n + a/q]), their Fourier--Jacobi coefficients along a
// boundary split g = g1 + g2, and consistency and rank checks.

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "thetaforms/intmat.hpp"
#include "thetaforms/util.hpp"

namespace thetaforms {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct ThetaChar {
    std::vector<Int> a;
    Int q = 4;

    // Representative of +-a mod q: entries reduced into [0, q) and the
    // lexicographically smaller of {a, -a}.
    ThetaChar canonical() const {
        if (q <= 0 || q % 2 != 0) throw std::invalid_argument("theta characteristic: q must be even positive");
        auto red = [&](std::vector<Int> v) {
            for (Int& x : v) {
                x %= q;
                if (x < 0) x += q;
            }
            return v;
        };
        std::vector<Int> p = red(a), m = a;
        for (Int& x : m) x = -x;
        m = red(m);
        ThetaChar c;
        c.q = q;
        c.a = std::min(p, m);
        return c;
    }
};

struct PeriodPoint {
    MatrixXcd z;

    static PeriodPoint make(const MatrixXcd& m, double sym_tol = 1e-12) {
        if (m.rows() != m.cols()) throw std::invalid_argument("period point: matrix must be square");
        if ((m - m.transpose()).cwiseAbs().maxCoeff() > sym_tol)
            throw std::invalid_argument("period point: matrix must be symmetric");
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(m.imag());
        if (es.eigenvalues().minCoeff() <= 0)
            throw std::invalid_argument("period point: imaginary part must be positive definite");
        return PeriodPoint{m};
    }

    int dim() const { return int(z.rows()); }
};

namespace detail {

// Iterate integer points n with |n_i - center_i| <= radius_i.
template <class F>
void for_each_lattice_point(const VectorXd& center, const VectorXd& radius, F&& f) {
    int g = int(center.size());
    std::vector<long> lo(g), hi(g), n(g);
    for (int i = 0; i < g; ++i) {
        lo[i] = long(std::floor(center[i] - radius[i]));
        hi[i] = long(std::ceil(center[i] + radius[i]));
    }
    std::function<void(int)> rec = [&](int i) {
        if (i == g) {
            f(n);
            return;
        }
        for (long v = lo[i]; v <= hi[i]; ++v) {
            n[i] = v;
            rec(i + 1);
        }
    };
    rec(0);
}

struct KahanSum {
    cplx s{0.0, 0.0}, c{0.0, 0.0};
    void add(cplx x) {
        cplx y = x - c;
        cplx t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

}  // namespace detail

// Truncated lattice sum with a Gaussian tail bound from the smallest
// eigenvalue of Im Z: terms outside Y[x] <= C with C = q(log(1/tol)+10)/pi
// are provably below tol in aggregate for the scales used here.
inline cplx theta_constant(const ThetaChar& ch, const PeriodPoint& zp, double tol) {
    if (tol <= 0) throw std::invalid_argument("theta_constant: tol must be positive");
    int g = zp.dim();
    if (int(ch.a.size()) != g) throw std::invalid_argument("theta_constant: characteristic size mismatch");
    if (ch.q <= 0 || ch.q % 2 != 0) throw std::invalid_argument("theta_constant: q must be even positive");
    const double q = double(ch.q);

    MatrixXd y = zp.z.imag();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(y);
    double mu = es.eigenvalues().minCoeff();
    if (mu < 1e-8) throw std::domain_error("theta_constant: Im Z numerically near singular");

    const double cap = q * (-std::log(tol) + 10.0) / kPi;
    MatrixXd yinv = y.inverse();
    VectorXd shift(g), radius(g);
    for (int i = 0; i < g; ++i) {
        shift[i] = double(ch.a[i]) / q;
        radius[i] = std::sqrt(cap * yinv(i, i)) + 1.0;
    }

    detail::KahanSum acc;
    const cplx ipq(0.0, kPi * q);
    detail::for_each_lattice_point(-shift, radius, [&](const std::vector<long>& n) {
        Eigen::VectorXcd x(g);
        for (int i = 0; i < g; ++i) x[i] = double(n[i]) + shift[i];
        cplx zx = (x.transpose() * zp.z * x)(0, 0);
        acc.add(std::exp(ipq * zx));
    });
    return acc.s;
}

namespace detail {

// The boundary coefficient series for a column (a1, a2):
//   sum over n1 of exp((pi i / q)(tau[q n1 + a1] + 2 a2' z (q n1 + a1))),
// with tau of size g1 and z of size g2 x g1.
inline cplx fj_series(const std::vector<Int>& a1, const std::vector<Int>& a2, Int q,
                      const MatrixXcd& tau, const MatrixXcd& z, double tol) {
    int g1 = int(tau.rows());
    int g2 = int(z.rows());
    if (int(a1.size()) != g1 || int(a2.size()) != g2 || z.cols() != g1)
        throw std::invalid_argument("fourier_jacobi: block size mismatch");
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(tau.imag());
    if (es.eigenvalues().minCoeff() < 1e-8)
        throw std::domain_error("fourier_jacobi: Im tau numerically near singular");

    const double qd = double(q);
    // Linear term 2 v'x shifts the Gaussian center to -Y^{-1} v, v = Im(z' a2).
    MatrixXd y = tau.imag();
    VectorXd v(g1);
    for (int j = 0; j < g1; ++j) {
        double s = 0;
        for (int i = 0; i < g2; ++i) s += double(a2[i]) * z(i, j).imag();
        v[j] = s;
    }
    VectorXd c = y.inverse() * v;
    double cap = qd * (-std::log(tol) + 10.0) / kPi + c.dot(y * c);
    MatrixXd yinv = y.inverse();

    VectorXd center(g1), radius(g1);
    for (int i = 0; i < g1; ++i) {
        center[i] = (-c[i] - double(a1[i])) / qd;
        radius[i] = (std::sqrt(std::max(cap, 0.0) * yinv(i, i)) + std::abs(c[i])) / qd + 1.0;
    }

    detail::KahanSum acc;
    const cplx ipi(0.0, kPi / qd);
    detail::for_each_lattice_point(center, radius, [&](const std::vector<long>& n) {
        Eigen::VectorXcd x(g1);
        for (int i = 0; i < g1; ++i) x[i] = double(q * n[i] + a1[i]);
        cplx quad = (x.transpose() * tau * x)(0, 0);
        cplx lin = 0.0;
        for (int i = 0; i < g2; ++i)
            for (int j = 0; j < g1; ++j) lin += 2.0 * double(a2[i]) * z(i, j) * x[j];
        acc.add(std::exp(ipi * (quad + lin)));
    });
    return acc.s;
}

}  // namespace detail

// Fourier--Jacobi coefficient attached to the rank-one frequency a2 a2';
// a2 must be primitive.
inline cplx fourier_jacobi(const std::vector<Int>& a1, const std::vector<Int>& a2, Int q,
                           const MatrixXcd& tau, const MatrixXcd& z, double tol = 1e-12) {
    if (q <= 0 || q % 2 != 0) throw std::invalid_argument("fourier_jacobi: q must be even positive");
    if (vec_gcd(a2) != 1) throw std::invalid_argument("fourier_jacobi: a2 must be primitive");
    return detail::fj_series(a1, a2, q, tau, z, tol);
}

// Cross-check of the boundary expansion for g1 = g2 = 1: extract the
// coefficient of the frequency T = a2^2 from W -> f_{a,q}(Z) by an N-point
// DFT over one real period W in [0, 2q) at fixed Im W, and compare with the
// coefficient predicted by the series formula. For q | 2 a2 the frequency
// is hit by the two branches q n2 + a2 = +-a2, which contribute the series
// for (a1, a2) and (-a1, a2).
struct FjConsistencyResult {
    double residual;
    cplx extracted;
    cplx predicted;
};

inline FjConsistencyResult fj_consistency(Int a1, Int a2, Int q, cplx tau, cplx z, double im_w, int n) {
    if (q != 2 && q != 4) throw std::invalid_argument("fj_consistency: q must be 2 or 4");
    if (a2 % 2 == 0) throw std::invalid_argument("fj_consistency: a2 must be odd");
    if (n < 16 || (n & (n - 1)) != 0) throw std::invalid_argument("fj_consistency: N must be a power of two >= 16");
    Int t = a2 * a2;
    if (t >= n) throw std::invalid_argument("fj_consistency: N too small for the frequency");
    // Aliased frequencies t + N, ... must stay below the working tolerance.
    if (std::exp(-kPi * im_w * double(n) / double(q)) > 1e-9)
        throw std::invalid_argument("fj_consistency: N too small for the requested tolerance");
    if (tau.imag() <= 0) throw std::invalid_argument("fj_consistency: Im tau must be positive");
    if (im_w <= 0) throw std::invalid_argument("fj_consistency: Im W must be positive");

    detail::KahanSum bin;
    for (int j = 0; j < n; ++j) {
        double x = double(j) * 2.0 * double(q) / double(n);
        MatrixXcd zm(2, 2);
        zm(0, 0) = tau;
        zm(0, 1) = zm(1, 0) = z;
        zm(1, 1) = cplx(x, im_w);
        ThetaChar ch{{a1, a2}, q};
        cplx f = theta_constant(ch, PeriodPoint::make(zm), 1e-13);
        double ang = -2.0 * kPi * double(t) * double(j) / double(n);
        bin.add(f * cplx(std::cos(ang), std::sin(ang)));
    }
    cplx extracted = bin.s / double(n);

    MatrixXcd taum(1, 1), zmat(1, 1);
    taum(0, 0) = tau;
    zmat(0, 0) = z;
    cplx coeff = detail::fj_series({a1}, {a2}, q, taum, zmat, 1e-13);
    if ((2 * a2) % q == 0) coeff += detail::fj_series({-a1}, {a2}, q, taum, zmat, 1e-13);
    cplx predicted = coeff * std::exp(-kPi * im_w * double(t) / double(q));
    return FjConsistencyResult{std::abs(extracted - predicted), extracted, predicted};
}

// Rank of the q^{g1} x samples evaluation matrix of the boundary
// coefficients with a1 running over Z^{g1}/qZ^{g1} (g1 = 1 here), at seeded
// z values. For any nonzero scalar a2 the expected rank is q.
inline int fj_rank(Int q, Int a2, cplx tau0, int samples, std::uint64_t seed, double rel_tol = 1e-6) {
    if (q <= 0 || q % 2 != 0) throw std::invalid_argument("fj_rank: q must be even positive");
    if (a2 == 0) throw std::invalid_argument("fj_rank: a2 must be nonzero");
    if (samples < 2 * q) throw std::invalid_argument("fj_rank: needs at least 2q samples");
    if (tau0.imag() <= 0) throw std::invalid_argument("fj_rank: Im tau must be positive");

    Rng rng(seed);
    MatrixXcd taum(1, 1);
    taum(0, 0) = tau0;
    MatrixXcd m(int(q), samples);
    for (int j = 0; j < samples; ++j) {
        cplx zv(rng.uniform(-0.5, 0.5), rng.uniform(-0.25, 0.25));
        MatrixXcd zmat(1, 1);
        zmat(0, 0) = zv;
        for (Int a1 = 0; a1 < q; ++a1) m(int(a1), j) = detail::fj_series({a1}, {a2}, q, taum, zmat, 1e-12);
    }
    return evaluation_rank(m, rel_tol);
}

}  // namespace thetaforms
