#pragma once

// Weierstrass machinery on E = C/(Z + Z tau) and the section-space checks
// on E x E: the quotient function phi, the symmetrized three-product
// functions f1..f7, the first-order-pole combinations F1, F2, product
// bases of {1, wp, wp', wp''} in z, w, z-w, and numerical span ranks.
//
// The wp evaluation uses the exponential q-series with argument reduction
// into the fundamental cell; higher derivatives come from the exact
// differential-equation recursion (never finite differences).

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "thetaforms/util.hpp"

namespace thetaforms {

struct pole_error : std::domain_error {
    using std::domain_error::domain_error;
};

class Lattice {
public:
    static Lattice from_tau(cplx tau) {
        if (tau.imag() <= 0) throw std::invalid_argument("lattice: Im tau must be positive");
        Lattice l;
        l.tau_ = tau;
        l.q_ = std::exp(cplx(0.0, 2.0 * kPi) * tau);
        // g2 = (4 pi^4 / 3) E4, g3 = (8 pi^6 / 27) E6.
        cplx e4(1.0, 0.0), e6(1.0, 0.0);
        cplx qn = l.q_;
        for (int n = 1; n < 512; ++n) {
            cplx t = qn / (1.0 - qn);
            double n3 = double(n) * n * n;
            cplx d4 = 240.0 * n3 * t;
            cplx d6 = -504.0 * n3 * double(n) * double(n) * t;
            e4 += d4;
            e6 += d6;
            qn *= l.q_;
            if (std::abs(qn) < 1e-18 && n > 8) break;
        }
        double pi2 = kPi * kPi;
        l.g2_ = 4.0 * pi2 * pi2 / 3.0 * e4;
        l.g3_ = 8.0 * pi2 * pi2 * pi2 / 27.0 * e6;
        if (std::abs(l.discriminant()) < 1e-12 * (std::abs(l.g2_ * l.g2_ * l.g2_) + 1.0))
            throw std::domain_error("lattice: vanishing discriminant");
        return l;
    }

    cplx tau() const { return tau_; }
    cplx nome_sq() const { return q_; }  // e^{2 pi i tau}
    cplx g2() const { return g2_; }
    cplx g3() const { return g3_; }
    cplx discriminant() const { return g2_ * g2_ * g2_ - 27.0 * g3_ * g3_; }

    // Representative of u in the cell spanned by 1 and tau, centered at 0.
    cplx reduce(cplx u) const {
        double m = std::round(u.imag() / tau_.imag());
        u -= m * tau_;
        u -= std::round(u.real());
        return u;
    }

    // Distance from u to the lattice.
    double lattice_distance(cplx u) const {
        cplx r = reduce(u);
        double best = std::abs(r);
        for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b) best = std::min(best, std::abs(r - double(a) - double(b) * tau_));
        return best;
    }

private:
    cplx tau_, q_, g2_, g3_;
};

namespace detail {

struct WpPair {
    cplx p, dp;
};

// wp and wp' by the exponential series, valid after argument reduction:
//   wp = (2 pi i)^2 [ 1/12 + u/(1-u)^2
//        + sum_n ( q^n u/(1-q^n u)^2 + q^n u^{-1}/(1-q^n u^{-1})^2 - 2 q^n/(1-q^n)^2 ) ]
// with u = e^{2 pi i z}, q = e^{2 pi i tau}.
inline WpPair wp_base(const Lattice& lat, cplx z) {
    if (lat.lattice_distance(z) < 1e-6) throw pole_error("wp: argument too close to the lattice");
    cplx zr = lat.reduce(z);
    cplx u = std::exp(cplx(0.0, 2.0 * kPi) * zr);
    cplx q = lat.nome_sq();

    auto sq = [](cplx x) { return x * x; };
    auto cube = [](cplx x) { return x * x * x; };

    cplx p = 1.0 / 12.0 + u / sq(1.0 - u);
    cplx dp = u * (1.0 + u) / cube(1.0 - u);
    cplx qn = q;
    for (int n = 1; n < 512; ++n) {
        cplx a = qn * u, b = qn / u;
        cplx dpterm = a * (1.0 + a) / cube(1.0 - a) - b * (1.0 + b) / cube(1.0 - b);
        cplx pterm = a / sq(1.0 - a) + b / sq(1.0 - b) - 2.0 * qn / sq(1.0 - qn);
        p += pterm;
        dp += dpterm;
        qn *= q;
        if (std::abs(a) + std::abs(b) + std::abs(qn) < 1e-18 && n > 4) break;
    }
    const cplx twopii(0.0, 2.0 * kPi);
    return WpPair{twopii * twopii * p, twopii * twopii * twopii * dp};
}

}  // namespace detail

// wp^{(k)}(u) for k = 0..5; k >= 2 through the algebraic recursion
// wp'' = 6 wp^2 - g2/2, wp''' = 12 wp wp', ...
inline cplx wp(const Lattice& lat, cplx u, int k = 0) {
    if (k < 0 || k > 5) throw std::invalid_argument("wp: derivative order must be 0..5");
    auto [p, dp] = detail::wp_base(lat, u);
    switch (k) {
        case 0: return p;
        case 1: return dp;
        default: break;
    }
    cplx p2 = 6.0 * p * p - lat.g2() / 2.0;
    if (k == 2) return p2;
    cplx p3 = 12.0 * p * dp;
    if (k == 3) return p3;
    if (k == 4) return 12.0 * dp * dp + 12.0 * p * p2;
    return 36.0 * dp * p2 + 12.0 * p * p3;
}

inline cplx phi(const Lattice& lat, cplx z, cplx w) {
    cplx pz = wp(lat, z), pw = wp(lat, w);
    cplx den = pz - pw;
    double scale = std::max({std::abs(pz), std::abs(pw), 1.0});
    if (std::abs(den) < 1e-9 * scale) throw std::domain_error("phi: wp(z) = wp(w), value indeterminate");
    if (lat.lattice_distance(z - w) < 1e-6) throw pole_error("phi: z - w too close to the lattice");
    return (wp(lat, z, 1) + wp(lat, w, 1)) / den;
}

// The seven skew-symmetrized three-products; i = 1..7.
inline cplx f_basis(const Lattice& lat, cplx z, cplx w, int i) {
    if (i < 1 || i > 7) throw std::invalid_argument("f_basis: index must be 1..7");
    cplx az = wp(lat, z), az1 = wp(lat, z, 1), az2 = wp(lat, z, 2);
    cplx bw = wp(lat, w), bw1 = wp(lat, w, 1), bw2 = wp(lat, w, 2);
    cplx cv = wp(lat, z - w), cv1 = wp(lat, z - w, 1), cv2 = wp(lat, z - w, 2);
    switch (i) {
        case 1: return az1 - bw1 - cv1;
        case 2: return az * bw1 - az1 * bw + bw1 * cv + bw * cv1 - az1 * cv + az * cv1;
        case 3: return az2 * bw1 - az1 * bw2 + bw1 * cv2 + bw2 * cv1 - az1 * cv2 + az2 * cv1;
        case 4: return az * bw * cv1 - az1 * bw * cv + az * bw1 * cv;
        case 5:
            return az * bw2 * cv1 + az2 * bw * cv1 - az1 * bw2 * cv - az1 * bw * cv2 + az2 * bw1 * cv +
                   az * bw1 * cv2;
        case 6: return az2 * bw2 * cv1 - az1 * bw2 * cv2 + az2 * bw1 * cv2;
        default: return az1 * bw1 * cv1;
    }
}

// First-order-pole combinations spanning L(1,1,1) together with 1.
// F2's last term carries the g3 factor: the combination
// 2 f5 - 9 f7 - 5 g2 f2 + 15 g3 f1 is the unique weight-homogeneous one
// whose higher-order poles cancel; its residue limits are
//   lim z F1 = -36 g2 wp(w) - 54 g3,   lim z F2 = 108 g3 wp(w) + 6 g2^2.
inline std::pair<cplx, cplx> F1F2(const Lattice& lat, cplx z, cplx w) {
    cplx f1 = f_basis(lat, z, w, 1);
    cplx f2 = f_basis(lat, z, w, 2);
    cplx f3 = f_basis(lat, z, w, 3);
    cplx f4 = f_basis(lat, z, w, 4);
    cplx f5 = f_basis(lat, z, w, 5);
    cplx f7 = f_basis(lat, z, w, 7);
    cplx big1 = f3 - 30.0 * f4 - 2.5 * lat.g2() * f1;
    cplx big2 = 2.0 * f5 - 9.0 * f7 - 5.0 * lat.g2() * f2 + 15.0 * lat.g3() * f1;
    return {big1, big2};
}

// ---------------------------------------------------------------------------
// Symbolic product expressions and span ranks.

struct FuncExpr {
    enum class Kind { Product, One, Phi, SmallF, BigF1, BigF2 };
    Kind kind = Kind::One;
    int index = 0;                            // for SmallF: 1..7
    std::array<std::vector<int>, 3> factors;  // derivative orders per row (z, w, z-w)

    static FuncExpr product(std::array<std::vector<int>, 3> f) {
        FuncExpr e;
        e.kind = Kind::Product;
        e.factors = std::move(f);
        return e;
    }
    static FuncExpr named(Kind k, int index = 0) {
        FuncExpr e;
        e.kind = k;
        e.index = index;
        return e;
    }

    cplx eval(const Lattice& lat, cplx z, cplx w) const {
        switch (kind) {
            case Kind::One: return 1.0;
            case Kind::Phi: return phi(lat, z, w);
            case Kind::SmallF: return f_basis(lat, z, w, index);
            case Kind::BigF1: return F1F2(lat, z, w).first;
            case Kind::BigF2: return F1F2(lat, z, w).second;
            case Kind::Product: {
                cplx v = 1.0;
                const cplx vars[3] = {z, w, z - w};
                for (int r = 0; r < 3; ++r)
                    for (int k : factors[r]) v *= wp(lat, vars[r], k);
                return v;
            }
        }
        return 0.0;
    }

    std::string str() const {
        switch (kind) {
            case Kind::One: return "1";
            case Kind::Phi: return "phi";
            case Kind::SmallF: return "f" + std::to_string(index);
            case Kind::BigF1: return "F1";
            case Kind::BigF2: return "F2";
            case Kind::Product: {
                static const char* var[3] = {"z", "w", "z-w"};
                std::string s;
                for (int r = 0; r < 3; ++r)
                    for (int k : factors[r]) {
                        if (!s.empty()) s += "*";
                        s += "wp" + std::string(std::size_t(k), '\'') + "(" + var[r] + ")";
                    }
                return s.empty() ? "1" : s;
            }
        }
        return "?";
    }
};

// All products taking a, b, c factors (with repetition) from the rows
// {1, wp, wp', ..., wp^{(max_derivative)}} of z, w, z-w. The constant
// counts as a factor choice, so the row multisets have exactly the stated
// sizes; max_derivative = 2 gives the pole-order-4 system, 1 the order-3 one.
inline std::vector<FuncExpr> product_basis(int a, int b, int c, int max_derivative = 2) {
    if (a < 0 || b < 0 || c < 0 || (a == 0 && b == 0 && c == 0))
        throw std::invalid_argument("product_basis: factor counts must be nonnegative, not all zero");
    if (max_derivative < 0 || max_derivative > 5) throw std::invalid_argument("product_basis: bad derivative cap");

    // Multisets of size n over the symbols {-1 (the constant), 0..max_derivative}.
    std::function<std::vector<std::vector<int>>(int)> multisets = [&](int n) {
        std::vector<std::vector<int>> out;
        std::vector<int> cur;
        std::function<void(int, int)> rec = [&](int start, int left) {
            if (left == 0) {
                out.push_back(cur);
                return;
            }
            for (int s = start; s <= max_derivative; ++s) {
                cur.push_back(s);
                rec(s, left - 1);
                cur.pop_back();
            }
        };
        rec(-1, n);
        return out;
    };

    auto strip_const = [](const std::vector<int>& v) {
        std::vector<int> out;
        for (int x : v)
            if (x >= 0) out.push_back(x);
        return out;
    };

    std::vector<FuncExpr> exprs;
    for (const auto& ra : multisets(a))
        for (const auto& rb : multisets(b))
            for (const auto& rc : multisets(c))
                exprs.push_back(FuncExpr::product({strip_const(ra), strip_const(rb), strip_const(rc)}));
    return exprs;
}

// Seeded sample points on E x E staying clear of the divisors z = 0, w = 0,
// z = w (mod the lattice).
inline std::vector<std::pair<cplx, cplx>> divisor_avoiding_samples(const Lattice& lat, int count, Rng& rng,
                                                                   double min_dist = 0.05) {
    std::vector<std::pair<cplx, cplx>> pts;
    int guard = 0;
    while (int(pts.size()) < count) {
        if (++guard > 100 * count + 1000) throw std::runtime_error("sample rejection loop stalled");
        cplx z = cplx(rng.uniform(-0.5, 0.5), 0.0) + rng.uniform(-0.5, 0.5) * lat.tau();
        cplx w = cplx(rng.uniform(-0.5, 0.5), 0.0) + rng.uniform(-0.5, 0.5) * lat.tau();
        if (lat.lattice_distance(z) < min_dist) continue;
        if (lat.lattice_distance(w) < min_dist) continue;
        if (lat.lattice_distance(z - w) < min_dist) continue;
        pts.emplace_back(z, w);
    }
    return pts;
}

struct SpanRank {
    int rank = 0;
    bool stable = false;  // identical rank on two disjoint seeded sample sets
    int rank_second = 0;
};

inline SpanRank span_rank(const std::vector<FuncExpr>& exprs, const Lattice& lat, int samples,
                          std::uint64_t seed, double rel_tol = 1e-6) {
    if (samples < 2 * int(exprs.size())) throw std::invalid_argument("span_rank: needs at least 2|exprs| samples");
    Rng rng(seed);
    auto rank_of = [&](const std::vector<std::pair<cplx, cplx>>& pts) {
        Eigen::MatrixXcd m(int(exprs.size()), int(pts.size()));
        for (int i = 0; i < int(exprs.size()); ++i)
            for (int j = 0; j < int(pts.size()); ++j) m(i, j) = exprs[std::size_t(i)].eval(lat, pts[std::size_t(j)].first, pts[std::size_t(j)].second);
        return evaluation_rank(m, rel_tol);
    };
    auto pts1 = divisor_avoiding_samples(lat, samples, rng);
    auto pts2 = divisor_avoiding_samples(lat, samples, rng);
    SpanRank r;
    r.rank = rank_of(pts1);
    r.rank_second = rank_of(pts2);
    r.stable = (r.rank == r.rank_second);
    return r;
}

// Expected dimension of the pole-bounded section space: 4a when only one of
// a, b, c is positive, otherwise 16(ab + bc + ca) (anticanonical degree of
// the divisor 4a(0 x E) + 4b(E x 0) + 4c diag on E x E).
inline int expected_dimension(int a, int b, int c) {
    int positive = (a > 0) + (b > 0) + (c > 0);
    if (positive == 0) throw std::invalid_argument("expected_dimension: all counts zero");
    if (positive == 1) return 4 * (a + b + c);
    return 16 * (a * b + b * c + c * a);
}

struct SurjectivityResult {
    bool ok = false;
    int rank = 0;
    int rank_doubled = 0;  // saturation probe with twice the samples
    int expected = 0;
    bool saturated = false;
};

// Rank of the product basis must saturate (stop growing as samples double)
// at the expected dimension of the full section space.
inline SurjectivityResult surjectivity_check(int a, int b, int c, const Lattice& lat, std::uint64_t seed,
                                             double rel_tol = 1e-6) {
    if (a + b + c > 5) throw std::invalid_argument("surjectivity_check: factor counts too large for desk scale");
    auto exprs = product_basis(a, b, c);
    SurjectivityResult res;
    res.expected = expected_dimension(a, b, c);
    int n = int(exprs.size());
    SpanRank r1 = span_rank(exprs, lat, 2 * n, seed, rel_tol);
    SpanRank r2 = span_rank(exprs, lat, 4 * n, seed + 1, rel_tol);
    res.rank = r1.rank;
    res.rank_doubled = r2.rank;
    res.saturated = r1.stable && r2.stable && r1.rank == r2.rank;
    res.ok = res.saturated && res.rank == res.expected;
    return res;
}

// phi lies outside the order-3 product system: appending it to the
// {1, wp, wp'} three-products must raise the rank by exactly one.
inline bool factor4_check(const Lattice& lat, std::uint64_t seed, double rel_tol = 1e-6) {
    auto m333 = product_basis(1, 1, 1, 1);
    SpanRank base = span_rank(m333, lat, 2 * int(m333.size()) + 8, seed, rel_tol);
    auto with_phi = m333;
    with_phi.push_back(FuncExpr::named(FuncExpr::Kind::Phi));
    SpanRank ext = span_rank(with_phi, lat, 2 * int(with_phi.size()) + 8, seed, rel_tol);
    if (!base.stable || !ext.stable) throw std::runtime_error("factor4_check: unstable rank");
    return ext.rank == base.rank + 1;
}

// ---------------------------------------------------------------------------
// Numerical resolution of the F2 coefficients: least squares on the
// principal parts (orders z^{-4}, z^{-3}, z^{-2} at z = 0) extracted by
// contour sampling, with the f5 coefficient pinned to 2. The basis is
// (f5, f7, g2 f2, f1, g3 f1).

struct F2Fit {
    std::array<double, 4> fitted;  // coefficients of (f7, g2 f2, f1, g3 f1)
    double fitted_pole_residual;   // principal-part norm with the fitted coefficients
    double printed_pole_residual;  // same with (-9, -5, +15, 0), the printed variant
    double adopted_pole_residual;  // same with (-9, -5, 0, +15), the adopted variant
};

inline F2Fit fit_f2_coefficients(const Lattice& lat, std::uint64_t seed) {
    Rng rng(seed);
    const int n_w = 6, n_c = 64;
    const double rho = 0.18;

    auto basis_at = [&](int which, cplx z, cplx w) -> cplx {
        switch (which) {
            case 0: return f_basis(lat, z, w, 5);
            case 1: return f_basis(lat, z, w, 7);
            case 2: return lat.g2() * f_basis(lat, z, w, 2);
            case 3: return f_basis(lat, z, w, 1);
            default: return lat.g3() * f_basis(lat, z, w, 1);
        }
    };

    // Laurent coefficients c_{-4}, c_{-3}, c_{-2} around z = 0 at fixed w.
    auto principal = [&](int which, cplx w) {
        std::array<cplx, 3> c{};
        for (int j = 0; j < n_c; ++j) {
            double ang = 2.0 * kPi * double(j) / double(n_c);
            cplx zc = rho * cplx(std::cos(ang), std::sin(ang));
            cplx v = basis_at(which, zc, w);
            for (int k = 0; k < 3; ++k) {
                int ord = -4 + k;
                double a2 = -ang * double(ord);
                c[std::size_t(k)] += v * std::pow(rho, -ord) * cplx(std::cos(a2), std::sin(a2));
            }
        }
        for (auto& x : c) x /= double(n_c);
        return c;
    };

    std::vector<cplx> ws;
    for (int i = 0; i < n_w; ++i) {
        cplx w = cplx(rng.uniform(-0.5, 0.5), 0.0) + rng.uniform(-0.5, 0.5) * lat.tau();
        if (lat.lattice_distance(w) < 0.35) {
            --i;
            continue;
        }
        ws.push_back(w);
    }

    // Rows: for each w and each pole order, sum_j x_j c(basis_j) = -2 c(f5).
    int rows = n_w * 3 * 2;
    Eigen::MatrixXd m(rows, 4);
    Eigen::VectorXd rhs(rows);
    std::vector<std::array<std::array<cplx, 3>, 5>> pp(ws.size());
    int r = 0;
    for (std::size_t i = 0; i < ws.size(); ++i) {
        for (int which = 0; which < 5; ++which) pp[i][std::size_t(which)] = principal(which, ws[i]);
        for (int k = 0; k < 3; ++k) {
            for (int part = 0; part < 2; ++part) {
                auto comp = [&](cplx v) { return part == 0 ? v.real() : v.imag(); };
                for (int which = 1; which < 5; ++which) m(r, which - 1) = comp(pp[i][std::size_t(which)][std::size_t(k)]);
                rhs(r) = -2.0 * comp(pp[i][0][std::size_t(k)]);
                ++r;
            }
        }
    }
    Eigen::VectorXd x = m.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);

    auto residual_with = [&](std::array<double, 4> coef) {
        double worst = 0.0;
        for (std::size_t i = 0; i < ws.size(); ++i)
            for (int k = 0; k < 3; ++k) {
                cplx v = 2.0 * pp[i][0][std::size_t(k)];
                for (int which = 1; which < 5; ++which) v += coef[std::size_t(which - 1)] * pp[i][std::size_t(which)][std::size_t(k)];
                worst = std::max(worst, std::abs(v));
            }
        return worst;
    };

    F2Fit fit;
    for (int i = 0; i < 4; ++i) fit.fitted[std::size_t(i)] = x(i);
    fit.fitted_pole_residual = residual_with(fit.fitted);
    fit.printed_pole_residual = residual_with({-9.0, -5.0, 15.0, 0.0});
    fit.adopted_pole_residual = residual_with({-9.0, -5.0, 0.0, 15.0});
    return fit;
}

}  // namespace thetaforms
