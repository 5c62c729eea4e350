#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>

namespace thetaforms {

using cplx = std::complex<double>;

constexpr double kPi = 3.141592653589793238462643383279502884;

// Seeded generator with a fixed bit-to-double mapping, so reports are
// reproducible independent of the standard library's distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    double next_double() {  // [0, 1)
        return double(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * next_double(); }

    std::int64_t uniform_int(std::int64_t a, std::int64_t b) {  // inclusive
        return a + std::int64_t(eng_() % std::uint64_t(b - a + 1));
    }

private:
    std::mt19937_64 eng_;
};

// Numerical rank of a complex evaluation matrix: rows are scaled to unit
// norm, singular values below rel_tol times the largest count as zero.
inline int evaluation_rank(Eigen::MatrixXcd m, double rel_tol) {
    for (int i = 0; i < m.rows(); ++i) {
        double nrm = m.row(i).norm();
        if (nrm > 0) m.row(i) /= nrm;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv[0] == 0) return 0;
    int r = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] >= rel_tol * sv[0]) ++r;
    return r;
}

}  // namespace thetaforms
