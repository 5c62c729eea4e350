#pragma once

// Exact integer arithmetic on symmetric forms: semipositivity, rank,
// Minkowski reduction, decomposition lengths (closed form and brute-force
// oracle), and congruence/orbit tests for the principal congruence
// subgroups GL(g,Z)[q].
//
// All arithmetic is exact int64 with overflow detection; nothing here
// touches floating point.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace thetaforms {

using Int = std::int64_t;

struct oracle_limit_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Int checked_add(Int a, Int b) {
    Int r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("integer overflow in add");
    return r;
}

inline Int checked_sub(Int a, Int b) {
    Int r;
    if (__builtin_sub_overflow(a, b, &r)) throw std::overflow_error("integer overflow in sub");
    return r;
}

inline Int checked_mul(Int a, Int b) {
    Int r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("integer overflow in mul");
    return r;
}

inline Int vec_gcd(const std::vector<Int>& v) {
    Int g = 0;
    for (Int x : v) g = std::gcd(g, x);
    return g;
}

inline bool is_primitive_vector(const std::vector<Int>& v) { return vec_gcd(v) == 1; }

// Flips the sign so the first nonzero entry is positive.
inline std::vector<Int> sign_normalized(std::vector<Int> v) {
    for (Int x : v) {
        if (x > 0) break;
        if (x < 0) {
            for (Int& y : v) y = -y;
            break;
        }
    }
    return v;
}

inline Int isqrt_floor(Int n) {
    if (n < 0) throw std::domain_error("isqrt of negative");
    Int r = static_cast<Int>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

// ---------------------------------------------------------------------------
// Dense integer matrix (row major), used for unimodular transforms.

class IntMat {
public:
    IntMat() : rows_(0), cols_(0) {}
    IntMat(int rows, int cols) : rows_(rows), cols_(cols), e_(std::size_t(rows) * cols, 0) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix size");
    }

    static IntMat identity(int n) {
        IntMat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Int operator()(int i, int j) const { return e_[std::size_t(i) * cols_ + j]; }
    Int& operator()(int i, int j) { return e_[std::size_t(i) * cols_ + j]; }

    IntMat transposed() const {
        IntMat t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    IntMat operator*(const IntMat& o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("matrix size mismatch");
        IntMat r(rows_, o.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < o.cols_; ++j) {
                Int s = 0;
                for (int k = 0; k < cols_; ++k) s = checked_add(s, checked_mul((*this)(i, k), o(k, j)));
                r(i, j) = s;
            }
        return r;
    }

    std::vector<Int> apply(const std::vector<Int>& x) const {
        if (int(x.size()) != cols_) throw std::invalid_argument("vector size mismatch");
        std::vector<Int> y(rows_, 0);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) y[i] = checked_add(y[i], checked_mul((*this)(i, j), x[j]));
        return y;
    }

    bool operator==(const IntMat& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_; }

    // Bareiss fraction-free determinant.
    Int det() const {
        if (rows_ != cols_) throw std::invalid_argument("det of non-square matrix");
        int n = rows_;
        if (n == 0) return 1;
        std::vector<Int> a = e_;
        auto at = [&](int i, int j) -> Int& { return a[std::size_t(i) * n + j]; };
        Int sign = 1, prev = 1;
        for (int k = 0; k + 1 < n; ++k) {
            if (at(k, k) == 0) {
                int p = -1;
                for (int i = k + 1; i < n; ++i)
                    if (at(i, k) != 0) { p = i; break; }
                if (p < 0) return 0;
                for (int j = 0; j < n; ++j) std::swap(at(k, j), at(p, j));
                sign = -sign;
            }
            for (int i = k + 1; i < n; ++i)
                for (int j = k + 1; j < n; ++j) {
                    Int num = checked_sub(checked_mul(at(i, j), at(k, k)), checked_mul(at(i, k), at(k, j)));
                    at(i, j) = num / prev;  // exact by Bareiss
                }
            prev = at(k, k);
        }
        return sign * at(n - 1, n - 1);
    }

    int rank() const;

    std::vector<std::vector<Int>> to_rows() const {
        std::vector<std::vector<Int>> r(rows_, std::vector<Int>(cols_));
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r[i][j] = (*this)(i, j);
        return r;
    }

private:
    int rows_, cols_;
    std::vector<Int> e_;
};

// Rank over Q by integer Gaussian elimination (gcd pivoting, no division).
inline int IntMat::rank() const {
    std::vector<std::vector<Int>> a = to_rows();
    int n = rows_, m = cols_, r = 0;
    for (int c = 0; c < m && r < n; ++c) {
        // gcd-reduce the column below r until at most one nonzero remains
        for (;;) {
            int piv = -1;
            for (int i = r; i < n; ++i)
                if (a[i][c] != 0 && (piv < 0 || std::abs(a[i][c]) < std::abs(a[piv][c]))) piv = i;
            if (piv < 0) break;
            std::swap(a[r], a[piv]);
            bool clean = true;
            for (int i = r + 1; i < n; ++i) {
                if (a[i][c] == 0) continue;
                Int q = a[i][c] / a[r][c];
                for (int j = 0; j < m; ++j) a[i][j] = checked_sub(a[i][j], checked_mul(q, a[r][j]));
                if (a[i][c] != 0) clean = false;
            }
            if (clean) break;
        }
        if (a[r][c] != 0) ++r;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Symmetric integral form.

class SymForm {
public:
    SymForm() : g_(0) {}
    explicit SymForm(int g) : g_(g), e_(std::size_t(g) * g, 0) {
        if (g < 0) throw std::invalid_argument("negative dimension");
    }

    static SymForm zero(int g) { return SymForm(g); }

    static SymForm from_rows(const std::vector<std::vector<Int>>& rows) {
        int g = int(rows.size());
        SymForm t(g);
        for (int i = 0; i < g; ++i) {
            if (int(rows[i].size()) != g) throw std::invalid_argument("form is not square");
            for (int j = 0; j < g; ++j) t.e_[std::size_t(i) * g + j] = rows[i][j];
        }
        for (int i = 0; i < g; ++i)
            for (int j = i + 1; j < g; ++j)
                if (t(i, j) != t(j, i)) throw std::invalid_argument("form is not symmetric");
        return t;
    }

    static SymForm diag(const std::vector<Int>& d) {
        SymForm t(int(d.size()));
        for (int i = 0; i < t.g_; ++i) t.set(i, i, d[i]);
        return t;
    }

    // a a' for an integer column a.
    static SymForm dyad(const std::vector<Int>& a) {
        SymForm t(int(a.size()));
        for (int i = 0; i < t.g_; ++i)
            for (int j = 0; j < t.g_; ++j) t.e_[std::size_t(i) * t.g_ + j] = checked_mul(a[i], a[j]);
        return t;
    }

    int dim() const { return g_; }
    Int operator()(int i, int j) const { return e_[std::size_t(i) * g_ + j]; }

    void set(int i, int j, Int v) {
        e_[std::size_t(i) * g_ + j] = v;
        e_[std::size_t(j) * g_ + i] = v;
    }

    bool is_zero() const {
        return std::all_of(e_.begin(), e_.end(), [](Int x) { return x == 0; });
    }

    Int max_abs_entry() const {
        Int m = 0;
        for (Int x : e_) m = std::max(m, std::abs(x));
        return m;
    }

    Int trace() const {
        Int s = 0;
        for (int i = 0; i < g_; ++i) s = checked_add(s, (*this)(i, i));
        return s;
    }

    SymForm operator+(const SymForm& o) const {
        check_dim(o);
        SymForm r(g_);
        for (std::size_t k = 0; k < e_.size(); ++k) r.e_[k] = checked_add(e_[k], o.e_[k]);
        return r;
    }

    SymForm operator-(const SymForm& o) const {
        check_dim(o);
        SymForm r(g_);
        for (std::size_t k = 0; k < e_.size(); ++k) r.e_[k] = checked_sub(e_[k], o.e_[k]);
        return r;
    }

    SymForm scaled(Int c) const {
        SymForm r(g_);
        for (std::size_t k = 0; k < e_.size(); ++k) r.e_[k] = checked_mul(e_[k], c);
        return r;
    }

    bool operator==(const SymForm& o) const { return g_ == o.g_ && e_ == o.e_; }
    bool operator!=(const SymForm& o) const { return !(*this == o); }
    bool operator<(const SymForm& o) const { return std::tie(g_, e_) < std::tie(o.g_, o.e_); }

    // x' T x
    Int eval(const std::vector<Int>& x) const {
        if (int(x.size()) != g_) throw std::invalid_argument("vector size mismatch");
        Int s = 0;
        for (int i = 0; i < g_; ++i)
            for (int j = 0; j < g_; ++j) s = checked_add(s, checked_mul((*this)(i, j), checked_mul(x[i], x[j])));
        return s;
    }

    // T[U] = U' T U
    SymForm transformed(const IntMat& u) const {
        if (u.rows() != g_) throw std::invalid_argument("transform size mismatch");
        IntMat p = u.transposed() * to_mat() * u;
        SymForm r(u.cols());
        for (int i = 0; i < u.cols(); ++i)
            for (int j = 0; j < u.cols(); ++j) r.e_[std::size_t(i) * u.cols() + j] = p(i, j);
        return r;
    }

    IntMat to_mat() const {
        IntMat m(g_, g_);
        for (int i = 0; i < g_; ++i)
            for (int j = 0; j < g_; ++j) m(i, j) = (*this)(i, j);
        return m;
    }

    std::vector<std::vector<Int>> to_rows() const { return to_mat().to_rows(); }

    const std::vector<Int>& entries() const { return e_; }

    std::string str() const {
        std::ostringstream os;
        os << '[';
        for (int i = 0; i < g_; ++i) {
            os << (i ? ",[" : "[");
            for (int j = 0; j < g_; ++j) os << (j ? "," : "") << (*this)(i, j);
            os << ']';
        }
        os << ']';
        return os.str();
    }

private:
    void check_dim(const SymForm& o) const {
        if (g_ != o.g_) throw std::invalid_argument("form dimension mismatch");
    }

    int g_;
    std::vector<Int> e_;
};

inline Int det(const SymForm& t) { return t.to_mat().det(); }
inline int rank(const SymForm& t) { return t.to_mat().rank(); }

inline bool is_primitive(const SymForm& t) { return vec_gcd(t.entries()) == 1; }

// Exact semipositivity: a symmetric matrix is positive semidefinite iff
// every principal minor is nonnegative.
inline bool is_semipositive(const SymForm& t) {
    int g = t.dim();
    if (g > 12) throw std::invalid_argument("semipositivity test limited to small dimensions");
    for (unsigned mask = 1; mask < (1u << g); ++mask) {
        std::vector<int> idx;
        for (int i = 0; i < g; ++i)
            if (mask & (1u << i)) idx.push_back(i);
        IntMat sub(int(idx.size()), int(idx.size()));
        for (int i = 0; i < int(idx.size()); ++i)
            for (int j = 0; j < int(idx.size()); ++j) sub(i, j) = t(idx[i], idx[j]);
        if (sub.det() < 0) return false;
    }
    return true;
}

inline bool is_positive_definite(const SymForm& t) {
    int g = t.dim();
    for (int k = 1; k <= g; ++k) {
        IntMat sub(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) sub(i, j) = t(i, j);
        if (sub.det() <= 0) return false;
    }
    return g > 0;
}

// For a semipositive form of rank <= 1, write T = content * a a' with a
// primitive and sign-normalized. Returns nullopt when rank(T) > 1.
struct Rank1Split {
    Int content = 0;           // 0 encodes the zero form
    std::vector<Int> column;   // primitive, or all-zero for the zero form
};

inline std::optional<Rank1Split> rank1_split(const SymForm& t) {
    int g = t.dim();
    if (t.is_zero()) return Rank1Split{0, std::vector<Int>(g, 0)};
    if (rank(t) != 1 || !is_semipositive(t)) return std::nullopt;
    // Down a nonzero diagonal entry: t_ii = c a_i^2 with gcd over rows.
    std::vector<Int> diag(g);
    for (int i = 0; i < g; ++i) diag[i] = t(i, i);
    Int c = vec_gcd(t.entries());
    // T/c is a primitive rank-1 semipositive form, i.e. a a'.
    std::vector<Int> a(g, 0);
    int p = -1;
    for (int i = 0; i < g; ++i)
        if (diag[i] != 0) { p = i; break; }
    Int app = t(p, p) / c;
    Int ap = isqrt_floor(app);
    if (ap * ap != app) return std::nullopt;
    for (int i = 0; i < g; ++i) {
        Int v = t(p, i) / c;
        if (v % ap != 0) return std::nullopt;
        a[i] = v / ap;
    }
    a = sign_normalized(a);
    if (SymForm::dyad(a).scaled(c) != t) return std::nullopt;
    return Rank1Split{c, a};
}

// ---------------------------------------------------------------------------
// Nullspace splitting: a unimodular U with T[U] = diag(P, 0), P positive
// definite of size rank(T).

struct Split {
    SymForm posdef;   // r x r, positive definite (empty when T = 0)
    IntMat transform; // unimodular, T[transform] = diag(posdef, 0)
};

// One primitive kernel vector of T, or nullopt when T is nonsingular.
// Bareiss echelon keeps every intermediate value a minor of T, so entries
// stay Hadamard-bounded.
inline std::optional<std::vector<Int>> kernel_vector(const SymForm& t) {
    int g = t.dim();
    std::vector<std::vector<Int>> a = t.to_rows();
    std::vector<int> pivot_col;
    Int prev = 1;
    int r = 0;
    for (int c = 0; c < g && r < g; ++c) {
        int piv = -1;
        for (int i = r; i < g; ++i)
            if (a[i][c] != 0) { piv = i; break; }
        if (piv < 0) continue;
        std::swap(a[r], a[piv]);
        for (int i = r + 1; i < g; ++i) {
            for (int j = c + 1; j < g; ++j)
                a[i][j] = checked_sub(checked_mul(a[i][j], a[r][c]), checked_mul(a[i][c], a[r][j])) / prev;
            a[i][c] = 0;
        }
        prev = a[r][c];
        pivot_col.push_back(c);
        ++r;
    }
    if (r == g) return std::nullopt;
    int free_col = 0;
    while (free_col < g && std::find(pivot_col.begin(), pivot_col.end(), free_col) != pivot_col.end()) ++free_col;

    // Back substitution over Q with a running common denominator.
    std::vector<Int> num(g, 0), den(g, 1);
    num[free_col] = 1;
    for (int i = r - 1; i >= 0; --i) {
        int c = pivot_col[std::size_t(i)];
        // a[i][c] * x_c = -sum_{j>c} a[i][j] x_j
        Int n = 0, d = 1;
        for (int j = c + 1; j < g; ++j) {
            if (a[i][j] == 0 || num[j] == 0) continue;
            // n/d += a[i][j] * num[j]/den[j]
            Int nn = checked_add(checked_mul(n, den[j]), checked_mul(d, checked_mul(a[i][j], num[j])));
            Int dd = checked_mul(d, den[j]);
            Int gg = std::gcd(std::abs(nn), std::abs(dd));
            if (gg > 1) { nn /= gg; dd /= gg; }
            n = nn;
            d = dd;
        }
        num[c] = -n;
        den[c] = checked_mul(d, a[i][c]);
        Int gg = std::gcd(std::abs(num[c]), std::abs(den[c]));
        if (gg > 1) { num[c] /= gg; den[c] /= gg; }
        if (den[c] < 0) { den[c] = -den[c]; num[c] = -num[c]; }
    }
    Int lcm = 1;
    for (int i = 0; i < g; ++i) lcm = checked_mul(lcm / std::gcd(lcm, den[i]), den[i]);
    std::vector<Int> x(g);
    for (int i = 0; i < g; ++i) x[i] = checked_mul(num[i], lcm / den[i]);
    Int content = vec_gcd(x);
    for (Int& v : x) v /= content;
    x = sign_normalized(x);
    if (t.to_mat().apply(x) != std::vector<Int>(g, 0)) throw std::logic_error("kernel vector does not annihilate");
    return x;
}

// Extends a primitive column to a unimodular matrix having it as the last
// column, by the recursive gcd construction.
inline IntMat complete_primitive(const std::vector<Int>& x) {
    int g = int(x.size());
    if (vec_gcd(x) != 1) throw std::invalid_argument("complete_primitive: column must be primitive");
    IntMat m = IntMat::identity(g);
    if (g == 1) {
        m(0, 0) = x[0];
        return m;
    }
    std::vector<Int> head(x.begin(), x.end() - 1);
    Int d = vec_gcd(head);
    if (d == 0) {
        // x = (0,...,0,+-1): cycle the last coordinate into place
        IntMat u(g, g);
        for (int i = 0; i + 1 < g; ++i) u(i, i) = 1;
        u(g - 1, g - 1) = x[g - 1];
        return u;
    }
    for (Int& v : head) v /= d;
    IntMat b = complete_primitive(head);  // last column = head
    // Bezout for gcd(d, x_last) = 1
    Int xg = x[g - 1];
    Int old_r = d, rr = xg, old_s = 1, s = 0, old_t = 0, tt = 1;
    while (rr != 0) {
        Int q = old_r / rr;
        std::tie(old_r, rr) = std::make_pair(rr, old_r - q * rr);
        std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
        std::tie(old_t, tt) = std::make_pair(tt, old_t - q * tt);
    }
    if (old_r < 0) { old_r = -old_r; old_s = -old_s; old_t = -old_t; }
    // old_s * d + old_t * xg = 1
    IntMat u(g, g);
    for (int j = 0; j + 2 < g; ++j)
        for (int i = 0; i + 1 < g; ++i) u(i, j) = b(i, j);
    for (int i = 0; i + 1 < g; ++i) {
        u(i, g - 2) = checked_mul(-old_t, head[std::size_t(i)]);
        u(i, g - 1) = checked_mul(d, head[std::size_t(i)]);
    }
    u(g - 1, g - 2) = old_s;
    u(g - 1, g - 1) = xg;
    if (std::abs(u.det()) != 1) throw std::logic_error("complete_primitive: completion is not unimodular");
    return u;
}

inline Split split_nullspace(const SymForm& t) {
    int g = t.dim();
    IntMat total = IntMat::identity(g);
    SymForm cur = t;
    int peeled = 0;
    while (cur.dim() > 0) {
        if (cur.is_zero()) {
            peeled += cur.dim();
            cur = SymForm(0);
            break;
        }
        auto x = kernel_vector(cur);
        if (!x) break;
        IntMat m = complete_primitive(*x);
        SymForm moved = cur.transformed(m);
        int h = cur.dim();
        for (int i = 0; i < h; ++i)
            if (moved(i, h - 1) != 0) throw std::logic_error("nullspace split failed to isolate the kernel");
        // embed m into the untouched coordinates and accumulate
        IntMat embed = IntMat::identity(g);
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < h; ++j) embed(i, j) = m(i, j);
        total = total * embed;
        SymForm next(h - 1);
        for (int i = 0; i + 1 < h; ++i)
            for (int j = 0; j + 1 < h; ++j) next.set(i, j, moved(i, j));
        cur = next;
        ++peeled;
    }
    // Move the peeled zero coordinates behind the positive definite block.
    int r = g - peeled;
    (void)r;
    SymForm p = cur;
    SymForm check = t.transformed(total);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            Int expect = (i < p.dim() && j < p.dim()) ? p(i, j) : 0;
            if (check(i, j) != expect) throw std::logic_error("nullspace split verification failed");
        }
    if (p.dim() > 0 && !is_positive_definite(p)) throw std::invalid_argument("split_nullspace needs a semipositive form");
    return Split{p, total};
}

// ---------------------------------------------------------------------------
// Minkowski reduction for g <= 3.

// The half-bound domain: sorted positive diagonal, 2|t_ij| <= t_ii for
// i < j, and nonnegative t_12 (and t_23). The closed forms below are proven
// under these inequalities alone.
inline bool is_weakly_reduced(const SymForm& t) {
    int g = t.dim();
    if (g == 1) return t(0, 0) > 0;
    if (g == 2) {
        Int t0 = t(0, 0), t1 = t(0, 1), t2 = t(1, 1);
        return t0 > 0 && 0 <= 2 * t1 && 2 * t1 <= t0 && t0 <= t2;
    }
    if (g == 3) {
        Int t11 = t(0, 0), t22 = t(1, 1), t33 = t(2, 2);
        Int t12 = t(0, 1), t13 = t(0, 2), t23 = t(1, 2);
        return t11 > 0 && t11 <= t22 && t22 <= t33 && 0 <= t12 && 2 * t12 <= t11 && 0 <= t23 &&
               2 * t23 <= t22 && 2 * std::abs(t13) <= t11;
    }
    throw std::invalid_argument("weak reduction test supported only for g <= 3");
}

inline bool is_minkowski_reduced(const SymForm& t) {
    int g = t.dim();
    if (g == 1) return t(0, 0) > 0;
    if (g == 2) {
        Int t0 = t(0, 0), t1 = t(0, 1), t2 = t(1, 1);
        return t0 > 0 && 0 <= 2 * t1 && 2 * t1 <= t0 && t0 <= t2;
    }
    if (g == 3) {
        Int t11 = t(0, 0), t22 = t(1, 1), t33 = t(2, 2);
        Int t12 = t(0, 1), t13 = t(0, 2), t23 = t(1, 2);
        return t11 > 0 && t11 <= t22 && t22 <= t33 && 0 <= t12 && 2 * t12 <= t11 && 0 <= t23 &&
               2 * t23 <= t22 && 2 * std::abs(t13) <= t11 &&
               2 * (t12 + t23 + std::abs(t13)) <= t11 + t22;
    }
    throw std::invalid_argument("Minkowski reduction supported only for g <= 3");
}

struct Reduction {
    SymForm reduced;
    IntMat transform;  // unimodular, reduced == T[transform]
};

namespace detail {

// All sign-normalized primitive vectors with T[v] <= cap, sorted by
// (value, entries).
inline std::vector<std::pair<Int, std::vector<Int>>> short_vectors(const SymForm& t, Int cap) {
    int g = t.dim();
    Int d = det(t);
    // Ellipsoid box: |x_i|^2 <= cap * (T^{-1})_{ii} = cap * cof_ii / det.
    std::vector<Int> bound(g);
    for (int i = 0; i < g; ++i) {
        std::vector<int> idx;
        for (int k = 0; k < g; ++k)
            if (k != i) idx.push_back(k);
        IntMat sub(g - 1, g - 1);
        for (int a = 0; a < g - 1; ++a)
            for (int b = 0; b < g - 1; ++b) sub(a, b) = t(idx[a], idx[b]);
        Int cof = sub.det();
        bound[i] = isqrt_floor((checked_mul(cap, cof) + d - 1) / d) + 1;
    }
    std::vector<std::pair<Int, std::vector<Int>>> out;
    std::vector<Int> v(g, 0);
    std::function<void(int)> rec = [&](int i) {
        if (i == g) {
            std::vector<Int> w = sign_normalized(v);
            if (w < v) return;  // keep one of +-v
            if (vec_gcd(w) != 1) return;
            Int val = t.eval(w);
            if (val <= cap) out.emplace_back(val, w);
            return;
        }
        for (Int x = -bound[i]; x <= bound[i]; ++x) {
            v[i] = x;
            rec(i + 1);
        }
        v[i] = 0;
    };
    rec(0);
    std::sort(out.begin(), out.end());
    return out;
}

inline bool pair_extendable(const std::vector<Int>& a, const std::vector<Int>& b) {
    // [a b] extends to a unimodular 3x3 matrix iff the 2x2 minors are coprime.
    Int m01 = checked_sub(checked_mul(a[0], b[1]), checked_mul(a[1], b[0]));
    Int m02 = checked_sub(checked_mul(a[0], b[2]), checked_mul(a[2], b[0]));
    Int m12 = checked_sub(checked_mul(a[1], b[2]), checked_mul(a[2], b[1]));
    return std::gcd(std::gcd(std::abs(m01), std::abs(m02)), std::abs(m12)) == 1;
}

inline IntMat columns_matrix(const std::vector<std::vector<Int>>& cols) {
    int g = int(cols[0].size());
    IntMat u(g, int(cols.size()));
    for (int j = 0; j < int(cols.size()); ++j)
        for (int i = 0; i < g; ++i) u(i, j) = cols[j][i];
    return u;
}

// Fix the signs so that t12 >= 0 (and for g=3 also t23 >= 0).
inline void sign_fix(SymForm& r, IntMat& u) {
    int g = r.dim();
    auto flip = [&](int c) {
        for (int i = 0; i < g; ++i) {
            u(i, c) = -u(i, c);
            if (i != c) r.set(i, c, -r(i, c));
        }
    };
    if (g >= 2 && r(0, 1) < 0) flip(1);
    if (g >= 3 && r(1, 2) < 0) flip(2);
}

}  // namespace detail

inline Reduction minkowski_reduce(const SymForm& t) {
    int g = t.dim();
    if (g < 1 || g > 3) throw std::invalid_argument("Minkowski reduction supported only for g <= 3");
    if (!is_positive_definite(t)) throw std::invalid_argument("Minkowski reduction needs a positive definite form");
    if (g == 1) return Reduction{t, IntMat::identity(1)};

    Int cap = 0;
    for (int i = 0; i < g; ++i) cap = std::max(cap, t(i, i));

    for (int attempt = 0; attempt < 4; ++attempt, cap *= 2) {
        auto sv = detail::short_vectors(t, cap);
        if (sv.empty()) continue;
        std::optional<Reduction> best;
        auto consider = [&](const std::vector<std::vector<Int>>& cols) {
            IntMat u = detail::columns_matrix(cols);
            SymForm r = t.transformed(u);
            detail::sign_fix(r, u);
            if (!is_minkowski_reduced(r)) return;
            if (!best || r < best->reduced) best = Reduction{r, u};
        };

        Int m1 = sv.front().first;
        for (const auto& [val1, v1] : sv) {
            if (val1 != m1) break;
            if (g == 2) {
                Int m2 = -1;
                for (const auto& [val2, v2] : sv) {
                    Int dd = checked_sub(checked_mul(v1[0], v2[1]), checked_mul(v1[1], v2[0]));
                    if (std::abs(dd) != 1) continue;
                    if (m2 < 0) m2 = val2;
                    if (val2 != m2) break;
                    consider({v1, v2});
                }
            } else {
                Int m2 = -1;
                for (const auto& [val2, v2] : sv) {
                    if (!detail::pair_extendable(v1, v2)) continue;
                    if (m2 < 0) m2 = val2;
                    if (val2 != m2) break;
                    Int m3 = -1;
                    for (const auto& [val3, v3] : sv) {
                        IntMat u = detail::columns_matrix({v1, v2, v3});
                        if (std::abs(u.det()) != 1) continue;
                        if (m3 < 0) m3 = val3;
                        if (val3 != m3) break;
                        consider({v1, v2, v3});
                    }
                }
            }
        }
        if (best) return *best;
    }
    throw std::logic_error("Minkowski reduction failed to find a reduced basis");
}

// Greedy reduction into the weak domain (sorted diagonal, 2|t_ij| <= t_ii
// for i < j, t_12 and t_23 nonnegative) by column permutations and nearest
// integer shears. This is where the closed forms are proven; the full
// reduction above is only needed when the complete inequality list matters.
inline Reduction weak_reduce(const SymForm& t) {
    int g = t.dim();
    if (g < 1 || g > 3) throw std::invalid_argument("weak_reduce supported only for g <= 3");
    if (!is_positive_definite(t)) throw std::invalid_argument("weak_reduce needs a positive definite form");
    SymForm r = t;
    IntMat u = IntMat::identity(g);
    auto nearest = [](Int num, Int den) {  // round(num/den), den > 0
        return num >= 0 ? (2 * num + den) / (2 * den) : -((-2 * num + den) / (2 * den));
    };
    for (int guard = 0; guard < 4096; ++guard) {
        // selection sort of the diagonal by column swaps
        for (int i = 0; i < g; ++i) {
            int best = i;
            for (int j = i + 1; j < g; ++j)
                if (r(j, j) < r(best, best)) best = j;
            if (best != i) {
                IntMat p = IntMat::identity(g);
                p(i, i) = p(best, best) = 0;
                p(i, best) = p(best, i) = 1;
                r = r.transformed(p);
                u = u * p;
            }
        }
        bool sheared = false;
        for (int i = 0; i < g && !sheared; ++i)
            for (int j = i + 1; j < g && !sheared; ++j)
                if (2 * std::abs(r(i, j)) > r(i, i)) {
                    IntMat e = IntMat::identity(g);
                    e(i, j) = -nearest(r(i, j), r(i, i));
                    r = r.transformed(e);
                    u = u * e;
                    sheared = true;
                }
        if (!sheared) {
            detail::sign_fix(r, u);
            return Reduction{r, u};
        }
    }
    throw std::logic_error("weak_reduce did not terminate");
}

// ---------------------------------------------------------------------------
// Decomposition length lambda(T): the largest k such that T is a sum of k
// nonzero semipositive integral forms.

struct OracleOptions {
    Int max_entry = 48;            // refuse larger inputs (exponential blow-up guard)
    int max_dim = 4;               // dyad recursion for g <= 3, generic recursion for g == 4
    std::size_t max_states = 4'000'000;
    bool generic_recursion = false;  // force the all-summands recursion at every dimension
};

// Brute-force oracle. For forms of dimension <= 3 the recursion steps by
// primitive dyads a a' (every irreducible semipositive form of rank <= 3 is
// one: positive definite forms of rank 2 or 3 always split, by the
// determinant bounds). For dimension 4 it falls back to the generic
// recursion over all nonzero semipositive summands.
class LambdaOracle {
public:
    explicit LambdaOracle(OracleOptions opt = {}) : opt_(opt) {}

    Int operator()(const SymForm& t) {
        if (t.dim() > opt_.max_dim)
            throw oracle_limit_error("lambda oracle: dimension exceeds the configured bound");
        if (t.max_abs_entry() > opt_.max_entry)
            throw oracle_limit_error("lambda oracle: entries exceed the configured bound");
        if (!is_semipositive(t)) throw std::invalid_argument("lambda oracle needs a semipositive form");
        return go(t);
    }

private:
    Int go(const SymForm& t) {
        if (t.is_zero()) return 0;
        std::vector<Int> key = memo_key(t);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        if (memo_.size() > opt_.max_states)
            throw oracle_limit_error("lambda oracle: state budget exhausted");

        Int best = -1;
        if (t.dim() <= 3 && !opt_.generic_recursion) {
            for_each_primitive_dyad_step(t, [&](const SymForm& rest) {
                Int v = 1 + go(rest);
                if (v > best) best = v;
            });
        } else {
            for_each_summand_step(t, [&](const SymForm& rest) {
                Int v = 1 + go(rest);
                if (v > best) best = v;
            });
        }
        if (best < 0) throw std::logic_error("lambda oracle: nonzero semipositive form with no step");
        memo_.emplace(std::move(key), best);
        return best;
    }

    std::vector<Int> memo_key(const SymForm& t) const {
        // Cache on the reduced class for definite forms; lambda is invariant
        // under unimodular transformations.
        if (t.dim() >= 2 && t.dim() <= 3 && is_positive_definite(t))
            return weak_reduce(t).reduced.entries();
        return t.entries();
    }

    template <class F>
    static void for_each_primitive_dyad_step(const SymForm& t, F&& f) {
        int g = t.dim();
        std::vector<Int> bound(g);
        for (int i = 0; i < g; ++i) bound[i] = isqrt_floor(t(i, i));
        std::vector<Int> a(g, 0);
        std::function<void(int)> rec = [&](int i) {
            if (i == g) {
                if (sign_normalized(a) != a || vec_gcd(a) != 1) return;
                SymForm rest = t - SymForm::dyad(a);
                if (is_semipositive(rest)) f(rest);
                return;
            }
            for (Int x = -bound[i]; x <= bound[i]; ++x) {
                a[i] = x;
                rec(i + 1);
            }
            a[i] = 0;
        };
        rec(0);
    }

    template <class F>
    static void for_each_summand_step(const SymForm& t, F&& f) {
        int g = t.dim();
        int off = g * (g - 1) / 2;
        std::vector<std::pair<int, int>> pos;
        for (int i = 0; i < g; ++i)
            for (int j = i + 1; j < g; ++j) pos.emplace_back(i, j);
        SymForm s(g);
        std::function<void(int)> offdiag = [&](int k) {
            if (k == off) {
                if (s.is_zero()) return;
                if (!is_semipositive(s)) return;
                SymForm rest = t - s;
                if (is_semipositive(rest)) f(rest);
                return;
            }
            auto [i, j] = pos[k];
            Int cap = isqrt_floor(checked_mul(s(i, i), s(j, j)));
            for (Int x = -cap; x <= cap; ++x) {
                s.set(i, j, x);
                offdiag(k + 1);
            }
            s.set(i, j, 0);
        };
        std::function<void(int)> diag = [&](int i) {
            if (i == g) {
                offdiag(0);
                return;
            }
            for (Int x = 0; x <= t(i, i); ++x) {
                s.set(i, i, x);
                diag(i + 1);
            }
            s.set(i, i, 0);
        };
        diag(0);
    }

    struct KeyHash {
        std::size_t operator()(const std::vector<Int>& v) const {
            std::size_t h = v.size();
            for (Int x : v) h = h * 1000003u + std::hash<Int>{}(static_cast<Int>(x));
            return h;
        }
    };

    OracleOptions opt_;
    std::unordered_map<std::vector<Int>, Int, KeyHash> memo_;
};

inline Int lambda_oracle(const SymForm& t, OracleOptions opt = {}) { return LambdaOracle(opt)(t); }

// Closed forms: g=1 trivially, g=2 under 0 <= t1 <= t0,t2, g=3 for
// Minkowski-reduced positive definite forms.
inline Int lambda_closed(const SymForm& t) {
    int g = t.dim();
    if (g == 1) {
        if (t(0, 0) < 0) throw std::invalid_argument("lambda_closed: negative 1x1 form");
        return t(0, 0);
    }
    if (g == 2) {
        Int t0 = t(0, 0), t1 = t(0, 1), t2 = t(1, 1);
        if (!(0 <= t1 && t1 <= t0 && t1 <= t2))
            throw std::invalid_argument("lambda_closed: 2x2 form not in the 0 <= t1 <= t0,t2 range");
        if (!is_semipositive(t)) throw std::invalid_argument("lambda_closed: form not semipositive");
        return t0 + t2 - t1;
    }
    if (g == 3) {
        if (!is_weakly_reduced(t) || !is_positive_definite(t))
            throw std::invalid_argument("lambda_closed: 3x3 form must be reduced positive definite");
        Int t11 = t(0, 0), t22 = t(1, 1), t33 = t(2, 2);
        Int t12 = t(0, 1), t13 = t(0, 2), t23 = t(1, 2);
        if (t13 <= 0) return t11 + t22 + t33 - t12 - t23 + t13;
        return t11 + t22 + t33 - t12 - t23 - t13 + std::min({t12, t13, t23});
    }
    throw std::invalid_argument("lambda_closed: no closed form for g > 3");
}

// Full strategy: split off the nullspace, reduce, then use the closed form;
// falls back to the oracle beyond rank 3.
inline Int lambda(const SymForm& t) {
    if (!is_semipositive(t)) throw std::invalid_argument("lambda needs a semipositive form");
    if (t.is_zero()) return 0;
    Split sp = split_nullspace(t);
    const SymForm& p = sp.posdef;
    int r = p.dim();
    if (r == 0) return 0;
    if (r == 1) return p(0, 0);
    if (r <= 3) return lambda_closed(weak_reduce(p).reduced);
    return lambda_oracle(p);
}

// ---------------------------------------------------------------------------
// Congruences and GL(g,Z)[q] orbits. GL(g,Z)[q] is taken as the kernel of
// entrywise reduction GL(g,Z) -> GL(g,Z/qZ): unimodular U with U = E mod q.

inline bool congruent_mod(const SymForm& s, const SymForm& t, Int q) {
    if (s.dim() != t.dim()) throw std::invalid_argument("congruence: dimension mismatch");
    if (q < 1) throw std::invalid_argument("congruence: modulus must be positive");
    for (int i = 0; i < s.dim(); ++i)
        for (int j = 0; j < s.dim(); ++j)
            if ((s(i, j) - t(i, j)) % q != 0) return false;
    return true;
}

// Orbit test for primitive rank-one forms, q in {2,4}: equivalence mod
// GL(g,Z)[q] coincides with entrywise congruence mod q.
inline bool rank1_orbit_equiv(const SymForm& s, const SymForm& t, Int q) {
    if (q != 2 && q != 4) throw std::invalid_argument("rank1_orbit_equiv: q must be 2 or 4");
    auto rs = rank1_split(s), rt = rank1_split(t);
    if (!rs || rs->content != 1 || !rt || rt->content != 1)
        throw std::invalid_argument("rank1_orbit_equiv: forms must be primitive of rank one");
    return congruent_mod(s, t, q);
}

// One-sided bounded search for a witness U in GL(g,Z)[q] with T[U] = S.
// U = E + q V is swept over |V_ij| <= bound; a hit is returned, otherwise
// nullopt ("unknown"). Never reports a false equivalence.
inline std::optional<IntMat> glq_equiv_bounded(const SymForm& s, const SymForm& t, Int q, Int bound) {
    if (s.dim() != t.dim()) throw std::invalid_argument("glq_equiv_bounded: dimension mismatch");
    if (q < 1 || bound < 1) throw std::invalid_argument("glq_equiv_bounded: bad parameters");
    int g = s.dim();

    // Backtracking over columns of U with incremental Gram constraints.
    std::vector<std::vector<Int>> cols(g);
    std::optional<IntMat> hit;

    std::function<bool(int)> pick = [&](int j) -> bool {
        std::vector<Int> cur(g);  // per level; deeper levels use their own
        if (j == g) {
            IntMat u(g, g);
            for (int c = 0; c < g; ++c)
                for (int r = 0; r < g; ++r) u(r, c) = cols[c][r];
            if (std::abs(u.det()) != 1) return false;
            if (t.transformed(u) != s) return false;
            hit = u;
            return true;
        }
        std::function<bool(int)> fill = [&](int i) -> bool {
            if (i == g) {
                if (t.eval(cur) != s(j, j)) return false;
                for (int c = 0; c < j; ++c) {
                    Int dot = 0;
                    for (int a = 0; a < g; ++a)
                        for (int b = 0; b < g; ++b)
                            dot = checked_add(dot, checked_mul(cols[c][a], checked_mul(t(a, b), cur[b])));
                    if (dot != s(c, j)) return false;
                }
                cols[j] = cur;
                return pick(j + 1);
            }
            Int base = (i == j) ? 1 : 0;
            for (Int k = -bound; k <= bound; ++k) {
                cur[i] = base + q * k;
                if (fill(i + 1)) return true;
            }
            return false;
        };
        return fill(0);
    };
    pick(0);
    return hit;
}

}  // namespace thetaforms
