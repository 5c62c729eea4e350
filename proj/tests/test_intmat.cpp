#include <catch_amalgamated.hpp>

#include "thetaforms/intmat.hpp"
#include "thetaforms/util.hpp"

using namespace thetaforms;

namespace {

SymForm F(std::vector<std::vector<Int>> rows) { return SymForm::from_rows(rows); }

// Random unimodular matrix with small entries, built from elementary moves.
IntMat random_unimodular(int g, Rng& rng, Int max_entry = 3) {
    for (;;) {
        IntMat u = IntMat::identity(g);
        int steps = int(rng.uniform_int(2, 6));
        for (int s = 0; s < steps; ++s) {
            int i = int(rng.uniform_int(0, g - 1)), j = int(rng.uniform_int(0, g - 1));
            if (i == j) continue;
            IntMat e = IntMat::identity(g);
            e(i, j) = rng.uniform_int(0, 1) ? 1 : -1;
            u = u * e;
        }
        if (rng.uniform_int(0, 1)) {
            IntMat d = IntMat::identity(g);
            d(int(rng.uniform_int(0, g - 1)), int(rng.uniform_int(0, g - 1))) = 1;
            d(0, 0) = -1;
            u = u * d;
        }
        Int m = 0;
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j) m = std::max(m, std::abs(u(i, j)));
        if (m <= max_entry && std::abs(u.det()) == 1) return u;
    }
}

}  // namespace

TEST_CASE("semipositivity is decided exactly") {
    CHECK(is_semipositive(F({{1, 1}, {1, 1}})));
    CHECK_FALSE(is_semipositive(F({{1, 2}, {2, 1}})));
    CHECK(is_semipositive(F({{2, 0, -1}, {0, 2, 1}, {-1, 1, 2}})));
    CHECK(is_semipositive(SymForm::zero(3)));
    CHECK_FALSE(is_semipositive(F({{0, 0}, {0, -1}})));
    // Not detectable from leading minors alone.
    CHECK_FALSE(is_semipositive(F({{0, 0, 1}, {0, 1, 0}, {1, 0, 0}})));
}

TEST_CASE("rank over the rationals") {
    CHECK(rank(SymForm::zero(3)) == 0);
    CHECK(rank(F({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}})) == 1);
    CHECK(rank(SymForm::diag({1, 1, 1})) == 3);
    CHECK(rank(F({{1, 1, 0}, {1, 1, 0}, {0, 0, 1}})) == 2);
}

TEST_CASE("dyads and rank-one splitting") {
    auto t = SymForm::dyad({1, -2, 3});
    CHECK(rank(t) == 1);
    CHECK(is_semipositive(t));
    auto s = rank1_split(t.scaled(3));
    REQUIRE(s.has_value());
    CHECK(s->content == 3);
    CHECK(s->column == std::vector<Int>{1, -2, 3});
    CHECK_FALSE(rank1_split(SymForm::diag({1, 1, 0})).has_value());
    auto z = rank1_split(SymForm::zero(2));
    REQUIRE(z.has_value());
    CHECK(z->content == 0);
}

TEST_CASE("nullspace splitting isolates a positive definite block") {
    auto t = F({{2, 2, 0}, {2, 3, 1}, {0, 1, 1}});  // rank 2, kernel (1,-1,1)
    auto sp = split_nullspace(t);
    CHECK(sp.posdef.dim() == 2);
    CHECK(is_positive_definite(sp.posdef));
    CHECK(std::abs(sp.transform.det()) == 1);
    CHECK(lambda(t) == 3);

    auto z = split_nullspace(SymForm::zero(2));
    CHECK(z.posdef.dim() == 0);
}

TEST_CASE("lambda oracle on the named examples") {
    CHECK(lambda_oracle(SymForm::zero(2)) == 0);
    CHECK(lambda_oracle(F({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}})) == 1);
    CHECK(lambda_oracle(F({{2, 1}, {1, 3}})) == 4);
    CHECK(lambda_oracle(F({{0, 0}, {0, 5}})) == 5);
}

TEST_CASE("oracle bound failures are loud") {
    CHECK_THROWS_AS(lambda_oracle(SymForm::diag({100, 100})), oracle_limit_error);
    CHECK_THROWS_AS(lambda_oracle(SymForm::diag({1, 1, 1, 1, 1})), oracle_limit_error);
    CHECK_THROWS_AS(lambda_oracle(F({{1, 2}, {2, 1}})), std::invalid_argument);
}

TEST_CASE("dyad-step recursion agrees with the generic summand recursion") {
    OracleOptions generic;
    generic.generic_recursion = true;
    Rng rng(11);
    int checked = 0;
    while (checked < 25) {
        int g = int(rng.uniform_int(2, 3));
        Int cap = g == 2 ? 3 : 2;
        SymForm t(g);
        for (int i = 0; i < g; ++i) t.set(i, i, rng.uniform_int(0, cap));
        for (int i = 0; i < g; ++i)
            for (int j = i + 1; j < g; ++j) t.set(i, j, rng.uniform_int(-1, 1));
        if (!is_semipositive(t)) continue;
        INFO(t.str());
        CHECK(lambda_oracle(t) == LambdaOracle(generic)(t));
        ++checked;
    }
}

TEST_CASE("Minkowski reduction of the named examples") {
    auto r1 = minkowski_reduce(F({{2, 1}, {1, 5}}));
    CHECK(r1.reduced == F({{2, 1}, {1, 5}}));
    CHECK(r1.transform == IntMat::identity(2));

    auto r2 = minkowski_reduce(F({{5, 4}, {4, 5}}));
    CHECK(r2.reduced == F({{2, 1}, {1, 5}}));
    CHECK(det(r2.reduced) == 9);

    auto r3 = minkowski_reduce(SymForm::diag({3, 2, 1}));
    CHECK(r3.reduced == SymForm::diag({1, 2, 3}));

    CHECK_THROWS_AS(minkowski_reduce(F({{1, 2}, {2, 1}})), std::invalid_argument);
}

TEST_CASE("reduction soundness on random positive definite forms") {
    Rng rng(5);
    int done = 0;
    while (done < 200) {
        int g = int(rng.uniform_int(2, 3));
        SymForm t(g);
        for (int i = 0; i < g; ++i) t.set(i, i, rng.uniform_int(1, 8));
        for (int i = 0; i < g; ++i)
            for (int j = i + 1; j < g; ++j) t.set(i, j, rng.uniform_int(-4, 4));
        if (!is_positive_definite(t)) continue;
        auto red = minkowski_reduce(t);
        INFO(t.str() << " -> " << red.reduced.str());
        CHECK(is_minkowski_reduced(red.reduced));
        CHECK(det(red.reduced) == det(t));
        CHECK(std::abs(red.transform.det()) == 1);
        CHECK(t.transformed(red.transform) == red.reduced);
        ++done;
    }
}

TEST_CASE("closed forms on the named examples") {
    CHECK(lambda_closed(SymForm::diag({1, 1})) == 2);
    CHECK(lambda_closed(F({{2, 0, -1}, {0, 2, 1}, {-1, 1, 2}})) == 4);
    CHECK(lambda_closed(F({{2, 0, 1}, {0, 2, 1}, {1, 1, 2}})) == 4);
    CHECK_THROWS_AS(lambda_closed(F({{3, 2}, {2, 1}})), std::invalid_argument);
}

TEST_CASE("lambda strategy handles semidefinite and reducible inputs") {
    CHECK(lambda(F({{0, 0}, {0, 5}})) == 5);
    CHECK(lambda(F({{5, 4}, {4, 5}})) == 6);
    CHECK(lambda(F({{1, 0, -1}, {0, 0, 0}, {-1, 0, 1}})) == 1);
    CHECK(lambda(SymForm::zero(3)) == 0);
    CHECK_THROWS_AS(lambda(F({{1, 2}, {2, 1}})), std::invalid_argument);
}

TEST_CASE("closed form matches the oracle on a small 2x2 slice") {
    for (Int t0 = 1; t0 <= 4; ++t0)
        for (Int t2 = 1; t2 <= 4; ++t2)
            for (Int t1 = 0; t1 <= std::min(t0, t2); ++t1) {
                auto t = F({{t0, t1}, {t1, t2}});
                if (!is_semipositive(t)) continue;
                INFO(t.str());
                CHECK(lambda_closed(t) == lambda_oracle(t));
            }
}

TEST_CASE("lambda is invariant under unimodular transformations") {
    Rng rng(77);
    std::vector<SymForm> forms = {
        F({{2, 1}, {1, 3}}),
        F({{1, 0}, {0, 7}}),
        F({{2, 0, -1}, {0, 2, 1}, {-1, 1, 2}}),
        F({{2, 1, 1}, {1, 2, 1}, {1, 1, 2}}),
        F({{1, 1, 0}, {1, 1, 0}, {0, 0, 0}}),
    };
    for (const auto& t : forms) {
        Int lam = lambda(t);
        for (int k = 0; k < 50; ++k) {
            IntMat u = random_unimodular(t.dim(), rng);
            CHECK(lambda(t.transformed(u)) == lam);
        }
    }
}

TEST_CASE("lower bound 4 lambda^2 >= 9 det in genus 2") {
    for (Int t0 = 1; t0 <= 6; ++t0)
        for (Int t2 = 1; t2 <= 6; ++t2)
            for (Int t1 = -6; t1 <= 6; ++t1) {
                auto t = F({{t0, t1}, {t1, t2}});
                if (!is_positive_definite(t)) continue;
                Int lam = lambda(t);
                CHECK(4 * lam * lam >= 9 * det(t));
            }
}

TEST_CASE("congruence mod q") {
    auto a = SymForm::dyad({1, 4, 0});
    auto b = SymForm::dyad({1, 0, 0});
    CHECK(congruent_mod(a, a, 4));
    CHECK(congruent_mod(a, b, 4));
    CHECK_FALSE(congruent_mod(SymForm::dyad({1, 2, 0}), b, 4));
}

TEST_CASE("rank-one orbit test reduces to congruence") {
    auto a = SymForm::dyad({1, 4, 0});
    auto b = SymForm::dyad({1, 0, 0});
    CHECK(rank1_orbit_equiv(a, a, 4));
    CHECK(rank1_orbit_equiv(a, b, 4));
    CHECK(rank1_orbit_equiv(SymForm::dyad({1, 1, 1}), SymForm::dyad({1, 1, -1}), 2));
    CHECK_FALSE(rank1_orbit_equiv(SymForm::dyad({1, 2, 0}), b, 4));
    CHECK_THROWS_AS(rank1_orbit_equiv(SymForm::diag({1, 1, 0}), b, 4), std::invalid_argument);
    CHECK_THROWS_AS(rank1_orbit_equiv(a, b, 6), std::invalid_argument);
}

TEST_CASE("bounded GL(g,Z)[q] witness search") {
    auto e6 = SymForm::dyad({1, 0, 1});
    auto e6m = SymForm::dyad({1, 0, -1});
    auto id = glq_equiv_bounded(e6, e6, 2, 1);
    REQUIRE(id.has_value());
    CHECK(e6.transformed(*id) == e6);

    auto w = glq_equiv_bounded(e6m, e6, 2, 2);
    REQUIRE(w.has_value());
    CHECK(e6.transformed(*w) == e6m);

    CHECK_FALSE(glq_equiv_bounded(SymForm::dyad({1, 2}), SymForm::dyad({1, 0}), 4, 1).has_value());
}

TEST_CASE("orbit membership implies congruence for seeded pairs") {
    Rng rng(123);
    int done = 0;
    while (done < 60) {
        int g = int(rng.uniform_int(2, 3));
        Int q = rng.uniform_int(0, 1) ? 2 : 4;
        std::vector<Int> a(g);
        for (auto& x : a) x = rng.uniform_int(-2, 2);
        if (vec_gcd(a) != 1) continue;
        IntMat u = IntMat::identity(g);
        for (int s = 0; s < 3; ++s) {
            int i = int(rng.uniform_int(0, g - 1)), j = int(rng.uniform_int(0, g - 1));
            if (i == j) continue;
            IntMat e = IntMat::identity(g);
            e(i, j) = q * rng.uniform_int(-1, 1);
            u = u * e;
        }
        auto t = SymForm::dyad(a);
        CHECK(congruent_mod(t.transformed(u), t, q));
        ++done;
    }
}

TEST_CASE("primitivity propagates to the lower block") {
    // For primitive rank-one T with lambda(T + E11) = 2, the lower block of
    // T must be primitive or zero.
    Rng rng(42);
    int done = 0;
    while (done < 80) {
        std::vector<Int> a(3);
        for (auto& x : a) x = rng.uniform_int(-2, 2);
        if (vec_gcd(a) != 1) continue;
        auto t = SymForm::dyad(a);
        SymForm shifted = t;
        shifted.set(0, 0, t(0, 0) + 1);
        if (lambda(shifted) != 2) continue;
        std::vector<Int> lower = {t(1, 1), t(1, 2), t(2, 2)};
        Int g = vec_gcd(lower);
        CHECK((g == 1 || g == 0));
        ++done;
    }
}

TEST_CASE("rank-one rigidity under GL(g,Z)[2]") {
    Rng rng(9);
    int done = 0;
    while (done < 60) {
        int g = 3;
        std::vector<Int> a(g);
        for (auto& x : a) x = rng.uniform_int(-2, 2);
        if (vec_gcd(a) != 1) continue;
        auto t = SymForm::dyad(a);
        IntMat u = IntMat::identity(g);
        for (int s = 0; s < 2; ++s) {
            int i = int(rng.uniform_int(0, g - 1)), j = int(rng.uniform_int(0, g - 1));
            if (i == j) continue;
            IntMat e = IntMat::identity(g);
            e(i, j) = 2 * rng.uniform_int(-1, 1);
            u = u * e;
        }
        Int m = 0;
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j) m = std::max(m, std::abs(u(i, j)));
        if (m > 3) continue;
        auto tu = t.transformed(u);
        if (lambda(t + tu) == 2) CHECK(tu == t);
        ++done;
    }
}

TEST_CASE("overflow detection fails loudly") {
    Int big = Int(3037000500LL);  // sqrt of INT64_MAX, roughly
    CHECK_THROWS_AS(checked_mul(big, big), std::overflow_error);
    CHECK_THROWS_AS(SymForm::dyad({big, 1}), std::overflow_error);
}
