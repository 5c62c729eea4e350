#include <catch_amalgamated.hpp>

#include "thetaforms/decomp.hpp"
#include "thetaforms/util.hpp"

using namespace thetaforms;

namespace {

SymForm F(std::vector<std::vector<Int>> rows) { return SymForm::from_rows(rows); }

std::vector<SymForm> reduced3_enumeration(Int max_entry) {
    std::vector<SymForm> out;
    for (Int t11 = 1; t11 <= max_entry; ++t11)
        for (Int t22 = t11; t22 <= max_entry; ++t22)
            for (Int t33 = t22; t33 <= max_entry; ++t33)
                for (Int t12 = 0; 2 * t12 <= t11; ++t12)
                    for (Int t23 = 0; 2 * t23 <= t22; ++t23)
                        for (Int t13 = -t11 / 2; 2 * t13 <= t11; ++t13) {
                            if (2 * (t12 + t23 + std::abs(t13)) > t11 + t22) continue;
                            SymForm t(3);
                            t.set(0, 0, t11), t.set(1, 1, t22), t.set(2, 2, t33);
                            t.set(0, 1, t12), t.set(1, 2, t23), t.set(0, 2, t13);
                            if (!is_positive_definite(t)) continue;
                            out.push_back(t);
                        }
    return out;
}

}  // namespace

TEST_CASE("basic rank-one system") {
    for (int i = 1; i <= 7; ++i) {
        auto e = EBasis3::form(i);
        CHECK(rank(e) == 1);
        CHECK(is_semipositive(e));
        CHECK(is_primitive(e));
        for (int j = i + 1; j <= 7; ++j) CHECK_FALSE(congruent_mod(e, EBasis3::form(j), 2));
    }
    CHECK(congruent_mod(EBasis3::e6m(), EBasis3::form(6), 2));
    CHECK(EBasis3::e6m() == F({{1, 0, -1}, {0, 0, 0}, {-1, 0, 1}}));
}

TEST_CASE("case classification") {
    CHECK(classify_case(F({{2, 0, -1}, {0, 2, 1}, {-1, 1, 2}})) == CaseTag::A2);
    CHECK(classify_case(SymForm::diag({1, 1, 1})) == CaseTag::A1);
    CHECK(classify_case(F({{2, 0, 1}, {0, 2, 1}, {1, 1, 2}})) == CaseTag::B2);
    CHECK(classify_case(F({{2, 1, 1}, {1, 2, 1}, {1, 1, 2}})) == CaseTag::B1);
    CHECK(classify_case(F({{2, 1, 0}, {1, 2, 1}, {0, 1, 2}})) == CaseTag::A3);
    CHECK_THROWS_AS(classify_case(F({{3, 2, 0}, {2, 3, 0}, {0, 0, 1}})), std::invalid_argument);
}

TEST_CASE("decompose2 on the named examples") {
    auto d = decompose2(F({{2, 1}, {1, 3}}));
    CHECK(d.total_multiplicity() == 4);
    REQUIRE(d.parts.size() == 3);
    CHECK(d.parts[0].mult == 1);
    CHECK(d.parts[1].mult == 2);
    CHECK(d.parts[2].mult == 1);
    CHECK(verify_decomposition(F({{2, 1}, {1, 3}}), d));

    auto id = decompose2(SymForm::diag({1, 1}));
    CHECK(id.parts.size() == 2);
    CHECK(id.total_multiplicity() == 2);

    auto diag = decompose2(F({{1, 0}, {0, 7}}));
    REQUIRE(diag.parts.size() == 2);
    CHECK(diag.parts[1].mult == 7);

    CHECK(verify_decomposition(F({{3, 2}, {2, 3}}), decompose2(F({{3, 2}, {2, 3}}))));
    CHECK_THROWS_AS(decompose2(F({{3, -1}, {-1, 3}})), std::invalid_argument);
}

TEST_CASE("decompose3 on the named examples") {
    auto d = decompose3(F({{2, 0, -1}, {0, 2, 1}, {-1, 1, 2}}));
    CHECK(d.total_multiplicity() == 4);
    REQUIRE(d.parts.size() == 4);
    CHECK(d.parts[0].column == std::vector<Int>{1, 0, 0});
    CHECK(d.parts[1].column == std::vector<Int>{0, 1, 0});
    CHECK(d.parts[2].column == std::vector<Int>{0, 1, 1});
    CHECK(d.parts[3].column == std::vector<Int>{1, 0, -1});
    CHECK(verify_decomposition(d.target, d));

    auto id = decompose3(SymForm::diag({1, 1, 1}));
    CHECK(id.parts.size() == 3);
    CHECK(id.total_multiplicity() == 3);

    auto b = decompose3(F({{2, 1, 1}, {1, 2, 1}, {1, 1, 2}}));
    CHECK(b.total_multiplicity() == 4);
    REQUIRE(b.parts.size() == 4);
    CHECK(b.parts[3].column == std::vector<Int>{1, 1, 1});

    CHECK_THROWS_AS(decompose3(F({{3, 2, 0}, {2, 3, 0}, {0, 0, 1}})), std::invalid_argument);
}

TEST_CASE("verify_decomposition rejects wrong sums and lengths") {
    Decomposition wrong;
    wrong.target = SymForm::diag({1, 1});
    wrong.parts.push_back({1, {1, 0}});
    CHECK_FALSE(verify_decomposition(SymForm::diag({1, 1}), wrong));

    Decomposition ok;
    ok.target = F({{2, 1}, {1, 3}});
    ok.parts.push_back({1, {1, 0}});
    ok.parts.push_back({2, {0, 1}});
    ok.parts.push_back({1, {1, 1}});
    CHECK(verify_decomposition(ok.target, ok));
}

TEST_CASE("decomposition contract over the reduced enumeration") {
    auto forms = reduced3_enumeration(3);
    CHECK(forms.size() > 50);
    for (const auto& t : forms) {
        INFO(t.str());
        auto d = decompose3(t);
        CHECK(verify_decomposition(t, d));
        // trace certificate, doubled for exactness
        CHECK(trace_product(certificate3x(t), t) == 2 * lambda(t));
        auto tag = classify_case(t);
        if (t(0, 2) > 0) CHECK((tag == CaseTag::B1 || tag == CaseTag::B2 || tag == CaseTag::B4));
    }
}

TEST_CASE("genus 2 certificate identity") {
    for (Int t0 = 1; t0 <= 6; ++t0)
        for (Int t2 = t0; t2 <= 6; ++t2)
            for (Int t1 = 0; 2 * t1 <= t0; ++t1) {
                auto t = F({{t0, t1}, {t1, t2}});
                CHECK(trace_product(certificate2x(), t) == 2 * lambda(t));
                CHECK(verify_decomposition(t, decompose2(t)));
            }
}

TEST_CASE("irreducible forms") {
    CHECK(irreducible(EBasis3::form(7)));
    CHECK_FALSE(irreducible(EBasis2::form(1).scaled(2)));
    CHECK_FALSE(irreducible(F({{2, 1}, {1, 1}})));
    CHECK_THROWS_AS(irreducible(SymForm::zero(2)), std::invalid_argument);
}

TEST_CASE("padding a decomposition keeps it verified") {
    auto t = F({{2, 1}, {1, 3}});
    auto d = decompose2(t);
    SymForm padded(3);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) padded.set(i, j, t(i, j));
    Decomposition dp;
    dp.target = padded;
    for (const auto& p : d.parts) {
        auto col = p.column;
        col.push_back(0);
        dp.parts.push_back({p.mult, col});
    }
    CHECK(verify_decomposition(padded, dp));
}

TEST_CASE("E4 + E5 + E6 is strictly longer than three") {
    auto s = EBasis3::form(4) + EBasis3::form(5) + EBasis3::form(6);
    CHECK(lambda_oracle(s) > 3);
    CHECK(s == EBasis3::form(1) + EBasis3::form(2) + EBasis3::form(3) + EBasis3::form(7));
}

TEST_CASE("bounded q-optimality on the named examples") {
    Decomposition single;
    single.target = EBasis2::form(3);
    single.parts.push_back({1, {1, 1}});
    CHECK(check_q_optimal_bounded(single, 4, 1).no_counterexample);

    Decomposition twice;
    twice.target = EBasis2::form(1).scaled(2);
    twice.parts.push_back({2, {1, 0}});
    CHECK(check_q_optimal_bounded(twice, 2, 1).no_counterexample);

    auto d = decompose3(F({{2, 0, -1}, {0, 2, 1}, {-1, 1, 2}}));
    CHECK(check_q_optimal_bounded(d, 4, 1).no_counterexample);

    CHECK_THROWS_AS(check_q_optimal_bounded(single, 6, 1), std::invalid_argument);
}

TEST_CASE("optimality sweep on a seeded sample") {
    Rng rng(314);
    auto forms = reduced3_enumeration(3);
    for (int k = 0; k < 6; ++k) {
        const auto& t = forms[std::size_t(rng.uniform_int(0, Int(forms.size()) - 1))];
        INFO(t.str());
        auto d = decompose3(t);
        for (Int q : {Int(2), Int(4)}) CHECK(check_q_optimal_bounded(d, q, 1).no_counterexample);
    }
    for (int k = 0; k < 10; ++k) {
        Int t0 = rng.uniform_int(1, 6);
        Int t2 = rng.uniform_int(t0, 6);
        Int t1 = rng.uniform_int(0, t0 / 2);
        auto t = F({{t0, t1}, {t1, t2}});
        auto d = decompose2(t);
        for (Int q : {Int(2), Int(4)}) CHECK(check_q_optimal_bounded(d, q, 1).no_counterexample);
    }
}
