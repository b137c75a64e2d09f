#include "doctest.h"

#include "natpatl/omega.hpp"

#include <random>
#include <sstream>

using namespace natpatl;

namespace {

using Word = std::vector<Letter>;

LtlPtr random_ltl(std::mt19937_64& rng, int size, int num_atoms) {
    auto pick = [&](int n) { return static_cast<int>(rng() % n); };
    if (size <= 1) {
        switch (pick(4)) {
            case 0: return Ltl::tt();
            case 1: return Ltl::ff();
            case 2: return Ltl::atom_(pick(num_atoms));
            default: return Ltl::natom(pick(num_atoms));
        }
    }
    switch (pick(5)) {
        case 0: return Ltl::next(random_ltl(rng, size - 1, num_atoms));
        case 1: {
            int l = 1 + pick(size - 1);
            return Ltl::and_(random_ltl(rng, l, num_atoms),
                             random_ltl(rng, size - 1 - l, num_atoms));
        }
        case 2: {
            int l = 1 + pick(size - 1);
            return Ltl::or_(random_ltl(rng, l, num_atoms),
                            random_ltl(rng, size - 1 - l, num_atoms));
        }
        case 3: {
            int l = 1 + pick(size - 1);
            return Ltl::until(random_ltl(rng, l, num_atoms),
                              random_ltl(rng, size - 1 - l, num_atoms));
        }
        default: {
            int l = 1 + pick(size - 1);
            return Ltl::release(random_ltl(rng, l, num_atoms),
                                random_ltl(rng, size - 1 - l, num_atoms));
        }
    }
}

std::pair<Word, Word> random_lasso(std::mt19937_64& rng, int num_atoms) {
    int p = static_cast<int>(rng() % 4);
    int q = 1 + static_cast<int>(rng() % 3);
    Word prefix(p), period(q);
    for (auto& a : prefix) a = static_cast<Letter>(rng() % (1u << num_atoms));
    for (auto& a : period) a = static_cast<Letter>(rng() % (1u << num_atoms));
    return {prefix, period};
}

}  // namespace

TEST_CASE("negation stays in negation normal form and is an involution") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        LtlPtr f = random_ltl(rng, 6, 2);
        LtlPtr nn = Ltl::negate(Ltl::negate(f));
        CHECK(print_ltl(nn) == print_ltl(f));
    }
    CHECK(print_ltl(Ltl::negate(Ltl::until(Ltl::atom_(0), Ltl::atom_(1)))) ==
          "(!a0 R !a1)");
    CHECK(print_ltl(Ltl::eventually(Ltl::atom_(0))) == "(true U a0)");
    CHECK(ltl_size(Ltl::always(Ltl::atom_(1))) == 3);
}

TEST_CASE("lasso semantics on hand-checked words") {
    LtlPtr a = Ltl::atom_(0), b = Ltl::atom_(1);
    // Letters: bit 0 = a, bit 1 = b.
    CHECK(ltl_holds_lasso(Ltl::always(a), {}, {1}));
    CHECK_FALSE(ltl_holds_lasso(Ltl::always(a), {1}, {0}));
    CHECK(ltl_holds_lasso(Ltl::eventually(b), {0, 0}, {1, 2}));
    CHECK(ltl_holds_lasso(Ltl::eventually(b), {2}, {1}));
    CHECK(ltl_holds_lasso(Ltl::until(a, b), {1, 1}, {3}));
    CHECK_FALSE(ltl_holds_lasso(Ltl::until(a, b), {1, 0}, {3}));
    CHECK(ltl_holds_lasso(Ltl::next(Ltl::next(b)), {0, 0}, {2}));
    // G(a -> F b) on (a, no b) looping through a b-state.
    LtlPtr resp = Ltl::always(Ltl::or_(Ltl::natom(0), Ltl::eventually(b)));
    CHECK(ltl_holds_lasso(resp, {1, 1}, {1, 3}));
    CHECK_FALSE(ltl_holds_lasso(resp, {3}, {1}));
    CHECK_THROWS_AS(ltl_holds_lasso(a, {1}, {}), Error);
}

TEST_CASE("buchi automata agree with direct semantics on fixed formulas") {
    LtlPtr a = Ltl::atom_(0), b = Ltl::atom_(1);
    std::vector<LtlPtr> fs = {
        Ltl::always(a),
        Ltl::eventually(b),
        Ltl::until(a, b),
        Ltl::release(a, b),
        Ltl::always(Ltl::or_(Ltl::natom(0), Ltl::eventually(b))),
        Ltl::next(Ltl::until(a, Ltl::and_(a, b))),
        Ltl::always(Ltl::eventually(a)),
        Ltl::eventually(Ltl::always(b)),
    };
    std::mt19937_64 rng(7);
    for (const LtlPtr& f : fs) {
        Nba nba = ltl_to_nba(f, 2);
        for (int i = 0; i < 300; ++i) {
            auto [prefix, period] = random_lasso(rng, 2);
            bool want = ltl_holds_lasso(f, prefix, period);
            CHECK_MESSAGE(nba_accepts_lasso(nba, prefix, period) == want,
                          print_ltl(f));
        }
    }
}

TEST_CASE("determinization preserves the language on random formulas") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 25; ++i) {
        LtlPtr f = random_ltl(rng, 6, 2);
        Nba nba = ltl_to_nba(f, 2);
        Dra dra = nba_to_dra(nba);
        for (int j = 0; j < 200; ++j) {
            auto [prefix, period] = random_lasso(rng, 2);
            bool want = ltl_holds_lasso(f, prefix, period);
            CHECK_MESSAGE(nba_accepts_lasso(nba, prefix, period) == want,
                          print_ltl(f));
            CHECK_MESSAGE(dra_accepts_lasso(dra, prefix, period) == want,
                          print_ltl(f));
        }
    }
}

TEST_CASE("determinization budget is enforced") {
    LtlPtr f = Ltl::always(Ltl::eventually(Ltl::atom_(0)));
    Nba nba = ltl_to_nba(f, 1);
    CHECK_THROWS_AS(nba_to_dra(nba, 1), StateBudgetExceededError);
}

TEST_CASE("dra export dumps a complete transition table") {
    Dra dra = nba_to_dra(ltl_to_nba(Ltl::eventually(Ltl::atom_(0)), 1));
    std::ostringstream out;
    dra_export(dra, out);
    std::string text = out.str();
    CHECK(text.find("alphabet 2") != std::string::npos);
    CHECK(text.find("pair 0") != std::string::npos);
    CHECK(text.find("trans 0 0 ") != std::string::npos);
}

namespace {

SimpleMdp random_simple_mdp(std::mt19937_64& rng, int n) {
    SimpleMdp m(n);
    for (int s = 0; s < n; ++s) {
        int nc = 1 + static_cast<int>(rng() % 2);
        for (int c = 0; c < nc; ++c) {
            int t1 = static_cast<int>(rng() % n), t2 = static_cast<int>(rng() % n);
            SimpleRow row;
            if (t1 == t2 || rng() % 3 == 0) {
                row.emplace_back(t1, 1);
            } else {
                if (t1 > t2) std::swap(t1, t2);
                row.emplace_back(t1, Rational(1, 2));
                row.emplace_back(t2, Rational(1, 2));
            }
            m[s].push_back(std::move(row));
        }
    }
    return m;
}

}  // namespace

TEST_CASE("maximal end components on small graphs") {
    // 0 -> 1 -> 0 forms one component; 2 is absorbing; 3 only leaves.
    SimpleMdp m(4);
    m[0].push_back({{1, 1}});
    m[1].push_back({{0, 1}});
    m[1].push_back({{2, 1}});
    m[2].push_back({{2, 1}});
    m[3].push_back({{2, 1}});
    auto mecs = max_end_components(m, std::vector<bool>(4, true));
    REQUIRE(mecs.size() == 2);
    std::set<std::vector<int>> got(mecs.begin(), mecs.end());
    CHECK(got.count({0, 1}));
    CHECK(got.count({2}));
}

TEST_CASE("omega values match the reachability solver on F and G objectives") {
    std::mt19937_64 rng(41);
    for (int iter = 0; iter < 40; ++iter) {
        int n = 2 + static_cast<int>(rng() % 4);
        SimpleMdp m = random_simple_mdp(rng, n);
        std::vector<bool> target(n, false);
        for (int s = 0; s < n; ++s) target[s] = rng() % 3 == 0;
        std::vector<Letter> letters(n);
        for (int s = 0; s < n; ++s) letters[s] = target[s] ? 1 : 0;

        UntilObjective reach{std::vector<bool>(n, true), target};
        // F a: eventual reachability. Absorbing once reached does not matter
        // for F, so the plain until optimum is the reference.
        Dra dra_f = nba_to_dra(ltl_to_nba(Ltl::eventually(Ltl::atom_(0)), 1));
        for (Optimize mode : {Optimize::Max, Optimize::Min}) {
            Rational want = solve_mdp(m, reach, mode)[0];
            CHECK(mdp_omega_simple(m, dra_f, letters, 0, mode).value() == want);
        }
        // G a: invariance inside the target set.
        Dra dra_g = nba_to_dra(ltl_to_nba(Ltl::always(Ltl::atom_(0)), 1));
        UntilObjective escape{std::vector<bool>(n, true), std::vector<bool>(n)};
        for (int s = 0; s < n; ++s) escape.target[s] = !target[s];
        Rational g_max = 1 - solve_mdp(m, escape, Optimize::Min)[0];
        Rational g_min = 1 - solve_mdp(m, escape, Optimize::Max)[0];
        CHECK(mdp_omega_simple(m, dra_g, letters, 0, Optimize::Max).value() == g_max);
        CHECK(mdp_omega_simple(m, dra_g, letters, 0, Optimize::Min).value() == g_min);
    }
}

TEST_CASE("omega complement identity on random formulas and models") {
    std::mt19937_64 rng(59);
    for (int iter = 0; iter < 15; ++iter) {
        int n = 2 + static_cast<int>(rng() % 3);
        SimpleMdp m = random_simple_mdp(rng, n);
        std::vector<Letter> letters(n);
        for (int s = 0; s < n; ++s) letters[s] = static_cast<Letter>(rng() % 4);
        LtlPtr f = random_ltl(rng, 5, 2);
        Dra pos = nba_to_dra(ltl_to_nba(f, 2));
        Dra neg = nba_to_dra(ltl_to_nba(Ltl::negate(f), 2));
        Rational mx = mdp_omega_simple(m, pos, letters, 0, Optimize::Max).value();
        Rational mn = mdp_omega_simple(m, neg, letters, 0, Optimize::Min).value();
        CHECK_MESSAGE(mx == 1 - mn, print_ltl(f));
    }
}

TEST_CASE("trivial objectives give probability one in both modes") {
    SimpleMdp m(2);
    m[0].push_back({{0, Rational(1, 2)}, {1, Rational(1, 2)}});
    m[1].push_back({{1, 1}});
    Dra dra = nba_to_dra(ltl_to_nba(Ltl::tt(), 1));
    std::vector<Letter> letters{0, 1};
    CHECK(mdp_omega_simple(m, dra, letters, 0, Optimize::Max).value() == 1);
    CHECK(mdp_omega_simple(m, dra, letters, 0, Optimize::Min).value() == 1);
    Dra none = nba_to_dra(ltl_to_nba(Ltl::ff(), 1));
    CHECK(mdp_omega_simple(m, none, letters, 0, Optimize::Max).value() == 0);
    CHECK(mdp_omega_simple(m, none, letters, 0, Optimize::Min).value() == 0);
}
