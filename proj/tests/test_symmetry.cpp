#include "support/helpers.hpp"
#include "tensorkit/tensors.hpp"

using namespace tktest;

namespace {
bool containsPerm(const std::vector<SignedPermutation>& v, std::vector<int> images,
                  bool negative) {
    for (auto& p : v)
        if (p.images == images && p.negative == negative) return true;
    return false;
}
}  // namespace

TEST_CASE("riemann generators close to the eight-element group") {
    Session s;
    addSymmetry("R_abcd", {2, 3, 0, 1});
    addAntiSymmetry("R_abcd", {1, 0, 2, 3});
    auto all = enumerateSymmetries("R_abcd");
    CHECK(all.size() == 8);
    CHECK(containsPerm(all, {0, 1, 2, 3}, false));
    CHECK(containsPerm(all, {2, 3, 0, 1}, false));
    CHECK(containsPerm(all, {1, 0, 2, 3}, true));
    CHECK(containsPerm(all, {2, 3, 1, 0}, true));
    CHECK(containsPerm(all, {3, 2, 0, 1}, true));
    CHECK(containsPerm(all, {3, 2, 1, 0}, false));
    CHECK(containsPerm(all, {0, 1, 3, 2}, true));
    CHECK(containsPerm(all, {1, 0, 3, 2}, false));

    auto basis = symmetryBasis("R_abcd");
    CHECK(basis.size() == 3);
    CHECK(containsPerm(basis, {0, 1, 2, 3}, false));
    CHECK(containsPerm(basis, {2, 3, 0, 1}, false));
    CHECK(containsPerm(basis, {1, 0, 2, 3}, true));
}

TEST_CASE("conflicting generator combination is rejected") {
    Session s;
    addSymmetry("R_abcd", {2, 3, 0, 1});
    addAntiSymmetry("R_abcd", {1, 0, 2, 3});
    CHECK_THROWS_AS(addAntiSymmetry("R_abcd", {3, 2, 1, 0}), Error);
    try {
        addAntiSymmetry("R_abcd", {3, 2, 1, 0});
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InconsistentGenerators);
    }
}

TEST_CASE("identity generator is a no-op") {
    Session s;
    addSymmetry("S_ab", {0, 1});
    CHECK(enumerateSymmetries("S_ab").size() == 1);
}

TEST_CASE("closure is a signed group") {
    Session s;
    addAntiSymmetry("e_abcd", {1, 0, 2, 3});
    addAntiSymmetry("e_abcd", {0, 2, 1, 3});
    addAntiSymmetry("e_abcd", {0, 1, 3, 2});
    auto all = enumerateSymmetries("e_abcd");
    CHECK(all.size() == 24);
    int odd = 0;
    for (auto& p : all) {
        CHECK(p.negative == permutationIsOdd(p.images));
        if (p.negative) ++odd;
        // closed under composition and inverse
        bool foundInv = false;
        for (auto& q : all)
            if (q == p.inverse()) foundInv = true;
        CHECK(foundInv);
    }
    CHECK(odd == 12);
}

TEST_CASE("setSymmetric and setAntiSymmetric sugar") {
    Session s;
    setAntiSymmetric("f_ABC");
    CHECK(enumerateSymmetries("f_ABC").size() == 6);
    setSymmetric("d_ABC");
    auto all = enumerateSymmetries("d_ABC");
    CHECK(all.size() == 6);
    for (auto& p : all) CHECK(!p.negative);
    setAntiSymmetric("w_ab");
    auto pair = enumerateSymmetries("w_ab");
    CHECK(pair.size() == 2);
    CHECK(containsPerm(pair, {1, 0}, true));
}

TEST_CASE("late symmetry definition is rejected once the name is used") {
    Session s;
    (void)T("R_ab*Q^ab");
    CHECK_THROWS_AS(setAntiSymmetric("R_ab"), Error);
    try {
        setAntiSymmetric("R_ab");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::LateSymmetryDefinition);
    }
}

TEST_CASE("declared symmetries reduce sums at parse") {
    Session s;
    addSymmetry("R_abcd", {2, 3, 0, 1});
    addAntiSymmetry("R_abcd", {1, 0, 2, 3});
    ExprPtr t = T("R^abcd*R_efdc*R^ef_ab + R_rc^df*R_ab^rc*R_fd^ba");
    CHECK(t->isZero());
}

TEST_CASE("findIndicesSymmetries discovers composite symmetries") {
    Session s;
    addAntiSymmetry("R_abc", {1, 0, 2});
    addSymmetry("A_ab", {1, 0});
    ExprPtr t = T("(R_abc*A_de + R_bde*A_ac)*A^ce + R_adb");
    auto syms = findIndicesSymmetries(parseIndicesSpec("_abd"), t);
    REQUIRE(syms.size() == 2);
    CHECK(syms[0].images == std::vector<int>({0, 1, 2}));
    CHECK(!syms[0].negative);
    CHECK(syms[1].images == std::vector<int>({2, 1, 0}));
    CHECK(syms[1].negative);
}

TEST_CASE("declared symmetric tensor exposes both permutations") {
    Session s;
    setSymmetric("S_ab");
    auto syms = findIndicesSymmetries(parseIndicesSpec("_ab"), T("S_ab"));
    CHECK(syms.size() == 2);
    for (auto& p : syms) CHECK(!p.negative);
    // no symmetries: only the identity
    auto one = findIndicesSymmetries(parseIndicesSpec("_ab"), T("A_a*B_b"));
    CHECK(one.size() == 1);
    CHECK(one[0].isIdentity());
}

TEST_CASE("self-mapping set is closed under composition") {
    Session s;
    addSymmetry("R_abcd", {2, 3, 0, 1});
    addAntiSymmetry("R_abcd", {1, 0, 2, 3});
    auto syms = findIndicesSymmetries(parseIndicesSpec("_abcd"), T("R_abcd"));
    CHECK(syms.size() == 8);
    for (auto& p : syms)
        for (auto& q : syms) {
            SignedPermutation c = compose(p, q);
            bool found = false;
            for (auto& r : syms)
                if (r == c) found = true;
            CHECK(found);
        }
}
