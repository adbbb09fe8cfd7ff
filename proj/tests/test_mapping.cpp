#include "support/helpers.hpp"
#include "tensorkit/tensors.hpp"

using namespace tktest;

namespace {

std::set<std::string> mappingSet(const ExprPtr& from, const ExprPtr& to) {
    std::set<std::string> out;
    enumerateMappings(from, to, [&](const Mapping& m) {
        out.insert(m.toString());
        return true;
    });
    return out;
}

}  // namespace

TEST_CASE("antisymmetric sum yields the two signed mappings") {
    Session s;
    setAntiSymmetric("R_ab");
    ExprPtr from = T("R_{ab}*A_c + R_{bc}*A_a");
    ExprPtr to = T("R_{ij}*A_k + R_{jk}*A_i");
    auto ms = mappingSet(from, to);
    REQUIRE(ms.size() == 2);
    CHECK(ms.count("+{_a -> _i, _b -> _j, _c -> _k}"));
    CHECK(ms.count("-{_a -> _k, _b -> _j, _c -> _i}"));
    // soundness: to == (m >> from)
    enumerateMappings(from, to, [&](const Mapping& m) {
        CHECK(canonEqual(applyMapping(m, from), to));
        return true;
    });
}

TEST_CASE("state-flipping mapping for metric indices") {
    Session s;
    ExprPtr from = T("A_m^n"), to = T("A^a_b");
    auto ms = mappingSet(from, to);
    REQUIRE(ms.size() == 1);
    CHECK(ms.count("+{_m -> ^a, ^n -> _b}"));
    enumerateMappings(from, to, [&](const Mapping& m) {
        CHECK(canonEqual(applyMapping(m, from), to));
        return true;
    });
}

TEST_CASE("scalar self-mapping is the empty identity") {
    Session s;
    auto ms = mappingSet(T("x"), T("x"));
    REQUIRE(ms.size() == 1);
    CHECK(ms.count("+{}"));
    CHECK(mappingSet(T("x"), T("y")).empty());
}

TEST_CASE("symmetrized sum maps onto itself in two ways") {
    Session s;
    ExprPtr t = T("Z_ij+Z_ji");
    auto ms = mappingSet(t, t);
    REQUIRE(ms.size() == 2);
    CHECK(ms.count("+{_i -> _i, _j -> _j}"));
    CHECK(ms.count("+{_i -> _j, _j -> _i}"));
}

TEST_CASE("signed mappings of an antisymmetric difference") {
    Session s;
    ExprPtr from = T("Z_ij-Z_ji");
    ExprPtr to = T("Z_ab-Z_ba");
    auto ms = mappingSet(from, to);
    REQUIRE(ms.size() == 2);
    CHECK(ms.count("+{_i -> _a, _j -> _b}"));
    CHECK(ms.count("-{_i -> _b, _j -> _a}"));
}

TEST_CASE("slot-symmetry mapping example") {
    Session s;
    addSymmetry("R_abcd", {0, 2, 1, 3});
    ExprPtr from = T("R_a^bi_l");
    ExprPtr to = T("R_aj^b^j");
    auto ms = mappingSet(from, to);
    REQUIRE(ms.size() == 2);
    CHECK(ms.count("+{_a -> _a, ^b -> ^b, ^i -> _j, _l -> ^j}"));
    CHECK(ms.count("+{_a -> _a, ^b -> _j, ^i -> ^b, _l -> ^j}"));
    enumerateMappings(from, to, [&](const Mapping& m) {
        CHECK(canonEqual(applyMapping(m, from), to));
        return true;
    });
}

TEST_CASE("composite mapping with contracted targets") {
    Session s;
    setAntiSymmetric("A_mn");
    setAntiSymmetric("F_mnab");
    ExprPtr from = T("(A_m^n - A_m^p*A_p^n)*F_nk^i_j + A_mn*A^n_j*A^i_k");
    ExprPtr to = T("-(A_d^a + A_p^a*A_d^p)*F^d_kq^i - A^a_b*A^b_q*A^i_k");
    auto ms = mappingSet(from, to);
    REQUIRE(ms.size() == 2);
    CHECK(ms.count("+{^i -> _k, _j -> _q, _k -> ^i, _m -> ^a}"));
    CHECK(ms.count("-{^i -> ^i, _j -> _q, _k -> _k, _m -> ^a}"));
    enumerateMappings(from, to, [&](const Mapping& m) {
        CHECK(canonEqual(applyMapping(m, from), to));
        return true;
    });
}

TEST_CASE("free indices may map onto dummy indices") {
    Session s;
    // scalar target: the two free indices must contract with each other
    ExprPtr from = T("A_x*B_y");
    ExprPtr to = T("A_c*B^c");
    auto ms = mappingSet(from, to);
    REQUIRE(ms.size() == 1);
    enumerateMappings(from, to, [&](const Mapping& m) {
        CHECK(canonEqual(applyMapping(m, from), to));
        return true;
    });
}

TEST_CASE("apply the empty mapping leaves the node unchanged") {
    Session s;
    ExprPtr t = T("A_m*B^m + C_k^k");
    Mapping empty;
    CHECK(canonEqual(applyMapping(empty, t), t));
}

TEST_CASE("lazy iterator produces mappings on demand") {
    Session s;
    setAntiSymmetric("R_ab");
    MappingIterator it(T("R_{ab}*A_c + R_{bc}*A_a"), T("R_{ij}*A_k + R_{jk}*A_i"));
    auto first = it.take();
    REQUIRE(first.has_value());
    auto second = it.take();
    REQUIRE(second.has_value());
    CHECK(!(*first == *second));
    CHECK(!it.take().has_value());
}

TEST_CASE("early abandoned iterator does not hang") {
    Session s;
    setSymmetric("S_abcd");
    auto it = std::make_unique<MappingIterator>(T("S_abcd"), T("S_mnpq"));
    auto first = it->take();
    REQUIRE(first.has_value());
    it.reset();  // destructor cancels the pending enumeration
    CHECK(true);
}

TEST_CASE("subproduct matching finds the pattern factor subset") {
    Session s;
    ExprPtr pattern = T("F_{xy}");
    std::vector<ExprPtr> pf = {pattern};
    ExprPtr target = T("F_{pt}*G^{mt}");
    int count = 0;
    enumerateSubProductMatches(pf, Complex(1), target, [&](const SubProductMatch& m) {
        ++count;
        CHECK(m.factorSubset.size() == 1);
        CHECK(m.coefficientRatio == Complex(1));
        return true;
    });
    CHECK(count >= 1);

    // no matching name: empty
    enumerateSubProductMatches({T("Q_{xy}")}, Complex(1), target, [&](const SubProductMatch&) {
        CHECK(false);
        return true;
    });
}

TEST_CASE("product self-annihilation by antisymmetry") {
    Session s;
    setAntiSymmetric("R_ab");
    setSymmetric("S_ab");
    CHECK(T("R_ab*S^ab")->isZero());
    CHECK(T("R_a^a")->isZero());
    CHECK_FALSE(T("R_ab*Q^ab")->isZero());
}
