#include <catch2/catch_amalgamated.hpp>

#include "percat/presentation.hpp"

using namespace percat;

namespace {
Field Q = Field::rationals();
}

TEST_CASE("one-object example validates; empty category validates") {
    for (Field f : {Field::rationals(), Field::prime(2)}) {
        PCatPresentation p = one_object_example(f);
        auto rep = p.validate();
        INFO((rep.violations.empty() ? std::string() : rep.violations.front()));
        CHECK(rep.ok);
    }
    PCatPresentation empty(Q, {}, true);
    CHECK(empty.validate().ok);
}

TEST_CASE("injected associativity violation is reported") {
    // one object, identity i plus u, v; u.(v.u) != (u.v).u with the broken table
    PCatPresentation p(Q, {"X"}, true);
    FPModule h(Q, {{"i", Level(0)}, {"u", Level(0)}, {"v", Level(0)}}, {});
    p.set_hom(0, 0, h);
    auto set = [&](std::size_t first, std::size_t then, Vec out) {
        p.set_composition(0, 0, 0, first, then, std::move(out));
    };
    Vec zero = zero_vec(Q, 3);
    for (std::size_t k = 0; k < 3; ++k) {
        set(k, 0, unit_vec(Q, 3, k)); // i is a two-sided unit
        set(0, k, unit_vec(Q, 3, k));
    }
    set(1, 1, zero);              // u.u = 0
    set(2, 2, zero);              // v.v = 0
    set(1, 2, unit_vec(Q, 3, 0)); // v after u = i
    set(2, 1, zero);              // u after v = 0
    p.set_identity(0, unit_vec(Q, 3, 0));
    auto rep = p.validate();
    CHECK(!rep.ok);
    bool found = false;
    for (const auto& v : rep.violations)
        if (v.find("associativity") != std::string::npos) found = true;
    CHECK(found);

    // unit-law violation is reported too
    PCatPresentation q = one_object_example(Q);
    q.set_composition(0, 0, 0, 1, 0, unit_vec(Q, 2, 0)); // a after e := a
    auto rep2 = q.validate();
    CHECK(!rep2.ok);
    bool unit_fail = false;
    for (const auto& v : rep2.violations)
        if (v.find("unit") != std::string::npos) unit_fail = true;
    CHECK(unit_fail);
}

TEST_CASE("composition in the one-object example") {
    PCatPresentation p = one_object_example(Q);
    ShiftedObject star{0, Level(0)};

    // id . f = f
    WMorphism e1{{0, Level(1)}, {0, Level(0)}, unit_vec(Q, 2, 1)};
    WMorphism id0{{0, Level(0)}, {0, Level(0)}, p.identity(0)};
    CHECK(p.equal(p.compose(id0, e1), e1));

    // e at weight 1 composed with e at weight 1 is e at weight 2
    WMorphism ee = p.compose_aligned(e1, e1);
    CHECK(ee.weight() == Level(2));
    WMorphism e2{{0, Level(2)}, {0, Level(0)}, unit_vec(Q, 2, 1)};
    CHECK(p.equal(WMorphism{{0, Level(2)}, {0, Level(0)}, ee.coeffs}, e2));

    // i_{r,r+s}(f) = f . eta_s up to the flattened identification
    WMorphism push = p.pushforward(e1, Level(3, 2));
    WMorphism eta_s = p.eta({0, Level(5, 2)}, Level(3, 2));
    WMorphism via_eta = p.compose(WMorphism{{0, Level(1)}, {0, Level(0)}, e1.coeffs}, eta_s);
    CHECK(via_eta.weight() == push.weight());
    CHECK(p.hom(0, 0).equal_at(via_eta.coeffs, push.coeffs, push.weight()));

    // endpoint mismatch rejected
    CHECK_THROWS(p.compose(e1, e1));
    (void)star;
}

TEST_CASE("eta laws") {
    PCatPresentation p = one_object_example(Q);
    ShiftedObject star{0, Level(0)};
    WMorphism eta0 = p.eta(star, Level(0));
    CHECK(eta0.weight() == Level(0));
    CHECK(p.equal(eta0, WMorphism{star, star, p.identity(0)}));
    CHECK_THROWS(p.eta(star, Level(-1)));

    // eta_r is the class of a at weight r, nonzero for all grid r
    for (long r = 0; r <= 6; ++r) CHECK(!p.is_zero(p.eta(star, Level(r))));

    // eta_1 . eta_2 = eta_3
    WMorphism a = p.eta(star, Level(2));
    WMorphism b = p.eta({0, Level(-2)}, Level(1));
    WMorphism c = p.compose(b, a);
    CHECK(p.equal(c, p.eta(star, Level(3))));

    // naturality eta_r . f = S^{-r} f . eta_r on generators
    for (std::size_t i = 0; i < 2; ++i) {
        WMorphism f = p.gen_morphism(0, 0, i);
        Level r(2);
        WMorphism lhs = p.compose(p.eta(f.tgt, r), f);
        WMorphism srf{shifted(f.src, -r), shifted(f.tgt, -r), f.coeffs};
        WMorphism rhs = p.compose(srf, p.eta(f.src, r));
        CHECK(p.equal(lhs, rhs));
    }
}

TEST_CASE("r-acyclicity") {
    PCatPresentation p = one_object_example(Q);
    for (long r = 0; r <= 5; ++r)
        CHECK(!p.is_r_acyclic({0, Level(0)}, Level(r)));

    // a category whose single object dies: one generator killed at weight 2
    PCatPresentation dying(Q, {"x"}, true);
    FPModule h(Q, {{"i", Level(0)}}, {{Level(2), {Scalar::one(Q)}}});
    dying.set_hom(0, 0, h);
    dying.set_composition(0, 0, 0, 0, 0, unit_vec(Q, 1, 0));
    dying.set_identity(0, unit_vec(Q, 1, 0));
    CHECK(dying.validate().ok);
    CHECK(!dying.is_r_acyclic({0, Level(0)}, Level(1)));
    CHECK(dying.is_r_acyclic({0, Level(0)}, Level(2)));
}

TEST_CASE("r-equivalence") {
    PCatPresentation p = one_object_example(Q);
    WMorphism a1{{0, Level(1)}, {0, Level(0)}, unit_vec(Q, 2, 0)};
    WMorphism e1{{0, Level(1)}, {0, Level(0)}, unit_vec(Q, 2, 1)};
    CHECK(p.r_equivalent(a1, a1, Level(0)));
    for (long r = 0; r <= 8; ++r) CHECK(!p.r_equivalent(a1, e1, Level(r)));

    // r-equivalent morphisms project to the same limit class
    WMorphism x = p.pushforward(a1, Level(2)); // a at weight 3
    WMorphism y{{0, Level(3)}, {0, Level(0)}, unit_vec(Q, 2, 0)};
    CHECK(p.r_equivalent(WMorphism{{0, Level(3)}, {0, Level(0)}, x.coeffs}, y, Level(0)));
    Vec cx = p.limit_class(x), cy = p.limit_class(y);
    REQUIRE(cx.size() == cy.size());
    for (std::size_t i = 0; i < cx.size(); ++i) CHECK(cx[i] == cy[i]);
}

TEST_CASE("hom_zero and hom_limit for the one-object example") {
    PCatPresentation p = one_object_example(Q);
    CHECK(p.hom_zero_dim(0, 0) == 1);
    CHECK(p.hom_stable(0, 0).dim == 2);

    // projection(e_1) and projection(a_0) are independent stable classes
    WMorphism a0{{0, Level(0)}, {0, Level(0)}, unit_vec(Q, 2, 0)};
    WMorphism e1{{0, Level(1)}, {0, Level(0)}, unit_vec(Q, 2, 1)};
    Vec pa = p.limit_class(a0), pe = p.limit_class(e1);
    Matrix m = Matrix::from_rows(Q, pa.size(), {pa, pe});
    CHECK(rank(m) == 2);

    // hom_limit of an interval hom module is 0
    PCatPresentation dying(Q, {"x"}, true);
    FPModule h(Q, {{"i", Level(0)}}, {{Level(2), {Scalar::one(Q)}}});
    dying.set_hom(0, 0, h);
    CHECK(dying.hom_stable(0, 0).dim == 0);

    // limit functor: projection(g . f) = projection(g) . projection(f)
    WMorphism prod = p.compose_aligned(e1, a0);
    Vec pp = p.limit_class(prod);
    // e.a = e, so the product class is pe
    REQUIRE(pp.size() == pe.size());
    for (std::size_t i = 0; i < pp.size(); ++i) CHECK(pp[i] == pe[i]);
}

TEST_CASE("lift_limit_class finds minimal representatives") {
    PCatPresentation p = one_object_example(Q);
    WMorphism e1{{0, Level(1)}, {0, Level(0)}, unit_vec(Q, 2, 1)};
    Vec cls = p.limit_class(e1);
    auto lift = p.lift_limit_class(0, 0, cls);
    REQUIRE(lift.has_value());
    CHECK(lift->first == Level(1)); // e is not visible at weight 0
    WMorphism back{{0, lift->first}, {0, Level(0)}, lift->second};
    Vec cls2 = p.limit_class(back);
    for (std::size_t i = 0; i < cls.size(); ++i) CHECK(cls[i] == cls2[i]);
}
