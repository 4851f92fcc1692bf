#include <catch2/catch_amalgamated.hpp>

#include "percat/linalg.hpp"

using namespace percat;

TEST_CASE("rational arithmetic is exact") {
    Field q = Field::rationals();
    Scalar a(q, mpq_class(1, 3)), b(q, mpq_class(2, 5));
    CHECK((a + b).to_string() == "11/15");
    CHECK((a * b).to_string() == "2/15");
    CHECK((a / b).to_string() == "5/6");
    CHECK((a - a).is_zero());
}

TEST_CASE("prime field arithmetic") {
    Field f5 = Field::prime(5);
    Scalar a(f5, 3), b(f5, 4);
    CHECK((a + b).to_string() == "2");
    CHECK((a * b).to_string() == "2");
    CHECK((a.inverse() * a) == Scalar::one(f5));
    CHECK((b / a * a) == b);
    Scalar neg = -Scalar::one(f5);
    CHECK(neg.to_string() == "4");
}

TEST_CASE("levels are exact rationals with total order") {
    Level a(1, 2), b(1, 3);
    CHECK(a > b);
    CHECK((a + b).to_string() == "5/6");
    CHECK((a - a) == Level(0));
    CHECK(level_max(a, b) == a);
}

TEST_CASE("rref, rank, solve, nullspace") {
    Field q = Field::rationals();
    Matrix m(q, 2, 3);
    m.at(0, 0) = Scalar(q, 1); m.at(0, 1) = Scalar(q, 2); m.at(0, 2) = Scalar(q, 3);
    m.at(1, 0) = Scalar(q, 2); m.at(1, 1) = Scalar(q, 4); m.at(1, 2) = Scalar(q, 6);
    CHECK(rank(m) == 1);
    auto ns = nullspace(m);
    REQUIRE(ns.size() == 2);
    for (const auto& v : ns) CHECK(vec_is_zero(m.apply(v)));

    Matrix a(q, 2, 2);
    a.at(0, 0) = Scalar(q, 1); a.at(0, 1) = Scalar(q, 1);
    a.at(1, 0) = Scalar(q, 0); a.at(1, 1) = Scalar(q, 1);
    Vec b{Scalar(q, 3), Scalar(q, 1)};
    auto x = solve(a, b);
    REQUIRE(x.has_value());
    CHECK((*x)[0] == Scalar(q, 2));
    CHECK((*x)[1] == Scalar(q, 1));

    Vec bad{Scalar(q, 1), Scalar(q, 1)};
    Matrix zero(q, 2, 1);
    CHECK(!solve(zero, bad).has_value());

    // 0xN and Nx0 shapes
    Matrix e1(q, 0, 3), e2(q, 3, 0);
    CHECK(rank(e1) == 0);
    CHECK(nullspace(e1).size() == 3);
    CHECK(nullspace(e2).empty());
}

TEST_CASE("rref reduce and express") {
    Field f2 = Field::prime(2);
    Matrix m(f2, 2, 3);
    m.at(0, 0) = Scalar(f2, 1); m.at(0, 2) = Scalar(f2, 1);
    m.at(1, 1) = Scalar(f2, 1);
    Rref r = rref(m);
    Vec v{Scalar(f2, 0), Scalar(f2, 0), Scalar(f2, 1)};
    CHECK(!r.contains(v));
    Vec w{Scalar(f2, 1), Scalar(f2, 1), Scalar(f2, 0)};
    Vec red = r.reduce(w);
    CHECK(red[0].is_zero());
    CHECK(red[1].is_zero());
    CHECK(!red[2].is_zero());
    Vec in_span{Scalar(f2, 1), Scalar(f2, 0), Scalar(f2, 1)};
    auto c = r.express(in_span);
    REQUIRE(c.has_value());
}
