#include <catch2/catch_amalgamated.hpp>

#include "percat/fpmodule.hpp"

using namespace percat;

namespace {

Field Q = Field::rationals();

Scalar s(long n) { return Scalar(Q, n); }

// Independent oracle: dimension at r by plain row reduction over mpq,
// sharing nothing with FPModule's level contexts.
std::size_t dim_oracle(const std::vector<FPGenerator>& gens,
                       const std::vector<FPRelation>& rels, const Level& r) {
    std::vector<std::size_t> act;
    for (std::size_t i = 0; i < gens.size(); ++i)
        if (!(r < gens[i].birth)) act.push_back(i);
    std::vector<std::vector<mpq_class>> rows;
    for (const auto& rel : rels) {
        if (r < rel.weight) continue;
        std::vector<mpq_class> v;
        for (auto i : act) v.push_back(rel.coeffs[i].value());
        rows.push_back(std::move(v));
    }
    std::size_t rank = 0;
    for (std::size_t col = 0; col < act.size(); ++col) {
        std::size_t sel = rank;
        while (sel < rows.size() && rows[sel][col] == 0) ++sel;
        if (sel == rows.size()) continue;
        std::swap(rows[sel], rows[rank]);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == rank || rows[i][col] == 0) continue;
            mpq_class c = rows[i][col] / rows[rank][col];
            for (std::size_t j = 0; j < act.size(); ++j)
                rows[i][j] -= c * rows[rank][j];
        }
        ++rank;
    }
    return act.size() - rank;
}

FPModule interval(const Level& b, const Level& d) {
    return FPModule(Q, {{"x", b}}, {{d, {Scalar::one(Q)}}});
}

FPModule two_gen_module() {
    // gens born 0 and 1, relation weight 3 with coefficients (1,1)
    return FPModule(Q, {{"a", Level(0)}, {"b", Level(1)}},
                    {{Level(3), {s(1), s(1)}}});
}

} // namespace

TEST_CASE("dim_at on the spec intervals") {
    FPModule m = interval(Level(0), Level(2));
    CHECK(m.dim_at(Level(1)) == 1);
    CHECK(m.dim_at(Level(-1)) == 0);
    CHECK(m.dim_at(Level(2)) == 0);

    FPModule t = two_gen_module();
    CHECK(t.dim_at(Level(2)) == 2);
    CHECK(t.dim_at(Level(4)) == 1);
    for (long n = -2; n <= 8; ++n) {
        Level r(n, 2);
        CHECK(t.dim_at(r) == dim_oracle(t.generators(), t.relations(), r));
    }
}

TEST_CASE("structure maps") {
    FPModule m = interval(Level(0), Level(2));
    Matrix id = m.structure_matrix(Level(1), Level(3, 2));
    REQUIRE(id.rows() == 1);
    REQUIRE(id.cols() == 1);
    CHECK(id.at(0, 0) == Scalar::one(Q));
    Matrix z = m.structure_matrix(Level(1), Level(2));
    CHECK(z.rows() == 0);

    FPModule t = two_gen_module();
    CHECK(rank(t.structure_matrix(Level(2), Level(4))) == 1);
    CHECK_THROWS(t.structure_matrix(Level(4), Level(2)));

    // composition law on grid triples with midpoints
    std::vector<Level> pts;
    for (const auto& g : t.grid()) pts.push_back(g);
    pts.push_back(Level(1, 2));
    pts.push_back(Level(5));
    std::sort(pts.begin(), pts.end());
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i; j < pts.size(); ++j)
            for (std::size_t k = j; k < pts.size(); ++k) {
                Matrix lhs = t.structure_matrix(pts[j], pts[k])
                                 .mul(t.structure_matrix(pts[i], pts[j]));
                Matrix rhs = t.structure_matrix(pts[i], pts[k]);
                REQUIRE(lhs.rows() == rhs.rows());
                REQUIRE(lhs.cols() == rhs.cols());
                for (std::size_t a = 0; a < lhs.rows(); ++a)
                    for (std::size_t b = 0; b < lhs.cols(); ++b)
                        CHECK(lhs.at(a, b) == rhs.at(a, b));
            }
}

TEST_CASE("barcode matches pointwise dimensions") {
    FPModule m = interval(Level(0), Level(2));
    auto bars = barcode(m);
    REQUIRE(bars.size() == 1);
    CHECK(bars[0].birth == Level(0));
    REQUIRE(bars[0].death.has_value());
    CHECK(*bars[0].death == Level(2));

    FPModule t = two_gen_module();
    auto tb = barcode(t);
    REQUIRE(tb.size() == 2);
    CHECK(tb[0].birth == Level(0));
    CHECK(!tb[0].death.has_value());
    CHECK(tb[1].birth == Level(1));
    CHECK(*tb[1].death == Level(3));

    CHECK(barcode(zero_module(Q)).empty());

    // pointwise count equals dim_at at grid points and midpoints
    auto check_counts = [](const FPModule& mod) {
        auto bars = barcode(mod);
        std::vector<Level> pts = mod.grid();
        std::size_t n = pts.size();
        for (std::size_t i = 0; i + 1 < n; ++i) {
            Level mid = pts[i] + pts[i + 1];
            pts.push_back(Level(mid.value() / 2));
        }
        if (!mod.grid().empty()) pts.push_back(mod.grid().back() + Level(1));
        for (const auto& r : pts) {
            std::size_t count = 0;
            for (const auto& b : bars)
                if (!(r < b.birth) && (!b.death || r < *b.death)) ++count;
            CHECK(count == mod.dim_at(r));
        }
    };
    check_counts(t);
    check_counts(m);

    // a module where reduction must chain pivots
    FPModule tricky(Q, {{"a", Level(0)}, {"b", Level(1)}},
                    {{Level(1), {s(1), s(-1)}}, {Level(2), {s(0), s(1)}}});
    check_counts(tricky);
    auto bars2 = barcode(tricky);
    REQUIRE(bars2.size() == 1);
    CHECK(bars2[0].birth == Level(0));
    CHECK(*bars2[0].death == Level(2));
}

TEST_CASE("shift_module translates per the shift functor convention") {
    FPModule m = interval(Level(0), Level(2));
    FPModule same = shift_module(m, Level(0));
    CHECK(same == m);
    FPModule down = shift_module(m, Level(-1));
    // dim_at(S^a M, r) = dim_at(M, r - a)
    for (long n = -4; n <= 4; ++n) {
        Level r(n, 2);
        CHECK(down.dim_at(r) == m.dim_at(r + Level(1)));
    }
    FPModule t = two_gen_module();
    CHECK(shift_module(shift_module(t, Level(3, 2)), Level(1, 2)) ==
          shift_module(t, Level(2)));
    CHECK(shift_module(shift_module(t, Level(5)), Level(-5)) == t);
}

TEST_CASE("direct sum and stable evaluation") {
    FPModule m = interval(Level(0), Level(2));
    FPModule z = zero_module(Q);
    FPModule sum = direct_sum(m, z);
    CHECK(sum.dim_at(Level(1)) == m.dim_at(Level(1)));

    CHECK(eval_stable(interval(Level(0), Level(2))).dim == 0);
    FPModule ray(Q, {{"x", Level(1)}}, {});
    CHECK(eval_stable(ray).dim == 1);
    FPModule t = two_gen_module();
    auto st = eval_stable(t);
    CHECK(st.dim == 1);
    CHECK(st.r_stab == Level(3));
}

TEST_CASE("morphism validity and composition") {
    FPModule a = interval(Level(0), Level(3));
    FPModule b = interval(Level(1), Level(3));
    // the canonical map [0,3) -> [1,3), x -> x at shift 0... x born 0 maps to
    // gen born 1, so it needs shift >= 1; the shift-0 nonzero map goes the
    // other way around only after a shift. Use shift 1 representation.
    PModMorphism f{a, b, Level(1), {{s(1)}}};
    CHECK(f.valid());

    // relation violation: [0,2) -> [0,3) via identity does not kill weight-2
    FPModule c = interval(Level(0), Level(2));
    PModMorphism bad{c, a, Level(0), {{s(1)}}};
    CHECK(!bad.valid());

    PModMorphism idm = identity_morphism(a);
    CHECK(idm.valid());
    PModMorphism comp = compose(f, idm);
    CHECK(comp.valid());
    CHECK(comp.shift == Level(1));
}

TEST_CASE("kernel of morphisms") {
    FPModule i02 = interval(Level(0), Level(2));

    // f = 0 on [0,2): kernel is the whole module
    auto k0 = kernel(zero_morphism(i02, i02));
    CHECK(k0.module.dim_at(Level(0)) == 1);
    CHECK(k0.module.dim_at(Level(1)) == 1);
    CHECK(k0.module.dim_at(Level(2)) == 0);
    CHECK(k0.inclusion.valid());

    // f = identity: kernel is zero
    auto kid = kernel(identity_morphism(i02));
    for (long n = -1; n <= 3; ++n) CHECK(kid.module.dim_at(Level(n)) == 0);

    // the nonzero morphism [0,3) -> [1,3) (as shift-0 into the shifted target):
    // here represented as the shift-1 map [0,3) -> [1,3); its kernel at level s
    // is ker([0,3)(s) -> [1,3)(s+1)) which is nonzero exactly on [2,3).
    FPModule a = interval(Level(0), Level(3));
    FPModule b = interval(Level(1), Level(3));
    PModMorphism f{a, b, Level(1), {{s(1)}}};
    auto kf = kernel(f);
    // pointwise nullity oracle
    for (long n = -1; n <= 8; ++n) {
        Level r(n, 2);
        std::size_t nullity = a.dim_at(r) - rank(f.matrix_at(r));
        CHECK(kf.module.dim_at(r) == nullity);
    }
    // inclusion composed with f is the zero morphism (modulo relations at the
    // level where each generator image lives)
    PModMorphism through = compose(f, kf.inclusion);
    for (std::size_t i = 0; i < through.images.size(); ++i) {
        Level lvl = through.src.generators()[i].birth + through.shift;
        CHECK(through.tgt.is_zero_at(through.images[i], lvl));
    }

    // spec's shift-0 picture of the same map: [0,3) -> [1,3) as modules with
    // the target realized as S^{-1}[1,3) = [0,2): kernel is [0,1)... check via
    // the equivalent formulation kernel([0,3) -> [0,2), identity coeffs).
    FPModule tgt = interval(Level(0), Level(2));
    PModMorphism g{a, tgt, Level(0), {{s(1)}}};
    REQUIRE(g.valid());
    auto kg = kernel(g);
    CHECK(kg.module.dim_at(Level(0)) == 0);
    CHECK(kg.module.dim_at(Level(2)) == 1);  // x dies in target at 2, kernel from 2 on
    CHECK(kg.module.dim_at(Level(3)) == 0);  // source dies at 3
}

TEST_CASE("kernel universal property") {
    // any g with f.g = 0 factors through the kernel
    FPModule a = interval(Level(0), Level(3));
    FPModule tgt = interval(Level(0), Level(2));
    PModMorphism f{a, tgt, Level(0), {{s(1)}}};
    auto kf = kernel(f);

    FPModule test = interval(Level(2), Level(3));
    PModMorphism g{test, a, Level(0), {{s(1)}}};
    REQUIRE(g.valid());
    PModMorphism fg = compose(f, g);
    REQUIRE(tgt.is_zero_at(fg.images[0], Level(2)));
    auto expr = kf.sub.express(g.images[0], Level(2));
    REQUIRE(expr.has_value());
    Vec back = kf.sub.realize(*expr);
    CHECK(a.equal_at(back, g.images[0], Level(2)));
}

TEST_CASE("subquotient builder on a homology-style example") {
    // ambient = free module on x (0), y (1); numerator = span(x) from level 1,
    // denominator = span(x) from level 2: presents the interval [1,2).
    FPModule amb(Q, {{"x", Level(0)}, {"y", Level(1)}}, {});
    auto num = [&](Level r) {
        std::vector<Vec> v;
        if (!(r < Level(1))) v.push_back({s(1), s(0)});
        return v;
    };
    auto den = [&](Level r) {
        std::vector<Vec> v;
        if (!(r < Level(2))) v.push_back({s(1), s(0)});
        return v;
    };
    auto sq = build_subquotient(amb, {Level(0), Level(1), Level(2), Level(3)}, num, den);
    CHECK(sq.module.dim_at(Level(0)) == 0);
    CHECK(sq.module.dim_at(Level(1)) == 1);
    CHECK(sq.module.dim_at(Level(3, 2)) == 1);
    CHECK(sq.module.dim_at(Level(2)) == 0);

    auto e = sq.express({s(1), s(0)}, Level(1));
    REQUIRE(e.has_value());
    CHECK(!vec_is_zero(*e));
    auto e2 = sq.express({s(1), s(0)}, Level(2));
    REQUIRE(e2.has_value()); // in the denominator now: expressible as 0
}
