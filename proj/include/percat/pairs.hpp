#pragma once

#include "percat/presheaf.hpp"

namespace percat {

// Object of the pairs semi-category: a base object with a weighted
// idempotent. The r-identity of the pair is the idempotent itself.
struct PairObject {
    int base;
    WIdem e; // on {base, 0}

    Level weight() const { return e.weight; }
};

inline PairObject pair_object(const PCatPresentation& p, int base, const Vec& elem,
                              const Level& r) {
    WIdem e{{base, Level(0)}, r, elem};
    if (!is_weighted_idempotent(p, e))
        throw std::invalid_argument("pair_object: element is not an r-idempotent");
    return PairObject{base, e};
}

// Yoneda-type pair (A, zeta_floor(A)).
inline PairObject yhat_pair(const PCatPresentation& p, const ZetaFamily& z, int a) {
    return pair_object(p, a, z.at(a).elem, z.at(a).floor);
}

// Hom module of the pairs semi-category: intertwiners modulo the
// identification d ~ 0 iff d.e_A = 0 and e_B.d = 0.
inline Subquotient pair_hom(const PCatPresentation& p, const PairObject& pa,
                            const PairObject& pb) {
    Field fd = p.field();
    int A = pa.base, B = pb.base;
    const FPModule& hom = p.hom(A, B);
    Level r = pa.weight(), s = pb.weight();

    auto conditions = [&, A, B, r, s](Level t, bool strict_zero) {
        // rows of the linear system an element of Hom(A,B)(t) must satisfy
        auto ct = hom.context(t);
        std::vector<Vec> out;
        const FPModule& tgt = hom;
        Matrix m(fd, 0, ct.basis.size());
        auto ctr = tgt.context(t + r);
        auto cts = tgt.context(t + s);
        std::size_t rows = ctr.basis.size() + cts.basis.size();
        Matrix cond(fd, rows, ct.basis.size());
        for (std::size_t j = 0; j < ct.basis.size(); ++j) {
            Vec unit = zero_vec(fd, ct.basis.size());
            unit[j] = Scalar::one(fd);
            Vec x = hom.from_quotient(unit, ct);
            Vec xe = p.compose_elements(A, A, B, x, pa.e.elem);
            Vec ex = p.compose_elements(A, B, B, pb.e.elem, x);
            Vec lhs1 = strict_zero ? xe : vec_sub(xe, x);
            Vec lhs2 = strict_zero ? ex : vec_sub(ex, x);
            Vec q1 = tgt.quotient_coords(lhs1, ctr);
            Vec q2 = tgt.quotient_coords(lhs2, cts);
            for (std::size_t i = 0; i < q1.size(); ++i) cond.at(i, j) = q1[i];
            for (std::size_t i = 0; i < q2.size(); ++i)
                cond.at(q1.size() + i, j) = q2[i];
        }
        for (const Vec& q : nullspace(cond)) out.push_back(hom.from_quotient(q, ct));
        return out;
    };

    auto numerator = [conditions](Level t) { return conditions(t, false); };
    auto denominator = [&p, pa, pb, A, B, r, s, fd, &hom](Level t) {
        // d with d.e_A = 0 and e_B.d = 0 (and d an intertwiner; the zero
        // conditions imply intertwining only on the nose, so intersect)
        auto ct = hom.context(t);
        auto ctr = hom.context(t + r);
        auto cts = hom.context(t + s);
        std::size_t rows = 2 * (ctr.basis.size() + cts.basis.size());
        Matrix cond(fd, rows, ct.basis.size());
        for (std::size_t j = 0; j < ct.basis.size(); ++j) {
            Vec unit = zero_vec(fd, ct.basis.size());
            unit[j] = Scalar::one(fd);
            Vec x = hom.from_quotient(unit, ct);
            Vec xe = p.compose_elements(A, A, B, x, pa.e.elem);
            Vec ex = p.compose_elements(A, B, B, pb.e.elem, x);
            Vec q1 = hom.quotient_coords(xe, ctr);
            Vec q2 = hom.quotient_coords(ex, cts);
            Vec q3 = hom.quotient_coords(vec_sub(xe, x), ctr);
            Vec q4 = hom.quotient_coords(vec_sub(ex, x), cts);
            std::size_t off = 0;
            for (std::size_t i = 0; i < q1.size(); ++i) cond.at(off + i, j) = q1[i];
            off += q1.size();
            for (std::size_t i = 0; i < q2.size(); ++i) cond.at(off + i, j) = q2[i];
            off += q2.size();
            for (std::size_t i = 0; i < q3.size(); ++i) cond.at(off + i, j) = q3[i];
            off += q3.size();
            for (std::size_t i = 0; i < q4.size(); ++i) cond.at(off + i, j) = q4[i];
        }
        std::vector<Vec> out;
        for (const Vec& q : nullspace(cond)) out.push_back(hom.from_quotient(q, ct));
        return out;
    };

    std::vector<Level> grid;
    for (const Level& c : hom.grid()) {
        grid.push_back(c);
        grid.push_back(c - r);
        grid.push_back(c - s);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return build_subquotient(hom, grid, numerator, denominator, "p");
}

// A realized pairs semi-category: a presentation whose objects are pairs,
// with witnesses tying each hom generator to a base-category element.
struct PairsCategory {
    PCatPresentation cat; // unital = false
    ZetaFamily zeta;
    std::vector<PairObject> objects;
    std::map<std::pair<int, int>, Subquotient> hom_data;

    // base element of a pairs-morphism (coefficients over cat hom gens)
    Vec realize(int i, int j, const Vec& coeffs) const {
        return hom_data.at({i, j}).realize(coeffs);
    }
};

inline PairsCategory pairs_category(const PCatPresentation& p, const ZetaFamily& z,
                                    std::vector<PairObject> objs,
                                    std::optional<Level> rmax = std::nullopt) {
    PairsCategory pc;
    pc.objects = std::move(objs);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < pc.objects.size(); ++i)
        names.push_back("(" + p.object_name(pc.objects[i].base) + ",e" +
                        std::to_string(i) + ")");
    pc.cat = PCatPresentation(p.field(), names, false);
    int n = (int)pc.objects.size();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Subquotient sq = pair_hom(p, pc.objects[i], pc.objects[j]);
            pc.cat.set_hom(i, j, sq.module);
            pc.hom_data.emplace(std::make_pair(i, j), std::move(sq));
        }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const auto& hij = pc.cat.hom(i, j);
                const auto& hjk = pc.cat.hom(j, k);
                for (std::size_t u = 0; u < hij.num_gens(); ++u)
                    for (std::size_t v = 0; v < hjk.num_gens(); ++v) {
                        Vec x = pc.hom_data.at({i, j}).witnesses[u];
                        Vec y = pc.hom_data.at({j, k}).witnesses[v];
                        Level lvl = hij.generators()[u].birth +
                                    hjk.generators()[v].birth;
                        Vec comp = p.compose_elements(
                            pc.objects[i].base, pc.objects[j].base,
                            pc.objects[k].base, y, x);
                        auto expr = pc.hom_data.at({i, k}).express(comp, lvl);
                        if (!expr)
                            throw std::logic_error(
                                "pairs composition failed to express");
                        pc.cat.set_composition(i, j, k, u, v, *expr);
                    }
            }
    pc.zeta = build_zeta_family(pc.cat, rmax);
    return pc;
}

// The canonical weak splitting of the pair idempotent e through (A, e)
// itself: both legs are e.
inline RetractTriple canonical_weak_splitting(const PCatPresentation& p,
                                              const PairsCategory& pc,
                                              int yhat_index, int pair_index) {
    const PairObject& P = pc.objects[pair_index];
    Level r = P.weight();
    auto expr_se = pc.hom_data.at({pair_index, yhat_index})
                       .express(P.e.elem, r);
    auto expr_rs = pc.hom_data.at({yhat_index, pair_index})
                       .express(P.e.elem, r);
    if (!expr_se || !expr_rs)
        throw std::logic_error("canonical weak splitting: e failed to express");
    RetractTriple t;
    t.base = {yhat_index, Level(0)};
    t.summand = {pair_index, r};
    t.weight = r + r;
    t.s = WMorphism{{pair_index, r}, {yhat_index, Level(0)}, *expr_se};
    t.r = WMorphism{{yhat_index, Level(0)}, {pair_index, -r}, *expr_rs};
    return t;
}

// Gamma on objects: the stable class of the pair idempotent in the base.
inline Vec gamma_object_class(const PCatPresentation& p, const PairObject& po) {
    WMorphism e = po.e.as_morphism();
    return p.limit_class(e);
}

// Gamma on localized pairs morphisms: normalize the roof and push the right
// leg down to a stable base class.
inline Vec gamma_hom_class(const PCatPresentation& p, const PairsCategory& pc,
                           const Localization& pairs_loc, const Roof& roof) {
    Roof n = pairs_loc.normalize(roof);
    int i = n.src().obj, j = n.tgt().obj;
    Vec base_elt = pc.realize(i, j, n.right.coeffs);
    WMorphism m{{pc.objects[i].base, n.right.weight()},
                {pc.objects[j].base, Level(0)},
                base_elt};
    return p.limit_class(m);
}

} // namespace percat
