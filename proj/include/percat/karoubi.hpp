#pragma once

#include "percat/pairs.hpp"

namespace percat {

// Stable idempotents of End(a) in the limit category. Over a prime field the
// whole algebra is enumerated (up to cap); over the rationals the search is
// generated from the obvious candidates and closed under complement and
// product, which is complete for the fixture algebras but not in general.
inline std::vector<Vec> discover_stable_idempotents(const PCatPresentation& p, int a,
                                                    std::size_t cap = 1u << 14) {
    Field fd = p.field();
    StableSpace st = p.hom_stable(a, a);
    std::size_t d = st.dim;
    std::vector<Vec> found;
    auto push_unique = [&](const Vec& v) {
        for (const auto& u : found)
            if (stable_class_equal(u, v)) return;
        found.push_back(v);
    };
    push_unique(zero_vec(fd, d));
    if (fd.is_prime_field()) {
        double total = 1;
        for (std::size_t i = 0; i < d; ++i) total *= (double)fd.p;
        if (total <= (double)cap) {
            std::vector<unsigned long> counter(d, 0);
            while (true) {
                Vec v = zero_vec(fd, d);
                for (std::size_t i = 0; i < d; ++i) v[i] = Scalar(fd, (long)counter[i]);
                if (is_limit_idempotent(p, a, v)) push_unique(v);
                std::size_t i = 0;
                while (i < d && ++counter[i] == fd.p) counter[i++] = 0;
                if (i == d) break;
            }
            return found;
        }
    }
    // generated search
    std::vector<Vec> seeds;
    if (p.unital()) {
        WMorphism id{{a, Level(0)}, {a, Level(0)}, p.identity(a)};
        seeds.push_back(p.limit_class(id));
    }
    for (std::size_t i = 0; i < d; ++i) {
        Vec v = zero_vec(fd, d);
        v[i] = Scalar::one(fd);
        seeds.push_back(v);
    }
    for (const auto& s : seeds)
        if (is_limit_idempotent(p, a, s)) push_unique(s);
    std::optional<Vec> one;
    if (p.unital()) {
        WMorphism id{{a, Level(0)}, {a, Level(0)}, p.identity(a)};
        one = p.limit_class(id);
    }
    bool grew = true;
    std::size_t rounds = 0;
    while (grew && ++rounds < 6 && found.size() < 64) {
        grew = false;
        std::vector<Vec> cur = found;
        for (const auto& e : cur) {
            if (one) {
                Vec c = vec_sub(*one, e);
                if (is_limit_idempotent(p, a, c)) {
                    std::size_t before = found.size();
                    push_unique(c);
                    grew |= found.size() != before;
                }
            }
            for (const auto& f : cur) {
                Vec prod = stable_compose(p, a, e, f);
                if (is_limit_idempotent(p, a, prod)) {
                    std::size_t before = found.size();
                    push_unique(prod);
                    grew |= found.size() != before;
                }
                Vec sum = vec_add(e, f);
                if (is_limit_idempotent(p, a, sum)) {
                    std::size_t before = found.size();
                    push_unique(sum);
                    grew |= found.size() != before;
                }
            }
        }
    }
    std::sort(found.begin(), found.end(), [](const Vec& x, const Vec& y) {
        for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
            if (x[i] == y[i]) continue;
            return cmp(x[i].value(), y[i].value()) < 0;
        }
        return x.size() < y.size();
    });
    return found;
}

// dim of the corner space e'.Hom_inf(A,B).e = {x : e'.x.e = x}.
inline std::size_t karoubi_hom_dim(const PCatPresentation& p, int a, int b,
                                   const Vec& ea, const Vec& eb) {
    Field fd = p.field();
    const FPModule& hab = p.hom(a, b);
    const FPModule& haa = p.hom(a, a);
    const FPModule& hbb = p.hom(b, b);
    Level st = level_max(level_max(hab.r_stab(), haa.r_stab()), hbb.r_stab());
    auto cs = hab.context(st);
    auto ca = haa.context(level_max(haa.r_stab(), st));
    auto cb = hbb.context(level_max(hbb.r_stab(), st));
    Vec ea_elt = haa.from_quotient(ea, haa.context(haa.r_stab()));
    Vec eb_elt = hbb.from_quotient(eb, hbb.context(hbb.r_stab()));
    std::size_t d = cs.basis.size();
    Matrix m(fd, d, d);
    for (std::size_t j = 0; j < d; ++j) {
        Vec unit = zero_vec(fd, d);
        unit[j] = Scalar::one(fd);
        Vec x = hab.from_quotient(unit, cs);
        Vec exe = p.compose_elements(a, b, b, eb_elt,
                                     p.compose_elements(a, a, b, x, ea_elt));
        Level lvl = st + haa.r_stab() + hbb.r_stab();
        Vec q = hab.quotient_coords(exe, hab.context(level_max(lvl, st)));
        for (std::size_t i = 0; i < d; ++i) m.at(i, j) = q[i] - (i == j ? Scalar::one(fd) : Scalar::zero(fd));
    }
    return d - rank(m); // nullity of (pi - id)
}

struct EquivalenceReport {
    bool ok = true;
    std::vector<std::string> failures;
    std::vector<std::string> notes;
    void fail(const std::string& s) {
        ok = false;
        failures.push_back(s);
    }
};

// Instance-wise verification that Gamma : W^{-1} Split^(C^S) -> Split(W^{-1}C^S)
// is an equivalence on the pairs built from discovered idempotents.
inline EquivalenceReport verify_gamma_equivalence(const PCatPresentation& p,
                                                  const ZetaFamily& z,
                                                  std::optional<Level> rmax = std::nullopt) {
    EquivalenceReport rep;
    int n = p.num_objects();

    // discovered idempotents and their weighted representatives
    std::vector<PairObject> objs;
    std::vector<std::pair<int, Vec>> targets; // (base, stable class)
    std::vector<int> yhat_index(n, -1);
    for (int a = 0; a < n; ++a) {
        yhat_index[a] = (int)objs.size();
        objs.push_back(yhat_pair(p, z, a));
        for (const Vec& cls : discover_stable_idempotents(p, a)) {
            MinRepResult mr = min_representation_weight(p, a, cls);
            targets.push_back({a, cls});
            // skip duplicates of the yhat pair (identity class)
            bool is_identity = stable_class_equal(
                cls, gamma_object_class(p, objs[yhat_index[a]]));
            if (is_identity) continue;
            objs.push_back(PairObject{a, mr.representative});
        }
    }
    PairsCategory pc = pairs_category(p, z, objs, rmax);
    Localization ploc(pc.cat, pc.zeta, rmax);

    // essential surjectivity: every discovered class is hit by Gamma
    for (const auto& [a, cls] : targets) {
        bool hit = false;
        for (const auto& po : pc.objects)
            if (po.base == a && stable_class_equal(gamma_object_class(p, po), cls))
                hit = true;
        if (!hit) rep.fail("gamma: discovered idempotent not hit on " + p.object_name(a));
    }

    // fullness + faithfulness as stable dimension equalities
    for (std::size_t i = 0; i < pc.objects.size(); ++i)
        for (std::size_t j = 0; j < pc.objects.size(); ++j) {
            std::size_t lhs = pc.cat.hom_stable((int)i, (int)j).dim;
            Vec ea = gamma_object_class(p, pc.objects[i]);
            Vec eb = gamma_object_class(p, pc.objects[j]);
            std::size_t rhs = karoubi_hom_dim(p, pc.objects[i].base,
                                              pc.objects[j].base, ea, eb);
            if (lhs != rhs)
                rep.fail("gamma: hom dimension mismatch at pair (" +
                         pc.cat.object_name((int)i) + ", " +
                         pc.cat.object_name((int)j) + "): " + std::to_string(lhs) +
                         " vs " + std::to_string(rhs));
        }

    // functoriality on sample roofs: Gamma(R2.R1) = Gamma(R2).Gamma(R1)
    std::size_t samples = 0;
    for (std::size_t i = 0; i < pc.objects.size() && samples < 12; ++i)
        for (std::size_t j = 0; j < pc.objects.size() && samples < 12; ++j)
            for (std::size_t k = 0; k < pc.objects.size() && samples < 12; ++k) {
                auto h1 = ploc.localized_hom((int)i, (int)j);
                auto h2 = ploc.localized_hom((int)j, (int)k);
                if (h1.basis.empty() || h2.basis.empty()) continue;
                const Roof& r1 = h1.basis.front();
                const Roof& r2 = h2.basis.front();
                Roof comp = ploc.roof_compose(r2, r1);
                Vec g1 = gamma_hom_class(p, pc, ploc, r1);
                Vec g2 = gamma_hom_class(p, pc, ploc, r2);
                Vec gc = gamma_hom_class(p, pc, ploc, comp);
                // compose the base classes
                int A = pc.objects[i].base, B = pc.objects[j].base,
                    C = pc.objects[k].base;
                const FPModule& hab = p.hom(A, B);
                const FPModule& hbc = p.hom(B, C);
                Vec x = hab.from_quotient(g1, hab.context(hab.r_stab()));
                Vec y = hbc.from_quotient(g2, hbc.context(hbc.r_stab()));
                Vec prod = p.compose_elements(A, B, C, y, x);
                WMorphism pm{{A, hab.r_stab() + hbc.r_stab()}, {C, Level(0)}, prod};
                Vec want = p.limit_class(pm);
                if (!stable_class_equal(gc, want))
                    rep.fail("gamma: functoriality mismatch on sample roofs");
                ++samples;
            }
    rep.notes.push_back("pairs objects: " + std::to_string(pc.objects.size()));
    return rep;
}

// ---------------------------------------------------------------------------
// The Z~ equivalence with the presheaf completion

struct ZtildeReport {
    EquivalenceReport base;
    std::vector<std::pair<int, Vec>> idempotents; // (object, stable class)
    std::vector<SplitObject> images;
};

inline ZtildeReport verify_ztilde(const PCatPresentation& p, const ZetaFamily& z) {
    ZtildeReport zr;
    EquivalenceReport& rep = zr.base;
    int n = p.num_objects();

    for (int a = 0; a < n; ++a)
        for (const Vec& cls : discover_stable_idempotents(p, a)) {
            MinRepResult mr = min_representation_weight(p, a, cls);
            zr.idempotents.push_back({a, cls});
            SplitObject so = split_by_kernel(p, mr.representative);
            if (!verify_split_object(p, so))
                rep.fail("ztilde: kernel splitting equations failed on " +
                         p.object_name(a));
            if (!verify_presheaf(p, so.presheaf))
                rep.fail("ztilde: kernel presheaf not functorial on " +
                         p.object_name(a));
            zr.images.push_back(std::move(so));
        }

    // fullness + faithfulness: stable Nat dims match the Karoubi corner dims
    for (std::size_t i = 0; i < zr.images.size(); ++i)
        for (std::size_t j = 0; j < zr.images.size(); ++j) {
            NatModule nm = nat_module(p, zr.images[i].presheaf, zr.images[j].presheaf);
            std::size_t lhs = eval_stable(nm.sq.module).dim;
            std::size_t rhs =
                karoubi_hom_dim(p, zr.images[i].base, zr.images[j].base,
                                zr.idempotents[i].second, zr.idempotents[j].second);
            if (lhs != rhs)
                rep.fail("ztilde: hom dimension mismatch between images " +
                         std::to_string(i) + " and " + std::to_string(j) + ": " +
                         std::to_string(lhs) + " vs " + std::to_string(rhs));
        }
    return zr;
}

// Z~ on morphisms: x a stable class from (A,e) to (B,e'); the image is
// retr_G . Y(x-lift) . incl_F as a stable transformation class.
inline NatTransf ztilde_hom(const PCatPresentation& p, const SplitObject& from,
                            const SplitObject& to, const Vec& cls) {
    auto lift = p.lift_limit_class(from.base, to.base, cls);
    if (!lift) throw std::invalid_argument("ztilde_hom: class does not lift");
    PPresheaf ya = yoneda_presheaf(p, from.base);
    PPresheaf yb = yoneda_presheaf(p, to.base);
    NatTransf yx = yoneda_nat(p, ya, yb, from.base, to.base, lift->second, lift->first);
    return compose_nat(to.retr, compose_nat(yx, from.incl));
}

// ---------------------------------------------------------------------------
// Weight-zero subcategory

inline bool is_weight_zero_split(const SplitObject& so) {
    return so.idem.weight == Level(0);
}

struct WeightZeroReport {
    bool hypothesis_holds = true;
    std::optional<std::pair<int, Vec>> witness; // idempotent with min weight > 0
    EquivalenceReport equivalence;              // only run when hypothesis holds
};

inline WeightZeroReport verify_weight_zero_theorem(const PCatPresentation& p,
                                                   const ZetaFamily& z) {
    WeightZeroReport out;
    int n = p.num_objects();
    std::vector<std::pair<int, Vec>> idems;
    for (int a = 0; a < n; ++a)
        for (const Vec& cls : discover_stable_idempotents(p, a)) {
            MinRepResult mr = min_representation_weight(p, a, cls);
            idems.push_back({a, cls});
            if (mr.lower > Level(0) || mr.upper > Level(0)) {
                out.hypothesis_holds = false;
                if (!out.witness) out.witness = {a, cls};
            }
        }
    if (!out.hypothesis_holds) return out;

    // restricted equivalence: weight-zero kernel splittings, zero-level and
    // stable hom dimensions both match the Karoubi corners
    std::vector<SplitObject> images;
    for (const auto& [a, cls] : idems) {
        MinRepResult mr = min_representation_weight(p, a, cls);
        images.push_back(split_by_kernel(p, mr.representative));
        if (!verify_split_object(p, images.back()))
            out.equivalence.fail("weight-zero splitting equations failed");
    }
    for (std::size_t i = 0; i < images.size(); ++i)
        for (std::size_t j = 0; j < images.size(); ++j) {
            NatModule nm = nat_module(p, images[i].presheaf, images[j].presheaf);
            std::size_t stable_lhs = eval_stable(nm.sq.module).dim;
            std::size_t stable_rhs = karoubi_hom_dim(p, images[i].base, images[j].base,
                                                     idems[i].second, idems[j].second);
            if (stable_lhs != stable_rhs)
                out.equivalence.fail("weight-zero stable hom mismatch");
            // zero-level homs of Split^0_P match the Karoubi completion of C_0:
            // the corner of Hom(A,B)(0) cut by the weight-zero idempotents
            std::size_t z_lhs = nm.sq.module.dim_at(Level(0));
            Field fd = p.field();
            const FPModule& hab = p.hom(images[i].base, images[j].base);
            auto c0 = hab.context(Level(0));
            std::size_t d = c0.basis.size();
            Matrix m(fd, d, d);
            const Vec& ea = images[i].idem.elem;
            const Vec& eb = images[j].idem.elem;
            for (std::size_t col = 0; col < d; ++col) {
                Vec unit = zero_vec(fd, d);
                unit[col] = Scalar::one(fd);
                Vec x = hab.from_quotient(unit, c0);
                Vec exe = p.compose_elements(
                    images[i].base, images[j].base, images[j].base, eb,
                    p.compose_elements(images[i].base, images[i].base,
                                       images[j].base, x, ea));
                Vec q = hab.quotient_coords(exe, c0);
                for (std::size_t row = 0; row < d; ++row)
                    m.at(row, col) =
                        q[row] - (row == col ? Scalar::one(fd) : Scalar::zero(fd));
            }
            std::size_t z_rhs = d - rank(m);
            if (z_lhs != z_rhs) out.equivalence.fail("weight-zero zero-level hom mismatch");
        }
    (void)z;
    return out;
}

} // namespace percat
