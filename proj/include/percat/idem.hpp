#pragma once

#include "percat/semiloc.hpp"

namespace percat {

// Weighted idempotent e : A -> S^{-r}A, stored as an element of Hom(A,A)
// valid at level r. The defining equation in element form is
// e.e = i_{r,2r}(e), which covers both the eta- and zeta-flavoured
// statements.
struct WIdem {
    ShiftedObject obj;
    Level weight;
    Vec elem;

    WMorphism as_morphism() const {
        return WMorphism{obj, shifted(obj, -weight), elem};
    }
};

inline bool is_weighted_idempotent(const PCatPresentation& p, const WIdem& e) {
    if (e.weight < Level(0)) return false;
    int a = e.obj.obj;
    if (!p.hom(a, a).element_valid_at(e.elem, e.weight)) return false;
    Vec ee = p.compose_elements(a, a, a, e.elem, e.elem);
    return p.hom(a, a).equal_at(ee, e.elem, e.weight + e.weight);
}

inline WIdem eta_idempotent(const ZetaFamily& z, const ShiftedObject& a, const Level& r) {
    return WIdem{a, r, z.at(a.obj).elem};
}

// zeta_r - e, again an r-idempotent.
inline WIdem complement(const PCatPresentation& p, const ZetaFamily& z, const WIdem& e) {
    if (!is_weighted_idempotent(p, e))
        throw std::invalid_argument("complement: not a weighted idempotent");
    if (e.weight < z.at(e.obj.obj).floor)
        throw std::invalid_argument("complement: weight below the zeta floor");
    WIdem out{e.obj, e.weight, vec_sub(z.at(e.obj.obj).elem, e.elem)};
    if (!is_weighted_idempotent(p, out))
        throw std::logic_error("internal: complement failed idempotency");
    return out;
}

// Weighted retract data (B, s, r) of weight w: s in Mor^0(B, A),
// r in Mor^0(A, S^{-w}B), r.s = zeta_w^B.
struct RetractTriple {
    ShiftedObject base;   // A
    ShiftedObject summand; // B
    WMorphism s;          // B -> A
    WMorphism r;          // A -> S^{-w}B
    Level weight;
};

inline bool check_retract(const PCatPresentation& p, const ZetaFamily& z,
                          const RetractTriple& t) {
    if (!(t.s.src == t.summand) || !(t.s.tgt == t.base)) return false;
    if (!(t.r.src == t.base) || !(t.r.tgt == shifted(t.summand, -t.weight)))
        return false;
    if (!p.morphism_valid(t.s) || !p.morphism_valid(t.r)) return false;
    if (t.weight < z.at(t.summand.obj).floor) return false;
    WMorphism rs = p.compose(t.r, t.s);
    return p.equal(rs, WMorphism{t.summand, shifted(t.summand, -t.weight),
                                 z.at(t.summand.obj).elem});
}

// Full splitting check: r.s = zeta_w and S^{-w}s . r = e.
inline bool check_splitting(const PCatPresentation& p, const ZetaFamily& z,
                            const WIdem& e, const RetractTriple& t) {
    if (t.weight != e.weight || !(t.base == e.obj)) return false;
    if (!check_retract(p, z, t)) return false;
    WMorphism sw = p.shift_morphism(t.s, -t.weight);
    WMorphism sr = p.compose(sw, t.r);
    return p.equal(sr, e.as_morphism());
}

// Weak splitting of e = splitting of zeta_w . e (a 2w-idempotent).
inline bool check_weak_splitting(const PCatPresentation& p, const ZetaFamily& z,
                                 const WIdem& e, const RetractTriple& t) {
    WIdem doubled{e.obj, e.weight + e.weight, e.elem};
    return check_splitting(p, z, doubled, t);
}

// Strong w-isomorphism data: fwd : A -> B together with bwd : B -> S^{-w}A
// satisfying bwd.fwd = zeta_w^A and S^{-w}fwd.bwd = zeta_w^B.
struct StrongIsoWitness {
    WMorphism fwd;
    WMorphism bwd;
    Level weight;
};

inline bool verify_strong_iso(const PCatPresentation& p, const ZetaFamily& z,
                              const StrongIsoWitness& w) {
    if (!(w.bwd.src == w.fwd.tgt)) return false;
    if (!(w.bwd.tgt == shifted(w.fwd.src, -w.weight))) return false;
    if (w.weight < z.at(w.fwd.src.obj).floor ||
        w.weight < z.at(w.fwd.tgt.obj).floor)
        return false;
    WMorphism b1 = p.compose(w.bwd, w.fwd);
    WMorphism want1{w.fwd.src, shifted(w.fwd.src, -w.weight),
                    z.at(w.fwd.src.obj).elem};
    WMorphism b2 = p.compose(p.shift_morphism(w.fwd, -w.weight), w.bwd);
    WMorphism want2{w.fwd.tgt, shifted(w.fwd.tgt, -w.weight),
                    z.at(w.fwd.tgt.obj).elem};
    return p.equal(b1, want1) && p.equal(b2, want2);
}

// Strong isomorphisms compose with adding weights.
inline StrongIsoWitness strong_iso_compose(const PCatPresentation& p,
                                           const ZetaFamily& z,
                                           const StrongIsoWitness& second,
                                           const StrongIsoWitness& first) {
    WMorphism fwd = p.compose_aligned(second.fwd, first.fwd);
    WMorphism bwd = p.compose_aligned(p.shift_morphism(first.bwd, -second.weight),
                                      second.bwd);
    // re-anchor endpoints after alignment
    bwd = WMorphism{fwd.tgt,
                    shifted(fwd.src, -(first.weight + second.weight)), bwd.coeffs};
    StrongIsoWitness out{fwd, bwd, first.weight + second.weight};
    if (!verify_strong_iso(p, z, out))
        throw std::logic_error("internal: composed strong iso failed verification");
    return out;
}

// Uniqueness of splittings: two splittings of the same e give a strong
// 2r-isomorphism between the summands via alpha = r'.s, beta = r.s'.
inline StrongIsoWitness splitting_comparison(const PCatPresentation& p,
                                             const ZetaFamily& z, const WIdem& e,
                                             const RetractTriple& t1,
                                             const RetractTriple& t2) {
    if (!check_splitting(p, z, e, t1) || !check_splitting(p, z, e, t2))
        throw std::invalid_argument("splitting_comparison: not splittings of e");
    Level r = e.weight;
    WMorphism alpha = p.compose_aligned(t2.r, t1.s); // B1 -> S^{-r}B2
    WMorphism beta = p.compose_aligned(t1.r, t2.s);  // B2 -> S^{-r}B1
    StrongIsoWitness w{alpha, p.shift_morphism(beta, -r), r + r};
    if (!verify_strong_iso(p, z, w))
        throw std::logic_error("internal: uniqueness witness failed verification");
    return w;
}

// B <_r A and C <_s B compose to C <_{r+s} A.
inline RetractTriple retract_compose(const PCatPresentation& p, const ZetaFamily& z,
                                     const RetractTriple& outer,
                                     const RetractTriple& inner) {
    if (!(inner.base == outer.summand))
        throw std::invalid_argument("retract_compose: middle object mismatch");
    RetractTriple t;
    t.base = outer.base;
    t.summand = inner.summand;
    t.weight = outer.weight + inner.weight;
    t.s = p.compose(outer.s, inner.s);
    WMorphism inner_r_shifted = p.shift_morphism(inner.r, -outer.weight);
    t.r = p.compose(inner_r_shifted, outer.r);
    if (!check_retract(p, z, t))
        throw std::logic_error("internal: composed retract failed verification");
    return t;
}

// Biproduct data for D = B (+) C inside the presentation.
struct BiproductData {
    ShiftedObject sum; // D
    WMorphism incl_b, incl_c; // B -> D, C -> D
    WMorphism proj_b, proj_c; // D -> B, D -> C
};

inline bool check_biproduct(const PCatPresentation& p, const ZetaFamily& z,
                            const BiproductData& d) {
    auto is_zeta0 = [&](const WMorphism& m, const ShiftedObject& o) {
        return z.at(o.obj).floor == Level(0) &&
               p.equal(m, WMorphism{o, o, z.at(o.obj).elem});
    };
    WMorphism pb_ib = p.compose(d.proj_b, d.incl_b);
    WMorphism pc_ic = p.compose(d.proj_c, d.incl_c);
    WMorphism pb_ic = p.compose(d.proj_b, d.incl_c);
    WMorphism pc_ib = p.compose(d.proj_c, d.incl_b);
    if (!is_zeta0(pb_ib, d.incl_b.src) || !is_zeta0(pc_ic, d.incl_c.src)) return false;
    if (!p.is_zero(pb_ic) || !p.is_zero(pc_ib)) return false;
    Vec sum = vec_add(p.compose(d.incl_b, d.proj_b).coeffs,
                      p.compose(d.incl_c, d.proj_c).coeffs);
    return p.equal(WMorphism{d.sum, d.sum, sum},
                   WMorphism{d.sum, d.sum, z.at(d.sum.obj).elem});
}

// If e and zeta_r - e both split, B (+) C is strongly 2r-isomorphic to A:
// f = (r_B; r_C), g = (s_B, s_C) through the biproduct.
struct SumSplitWitness {
    WMorphism f; // A -> S^{-r} D
    WMorphism g; // D -> A
    Level weight;
};

inline SumSplitWitness sum_split_witness(const PCatPresentation& p, const ZetaFamily& z,
                                         const WIdem& e, const RetractTriple& tb,
                                         const RetractTriple& tc,
                                         const BiproductData& d) {
    if (!check_splitting(p, z, e, tb))
        throw std::invalid_argument("sum_split_witness: first triple does not split e");
    WIdem comp = complement(p, z, e);
    if (!check_splitting(p, z, comp, tc))
        throw std::invalid_argument("sum_split_witness: second triple does not split zeta-e");
    if (!check_biproduct(p, z, d))
        throw std::invalid_argument("sum_split_witness: invalid biproduct data");
    Level r = e.weight;
    WMorphism ib = p.shift_morphism(d.incl_b, -r);
    WMorphism ic = p.shift_morphism(d.incl_c, -r);
    Vec fco = vec_add(p.compose(ib, tb.r).coeffs, p.compose(ic, tc.r).coeffs);
    WMorphism f{e.obj, shifted(d.sum, -r), fco};
    Vec gco = vec_add(p.compose(tb.s, d.proj_b).coeffs,
                      p.compose(tc.s, d.proj_c).coeffs);
    WMorphism g{d.sum, e.obj, gco};

    // S^{-r} g . f = zeta_r^A
    WMorphism gf = p.compose(p.shift_morphism(g, -r), f);
    if (!p.equal(gf, WMorphism{e.obj, shifted(e.obj, -r), z.at(e.obj.obj).elem}))
        throw std::logic_error("internal: sum witness g.f != zeta_r");
    // g : D -> A is a strong 2r-isomorphism with inverse eta_r . f
    StrongIsoWitness w{g, p.pushforward(f, r), r + r};
    if (!verify_strong_iso(p, z, w))
        throw std::logic_error("internal: sum witness not a strong 2r-isomorphism");
    return SumSplitWitness{f, g, r};
}

// ---------------------------------------------------------------------------
// Minimal representation weight of a limit idempotent

struct MinRepResult {
    Level lower, upper;
    WIdem representative; // verified weighted idempotent at weight upper
    bool exact;           // lower attained by a verified idempotent
    std::string method;   // "enumeration" or "linear-relaxation"
};

// Multiplication of stable classes through representatives.
inline Vec stable_compose(const PCatPresentation& p, int a, const Vec& c1, const Vec& c2) {
    const FPModule& h = p.hom(a, a);
    Level st = h.r_stab();
    auto ctx = h.context(st);
    Vec v1 = h.from_quotient(c1, ctx), v2 = h.from_quotient(c2, ctx);
    Vec prod = p.compose_elements(a, a, a, v1, v2);
    return h.quotient_coords(prod, h.context(st + st));
}

inline bool stable_class_equal(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

inline bool is_limit_idempotent(const PCatPresentation& p, int a, const Vec& cls) {
    return stable_class_equal(stable_compose(p, a, cls, cls), cls);
}

// Candidate weights are grid levels; over F_p small level spaces are
// enumerated exhaustively, over Q only the linear lifting condition is
// checked below the constructive upper bound (so the lower bound may be
// loose there).
inline MinRepResult min_representation_weight(const PCatPresentation& p, int a,
                                              const Vec& cls,
                                              std::size_t enum_cap = 1u << 14) {
    if (!is_limit_idempotent(p, a, cls))
        throw std::invalid_argument("class is not idempotent in the limit");
    const FPModule& h = p.hom(a, a);
    Field fd = p.field();
    std::vector<Level> grid = h.grid();
    if (grid.empty()) grid.push_back(Level(0));
    if (grid.front() > Level(0)) grid.insert(grid.begin(), Level(0));
    Level stab = h.r_stab();
    if (grid.back() < stab) grid.push_back(stab);

    auto class_of = [&](const Vec& elem, const Level& t) {
        Level lvl = level_max(stab, t);
        return h.quotient_coords(elem, h.context(lvl));
    };

    // constructive upper bound: push a lift forward until idempotency holds
    auto lift = p.lift_limit_class(a, a, cls);
    if (!lift) throw std::logic_error("idempotent class does not lift on the grid");
    std::optional<WIdem> rep;
    Level upper(0);
    for (const Level& t : grid) {
        if (t < lift->first || t < Level(0)) continue;
        WIdem cand{{a, Level(0)}, t, lift->second};
        if (is_weighted_idempotent(p, cand)) {
            rep = cand;
            upper = t;
            break;
        }
    }
    if (!rep) throw std::logic_error("no weighted-idempotent representative on the grid");

    bool prime = fd.is_prime_field();
    MinRepResult out{upper, upper, *rep, true,
                     prime ? "enumeration" : "linear-relaxation"};
    for (const Level& t : grid) {
        if (t < Level(0)) continue;
        if (!(t < upper)) break;
        auto ct = h.context(t);
        std::size_t dim = ct.basis.size();
        if (prime) {
            double total = 1;
            for (std::size_t i = 0; i < dim; ++i) total *= (double)fd.p;
            if (total > (double)enum_cap) {
                // cannot rule this level out by exhaustion
                out.lower = t;
                out.exact = false;
                out.method = "enumeration-capped";
                return out;
            }
            std::vector<unsigned long> counter(dim, 0);
            while (true) {
                Vec q = zero_vec(fd, dim);
                for (std::size_t i = 0; i < dim; ++i)
                    q[i] = Scalar(fd, (long)counter[i]);
                Vec elem = h.from_quotient(q, ct);
                WIdem cand{{a, Level(0)}, t, elem};
                if (is_weighted_idempotent(p, cand) &&
                    stable_class_equal(class_of(elem, t), cls)) {
                    out.lower = t;
                    out.upper = t;
                    out.representative = cand;
                    out.exact = true;
                    return out;
                }
                std::size_t i = 0;
                while (i < dim && ++counter[i] == fd.p) counter[i++] = 0;
                if (i == dim) break;
            }
            // level t exhausted with no representative: ruled out
        } else {
            // linear feasibility: can the class be hit from level t at all
            auto cs = h.context(level_max(stab, t));
            Matrix cols(fd, cls.size(), ct.basis.size());
            for (std::size_t j = 0; j < ct.basis.size(); ++j) {
                Vec unit = zero_vec(fd, ct.basis.size());
                unit[j] = Scalar::one(fd);
                Vec q = h.quotient_coords(h.from_quotient(unit, ct), cs);
                for (std::size_t i = 0; i < q.size(); ++i) cols.at(i, j) = q[i];
            }
            if (auto sol = solve(cols, cls)) {
                // feasible; try the canonical lift before giving a loose bound
                Vec elem = h.from_quotient(*sol, ct);
                WIdem cand{{a, Level(0)}, t, elem};
                if (is_weighted_idempotent(p, cand)) {
                    out.lower = t;
                    out.upper = t;
                    out.representative = cand;
                    out.exact = true;
                    return out;
                }
                out.lower = t;
                out.exact = false;
                return out;
            }
            // infeasible: ruled out
        }
    }
    // every candidate level below `upper` was ruled out
    out.lower = upper;
    out.exact = true;
    return out;
}

// ---------------------------------------------------------------------------
// Equalizer / coequalizer to splitting constructions

// Given (B, s) equalizing e and zeta_r (that is, e.s = i_{.,r}(s)), solve for
// the universal map i with s.i = S^r e and return the induced splitting.
inline std::optional<RetractTriple> equalizer_splitting(const PCatPresentation& p,
                                                        const ZetaFamily& z,
                                                        const WIdem& e,
                                                        const WMorphism& s) {
    if (!(s.tgt == e.obj)) return std::nullopt;
    int A = e.obj.obj, B = s.src.obj;
    Field fd = p.field();
    // unknown i : S^r A -> B, element of Hom(A,B) at r + ashift - bshift
    Level lvl = e.weight + e.obj.shift - s.src.shift;
    const FPModule& hab = p.hom(A, B);
    auto ci = hab.context(lvl);
    // s.i = S^r e as elements of Hom(A,A) at level r
    const FPModule& haa = p.hom(A, A);
    auto ct = haa.context(e.weight);
    Vec want = haa.canonical_at(e.elem, ct);
    Matrix m(fd, want.size(), ci.active.size());
    for (std::size_t k = 0; k < ci.active.size(); ++k) {
        Vec ik = zero_vec(fd, hab.num_gens());
        ik[ci.active[k]] = Scalar::one(fd);
        Vec si = haa.canonical_at(p.compose_elements(A, B, A, s.coeffs, ik), ct);
        for (std::size_t i = 0; i < si.size(); ++i) m.at(i, k) = si[i];
    }
    auto sol = solve(m, want);
    if (!sol) return std::nullopt;
    Vec icoeffs = zero_vec(fd, hab.num_gens());
    for (std::size_t k = 0; k < ci.active.size(); ++k)
        icoeffs[ci.active[k]] = (*sol)[k];
    RetractTriple t;
    t.base = e.obj;
    t.summand = s.src;
    t.weight = e.weight;
    t.s = s;
    t.r = WMorphism{e.obj, shifted(s.src, -e.weight), icoeffs};
    if (!check_splitting(p, z, e, t)) return std::nullopt;
    return t;
}

// Dual construction from a coequalizing map t : S^{-r}A -> C.
inline std::optional<RetractTriple> coequalizer_splitting(const PCatPresentation& p,
                                                          const ZetaFamily& z,
                                                          const WIdem& e,
                                                          const WMorphism& tmap) {
    if (!(tmap.src == shifted(e.obj, -e.weight))) return std::nullopt;
    int A = e.obj.obj, C = tmap.tgt.obj;
    Field fd = p.field();
    // unknown u : C -> S^{-2r}A with u.t = S^{-r}e (element level r)
    const FPModule& hca = p.hom(C, A);
    Level lvl = tmap.tgt.shift - (e.obj.shift - e.weight - e.weight);
    auto cu = hca.context(lvl);
    const FPModule& haa = p.hom(A, A);
    auto ct = haa.context(e.weight);
    Vec want = haa.canonical_at(e.elem, ct);
    Matrix m(fd, want.size(), cu.active.size());
    for (std::size_t k = 0; k < cu.active.size(); ++k) {
        Vec uk = zero_vec(fd, hca.num_gens());
        uk[cu.active[k]] = Scalar::one(fd);
        Vec ut = haa.canonical_at(p.compose_elements(A, C, A, uk, tmap.coeffs), ct);
        for (std::size_t i = 0; i < ut.size(); ++i) m.at(i, k) = ut[i];
    }
    auto sol = solve(m, want);
    if (!sol) return std::nullopt;
    Vec ucoeffs = zero_vec(fd, hca.num_gens());
    for (std::size_t k = 0; k < cu.active.size(); ++k)
        ucoeffs[cu.active[k]] = (*sol)[k];
    // splitting via B = S^{2r}C, s = S^{2r}u, retraction = S^r t
    RetractTriple t;
    t.base = e.obj;
    t.summand = shifted(tmap.tgt, e.weight + e.weight);
    t.weight = e.weight;
    t.s = WMorphism{t.summand, e.obj, ucoeffs};
    t.r = p.shift_morphism(tmap, e.weight);
    if (!check_splitting(p, z, e, t)) return std::nullopt;
    return t;
}

} // namespace percat
