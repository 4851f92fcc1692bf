#pragma once

#include "percat/idem.hpp"

namespace percat {

// Persistent presheaf on a finite presentation, stored by its values on the
// base objects and its action on hom generators. Values on shifted objects
// are derived by F(S^c X) = shift_module(F(X), -c) and never stored.
struct PPresheaf {
    std::map<int, FPModule> value;
    // action[(x, y, i)]: F(y) -> F(x) with shift birth(gen i of hom(x,y))
    std::map<std::tuple<int, int, std::size_t>, PModMorphism> action;

    const FPModule& at(int x) const { return value.at(x); }
};

// Linear extension of the generator action to an arbitrary element
// v of Hom(x,y)(t): returns the map F(y) -> F(x) with shift t.
inline PModMorphism element_action(const PCatPresentation&, const PPresheaf& f,
                                   int x, int y, const Vec& v, const Level& t) {
    PModMorphism out = zero_morphism(f.at(y), f.at(x), t);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i].is_zero()) continue;
        const PModMorphism& gi = f.action.at({x, y, i});
        for (std::size_t k = 0; k < out.images.size(); ++k)
            out.images[k] = vec_add(out.images[k], vec_scale(v[i], gi.images[k]));
    }
    return out;
}

// Pointwise functoriality: F(h.g) = F(g).F(h) on every table entry, and every
// action map is a valid module morphism.
inline bool verify_presheaf(const PCatPresentation& p, const PPresheaf& f) {
    for (const auto& [key, m] : f.action) {
        if (!m.valid()) return false;
        auto [x, y, i] = key;
        if (m.shift != p.hom(x, y).generators()[i].birth) return false;
    }
    int n = p.num_objects();
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (int zo = 0; zo < n; ++zo) {
                const FPModule& hxy = p.hom(x, y);
                const FPModule& hyz = p.hom(y, zo);
                for (std::size_t i = 0; i < hxy.num_gens(); ++i)
                    for (std::size_t j = 0; j < hyz.num_gens(); ++j) {
                        Level u = hxy.generators()[i].birth;
                        Level v = hyz.generators()[j].birth;
                        Vec comp = p.compose_elements(x, y, zo, p.gen_unit(y, zo, j),
                                                      p.gen_unit(x, y, i));
                        PModMorphism lhs = element_action(p, f, x, zo, comp, u + v);
                        PModMorphism rhs =
                            compose(f.action.at({x, y, i}), f.action.at({y, zo, j}));
                        for (std::size_t k = 0; k < lhs.images.size(); ++k) {
                            Level lvl = f.at(zo).generators()[k].birth + u + v;
                            if (!f.at(x).equal_at(lhs.images[k], rhs.images[k], lvl))
                                return false;
                        }
                    }
            }
    // relations of the hom modules act by zero
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (const auto& rel : p.hom(x, y).relations()) {
                PModMorphism act = element_action(p, f, x, y, rel.coeffs, rel.weight);
                for (std::size_t k = 0; k < act.images.size(); ++k) {
                    Level lvl = f.at(y).generators()[k].birth + rel.weight;
                    if (!f.at(x).is_zero_at(act.images[k], lvl)) return false;
                }
            }
    return true;
}

// Y(A) = Hom(-, A) with the precomposition action.
inline PPresheaf yoneda_presheaf(const PCatPresentation& p, int a) {
    PPresheaf f;
    int n = p.num_objects();
    for (int x = 0; x < n; ++x) f.value[x] = p.hom(x, a);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            const FPModule& hxy = p.hom(x, y);
            for (std::size_t i = 0; i < hxy.num_gens(); ++i) {
                PModMorphism m{p.hom(y, a), p.hom(x, a), hxy.generators()[i].birth, {}};
                for (std::size_t h = 0; h < p.hom(y, a).num_gens(); ++h)
                    m.images.push_back(p.compose_elements(
                        x, y, a, p.gen_unit(y, a, h), p.gen_unit(x, y, i)));
                f.action[{x, y, i}] = std::move(m);
            }
        }
    return f;
}

// ---------------------------------------------------------------------------
// Natural transformations

// A natural transformation of shift t (an element of Mor^t(F,G)), stored by
// its components.
struct NatTransf {
    Level shift;
    std::map<int, PModMorphism> at; // F(X) -> G(X) with this shift
};

inline NatTransf zero_nat(const PPresheaf& f, const PPresheaf& g, const Level& t) {
    NatTransf n{t, {}};
    for (const auto& [x, fx] : f.value) n.at[x] = zero_morphism(fx, g.at(x), t);
    return n;
}

inline NatTransf eta_nat(const PPresheaf& f, const Level& r) {
    NatTransf n{r, {}};
    for (const auto& [x, fx] : f.value) {
        PModMorphism m = identity_morphism(fx);
        m.shift = r;
        n.at[x] = std::move(m);
    }
    return n;
}

inline NatTransf compose_nat(const NatTransf& second, const NatTransf& first) {
    NatTransf n{first.shift + second.shift, {}};
    for (const auto& [x, m] : first.at) n.at[x] = compose(second.at.at(x), m);
    return n;
}

inline NatTransf add_nat(const NatTransf& a, const NatTransf& b) {
    assert(a.shift == b.shift);
    NatTransf n{a.shift, {}};
    for (const auto& [x, m] : a.at) {
        PModMorphism s = m;
        for (std::size_t k = 0; k < s.images.size(); ++k)
            s.images[k] = vec_add(s.images[k], b.at.at(x).images[k]);
        n.at[x] = std::move(s);
    }
    return n;
}

inline NatTransf scale_nat(const Scalar& c, const NatTransf& a) {
    NatTransf n{a.shift, {}};
    for (const auto& [x, m] : a.at) {
        PModMorphism s = m;
        for (auto& img : s.images) img = vec_scale(c, img);
        n.at[x] = std::move(s);
    }
    return n;
}

// Pushforward: the same components viewed at a larger shift.
inline NatTransf pushforward_nat(const NatTransf& a, const Level& s) {
    NatTransf n{a.shift + s, {}};
    for (const auto& [x, m] : a.at) {
        PModMorphism p = m;
        p.shift = m.shift + s;
        n.at[x] = std::move(p);
    }
    return n;
}

// Equality of transformations with equal shifts, checked per component on
// generators at their levels.
inline bool nat_equal(const NatTransf& a, const NatTransf& b) {
    if (a.shift != b.shift) return false;
    for (const auto& [x, m] : a.at) {
        const PModMorphism& o = b.at.at(x);
        for (std::size_t k = 0; k < m.images.size(); ++k) {
            Level lvl = m.src.generators()[k].birth + m.shift;
            if (!m.tgt.equal_at(m.images[k], o.images[k], lvl)) return false;
        }
    }
    return true;
}

inline bool nat_is_zero(const NatTransf& a) {
    for (const auto& [x, m] : a.at)
        for (std::size_t k = 0; k < m.images.size(); ++k) {
            Level lvl = m.src.generators()[k].birth + m.shift;
            if (!m.tgt.is_zero_at(m.images[k], lvl)) return false;
        }
    return true;
}

// Naturality squares against every hom generator.
inline bool nat_natural(const PCatPresentation& p, const PPresheaf& f,
                        const PPresheaf& g, const NatTransf& nu) {
    for (const auto& [key, fg] : f.action) {
        auto [x, y, i] = key;
        const PModMorphism& gg = g.action.at(key);
        PModMorphism lhs = compose(gg, nu.at.at(y));
        PModMorphism rhs = compose(nu.at.at(x), fg);
        for (std::size_t k = 0; k < lhs.images.size(); ++k) {
            Level lvl = f.at(y).generators()[k].birth + nu.shift + fg.shift;
            if (!g.at(x).equal_at(lhs.images[k], rhs.images[k], lvl)) return false;
        }
    }
    return true;
}

// Y on morphisms: x in Hom(A,B)(t) gives post-composition Y(A) -> Y(B).
inline NatTransf yoneda_nat(const PCatPresentation& p, const PPresheaf& ya,
                            const PPresheaf& yb, int a, int b, const Vec& x,
                            const Level& t) {
    NatTransf n{t, {}};
    for (int c = 0; c < p.num_objects(); ++c) {
        PModMorphism m{p.hom(c, a), p.hom(c, b), t, {}};
        for (std::size_t h = 0; h < p.hom(c, a).num_gens(); ++h)
            m.images.push_back(p.compose_elements(c, a, b, x, p.gen_unit(c, a, h)));
        n.at[c] = std::move(m);
    }
    (void)ya;
    (void)yb;
    return n;
}

// ---------------------------------------------------------------------------
// The module of natural transformations Mor^*(F, G)

struct NatModule {
    Subquotient sq;           // ambient: (+) over (X, gen of F(X)) of shifted G(X)
    // bookkeeping to translate between ambient vectors and transformations
    std::vector<std::tuple<int, std::size_t, std::size_t>> slots; // (X, fgen, offset)
    std::map<int, std::size_t> block_of; // object -> first slot index
    const PPresheaf* f;
    const PPresheaf* g;

    std::size_t ambient_index(int x, std::size_t fgen, std::size_t ggen) const {
        for (const auto& [ox, og, off] : slots)
            if (ox == x && og == fgen) return off + ggen;
        throw std::logic_error("nat ambient slot not found");
    }

    NatTransf to_nat(const Vec& ambient_vec, const Level& shift) const {
        NatTransf n{shift, {}};
        for (const auto& [x, fx] : f->value) {
            PModMorphism m{fx, g->at(x), shift, {}};
            for (std::size_t i = 0; i < fx.num_gens(); ++i) {
                Vec img = zero_vec(fx.field(), g->at(x).num_gens());
                std::size_t off = 0;
                bool found = false;
                for (const auto& [ox, og, o] : slots)
                    if (ox == x && og == i) {
                        off = o;
                        found = true;
                        break;
                    }
                if (found)
                    for (std::size_t j = 0; j < g->at(x).num_gens(); ++j)
                        img[j] = ambient_vec[off + j];
                m.images.push_back(std::move(img));
            }
            n.at[x] = std::move(m);
        }
        return n;
    }

    Vec to_ambient(const NatTransf& n) const {
        Vec v = zero_vec(sq.ambient.field(), sq.ambient.num_gens());
        for (const auto& [x, fgen, off] : slots) {
            const Vec& img = n.at.at(x).images[fgen];
            for (std::size_t j = 0; j < img.size(); ++j) v[off + j] = img[j];
        }
        return v;
    }

    // Stable class of a transformation.
    Vec stable_class(const NatTransf& n) const {
        const FPModule& m = sq.module;
        Level lvl = level_max(m.r_stab(), n.shift);
        auto expr = sq.express(to_ambient(n), n.shift);
        if (!expr) throw std::logic_error("transformation not in the nat module");
        return m.quotient_coords(*expr, m.context(lvl));
    }
};

// Build the FPModule of natural transformations F => G, solved levelwise.
inline NatModule nat_module(const PCatPresentation& p, const PPresheaf& f,
                            const PPresheaf& g) {
    Field fd = p.field();
    // ambient: for each object X and generator of F(X), a shifted copy of G(X)
    NatModule nm;
    nm.f = &f;
    nm.g = &g;
    std::vector<FPGenerator> gens;
    std::vector<FPRelation> rels;
    std::size_t offset = 0;
    for (const auto& [x, fx] : f.value) {
        const FPModule& gx = g.at(x);
        for (std::size_t i = 0; i < fx.num_gens(); ++i) {
            Level b = fx.generators()[i].birth;
            nm.slots.push_back({x, i, offset});
            std::string prefix = "o" + std::to_string(x) + ".f" + std::to_string(i) + ".";
            for (const auto& gg : gx.generators())
                gens.push_back({prefix + gg.name, gg.birth - b});
            for (const auto& rr : gx.relations()) {
                Vec c = zero_vec(fd, 0);
                rels.push_back({rr.weight - b, rr.coeffs}); // padded below
            }
            offset += gx.num_gens();
        }
    }
    // pad relation vectors into the full ambient coordinate space
    std::vector<FPRelation> padded;
    {
        std::size_t total = gens.size();
        std::size_t pos = 0;
        std::size_t ri = 0;
        for (const auto& [x, fx] : f.value) {
            const FPModule& gx = g.at(x);
            for (std::size_t i = 0; i < fx.num_gens(); ++i) {
                for (const auto& rr : gx.relations()) {
                    Vec c = zero_vec(fd, total);
                    for (std::size_t j = 0; j < gx.num_gens(); ++j)
                        c[pos + j] = rr.coeffs[j];
                    padded.push_back({rels[ri].weight, std::move(c)});
                    ++ri;
                }
                pos += gx.num_gens();
            }
        }
    }
    FPModule ambient(fd, std::move(gens), std::move(padded));

    // grid: all level jumps of the condition system
    std::vector<Level> grid;
    auto add_diffs = [&](const FPModule& target, const Level& extra) {
        for (const auto& c : target.grid()) grid.push_back(c - extra);
    };
    for (const auto& [x, fx] : f.value) {
        for (std::size_t i = 0; i < fx.num_gens(); ++i)
            add_diffs(g.at(x), fx.generators()[i].birth);
        for (const auto& rr : fx.relations()) add_diffs(g.at(x), rr.weight);
    }
    for (const auto& [key, act] : f.action) {
        auto [x, y, i] = key;
        Level u = p.hom(x, y).generators()[i].birth;
        for (std::size_t h = 0; h < f.at(y).num_gens(); ++h)
            add_diffs(g.at(x), f.at(y).generators()[h].birth + u);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    auto numerator = [&p, &f, &g, nmslots = nm.slots, ambient](Level t) {
        Field fd = ambient.field();
        auto ca = ambient.context(t);
        // condition rows applied to each ambient quotient basis vector
        std::vector<Vec> rows_per_basis(ca.basis.size());
        auto eval_conditions = [&](const Vec& ambient_elt) {
            // reconstruct generator images and evaluate all conditions
            std::map<std::pair<int, std::size_t>, Vec> img;
            for (const auto& [x, fgen, off] : nmslots) {
                Vec v = zero_vec(fd, g.at(x).num_gens());
                for (std::size_t j = 0; j < g.at(x).num_gens(); ++j)
                    v[j] = ambient_elt[off + j];
                img[{x, fgen}] = std::move(v);
            }
            Vec out;
            auto emit = [&](const FPModule& m, const Vec& v, const Level& lvl) {
                Vec c = m.canonical_at(v, m.context(lvl));
                for (const auto& s : c) out.push_back(s);
            };
            // (a) relations of F(X) map to zero
            for (const auto& [x, fx] : f.value)
                for (const auto& rel : fx.relations()) {
                    Vec v = zero_vec(fd, g.at(x).num_gens());
                    for (std::size_t i = 0; i < fx.num_gens(); ++i)
                        if (!rel.coeffs[i].is_zero())
                            v = vec_add(v, vec_scale(rel.coeffs[i], img.at({x, i})));
                    emit(g.at(x), v, rel.weight + t);
                }
            // (b) naturality against every action generator
            for (const auto& [key, fact] : f.action) {
                auto [x, y, i] = key;
                const PModMorphism& gact = g.action.at(key);
                for (std::size_t h = 0; h < f.at(y).num_gens(); ++h) {
                    Vec lhs = gact.apply(img.at({y, h}));
                    Vec rhs = zero_vec(fd, g.at(x).num_gens());
                    const Vec& fimg = fact.images[h];
                    for (std::size_t k = 0; k < fimg.size(); ++k)
                        if (!fimg[k].is_zero())
                            rhs = vec_add(rhs, vec_scale(fimg[k], img.at({x, k})));
                    Level lvl = f.at(y).generators()[h].birth + t + fact.shift;
                    emit(g.at(x), vec_sub(lhs, rhs), lvl);
                }
            }
            return out;
        };
        std::size_t nconds = 0;
        Matrix cond(fd, 0, 0);
        std::vector<Vec> cols;
        for (std::size_t j = 0; j < ca.basis.size(); ++j) {
            Vec unit = zero_vec(fd, ca.basis.size());
            unit[j] = Scalar::one(fd);
            Vec amb = ambient.from_quotient(unit, ca);
            Vec row = eval_conditions(amb);
            nconds = row.size();
            cols.push_back(std::move(row));
        }
        Matrix m(fd, nconds, ca.basis.size());
        for (std::size_t j = 0; j < cols.size(); ++j)
            for (std::size_t i = 0; i < nconds; ++i) m.at(i, j) = cols[j][i];
        std::vector<Vec> out;
        for (const Vec& q : nullspace(m)) out.push_back(ambient.from_quotient(q, ca));
        return out;
    };

    nm.sq = build_subquotient(ambient, grid, numerator, nullptr, "n");
    return nm;
}

// ---------------------------------------------------------------------------
// Kernel splitting of representable weighted idempotents

struct SplitObject {
    int base;      // A
    WIdem idem;    // e on Y(A), as an element of Hom(A,A)
    PPresheaf presheaf;
    NatTransf incl; // s : F -> Y(A), shift 0
    NatTransf retr; // r : Y(A) -> F, shift = idem.weight
    std::map<int, Subquotient> kernels;
};

// Split e : Y(A) -> S^{-r}Y(A) through the pointwise kernel of e - eta_r.
inline SplitObject split_by_kernel(const PCatPresentation& p, const WIdem& e) {
    if (!is_weighted_idempotent(p, e))
        throw std::invalid_argument("split_by_kernel: not a weighted idempotent");
    int a = e.obj.obj;
    Level r = e.weight;
    PPresheaf ya = yoneda_presheaf(p, a);
    SplitObject so;
    so.base = a;
    so.idem = e;

    for (int x = 0; x < p.num_objects(); ++x) {
        const FPModule& hx = p.hom(x, a);
        PModMorphism diff{hx, hx, r, {}};
        for (std::size_t h = 0; h < hx.num_gens(); ++h) {
            Vec eh = p.compose_elements(x, a, a, e.elem, p.gen_unit(x, a, h));
            diff.images.push_back(vec_sub(eh, p.gen_unit(x, a, h)));
        }
        KernelResult k = kernel(diff);
        so.presheaf.value[x] = k.module;
        so.kernels.emplace(x, std::move(k.sub));
    }
    // action maps: restrict precomposition to the kernels
    for (int x = 0; x < p.num_objects(); ++x)
        for (int y = 0; y < p.num_objects(); ++y) {
            const FPModule& hxy = p.hom(x, y);
            for (std::size_t i = 0; i < hxy.num_gens(); ++i) {
                Level u = hxy.generators()[i].birth;
                const FPModule& ky = so.presheaf.at(y);
                PModMorphism m{ky, so.presheaf.at(x), u, {}};
                for (std::size_t w = 0; w < ky.num_gens(); ++w) {
                    Vec elt = so.kernels.at(y).witnesses[w]; // element of Hom(y,a)
                    Vec moved = p.compose_elements(x, y, a, elt, p.gen_unit(x, y, i));
                    auto expr = so.kernels.at(x).express(
                        moved, ky.generators()[w].birth + u);
                    if (!expr)
                        throw std::logic_error("kernel presheaf action failed to factor");
                    m.images.push_back(*expr);
                }
                so.presheaf.action[{x, y, i}] = std::move(m);
            }
        }
    // inclusion and retraction
    so.incl = NatTransf{Level(0), {}};
    so.retr = NatTransf{r, {}};
    for (int x = 0; x < p.num_objects(); ++x) {
        const FPModule& kx = so.presheaf.at(x);
        const FPModule& hx = p.hom(x, a);
        PModMorphism inc{kx, hx, Level(0), so.kernels.at(x).witnesses};
        so.incl.at[x] = std::move(inc);
        PModMorphism ret{hx, kx, r, {}};
        for (std::size_t h = 0; h < hx.num_gens(); ++h) {
            Vec eh = p.compose_elements(x, a, a, e.elem, p.gen_unit(x, a, h));
            auto expr = so.kernels.at(x).express(eh, hx.generators()[h].birth + r);
            if (!expr) throw std::logic_error("retraction failed to factor through kernel");
            ret.images.push_back(*expr);
        }
        so.retr.at[x] = std::move(ret);
    }
    return so;
}

// The two splitting equations, exactly.
inline bool verify_split_object(const PCatPresentation& p, const SplitObject& so) {
    PPresheaf ya = yoneda_presheaf(p, so.base);
    Level r = so.idem.weight;
    // r . s = eta_r^F
    NatTransf rs = compose_nat(so.retr, so.incl);
    if (!nat_equal(rs, eta_nat(so.presheaf, r))) return false;
    // S^{-r} s . r = Y(e)
    NatTransf sr = compose_nat(so.incl, so.retr); // shift r, components into Hom(-,a)
    NatTransf ye = yoneda_nat(p, ya, ya, so.base, so.base, so.idem.elem, r);
    return nat_equal(sr, ye);
}

// Retract-triple view of a split object inside the presheaf world, for
// uniqueness comparisons: alpha = r2 . s1, beta = r1 . s2.
struct PresheafSplitting {
    const SplitObject* obj;
    NatTransf s; // F -> Y(A), shift s0
    NatTransf r; // Y(A) -> F, shift r0 with s0 + r0 = weight
    Level weight;
};

struct PresheafStrongIso {
    NatTransf fwd, bwd;
    Level weight;
};

inline bool verify_presheaf_strong_iso(const PPresheaf& fa, const PPresheaf& fb,
                                       const PresheafStrongIso& w) {
    NatTransf b1 = compose_nat(w.bwd, w.fwd);
    if (!nat_equal(b1, eta_nat(fa, b1.shift))) return false;
    if (b1.shift != w.weight) return false;
    NatTransf b2 = compose_nat(w.fwd, w.bwd);
    if (!nat_equal(b2, eta_nat(fb, b2.shift))) return false;
    return b2.shift == w.weight;
}

// Uniqueness of splittings at the presheaf level: both triples must split the
// same representable idempotent (with matching total weight).
inline PresheafStrongIso presheaf_splitting_comparison(const PresheafSplitting& t1,
                                                       const PresheafSplitting& t2) {
    if (t1.weight != t2.weight)
        throw std::invalid_argument("presheaf comparison: weight mismatch");
    NatTransf alpha = compose_nat(t2.r, t1.s);
    NatTransf beta = compose_nat(t1.r, t2.s);
    PresheafStrongIso w{alpha, beta, t1.weight + t1.weight};
    if (!verify_presheaf_strong_iso(t1.obj->presheaf, t2.obj->presheaf, w))
        throw std::logic_error("internal: presheaf uniqueness witness failed");
    return w;
}

} // namespace percat
