#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "percat/linalg.hpp"

namespace percat {

struct FPGenerator {
    std::string name;
    Level birth;
    bool operator==(const FPGenerator& o) const {
        return name == o.name && birth == o.birth;
    }
};

struct FPRelation {
    Level weight;
    Vec coeffs; // over all generators of the module
    bool operator==(const FPRelation& o) const {
        if (weight != o.weight || coeffs.size() != o.coeffs.size()) return false;
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            if (coeffs[i] != o.coeffs[i]) return false;
        return true;
    }
};

// Finitely presented persistence module: free on generators with birth
// levels, modulo relations with weight levels. A relation may only touch
// generators born at or before its weight. Elements are formal generator
// combinations (Vec over all generators); an element is usable at level r
// when its support is born by r.
class FPModule {
public:
    FPModule() : field_(Field::rationals()) {}
    FPModule(Field f, std::vector<FPGenerator> gens, std::vector<FPRelation> rels)
        : field_(f), gens_(std::move(gens)), rels_(std::move(rels)) {
        for (const auto& rel : rels_) {
            assert(rel.coeffs.size() == gens_.size());
            for (std::size_t i = 0; i < gens_.size(); ++i)
                if (!rel.coeffs[i].is_zero())
                    assert(!(rel.weight < gens_[i].birth));
        }
        init();
    }

    Field field() const { return field_; }
    const std::vector<FPGenerator>& generators() const { return gens_; }
    const std::vector<FPRelation>& relations() const { return rels_; }
    std::size_t num_gens() const { return gens_.size(); }
    const std::vector<Level>& grid() const { return grid_; }
    Level r_stab() const { return grid_.empty() ? Level(0) : grid_.back(); }

    bool operator==(const FPModule& o) const {
        return field_ == o.field_ && gens_ == o.gens_ && rels_ == o.rels_;
    }

    // Per-level data: active generators in canonical (birth, name, index)
    // order and the rref of the relations alive at that level.
    struct LevelCtx {
        Level r;
        std::vector<std::size_t> active;       // generator indices
        std::vector<std::size_t> pos;          // gen index -> slot in active (or npos)
        Rref rels;                             // over active coordinates
        std::vector<std::size_t> basis;        // free active slots (quotient basis)
    };
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    LevelCtx context(const Level& r) const {
        LevelCtx c;
        c.r = r;
        for (std::size_t k : order_)
            if (!(r < gens_[k].birth)) c.active.push_back(k);
        c.pos.assign(gens_.size(), npos);
        for (std::size_t s = 0; s < c.active.size(); ++s) c.pos[c.active[s]] = s;
        Matrix rows(field_, 0, c.active.size());
        for (const auto& rel : rels_) {
            if (r < rel.weight) continue;
            Vec v = zero_vec(field_, c.active.size());
            for (std::size_t s = 0; s < c.active.size(); ++s)
                v[s] = rel.coeffs[c.active[s]];
            rows.append_row(std::move(v));
        }
        c.rels = rref(rows);
        for (std::size_t s = 0; s < c.active.size(); ++s)
            if (!c.rels.is_pivot_col(s)) c.basis.push_back(s);
        return c;
    }

    std::size_t dim_at(const Level& r) const { return context(r).basis.size(); }

    bool element_valid_at(const Vec& v, const Level& r) const {
        assert(v.size() == gens_.size());
        for (std::size_t i = 0; i < gens_.size(); ++i)
            if (!v[i].is_zero() && r < gens_[i].birth) return false;
        return true;
    }

    // Active-coordinate vector of an element, reduced modulo relations.
    Vec canonical_at(const Vec& v, const LevelCtx& c) const {
        assert(element_valid_at(v, c.r));
        Vec a = zero_vec(field_, c.active.size());
        for (std::size_t s = 0; s < c.active.size(); ++s) a[s] = v[c.active[s]];
        return c.rels.reduce(a);
    }

    // Coordinates over the canonical quotient basis at the context level.
    Vec quotient_coords(const Vec& v, const LevelCtx& c) const {
        Vec a = canonical_at(v, c);
        Vec q = zero_vec(field_, c.basis.size());
        for (std::size_t k = 0; k < c.basis.size(); ++k) q[k] = a[c.basis[k]];
        return q;
    }

    Vec from_quotient(const Vec& q, const LevelCtx& c) const {
        assert(q.size() == c.basis.size());
        Vec v = zero_vec(field_, gens_.size());
        for (std::size_t k = 0; k < c.basis.size(); ++k)
            v[c.active[c.basis[k]]] = q[k];
        return v;
    }

    bool is_zero_at(const Vec& v, const Level& r) const {
        LevelCtx c = context(r);
        return vec_is_zero(canonical_at(v, c));
    }

    bool equal_at(const Vec& a, const Vec& b, const Level& r) const {
        return is_zero_at(vec_sub(a, b), r);
    }

    // Matrix of i_{r,s} from the quotient basis at r to the one at s.
    Matrix structure_matrix(const Level& r, const Level& s) const {
        if (s < r) throw std::invalid_argument("structure_map needs r <= s");
        LevelCtx cr = context(r), cs = context(s);
        Matrix m(field_, cs.basis.size(), cr.basis.size());
        for (std::size_t j = 0; j < cr.basis.size(); ++j) {
            Vec unit = zero_vec(field_, cr.basis.size());
            unit[j] = Scalar::one(field_);
            Vec q = quotient_coords(from_quotient(unit, cr), cs);
            for (std::size_t i = 0; i < cs.basis.size(); ++i) m.at(i, j) = q[i];
        }
        return m;
    }

private:
    Field field_;
    std::vector<FPGenerator> gens_;
    std::vector<FPRelation> rels_;
    std::vector<Level> grid_;
    std::vector<std::size_t> order_; // generator indices sorted by (birth, name, idx)

    void init() {
        std::set<std::string> names;
        for (const auto& g : gens_) {
            auto [it, fresh] = names.insert(g.name);
            (void)it;
            assert(fresh && "generator names must be unique");
        }
        std::vector<Level> crit;
        for (const auto& g : gens_) crit.push_back(g.birth);
        for (const auto& r : rels_) crit.push_back(r.weight);
        std::sort(crit.begin(), crit.end());
        crit.erase(std::unique(crit.begin(), crit.end()), crit.end());
        grid_ = std::move(crit);
        order_.resize(gens_.size());
        for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
        std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
            if (gens_[a].birth != gens_[b].birth) return gens_[a].birth < gens_[b].birth;
            if (gens_[a].name != gens_[b].name) return gens_[a].name < gens_[b].name;
            return a < b;
        });
    }

public:
    const std::vector<std::size_t>& canonical_order() const { return order_; }
};

inline FPModule zero_module(Field f) { return FPModule(f, {}, {}); }

// S^a: births and weights move up by a, so that dim_at(S^a M, r) = dim_at(M, r-a).
inline FPModule shift_module(const FPModule& m, const Level& a) {
    std::vector<FPGenerator> gens = m.generators();
    for (auto& g : gens) g.birth += a;
    std::vector<FPRelation> rels = m.relations();
    for (auto& r : rels) r.weight += a;
    return FPModule(m.field(), std::move(gens), std::move(rels));
}

inline FPModule direct_sum(const FPModule& a, const FPModule& b,
                           const std::string& lp = "l.", const std::string& rp = "r.") {
    assert(a.field() == b.field());
    std::vector<FPGenerator> gens;
    for (const auto& g : a.generators()) gens.push_back({lp + g.name, g.birth});
    for (const auto& g : b.generators()) gens.push_back({rp + g.name, g.birth});
    std::vector<FPRelation> rels;
    std::size_t na = a.num_gens(), nb = b.num_gens();
    for (const auto& r : a.relations()) {
        Vec c = zero_vec(a.field(), na + nb);
        for (std::size_t i = 0; i < na; ++i) c[i] = r.coeffs[i];
        rels.push_back({r.weight, std::move(c)});
    }
    for (const auto& r : b.relations()) {
        Vec c = zero_vec(a.field(), na + nb);
        for (std::size_t i = 0; i < nb; ++i) c[na + i] = r.coeffs[i];
        rels.push_back({r.weight, std::move(c)});
    }
    return FPModule(a.field(), std::move(gens), std::move(rels));
}

// Colimit data: dimensions are constant past r_stab, so the stable space is
// just the level space there.
struct StableSpace {
    Level r_stab;
    std::size_t dim;
    FPModule::LevelCtx ctx;
};

inline StableSpace eval_stable(const FPModule& m) {
    StableSpace s{m.r_stab(), 0, m.context(m.r_stab())};
    s.dim = s.ctx.basis.size();
    return s;
}

// ---------------------------------------------------------------------------
// Morphisms

// A morphism is stored by generator images: generator g goes to an element of
// the target valid at birth(g) + shift. Structure-map compatibility is then
// automatic; validity and relation preservation are checked by validate().
struct PModMorphism {
    FPModule src, tgt;
    Level shift;
    std::vector<Vec> images; // per src generator

    Vec apply(const Vec& v) const {
        assert(v.size() == src.num_gens());
        Vec out = zero_vec(tgt.field(), tgt.num_gens());
        for (std::size_t i = 0; i < images.size(); ++i)
            if (!v[i].is_zero()) out = vec_add(out, vec_scale(v[i], images[i]));
        return out;
    }

    bool valid() const {
        if (images.size() != src.num_gens()) return false;
        for (std::size_t i = 0; i < images.size(); ++i)
            if (!tgt.element_valid_at(images[i], src.generators()[i].birth + shift))
                return false;
        for (const auto& rel : src.relations())
            if (!tgt.is_zero_at(apply(rel.coeffs), rel.weight + shift)) return false;
        return true;
    }

    // Matrix from the quotient basis of src at r to that of tgt at r+shift.
    Matrix matrix_at(const Level& r) const {
        auto cr = src.context(r);
        auto ct = tgt.context(r + shift);
        Matrix m(tgt.field(), ct.basis.size(), cr.basis.size());
        for (std::size_t j = 0; j < cr.basis.size(); ++j) {
            Vec unit = zero_vec(src.field(), cr.basis.size());
            unit[j] = Scalar::one(src.field());
            Vec q = tgt.quotient_coords(apply(src.from_quotient(unit, cr)), ct);
            for (std::size_t i = 0; i < ct.basis.size(); ++i) m.at(i, j) = q[i];
        }
        return m;
    }
};

inline PModMorphism identity_morphism(const FPModule& m) {
    PModMorphism f{m, m, Level(0), {}};
    for (std::size_t i = 0; i < m.num_gens(); ++i) {
        Vec v = zero_vec(m.field(), m.num_gens());
        v[i] = Scalar::one(m.field());
        f.images.push_back(std::move(v));
    }
    return f;
}

inline PModMorphism zero_morphism(const FPModule& src, const FPModule& tgt,
                                  const Level& shift = Level(0)) {
    PModMorphism f{src, tgt, shift, {}};
    for (std::size_t i = 0; i < src.num_gens(); ++i)
        f.images.push_back(zero_vec(tgt.field(), tgt.num_gens()));
    return f;
}

inline PModMorphism compose(const PModMorphism& g, const PModMorphism& f) {
    assert(g.src == f.tgt);
    PModMorphism h{f.src, g.tgt, f.shift + g.shift, {}};
    for (const auto& img : f.images) h.images.push_back(g.apply(img));
    return h;
}

// ---------------------------------------------------------------------------
// Subquotient presentation builder
//
// Given an ambient module and, per grid level, a spanning set of a
// sub-functor S(r) and of a sub-functor N(r) of S(r) (both as ambient
// elements, functorial under pushforward), produce a finite presentation of
// r -> S(r)/N(r) together with ambient witnesses for its generators.
// The supplied grid must contain every level where either space jumps.
struct Subquotient {
    FPModule ambient;
    FPModule module;
    std::vector<Vec> witnesses;            // per module generator, ambient element
    std::function<std::vector<Vec>(Level)> denominator;

    // Ambient image of an element given in module generator coordinates.
    Vec realize(const Vec& coeffs) const {
        Vec out = zero_vec(ambient.field(), ambient.num_gens());
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            if (!coeffs[i].is_zero())
                out = vec_add(out, vec_scale(coeffs[i], witnesses[i]));
        return out;
    }

    // Express an ambient element of S(r) in module coordinates at level r,
    // modulo N(r). Returns nullopt if v is not in S(r)+N(r) span.
    std::optional<Vec> express(const Vec& v, const Level& r) const {
        auto ca = ambient.context(r);
        Vec target = ambient.quotient_coords(v, ca);
        std::vector<std::size_t> act;
        for (std::size_t i = 0; i < module.num_gens(); ++i)
            if (!(r < module.generators()[i].birth)) act.push_back(i);
        std::vector<Vec> den = denominator ? denominator(r) : std::vector<Vec>{};
        Matrix cols(ambient.field(), ca.basis.size(), act.size() + den.size());
        for (std::size_t j = 0; j < act.size(); ++j) {
            Vec q = ambient.quotient_coords(witnesses[act[j]], ca);
            for (std::size_t i = 0; i < q.size(); ++i) cols.at(i, j) = q[i];
        }
        for (std::size_t j = 0; j < den.size(); ++j) {
            Vec q = ambient.quotient_coords(den[j], ca);
            for (std::size_t i = 0; i < q.size(); ++i) cols.at(i, act.size() + j) = q[i];
        }
        auto sol = solve(cols, target);
        if (!sol) return std::nullopt;
        Vec coeffs = zero_vec(ambient.field(), module.num_gens());
        for (std::size_t j = 0; j < act.size(); ++j) coeffs[act[j]] = (*sol)[j];
        return coeffs;
    }
};

inline Subquotient build_subquotient(
    const FPModule& ambient, std::vector<Level> grid,
    const std::function<std::vector<Vec>(Level)>& numerator,
    const std::function<std::vector<Vec>(Level)>& denominator = nullptr,
    const std::string& gen_prefix = "g") {
    Field f = ambient.field();
    for (const auto& l : ambient.grid()) grid.push_back(l);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<FPGenerator> gens;
    std::vector<Vec> witnesses;
    std::vector<FPRelation> rels; // coeffs sized lazily, padded at the end

    for (const Level& r : grid) {
        auto ca = ambient.context(r);
        std::vector<Vec> den = denominator ? denominator(r) : std::vector<Vec>{};
        Matrix den_rows(f, 0, ca.basis.size());
        for (const auto& d : den) den_rows.append_row(ambient.quotient_coords(d, ca));
        Rref denq = rref(den_rows);

        auto cls = [&](const Vec& ambient_elt) {
            return denq.reduce(ambient.quotient_coords(ambient_elt, ca));
        };

        // images of the generators chosen so far
        std::vector<std::size_t> act;
        for (std::size_t i = 0; i < gens.size(); ++i)
            if (!(r < gens[i].birth)) act.push_back(i);
        Matrix img_rows(f, 0, ca.basis.size());
        for (std::size_t i : act) img_rows.append_row(cls(witnesses[i]));
        Rref span = rref(img_rows);

        // extend generators until the numerator is covered
        for (const Vec& s : numerator(r)) {
            Vec c = span.reduce(cls(s));
            if (vec_is_zero(c)) continue;
            gens.push_back({gen_prefix + std::to_string(gens.size()), r});
            witnesses.push_back(s);
            act.push_back(gens.size() - 1);
            img_rows.append_row(cls(s));
            span = rref(img_rows);
        }

        // new relations at this level: null combinations of the active images
        Matrix cols(f, ca.basis.size(), act.size());
        for (std::size_t j = 0; j < act.size(); ++j) {
            Vec q = cls(witnesses[act[j]]);
            for (std::size_t i = 0; i < q.size(); ++i) cols.at(i, j) = q[i];
        }
        // append denominator columns so null combos may use them freely
        Matrix colsd(f, ca.basis.size(), act.size() + den.size());
        for (std::size_t i = 0; i < ca.basis.size(); ++i) {
            for (std::size_t j = 0; j < act.size(); ++j) colsd.at(i, j) = cols.at(i, j);
            for (std::size_t j = 0; j < den.size(); ++j)
                colsd.at(i, act.size() + j) =
                    ambient.quotient_coords(den[j], ca)[i];
        }
        Matrix known(f, 0, act.size());
        for (const auto& rel : rels) {
            Vec v = zero_vec(f, act.size());
            for (std::size_t j = 0; j < act.size(); ++j)
                v[j] = act[j] < rel.coeffs.size() ? rel.coeffs[act[j]] : Scalar::zero(f);
            known.append_row(std::move(v));
        }
        Rref knownr = rref(known);
        for (const Vec& ns : nullspace(colsd)) {
            Vec head(ns.begin(), ns.begin() + act.size());
            if (vec_is_zero(head)) continue;
            if (knownr.contains(head)) continue;
            Vec full = zero_vec(f, gens.size());
            for (std::size_t j = 0; j < act.size(); ++j) full[act[j]] = head[j];
            rels.push_back({r, std::move(full)});
            known.append_row(head);
            knownr = rref(known);
        }
    }

    for (auto& rel : rels) rel.coeffs.resize(gens.size(), Scalar::zero(f));

    Subquotient out;
    out.ambient = ambient;
    out.module = FPModule(f, std::move(gens), std::move(rels));
    out.witnesses = std::move(witnesses);
    out.denominator = denominator;
    return out;
}

// ---------------------------------------------------------------------------
// Kernel and barcode

struct KernelResult {
    FPModule module;
    PModMorphism inclusion; // shift 0 into the source of f
    Subquotient sub;
};

// Pointwise kernels Ker(f)(s) = Ker(f^s), presented finitely.
inline KernelResult kernel(const PModMorphism& f) {
    std::vector<Level> grid = f.src.grid();
    for (const auto& l : f.tgt.grid()) grid.push_back(l - f.shift);
    auto numerator = [&f](Level r) {
        auto c = f.src.context(r);
        std::vector<Vec> out;
        for (const Vec& q : nullspace(f.matrix_at(r)))
            out.push_back(f.src.from_quotient(q, c));
        return out;
    };
    Subquotient sq = build_subquotient(f.src, std::move(grid), numerator, nullptr, "k");
    KernelResult res{sq.module, PModMorphism{sq.module, f.src, Level(0), sq.witnesses}, sq};
    return res;
}

struct Bar {
    Level birth;
    std::optional<Level> death; // nullopt = infinite
    bool operator==(const Bar& o) const { return birth == o.birth && death == o.death; }
};

// Interval decomposition by column reduction of the presentation matrix in
// weight order; pivots are latest-born generators in canonical order.
inline std::vector<Bar> barcode(const FPModule& m) {
    Field f = m.field();
    const auto& order = m.canonical_order();
    std::vector<std::size_t> rank_of(m.num_gens());
    for (std::size_t k = 0; k < order.size(); ++k) rank_of[order[k]] = k;

    std::vector<std::size_t> cols; // relation indices sorted by (weight, idx)
    for (std::size_t i = 0; i < m.relations().size(); ++i) cols.push_back(i);
    std::sort(cols.begin(), cols.end(), [&](std::size_t a, std::size_t b) {
        if (m.relations()[a].weight != m.relations()[b].weight)
            return m.relations()[a].weight < m.relations()[b].weight;
        return a < b;
    });

    auto pivot = [&](const Vec& v) -> std::size_t {
        std::size_t best = FPModule::npos;
        for (std::size_t i = 0; i < v.size(); ++i)
            if (!v[i].is_zero() && (best == FPModule::npos || rank_of[i] > rank_of[best]))
                best = i;
        return best;
    };

    std::map<std::size_t, std::pair<Vec, std::size_t>> reduced; // pivot gen -> (col, rel idx)
    std::vector<Bar> bars;
    for (std::size_t ci : cols) {
        Vec v = m.relations()[ci].coeffs;
        std::size_t p = pivot(v);
        while (p != FPModule::npos && reduced.count(p)) {
            const Vec& other = reduced[p].first;
            v = vec_sub(v, vec_scale(v[p] / other[p], other));
            p = pivot(v);
        }
        if (p == FPModule::npos) continue;
        reduced[p] = {v, ci};
        const Level& b = m.generators()[p].birth;
        const Level& d = m.relations()[ci].weight;
        if (b < d) bars.push_back({b, d});
    }
    for (std::size_t i = 0; i < m.num_gens(); ++i)
        if (!reduced.count(i)) bars.push_back({m.generators()[i].birth, std::nullopt});

    std::sort(bars.begin(), bars.end(), [](const Bar& a, const Bar& b) {
        if (a.birth != b.birth) return a.birth < b.birth;
        if (a.death.has_value() != b.death.has_value()) return !a.death.has_value();
        if (a.death && b.death && *a.death != *b.death) return *a.death < *b.death;
        return false;
    });
    return bars;
}

} // namespace percat
