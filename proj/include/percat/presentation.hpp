#pragma once

#include <map>
#include <sstream>
#include <tuple>

#include "percat/fpmodule.hpp"

namespace percat {

// Formal shifted object S^{shift} obj of the flattened category.
struct ShiftedObject {
    int obj = 0;
    Level shift;
    bool operator==(const ShiftedObject& o) const {
        return obj == o.obj && shift == o.shift;
    }
};

inline ShiftedObject shifted(const ShiftedObject& a, const Level& t) {
    return ShiftedObject{a.obj, a.shift + t};
}

// Morphism of the flattened category: an element of Hom(A,B)(a-b) stored by
// its coefficients over the hom generators of (A,B).
struct WMorphism {
    ShiftedObject src, tgt;
    Vec coeffs;

    Level weight() const { return src.shift - tgt.shift; }
};

// Finite presentation of a persistence (semi-)category: finitely many
// objects, an FPModule of hom generators per ordered object pair, a bilinear
// composition table on generators and, when unital, an identity element per
// object. Hom(A,B)(r) is the level-r space of the hom module.
class PCatPresentation {
public:
    PCatPresentation() : field_(Field::rationals()), unital_(false) {}
    PCatPresentation(Field f, std::vector<std::string> objects, bool unital)
        : field_(f), objects_(std::move(objects)), unital_(unital) {
        for (std::size_t a = 0; a < objects_.size(); ++a)
            for (std::size_t b = 0; b < objects_.size(); ++b)
                hom_[{(int)a, (int)b}] = zero_module(f);
    }

    Field field() const { return field_; }
    bool unital() const { return unital_; }
    int num_objects() const { return (int)objects_.size(); }
    const std::vector<std::string>& objects() const { return objects_; }
    const std::string& object_name(int a) const { return objects_[a]; }

    void set_hom(int a, int b, FPModule m) {
        assert(m.field() == field_);
        hom_[{a, b}] = std::move(m);
    }
    const FPModule& hom(int a, int b) const { return hom_.at({a, b}); }

    // Table entry: composition of generators g_i in hom(a,b) and h_j in
    // hom(b,c), as an element of hom(a,c) valid at birth(g_i)+birth(h_j).
    void set_composition(int a, int b, int c, std::size_t i, std::size_t j, Vec v) {
        assert(v.size() == hom(a, c).num_gens());
        comp_[{a, b, c}][{i, j}] = std::move(v);
    }
    void set_identity(int a, Vec v) {
        assert(unital_);
        assert(v.size() == hom(a, a).num_gens());
        identity_[a] = std::move(v);
    }
    const Vec& identity(int a) const { return identity_.at(a); }

    // Bilinear composition of hom elements: f in Hom(a,b), g in Hom(b,c).
    Vec compose_elements(int a, int b, int c, const Vec& g, const Vec& f) const {
        Vec out = zero_vec(field_, hom(a, c).num_gens());
        auto it = comp_.find({a, b, c});
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (f[i].is_zero()) continue;
            for (std::size_t j = 0; j < g.size(); ++j) {
                if (g[j].is_zero()) continue;
                assert(it != comp_.end());
                const Vec& entry = it->second.at({i, j});
                out = vec_add(out, vec_scale(f[i] * g[j], entry));
            }
        }
        return out;
    }

    // Strict composition: endpoints must coincide as shifted objects.
    WMorphism compose(const WMorphism& g, const WMorphism& f) const {
        if (!(f.tgt == g.src))
            throw std::invalid_argument("compose: endpoint mismatch");
        return WMorphism{f.src, g.tgt,
                         compose_elements(f.src.obj, f.tgt.obj, g.tgt.obj,
                                          g.coeffs, f.coeffs)};
    }

    // Composition after aligning g's source with f's target by a formal shift
    // (which leaves both weights unchanged).
    WMorphism compose_aligned(const WMorphism& g, const WMorphism& f) const {
        if (f.tgt.obj != g.src.obj)
            throw std::invalid_argument("compose: object mismatch");
        Level t = f.tgt.shift - g.src.shift;
        WMorphism gs{shifted(g.src, t), shifted(g.tgt, t), g.coeffs};
        return compose(gs, f);
    }

    WMorphism shift_morphism(const WMorphism& f, const Level& t) const {
        return WMorphism{shifted(f.src, t), shifted(f.tgt, t), f.coeffs};
    }

    // eta_r composed after f: same element at weight + r.
    WMorphism pushforward(const WMorphism& f, const Level& s) const {
        assert(!(s < Level(0)));
        return WMorphism{f.src, shifted(f.tgt, -s), f.coeffs};
    }

    WMorphism zero_wmorphism(const ShiftedObject& a, const ShiftedObject& b) const {
        return WMorphism{a, b, zero_vec(field_, hom(a.obj, b.obj).num_gens())};
    }

    // eta_r^A : A -> S^{-r}A, the identity pushed to weight r (unital case).
    WMorphism eta(const ShiftedObject& a, const Level& r) const {
        if (r < Level(0)) throw std::invalid_argument("eta needs r >= 0");
        if (!unital_) throw std::logic_error("eta needs an identity");
        return WMorphism{a, shifted(a, -r), identity(a.obj)};
    }

    bool morphism_valid(const WMorphism& f) const {
        return hom(f.src.obj, f.tgt.obj).element_valid_at(f.coeffs, f.weight());
    }

    bool is_zero(const WMorphism& f) const {
        return hom(f.src.obj, f.tgt.obj).is_zero_at(f.coeffs, f.weight());
    }

    // Equality as morphisms between the same shifted endpoints.
    bool equal(const WMorphism& f, const WMorphism& g) const {
        assert(f.src == g.src && f.tgt == g.tgt);
        return hom(f.src.obj, f.tgt.obj).equal_at(f.coeffs, g.coeffs, f.weight());
    }

    bool is_r_acyclic(const ShiftedObject& a, const Level& r) const {
        return is_zero(eta(a, r));
    }

    // f ~_r f': equal after eta_r composition.
    bool r_equivalent(const WMorphism& f, const WMorphism& g, const Level& r) const {
        if (!(f.src == g.src) || !(f.tgt == g.tgt))
            throw std::invalid_argument("r_equivalent: endpoint mismatch");
        return equal(pushforward(f, r), pushforward(g, r));
    }

    std::size_t hom_zero_dim(int a, int b) const { return hom(a, b).dim_at(Level(0)); }

    StableSpace hom_stable(int a, int b) const { return eval_stable(hom(a, b)); }

    // Class of f in the limit category: coordinates in the stable basis of
    // its hom module. Levels at or past r_stab share one canonical basis.
    Vec limit_class(const WMorphism& f) const {
        const FPModule& h = hom(f.src.obj, f.tgt.obj);
        Level lvl = level_max(h.r_stab(), f.weight());
        return h.quotient_coords(f.coeffs, h.context(lvl));
    }

    // Least grid level at which a stable class lifts, with a lift.
    std::optional<std::pair<Level, Vec>> lift_limit_class(int a, int b,
                                                          const Vec& cls) const {
        const FPModule& h = hom(a, b);
        std::vector<Level> grid = h.grid();
        if (grid.empty()) grid.push_back(Level(0));
        for (const Level& r : grid) {
            auto c = h.context(r);
            auto cs = h.context(level_max(h.r_stab(), r));
            Matrix cols(field_, cls.size(), c.basis.size());
            for (std::size_t j = 0; j < c.basis.size(); ++j) {
                Vec unit = zero_vec(field_, c.basis.size());
                unit[j] = Scalar::one(field_);
                Vec q = h.quotient_coords(h.from_quotient(unit, c), cs);
                for (std::size_t i = 0; i < q.size(); ++i) cols.at(i, j) = q[i];
            }
            if (auto sol = solve(cols, cls))
                return std::make_pair(r, h.from_quotient(*sol, c));
        }
        return std::nullopt;
    }

    // Union of the hom grids, closed under pairwise sums up to rmax.
    std::vector<Level> category_grid(std::optional<Level> rmax = std::nullopt) const {
        std::vector<Level> base{Level(0)};
        Level maxc(0);
        for (const auto& [k, m] : hom_)
            for (const auto& l : m.grid()) {
                base.push_back(l);
                maxc = level_max(maxc, l);
            }
        Level bound = rmax ? *rmax : maxc * 4;
        std::sort(base.begin(), base.end());
        base.erase(std::unique(base.begin(), base.end()), base.end());
        std::vector<Level> grid = base;
        bool grew = true;
        while (grew) {
            grew = false;
            std::vector<Level> next = grid;
            for (const auto& x : grid)
                for (const auto& y : base) {
                    Level s = x + y;
                    if (bound < s) continue;
                    if (!std::binary_search(next.begin(), next.end(), s)) {
                        next.push_back(s);
                        std::sort(next.begin(), next.end());
                        grew = true;
                    }
                }
            grid = std::move(next);
        }
        return grid;
    }

    struct ValidationReport {
        bool ok = true;
        std::vector<std::string> violations;
        void fail(const std::string& s) {
            ok = false;
            violations.push_back(s);
        }
    };

    ValidationReport validate() const;

    // unit coefficient vector of the i-th generator of hom(a,b)
    Vec gen_unit(int a, int b, std::size_t i) const {
        Vec v = zero_vec(field_, hom(a, b).num_gens());
        v[i] = Scalar::one(field_);
        return v;
    }

    WMorphism gen_morphism(int a, int b, std::size_t i) const {
        return WMorphism{{a, hom(a, b).generators()[i].birth}, {b, Level(0)},
                         gen_unit(a, b, i)};
    }

private:
    Field field_;
    std::vector<std::string> objects_;
    bool unital_;
    std::map<std::pair<int, int>, FPModule> hom_;
    std::map<std::tuple<int, int, int>, std::map<std::pair<std::size_t, std::size_t>, Vec>> comp_;
    std::map<int, Vec> identity_;
};

inline PCatPresentation::ValidationReport PCatPresentation::validate() const {
    ValidationReport rep;
    int n = num_objects();

    // table entries exist and live at the right levels
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                const FPModule& ab = hom(a, b);
                const FPModule& bc = hom(b, c);
                const FPModule& ac = hom(a, c);
                for (std::size_t i = 0; i < ab.num_gens(); ++i)
                    for (std::size_t j = 0; j < bc.num_gens(); ++j) {
                        auto it = comp_.find({a, b, c});
                        if (it == comp_.end() || !it->second.count({i, j})) {
                            rep.fail("missing composition entry " + objects_[a] + "->" +
                                     objects_[b] + "->" + objects_[c]);
                            continue;
                        }
                        Level lvl = ab.generators()[i].birth + bc.generators()[j].birth;
                        if (!ac.element_valid_at(it->second.at({i, j}), lvl))
                            rep.fail("composition entry born too late at " +
                                     objects_[a] + "->" + objects_[b] + "->" + objects_[c]);
                    }
            }
    if (!rep.ok) return rep;

    // identities act as units
    if (unital_) {
        for (int a = 0; a < n; ++a) {
            if (!identity_.count(a)) {
                rep.fail("missing identity for " + objects_[a]);
                continue;
            }
            if (!hom(a, a).element_valid_at(identity(a), Level(0)))
                rep.fail("identity of " + objects_[a] + " not a weight-0 element");
        }
        if (!rep.ok) return rep;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (std::size_t i = 0; i < hom(a, b).num_gens(); ++i) {
                    WMorphism g = gen_morphism(a, b, i);
                    WMorphism ida{{a, g.src.shift}, {a, g.src.shift}, identity(a)};
                    WMorphism idb{{b, Level(0)}, {b, Level(0)}, identity(b)};
                    if (!equal(compose(g, ida), g))
                        rep.fail("right unit law fails for generator " +
                                 hom(a, b).generators()[i].name);
                    if (!equal(compose(idb, g), g))
                        rep.fail("left unit law fails for generator " +
                                 hom(a, b).generators()[i].name);
                }
    }

    // associativity on generator triples
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d)
                    for (std::size_t i = 0; i < hom(a, b).num_gens(); ++i)
                        for (std::size_t j = 0; j < hom(b, c).num_gens(); ++j)
                            for (std::size_t k = 0; k < hom(c, d).num_gens(); ++k) {
                                Vec gf = compose_elements(a, b, c, gen_unit(b, c, j),
                                                          gen_unit(a, b, i));
                                Vec h_gf = compose_elements(a, c, d, gen_unit(c, d, k), gf);
                                Vec hg = compose_elements(b, c, d, gen_unit(c, d, k),
                                                          gen_unit(b, c, j));
                                Vec hg_f = compose_elements(a, b, d, hg, gen_unit(a, b, i));
                                Level lvl = hom(a, b).generators()[i].birth +
                                            hom(b, c).generators()[j].birth +
                                            hom(c, d).generators()[k].birth;
                                if (!hom(a, d).equal_at(h_gf, hg_f, lvl)) {
                                    std::ostringstream os;
                                    os << "associativity fails on ("
                                       << hom(a, b).generators()[i].name << ", "
                                       << hom(b, c).generators()[j].name << ", "
                                       << hom(c, d).generators()[k].name << ")";
                                    rep.fail(os.str());
                                }
                            }

    // composition respects relations on both sides
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const FPModule& ab = hom(a, b);
            for (const auto& rel : ab.relations()) {
                for (int c = 0; c < n; ++c) {
                    for (std::size_t j = 0; j < hom(b, c).num_gens(); ++j) {
                        Vec v = compose_elements(a, b, c, gen_unit(b, c, j), rel.coeffs);
                        Level lvl = rel.weight + hom(b, c).generators()[j].birth;
                        if (!hom(a, c).is_zero_at(v, lvl))
                            rep.fail("relation not respected by postcomposition in hom(" +
                                     objects_[a] + "," + objects_[b] + ")");
                    }
                    for (std::size_t j = 0; j < hom(c, a).num_gens(); ++j) {
                        Vec v = compose_elements(c, a, b, rel.coeffs, gen_unit(c, a, j));
                        Level lvl = rel.weight + hom(c, a).generators()[j].birth;
                        if (!hom(c, b).is_zero_at(v, lvl))
                            rep.fail("relation not respected by precomposition in hom(" +
                                     objects_[a] + "," + objects_[b] + ")");
                    }
                }
            }
        }
    return rep;
}

inline Vec unit_vec(Field f, std::size_t n, std::size_t i) {
    Vec v = zero_vec(f, n);
    v[i] = Scalar::one(f);
    return v;
}

// The one-object category with morphisms k<a_r> (r >= 0) + k<e_r> (r >= 1),
// a the identity and e idempotent from weight 1 on; the standard example of
// a limit idempotent with no weight-zero representative.
inline PCatPresentation one_object_example(Field f) {
    PCatPresentation p(f, {"*"}, true);
    FPModule h(f, {{"a", Level(0)}, {"e", Level(1)}}, {});
    p.set_hom(0, 0, h);
    Vec a = unit_vec(f, 2, 0), e = unit_vec(f, 2, 1);
    p.set_composition(0, 0, 0, 0, 0, a); // a.a = a
    p.set_composition(0, 0, 0, 0, 1, e); // e after a
    p.set_composition(0, 0, 0, 1, 0, e); // a after e
    p.set_composition(0, 0, 0, 1, 1, e); // e.e = e
    p.set_identity(0, a);
    return p;
}

} // namespace percat
