#pragma once

#include "percat/presentation.hpp"

namespace percat {

struct FCGenerator {
    std::string name;
    int degree;
    Level birth;
    bool operator==(const FCGenerator& o) const {
        return name == o.name && degree == o.degree && birth == o.birth;
    }
};

// Filtered chain complex: free on graded generators with birth levels; the
// differential must respect degrees (-1) and the filtration.
class FilteredComplex {
public:
    FilteredComplex() : field_(Field::rationals()) {}
    FilteredComplex(Field f, std::vector<FCGenerator> gens, std::vector<Vec> diff)
        : field_(f), gens_(std::move(gens)), diff_(std::move(diff)) {
        assert(diff_.size() == gens_.size());
    }

    Field field() const { return field_; }
    const std::vector<FCGenerator>& generators() const { return gens_; }
    std::size_t num_gens() const { return gens_.size(); }
    const Vec& d(std::size_t i) const { return diff_[i]; }

    Vec apply_d(const Vec& v) const {
        Vec out = zero_vec(field_, gens_.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            if (!v[i].is_zero()) out = vec_add(out, vec_scale(v[i], diff_[i]));
        return out;
    }

    std::vector<Level> grid() const {
        std::vector<Level> g;
        for (const auto& x : gens_) g.push_back(x.birth);
        std::sort(g.begin(), g.end());
        g.erase(std::unique(g.begin(), g.end()), g.end());
        return g;
    }

    std::pair<int, int> degree_range() const {
        if (gens_.empty()) return {0, -1};
        int lo = gens_[0].degree, hi = gens_[0].degree;
        for (const auto& g : gens_) {
            lo = std::min(lo, g.degree);
            hi = std::max(hi, g.degree);
        }
        return {lo, hi};
    }

    bool operator==(const FilteredComplex& o) const {
        if (!(field_ == o.field_) || !(gens_ == o.gens_)) return false;
        for (std::size_t i = 0; i < diff_.size(); ++i)
            for (std::size_t j = 0; j < diff_[i].size(); ++j)
                if (diff_[i][j] != o.diff_[i][j]) return false;
        return true;
    }

private:
    Field field_;
    std::vector<FCGenerator> gens_;
    std::vector<Vec> diff_;
};

struct FccReport {
    bool ok = true;
    std::vector<std::string> violations;
    void fail(const std::string& s) {
        ok = false;
        violations.push_back(s);
    }
};

inline FccReport validate_fcc(const FilteredComplex& c) {
    FccReport rep;
    for (std::size_t i = 0; i < c.num_gens(); ++i) {
        const auto& g = c.generators()[i];
        for (std::size_t j = 0; j < c.num_gens(); ++j) {
            if (c.d(i)[j].is_zero()) continue;
            const auto& h = c.generators()[j];
            if (h.degree != g.degree - 1)
                rep.fail("differential of " + g.name + " hits wrong degree " + h.name);
            if (g.birth < h.birth)
                rep.fail("differential of " + g.name + " hits later-born " + h.name);
        }
        if (!vec_is_zero(c.apply_d(c.d(i))))
            rep.fail("d.d nonzero on " + g.name);
    }
    return rep;
}

// Chain map with concrete shift t: generator g goes to an element of the
// target supported on generators born at most birth(g) + t.
struct ChainMap {
    FilteredComplex src, tgt;
    Level shift;
    std::vector<Vec> images;

    Vec apply(const Vec& v) const {
        Vec out = zero_vec(tgt.field(), tgt.num_gens());
        for (std::size_t i = 0; i < v.size(); ++i)
            if (!v[i].is_zero()) out = vec_add(out, vec_scale(v[i], images[i]));
        return out;
    }
};

inline bool chain_map_check(const ChainMap& f) {
    if (f.images.size() != f.src.num_gens()) return false;
    for (std::size_t i = 0; i < f.src.num_gens(); ++i) {
        const auto& g = f.src.generators()[i];
        for (std::size_t j = 0; j < f.tgt.num_gens(); ++j) {
            if (f.images[i][j].is_zero()) continue;
            const auto& h = f.tgt.generators()[j];
            if (h.degree != g.degree) return false;
            if (g.birth + f.shift < h.birth) return false;
        }
        // d f = f d exactly (free modules)
        Vec lhs = f.tgt.apply_d(f.images[i]);
        Vec rhs = f.apply(f.src.d(i));
        if (!vec_is_zero(vec_sub(lhs, rhs))) return false;
    }
    return true;
}

inline ChainMap identity_chain_map(const FilteredComplex& c) {
    ChainMap f{c, c, Level(0), {}};
    for (std::size_t i = 0; i < c.num_gens(); ++i) {
        Vec v = zero_vec(c.field(), c.num_gens());
        v[i] = Scalar::one(c.field());
        f.images.push_back(std::move(v));
    }
    return f;
}

inline ChainMap zero_chain_map(const FilteredComplex& a, const FilteredComplex& b,
                               const Level& shift = Level(0)) {
    ChainMap f{a, b, shift, {}};
    for (std::size_t i = 0; i < a.num_gens(); ++i)
        f.images.push_back(zero_vec(a.field(), b.num_gens()));
    return f;
}

inline ChainMap compose(const ChainMap& g, const ChainMap& f) {
    assert(g.src == f.tgt);
    ChainMap h{f.src, g.tgt, f.shift + g.shift, {}};
    for (const auto& img : f.images) h.images.push_back(g.apply(img));
    return h;
}

inline ChainMap add_chain_maps(const ChainMap& a, const ChainMap& b) {
    assert(a.shift == b.shift);
    ChainMap out = a;
    for (std::size_t i = 0; i < out.images.size(); ++i)
        out.images[i] = vec_add(out.images[i], b.images[i]);
    return out;
}

inline ChainMap scale_chain_map(const Scalar& c, const ChainMap& a) {
    ChainMap out = a;
    for (auto& img : out.images) img = vec_scale(c, img);
    return out;
}

// S^a on complexes: births move by a (so S^{-r} makes everything earlier).
inline FilteredComplex shift_complex(const FilteredComplex& c, const Level& a) {
    std::vector<FCGenerator> gens = c.generators();
    for (auto& g : gens) g.birth += a;
    std::vector<Vec> diff;
    for (std::size_t i = 0; i < c.num_gens(); ++i) diff.push_back(c.d(i));
    return FilteredComplex(c.field(), std::move(gens), std::move(diff));
}

// T: degree shift with negated differential.
inline FilteredComplex suspend(const FilteredComplex& c, int k = 1) {
    std::vector<FCGenerator> gens = c.generators();
    for (auto& g : gens) g.degree += k;
    std::vector<Vec> diff;
    for (std::size_t i = 0; i < c.num_gens(); ++i) {
        Vec v = c.d(i);
        if (k % 2 != 0) v = vec_scale(-Scalar::one(c.field()), v);
        diff.push_back(std::move(v));
    }
    return FilteredComplex(c.field(), std::move(gens), std::move(diff));
}

inline ChainMap suspend_map(const ChainMap& f, int k = 1) {
    return ChainMap{suspend(f.src, k), suspend(f.tgt, k), f.shift, f.images};
}

// Reinterpret a shift-t map as the same data viewed with a larger shift or a
// shifted target (eta-composition).
inline ChainMap push_chain_map(const ChainMap& f, const Level& s) {
    return ChainMap{f.src, shift_complex(f.tgt, -s), f.shift, f.images};
}

inline ChainMap reinterpret_shift0(const ChainMap& f) {
    // A -> B with shift t equals the shift-0 map A -> S^{-t}B
    return ChainMap{f.src, shift_complex(f.tgt, -f.shift), Level(0), f.images};
}

inline FilteredComplex direct_sum_complex(const FilteredComplex& a,
                                          const FilteredComplex& b,
                                          const std::string& lp = "l.",
                                          const std::string& rp = "r.") {
    assert(a.field() == b.field());
    std::vector<FCGenerator> gens;
    for (const auto& g : a.generators()) gens.push_back({lp + g.name, g.degree, g.birth});
    for (const auto& g : b.generators()) gens.push_back({rp + g.name, g.degree, g.birth});
    std::size_t na = a.num_gens(), nb = b.num_gens();
    std::vector<Vec> diff;
    for (std::size_t i = 0; i < na; ++i) {
        Vec v = zero_vec(a.field(), na + nb);
        for (std::size_t j = 0; j < na; ++j) v[j] = a.d(i)[j];
        diff.push_back(std::move(v));
    }
    for (std::size_t i = 0; i < nb; ++i) {
        Vec v = zero_vec(a.field(), na + nb);
        for (std::size_t j = 0; j < nb; ++j) v[na + j] = b.d(i)[j];
        diff.push_back(std::move(v));
    }
    return FilteredComplex(a.field(), std::move(gens), std::move(diff));
}

// ---------------------------------------------------------------------------
// Mapping cones and triangles

struct StrictWitness {
    FilteredComplex cone_prime; // C'
    ChainMap vp;                // B -> C'
    ChainMap wp;                // C' -> TA (the unshifted row)
    ChainMap phi;               // S^r C -> C'
    ChainMap fmap;              // C' -> C
};

struct FCTriangle {
    FilteredComplex A, B, C, TA; // TA is the target of w (already shifted by -r)
    ChainMap u, v, w;
    Level weight;
    std::optional<StrictWitness> witness;
};

// Cone of a shift-0 chain map f : A -> B, with the canonical weight-0 strict
// exact triangle. Shift-t maps are first reinterpreted into S^{-t}B.
inline std::pair<FilteredComplex, FCTriangle> mapping_cone(const ChainMap& fin) {
    ChainMap f = fin.shift == Level(0) ? fin : reinterpret_shift0(fin);
    const FilteredComplex& a = f.src;
    const FilteredComplex& b = f.tgt;
    Field fd = a.field();
    std::size_t na = a.num_gens(), nb = b.num_gens();
    std::vector<FCGenerator> gens;
    for (const auto& g : a.generators())
        gens.push_back({"c." + g.name, g.degree + 1, g.birth});
    for (const auto& g : b.generators()) gens.push_back({"b." + g.name, g.degree, g.birth});
    std::vector<Vec> diff;
    for (std::size_t i = 0; i < na; ++i) {
        Vec v = zero_vec(fd, na + nb);
        for (std::size_t j = 0; j < na; ++j) v[j] = -a.d(i)[j];
        for (std::size_t j = 0; j < nb; ++j) v[na + j] = f.images[i][j];
        diff.push_back(std::move(v));
    }
    for (std::size_t i = 0; i < nb; ++i) {
        Vec v = zero_vec(fd, na + nb);
        for (std::size_t j = 0; j < nb; ++j) v[na + j] = b.d(i)[j];
        diff.push_back(std::move(v));
    }
    FilteredComplex cone(fd, std::move(gens), std::move(diff));

    FCTriangle t;
    t.A = a;
    t.B = b;
    t.C = cone;
    t.TA = suspend(a);
    t.u = f;
    t.weight = Level(0);
    t.v = ChainMap{b, cone, Level(0), {}};
    for (std::size_t i = 0; i < nb; ++i) {
        Vec v = zero_vec(fd, na + nb);
        v[na + i] = Scalar::one(fd);
        t.v.images.push_back(std::move(v));
    }
    t.w = ChainMap{cone, t.TA, Level(0), {}};
    for (std::size_t i = 0; i < na; ++i) {
        Vec v = zero_vec(fd, na);
        v[i] = Scalar::one(fd);
        t.w.images.push_back(std::move(v));
    }
    for (std::size_t i = 0; i < nb; ++i) t.w.images.push_back(zero_vec(fd, na));

    StrictWitness sw;
    sw.cone_prime = cone;
    sw.vp = t.v;
    sw.wp = t.w;
    sw.phi = ChainMap{cone, cone, Level(0), identity_chain_map(cone).images};
    sw.fmap = identity_chain_map(cone);
    t.witness = sw;
    return {cone, t};
}

// ---------------------------------------------------------------------------
// Homology persistence

struct HomologyModule {
    std::map<int, Subquotient> by_degree; // degree -> H_n as a subquotient

    const FPModule& at(int n) const { return by_degree.at(n).module; }
    bool has(int n) const { return by_degree.count(n) != 0; }
};

inline FPModule degree_ambient(const FilteredComplex& c, int n) {
    std::vector<FPGenerator> gens;
    for (const auto& g : c.generators())
        if (g.degree == n) gens.push_back({g.name, g.birth});
    return FPModule(c.field(), std::move(gens), {});
}

inline HomologyModule homology_persistence(const FilteredComplex& c) {
    HomologyModule h;
    auto [lo, hi] = c.degree_range();
    Field fd = c.field();
    for (int n = lo; n <= hi; ++n) {
        // index maps between complex coordinates and per-degree coordinates
        std::vector<std::size_t> idx_n, idx_np1;
        for (std::size_t i = 0; i < c.num_gens(); ++i) {
            if (c.generators()[i].degree == n) idx_n.push_back(i);
            if (c.generators()[i].degree == n + 1) idx_np1.push_back(i);
        }
        FPModule ambient = degree_ambient(c, n);
        auto project = [&](const Vec& full) {
            Vec v = zero_vec(fd, idx_n.size());
            for (std::size_t k = 0; k < idx_n.size(); ++k) v[k] = full[idx_n[k]];
            return v;
        };
        auto numerator = [&c, idx_n, fd, project](Level r) {
            // cycles among generators born by r
            std::vector<std::size_t> act;
            for (std::size_t k = 0; k < idx_n.size(); ++k)
                if (!(r < c.generators()[idx_n[k]].birth)) act.push_back(k);
            Matrix m(fd, c.num_gens(), act.size());
            for (std::size_t j = 0; j < act.size(); ++j) {
                const Vec& dj = c.d(idx_n[act[j]]);
                for (std::size_t i = 0; i < c.num_gens(); ++i) m.at(i, j) = dj[i];
            }
            std::vector<Vec> out;
            for (const Vec& q : nullspace(m)) {
                Vec v = zero_vec(fd, idx_n.size());
                for (std::size_t j = 0; j < act.size(); ++j) v[act[j]] = q[j];
                out.push_back(std::move(v));
            }
            return out;
        };
        auto denominator = [&c, idx_np1, fd, project](Level r) {
            std::vector<Vec> out;
            for (std::size_t k : idx_np1)
                if (!(r < c.generators()[k].birth)) out.push_back(project(c.d(k)));
            return out;
        };
        h.by_degree.emplace(
            n, build_subquotient(ambient, c.grid(), numerator, denominator,
                                 "h" + std::to_string(n) + "_"));
    }
    return h;
}

// r-acyclic iff every homology bar has length at most r.
inline bool is_r_acyclic_complex(const FilteredComplex& c, const Level& r) {
    HomologyModule h = homology_persistence(c);
    for (const auto& [n, sq] : h.by_degree)
        for (const Bar& b : barcode(sq.module)) {
            if (!b.death) return false;
            if (r < *b.death - b.birth) return false;
        }
    return true;
}

// Induced map on degree-n homology, as a module morphism with the same shift.
inline PModMorphism induced_homology_map(const HomologyModule& hsrc,
                                         const HomologyModule& htgt,
                                         const ChainMap& f, int n) {
    const Subquotient& s = hsrc.by_degree.at(n);
    const Subquotient& t = htgt.by_degree.at(n);
    PModMorphism out{s.module, t.module, f.shift, {}};
    // witnesses live in per-degree coordinates; move through the full complex
    std::vector<std::size_t> idx_src, idx_tgt;
    for (std::size_t i = 0; i < f.src.num_gens(); ++i)
        if (f.src.generators()[i].degree == n) idx_src.push_back(i);
    for (std::size_t i = 0; i < f.tgt.num_gens(); ++i)
        if (f.tgt.generators()[i].degree == n) idx_tgt.push_back(i);
    for (std::size_t w = 0; w < s.module.num_gens(); ++w) {
        Vec cyc = s.witnesses[w];
        Vec full = zero_vec(f.src.field(), f.src.num_gens());
        for (std::size_t k = 0; k < idx_src.size(); ++k) full[idx_src[k]] = cyc[k];
        Vec img = f.apply(full);
        Vec proj = zero_vec(f.tgt.field(), idx_tgt.size());
        for (std::size_t k = 0; k < idx_tgt.size(); ++k) proj[k] = img[idx_tgt[k]];
        auto expr = t.express(proj, s.module.generators()[w].birth + f.shift);
        if (!expr) throw std::logic_error("induced map failed to express in homology");
        out.images.push_back(*expr);
    }
    return out;
}

// Chain-homotopy triviality at the given shift: solve d h + h d = f.
inline bool is_nullhomotopic(const ChainMap& f) {
    Field fd = f.src.field();
    // unknowns: h(g) for each source generator, valued in degree(g)+1 target
    // generators born by birth(g) + shift
    struct Slot {
        std::size_t src_gen, tgt_gen;
    };
    std::vector<Slot> slots;
    for (std::size_t i = 0; i < f.src.num_gens(); ++i)
        for (std::size_t j = 0; j < f.tgt.num_gens(); ++j) {
            if (f.tgt.generators()[j].degree != f.src.generators()[i].degree + 1)
                continue;
            if (f.src.generators()[i].birth + f.shift < f.tgt.generators()[j].birth)
                continue;
            slots.push_back({i, j});
        }
    // equations: for each src generator i and tgt generator m (same degree):
    // (d h + h d)(i)[m] = f(i)[m]
    std::vector<std::pair<std::size_t, std::size_t>> eqs;
    for (std::size_t i = 0; i < f.src.num_gens(); ++i)
        for (std::size_t m = 0; m < f.tgt.num_gens(); ++m)
            if (f.tgt.generators()[m].degree == f.src.generators()[i].degree)
                eqs.push_back({i, m});
    Matrix mat(fd, eqs.size(), slots.size());
    Vec rhs = zero_vec(fd, eqs.size());
    for (std::size_t e = 0; e < eqs.size(); ++e) {
        auto [i, m] = eqs[e];
        rhs[e] = f.images[i][m];
        for (std::size_t sidx = 0; sidx < slots.size(); ++sidx) {
            auto [si, sj] = slots[sidx];
            Scalar coef = Scalar::zero(fd);
            // d h term: h(i) = e_sj contributes d(sj)[m] when si == i
            if (si == i) coef += f.tgt.d(sj)[m];
            // h d term: h applied to d(i): coefficient of e_si in d(i)
            coef += f.src.d(i)[si] * (sj == m ? Scalar::one(fd) : Scalar::zero(fd));
            mat.at(e, sidx) = coef;
        }
    }
    return solve(mat, rhs).has_value();
}

// Equality in the homotopy category at matching shifts.
inline bool homotopy_equal(const ChainMap& f, const ChainMap& g) {
    assert(f.shift == g.shift);
    ChainMap diff = f;
    for (std::size_t i = 0; i < diff.images.size(); ++i)
        diff.images[i] = vec_sub(diff.images[i], g.images[i]);
    return is_nullhomotopic(diff);
}

} // namespace percat
