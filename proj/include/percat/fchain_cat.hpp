#pragma once

#include "percat/fchain.hpp"

namespace percat {

// ---------------------------------------------------------------------------
// Hom persistence modules of the homotopy category of filtered complexes

struct ChainHomModule {
    Subquotient sq;
    FilteredComplex src, tgt;
    std::vector<std::pair<std::size_t, std::size_t>> slots; // (src gen, tgt gen)

    ChainMap realize(const Vec& coeffs, const Level& shift) const {
        ChainMap f = zero_chain_map(src, tgt, shift);
        Vec ambient = sq.realize(coeffs);
        for (std::size_t s = 0; s < slots.size(); ++s)
            f.images[slots[s].first][slots[s].second] = ambient[s];
        return f;
    }

    Vec ambient_of(const ChainMap& f) const {
        Vec v = zero_vec(src.field(), slots.size());
        for (std::size_t s = 0; s < slots.size(); ++s)
            v[s] = f.images[slots[s].first][slots[s].second];
        return v;
    }

    // class of a chain map in module coordinates at its shift
    std::optional<Vec> express(const ChainMap& f) const {
        return sq.express(ambient_of(f), f.shift);
    }
};

inline ChainHomModule hom_complexes(const FilteredComplex& x, const FilteredComplex& y) {
    Field fd = x.field();
    ChainHomModule hm;
    hm.src = x;
    hm.tgt = y;
    std::vector<FPGenerator> gens;
    for (std::size_t i = 0; i < x.num_gens(); ++i)
        for (std::size_t j = 0; j < y.num_gens(); ++j) {
            if (y.generators()[j].degree != x.generators()[i].degree) continue;
            hm.slots.push_back({i, j});
            gens.push_back({"m" + std::to_string(i) + "_" + std::to_string(j),
                            y.generators()[j].birth - x.generators()[i].birth});
        }
    FPModule ambient(fd, std::move(gens), {});

    // homotopy slots (degree +1), for the boundary subspace
    std::vector<std::pair<std::size_t, std::size_t>> hslots;
    for (std::size_t i = 0; i < x.num_gens(); ++i)
        for (std::size_t j = 0; j < y.num_gens(); ++j)
            if (y.generators()[j].degree == x.generators()[i].degree + 1)
                hslots.push_back({i, j});

    auto numerator = [&x, &y, fd, slots = hm.slots, ambient](Level t) {
        auto ca = ambient.context(t);
        // d-commuting conditions on the active slots
        std::vector<std::pair<std::size_t, std::size_t>> eqs; // (src gen, tgt gen deg-1)
        for (std::size_t i = 0; i < x.num_gens(); ++i)
            for (std::size_t m = 0; m < y.num_gens(); ++m)
                if (y.generators()[m].degree == x.generators()[i].degree - 1)
                    eqs.push_back({i, m});
        Matrix mat(fd, eqs.size(), ca.active.size());
        for (std::size_t col = 0; col < ca.active.size(); ++col) {
            auto [si, sj] = slots[ca.active[col]];
            for (std::size_t e = 0; e < eqs.size(); ++e) {
                auto [i, m] = eqs[e];
                Scalar coef = Scalar::zero(fd);
                if (si == i) coef += y.d(sj)[m];     // d_Y f
                if (sj == m) coef -= x.d(i)[si];      // f d_X
                mat.at(e, col) = coef;
            }
        }
        std::vector<Vec> out;
        for (const Vec& q : nullspace(mat)) {
            Vec v = zero_vec(fd, slots.size());
            for (std::size_t col = 0; col < ca.active.size(); ++col)
                v[ca.active[col]] = q[col];
            out.push_back(std::move(v));
        }
        return out;
    };

    auto denominator = [&x, &y, fd, slots = hm.slots, hslots](Level t) {
        std::vector<Vec> out;
        for (auto [i, j] : hslots) {
            if (x.generators()[i].birth + t < y.generators()[j].birth) continue;
            // boundary of the elementary homotopy h(e_i) = e_j
            Vec v = zero_vec(fd, slots.size());
            for (std::size_t s = 0; s < slots.size(); ++s) {
                auto [k, m] = slots[s];
                Scalar coef = Scalar::zero(fd);
                if (k == i) coef += y.d(j)[m];           // d h
                coef += x.d(k)[i] * (j == m ? Scalar::one(fd) : Scalar::zero(fd)); // h d
                v[s] = coef;
            }
            out.push_back(std::move(v));
        }
        return out;
    };

    std::vector<Level> grid;
    for (const auto& gx : x.generators())
        for (const auto& gy : y.generators())
            grid.push_back(gy.birth - gx.birth);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    hm.sq = build_subquotient(ambient, grid, numerator, denominator, "f");
    return hm;
}

// ---------------------------------------------------------------------------
// The homotopy persistence category of a finite family of complexes

inline Vec p_unit(Field f, std::size_t n, std::size_t i) {
    Vec v = zero_vec(f, n);
    v[i] = Scalar::one(f);
    return v;
}

struct FchainCategory {
    PCatPresentation cat;
    std::vector<FilteredComplex> complexes;
    std::map<std::pair<int, int>, ChainHomModule> hom_data;

    ChainMap realize(int i, int j, const Vec& coeffs, const Level& shift) const {
        return hom_data.at({i, j}).realize(coeffs, shift);
    }

    // class of a chain map as a presentation element
    Vec express(int i, int j, const ChainMap& f) const {
        auto e = hom_data.at({i, j}).express(f);
        if (!e) throw std::logic_error("chain map is not in the hom module span");
        return *e;
    }
};

inline FchainCategory presentation_from_complexes(std::vector<FilteredComplex> cs,
                                                  std::vector<std::string> names = {}) {
    FchainCategory fc;
    fc.complexes = std::move(cs);
    Field fd = fc.complexes.empty() ? Field::rationals() : fc.complexes[0].field();
    if (names.empty())
        for (std::size_t i = 0; i < fc.complexes.size(); ++i)
            names.push_back("C" + std::to_string(i));
    fc.cat = PCatPresentation(fd, names, true);
    int n = (int)fc.complexes.size();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            ChainHomModule hm = hom_complexes(fc.complexes[i], fc.complexes[j]);
            fc.cat.set_hom(i, j, hm.sq.module);
            fc.hom_data.emplace(std::make_pair(i, j), std::move(hm));
        }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const FPModule& hij = fc.cat.hom(i, j);
                const FPModule& hjk = fc.cat.hom(j, k);
                for (std::size_t u = 0; u < hij.num_gens(); ++u)
                    for (std::size_t v = 0; v < hjk.num_gens(); ++v) {
                        ChainMap mu = fc.hom_data.at({i, j}).realize(
                            p_unit(fd, hij.num_gens(), u),
                            hij.generators()[u].birth);
                        ChainMap mv = fc.hom_data.at({j, k}).realize(
                            p_unit(fd, hjk.num_gens(), v),
                            hjk.generators()[v].birth);
                        ChainMap comp = compose(mv, mu);
                        auto expr = fc.hom_data.at({i, k}).express(comp);
                        if (!expr)
                            throw std::logic_error("composition failed to express");
                        fc.cat.set_composition(i, j, k, u, v, *expr);
                    }
            }
    for (int i = 0; i < n; ++i) {
        auto expr = fc.hom_data.at({i, i}).express(identity_chain_map(fc.complexes[i]));
        if (!expr) throw std::logic_error("identity failed to express");
        fc.cat.set_identity(i, *expr);
    }
    return fc;
}

// ---------------------------------------------------------------------------
// Exactness and strict exactness

// Homology long-exact-sequence check for a shift-0 triangle A -> B -> C -> TA.
inline bool exact_triangle_check(const FilteredComplex& A, const ChainMap& u,
                                 const FilteredComplex& B, const ChainMap& v,
                                 const FilteredComplex& C, const ChainMap& w,
                                 const FilteredComplex& TA) {
    if (!chain_map_check(u) || !chain_map_check(v) || !chain_map_check(w)) return false;
    if (u.shift != Level(0) || v.shift != Level(0) || w.shift != Level(0)) return false;
    // consecutive composites vanish up to homotopy
    if (!is_nullhomotopic(compose(v, u))) return false;
    if (!is_nullhomotopic(compose(w, v))) return false;
    ChainMap tu = suspend_map(u);
    // align T(u) source with the triangle's TA target
    ChainMap tu2{TA, tu.tgt, Level(0), tu.images};
    if (!is_nullhomotopic(compose(tu2, w))) return false;

    HomologyModule ha = homology_persistence(A);
    HomologyModule hb = homology_persistence(B);
    HomologyModule hc = homology_persistence(C);
    HomologyModule hta = homology_persistence(TA);
    HomologyModule htb = homology_persistence(suspend(B));

    std::vector<Level> grid;
    auto collect = [&grid](const FilteredComplex& x) {
        for (const auto& l : x.grid()) grid.push_back(l);
    };
    collect(A);
    collect(B);
    collect(C);
    collect(TA);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    std::vector<Level> pts = grid;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        pts.push_back(Level((grid[i] + grid[i + 1]).value() / 2));
    if (!grid.empty()) pts.push_back(grid.back() + Level(1));

    auto exact_at = [&](const Subquotient* sp, const PModMorphism* in,
                        const Subquotient* mid, const PModMorphism* out) {
        for (const Level& lvl : pts) {
            std::size_t im = in ? rank(in->matrix_at(lvl)) : 0;
            std::size_t dim_mid = mid->module.dim_at(lvl);
            std::size_t ker = out ? dim_mid - rank(out->matrix_at(lvl)) : dim_mid;
            if (im != ker) return false;
        }
        (void)sp;
        return true;
    };

    auto degrees = [&](const HomologyModule& h) {
        std::vector<int> out;
        for (const auto& [n, sq] : h.by_degree) out.push_back(n);
        return out;
    };
    std::set<int> degs;
    for (int n : degrees(ha)) degs.insert(n);
    for (int n : degrees(hb)) degs.insert(n);
    for (int n : degrees(hc)) degs.insert(n);
    for (int n : degrees(hta)) degs.insert(n);

    ChainMap tu_aligned{TA, suspend(B), Level(0), tu.images};
    for (int n : degs) {
        bool a_has = ha.has(n), b_has = hb.has(n), c_has = hc.has(n),
             ta_has = hta.has(n);
        // exactness at H_n(B): im H(u) = ker H(v)
        if (b_has) {
            PModMorphism hu = a_has ? induced_homology_map(ha, hb, u, n)
                                    : zero_morphism(zero_module(A.field()),
                                                    hb.by_degree.at(n).module);
            PModMorphism hv = c_has ? induced_homology_map(hb, hc, v, n)
                                    : zero_morphism(hb.by_degree.at(n).module,
                                                    zero_module(A.field()));
            if (!exact_at(nullptr, a_has ? &hu : nullptr, &hb.by_degree.at(n),
                          c_has ? &hv : nullptr))
                return false;
        }
        // exactness at H_n(C): im H(v) = ker H(w)
        if (c_has) {
            PModMorphism hv = b_has ? induced_homology_map(hb, hc, v, n)
                                    : zero_morphism(zero_module(A.field()),
                                                    hc.by_degree.at(n).module);
            PModMorphism hw = ta_has ? induced_homology_map(hc, hta, w, n)
                                     : zero_morphism(hc.by_degree.at(n).module,
                                                     zero_module(A.field()));
            if (!exact_at(nullptr, b_has ? &hv : nullptr, &hc.by_degree.at(n),
                          ta_has ? &hw : nullptr))
                return false;
        }
        // exactness at H_n(TA): im H(w) = ker H(Tu)
        if (ta_has) {
            PModMorphism hw = c_has ? induced_homology_map(hc, hta, w, n)
                                    : zero_morphism(zero_module(A.field()),
                                                    hta.by_degree.at(n).module);
            bool tb_has = htb.has(n);
            PModMorphism htu = tb_has
                                   ? induced_homology_map(hta, htb, tu_aligned, n)
                                   : zero_morphism(hta.by_degree.at(n).module,
                                                   zero_module(A.field()));
            if (!exact_at(nullptr, c_has ? &hw : nullptr, &hta.by_degree.at(n),
                          tb_has ? &htu : nullptr))
                return false;
        }
    }
    return true;
}

// eta_r embedded in its strict exact triangle of weight r.
inline FCTriangle eta_triangle(const FilteredComplex& a, const Level& r) {
    if (r < Level(0)) throw std::invalid_argument("eta_triangle needs r >= 0");
    ChainMap eta{a, shift_complex(a, -r), Level(0), identity_chain_map(a).images};
    auto [cone, t0] = mapping_cone(eta);
    FCTriangle t = t0;
    t.weight = r;
    t.w = push_chain_map(t0.w, r); // lands in S^{-r}TA
    t.TA = t.w.tgt;
    StrictWitness sw = *t0.witness;
    sw.phi = ChainMap{shift_complex(cone, r), cone, Level(0),
                      identity_chain_map(cone).images};
    t.witness = sw;
    return t;
}

// All equations of the strict-exactness diagram, checked in the homotopy
// category; the witness is verified, never searched.
inline bool is_strict_exact(const FCTriangle& t) {
    if (!t.witness) return false;
    const StrictWitness& sw = *t.witness;
    FilteredComplex ta_plain = shift_complex(t.TA, t.weight);
    if (!chain_map_check(t.u) || !chain_map_check(t.v) || !chain_map_check(t.w) ||
        !chain_map_check(sw.vp) || !chain_map_check(sw.wp) ||
        !chain_map_check(sw.phi) || !chain_map_check(sw.fmap))
        return false;
    // middle row is exact
    if (!exact_triangle_check(t.A, t.u, t.B, sw.vp, sw.cone_prime, sw.wp, ta_plain))
        return false;
    // v = f . v'
    if (!homotopy_equal(t.v, compose(sw.fmap, sw.vp))) return false;
    // w . f = eta_r . w'
    {
        ChainMap lhs = compose(t.w, sw.fmap);
        ChainMap rhs = push_chain_map(sw.wp, t.weight);
        if (!homotopy_equal(lhs, rhs)) return false;
    }
    // f . phi = eta_r^{S^r C}
    {
        ChainMap lhs = compose(sw.fmap, sw.phi);
        ChainMap eta{shift_complex(t.C, t.weight), t.C, Level(0),
                     identity_chain_map(t.C).images};
        if (!homotopy_equal(lhs, eta)) return false;
    }
    // S^r w = w' . phi
    {
        ChainMap lhs{shift_complex(t.C, t.weight), ta_plain, Level(0), t.w.images};
        ChainMap rhs = compose(sw.wp, sw.phi);
        if (!homotopy_equal(lhs, rhs)) return false;
    }
    // cone of f is r-acyclic
    auto [conef, tri] = mapping_cone(sw.fmap);
    (void)tri;
    return is_r_acyclic_complex(conef, t.weight);
}

// ---------------------------------------------------------------------------
// Weighted idempotents on complexes and the cone extension formula

struct FCIdem {
    ChainMap map; // A -> S^{-r}A, shift 0
    Level weight;
};

inline bool fc_is_weighted_idempotent(const FCIdem& e) {
    if (!chain_map_check(e.map)) return false;
    ChainMap shifted{e.map.tgt, shift_complex(e.map.tgt, -e.weight), Level(0),
                     e.map.images};
    ChainMap ee = compose(shifted, e.map);
    ChainMap eta_e = push_chain_map(e.map, e.weight);
    return homotopy_equal(ee, eta_e);
}

struct ConeIdemResult {
    ChainMap k;   // C -> S^{-r}C completing the ladder
    ChainMap z;   // S^{-r}k k - eta_r k
    FCIdem e_c;   // the 3r-idempotent on C
    bool ladder_ok = false;
};

// Solve for k on the cone bases: [k.v] = [S^{-r}v.e_B], [S^{-r}w.k] = [T e_A.w],
// lexicographically least in the hom-module coordinates.
inline std::optional<ChainMap> solve_cone_completion(const FCTriangle& t,
                                                     const FCIdem& ea,
                                                     const FCIdem& eb) {
    Field fd = t.A.field();
    Level r = ea.weight;
    FilteredComplex src = t.C, tgt = shift_complex(t.C, -r);
    ChainHomModule hm = hom_complexes(src, tgt);
    auto c0 = hm.sq.module.context(Level(0));

    // right-hand sides
    ChainMap sv{shift_complex(t.B, -r), shift_complex(t.C, -r), Level(0), t.v.images};
    ChainMap rhs_v = compose(sv, eb.map); // B -> S^{-r}C
    ChainMap sw{shift_complex(t.C, -r), shift_complex(t.TA, -r), Level(0), t.w.images};
    ChainMap tea = suspend_map(ea.map);
    ChainMap tea2{t.TA, shift_complex(t.TA, -r), Level(0), tea.images};
    ChainMap rhs_w = compose(tea2, t.w); // C -> S^{-r}TA

    // unknowns: module coordinates of k at level 0, plus homotopy freedom on
    // both equations
    ChainHomModule hbv = hom_complexes(t.B, shift_complex(t.C, -r));
    ChainHomModule hcw = hom_complexes(t.C, shift_complex(t.TA, -r));
    std::size_t nk = c0.basis.size();
    auto hv = hbv.sq.denominator(Level(0));
    auto hw = hcw.sq.denominator(Level(0));
    std::size_t cols = nk + hv.size() + hw.size();
    std::size_t rows_v = hbv.slots.size(), rows_w = hcw.slots.size();
    Matrix m(fd, rows_v + rows_w, cols);
    Vec rhs = zero_vec(fd, rows_v + rows_w);
    Vec amb_v = hbv.ambient_of(rhs_v);
    Vec amb_w = hcw.ambient_of(rhs_w);
    for (std::size_t i = 0; i < rows_v; ++i) rhs[i] = amb_v[i];
    for (std::size_t i = 0; i < rows_w; ++i) rhs[rows_v + i] = amb_w[i];
    for (std::size_t j = 0; j < nk; ++j) {
        Vec unit = zero_vec(fd, nk);
        unit[j] = Scalar::one(fd);
        ChainMap kj = hm.realize(hm.sq.module.from_quotient(unit, c0), Level(0));
        Vec kv = hbv.ambient_of(compose(kj, t.v));
        Vec kw = hcw.ambient_of(compose(sw, kj));
        for (std::size_t i = 0; i < rows_v; ++i) m.at(i, j) = kv[i];
        for (std::size_t i = 0; i < rows_w; ++i) m.at(rows_v + i, j) = kw[i];
    }
    for (std::size_t j = 0; j < hv.size(); ++j)
        for (std::size_t i = 0; i < rows_v; ++i) m.at(i, nk + j) = hv[j][i];
    for (std::size_t j = 0; j < hw.size(); ++j)
        for (std::size_t i = 0; i < rows_w; ++i) m.at(rows_v + i, nk + hv.size() + j) = hw[j][i];
    auto sol = solve(m, rhs);
    if (!sol) return std::nullopt;
    Vec kq = zero_vec(fd, nk);
    for (std::size_t j = 0; j < nk; ++j) kq[j] = (*sol)[j];
    return hm.realize(hm.sq.module.from_quotient(kq, c0), Level(0));
}

// e_C := eta_{2r}.k + eta_r.z - 2 S^{-2r}k.z with z := S^{-r}k.k - eta_r.k.
inline ConeIdemResult cone_idempotent_extension(const FCTriangle& t, const FCIdem& ea,
                                                const FCIdem& eb,
                                                std::optional<ChainMap> k_given = {}) {
    if (ea.weight != eb.weight)
        throw std::invalid_argument("cone extension needs equal weights (pad first)");
    Level r = ea.weight;
    // ladder hypothesis: e_B u = S^{-r}u e_A
    {
        ChainMap lhs = compose(eb.map, t.u);
        ChainMap su{shift_complex(t.A, -r), shift_complex(t.B, -r), Level(0),
                    t.u.images};
        ChainMap rhs = compose(su, ea.map);
        if (!homotopy_equal(lhs, rhs))
            throw std::invalid_argument("cone extension: ladder hypothesis fails");
    }
    std::optional<ChainMap> k = k_given ? k_given : solve_cone_completion(t, ea, eb);
    if (!k) throw std::runtime_error("cone extension: no completion map found");

    ChainMap sk{shift_complex(t.C, -r), shift_complex(t.C, -r - r), Level(0), k->images};
    ChainMap kk = compose(sk, *k);             // C -> S^{-2r}C
    ChainMap etak = push_chain_map(*k, r);     // C -> S^{-2r}C
    ChainMap z = add_chain_maps(kk, scale_chain_map(-Scalar::one(t.A.field()), etak));

    ChainMap e1 = push_chain_map(*k, r + r);   // C -> S^{-3r}C
    ChainMap e2 = push_chain_map(z, r);        // C -> S^{-3r}C
    ChainMap s2k{shift_complex(t.C, -r - r), shift_complex(t.C, -r - r - r), Level(0),
                 k->images};
    ChainMap kz = compose(s2k, z);             // C -> S^{-3r}C
    ChainMap ec = add_chain_maps(add_chain_maps(e1, e2),
                                 scale_chain_map(-Scalar(t.A.field(), 2), kz));

    ConeIdemResult out{*k, z, FCIdem{ec, r + r + r}, false};
    if (!fc_is_weighted_idempotent(out.e_c))
        throw std::logic_error("cone extension: e_C failed idempotency");

    // final ladder: e_C v = S^{-3r}v (eta_{2r} e_B) and T(eta_{2r} e_A) w = S^{-3r}w e_C
    Level r3 = r + r + r;
    ChainMap sv3{shift_complex(t.B, -r3), shift_complex(t.C, -r3), Level(0), t.v.images};
    ChainMap lhs1 = compose(ec, t.v);
    ChainMap rhs1 = compose(sv3, push_chain_map(eb.map, r + r));
    bool ok1 = homotopy_equal(lhs1, rhs1);
    ChainMap sw3{shift_complex(t.C, -r3), shift_complex(t.TA, -r3), Level(0), t.w.images};
    ChainMap tea = suspend_map(push_chain_map(ea.map, r + r));
    ChainMap tea2{t.TA, shift_complex(t.TA, -r3), Level(0), tea.images};
    ChainMap lhs2 = compose(tea2, t.w);
    ChainMap rhs2 = compose(sw3, ec);
    bool ok2 = homotopy_equal(lhs2, rhs2);
    out.ladder_ok = ok1 && ok2;
    return out;
}

} // namespace percat
