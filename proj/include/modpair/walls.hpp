#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "modpair/errors.hpp"
#include "modpair/rational.hpp"

namespace modpair {

using Edge = std::pair<int, int>;  // (i, j) for the weight e_i - e_j, 1-based
using EdgeSet = std::vector<Edge>;
using WeightVector = std::vector<Rational>;  // coefficients on e_1..e_M

// Blocks of sizes m_i with ||e_j||^2 = rho_i on block i.
struct WeightConfig {
    std::vector<int> block_sizes;
    std::vector<Rational> rho;

    WeightConfig(std::vector<int> sizes, std::vector<Rational> r) : block_sizes(std::move(sizes)), rho(std::move(r)) {
        if (block_sizes.size() != rho.size() || block_sizes.empty()) throw DomainError("one rho per block");
        for (int m : block_sizes)
            if (m < 1) throw DomainError("block sizes must be positive");
        for (const auto& x : rho)
            if (x <= 0) throw DomainError("rho must be positive");
    }
    static WeightConfig uniform(int M) { return WeightConfig({M}, {Rational(1)}); }

    int total() const { return std::accumulate(block_sizes.begin(), block_sizes.end(), 0); }
    int block_of(int j) const {
        int acc = 0;
        for (size_t i = 0; i < block_sizes.size(); ++i) {
            acc += block_sizes[i];
            if (j <= acc) return static_cast<int>(i);
        }
        throw DomainError("index outside configuration");
    }
    const Rational& norm2(int j) const { return rho[block_of(j)]; }

    Rational inner(const WeightVector& a, const WeightVector& b) const {
        Rational s = 0;
        for (int j = 1; j <= total(); ++j) s += a[j - 1] * b[j - 1] * norm2(j);
        return s;
    }
    WeightVector weight(const Edge& e) const {
        WeightVector w(total(), 0);
        w[e.first - 1] += 1;
        w[e.second - 1] -= 1;
        return w;
    }
};

inline void check_edges(const EdgeSet& s, int M) {
    if (s.empty()) throw DomainError("edge set must be nonempty");
    for (auto [i, j] : s)
        if (i < 1 || j < 1 || i > M || j > M || i == j) throw DomainError("edge outside 1..M or a self-loop");
}

// ---- exact linear algebra ------------------------------------------------

// Solves A x = b; nullopt when A is singular.
inline std::optional<std::vector<Rational>> solve_linear(std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
    size_t n = a.size();
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && a[piv][col] == 0) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (size_t r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0) continue;
            Rational f = a[r][col] / a[col][col];
            for (size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<Rational> x(n);
    for (size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return x;
}

// Minimum-norm point of the affine hull of `pts`: barycentric weights, or
// nullopt when the points are affinely dependent.
inline std::optional<std::vector<Rational>> affine_min_norm(const WeightConfig& cfg, const std::vector<WeightVector>& pts) {
    size_t k = pts.size();
    std::vector<std::vector<Rational>> a(k + 1, std::vector<Rational>(k + 1, 0));
    std::vector<Rational> b(k + 1, 0);
    for (size_t i = 0; i < k; ++i) {
        for (size_t j = 0; j < k; ++j) a[i][j] = cfg.inner(pts[i], pts[j]);
        a[i][k] = 1;
        a[k][i] = 1;
    }
    b[k] = 1;
    auto sol = solve_linear(a, b);
    if (!sol) return std::nullopt;
    sol->pop_back();
    return sol;
}

inline WeightVector combine(const std::vector<WeightVector>& pts, const std::vector<Rational>& w) {
    WeightVector x(pts.empty() ? 0 : pts[0].size(), 0);
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = 0; j < x.size(); ++j) x[j] += w[i] * pts[i][j];
    return x;
}

// Wolfe's minimum-norm-point algorithm over conv(pts), in exact arithmetic.
inline WeightVector min_norm_point(const WeightConfig& cfg, const std::vector<WeightVector>& pts) {
    size_t best = 0;
    for (size_t i = 1; i < pts.size(); ++i)
        if (cfg.inner(pts[i], pts[i]) < cfg.inner(pts[best], pts[best])) best = i;
    std::vector<size_t> corral{best};
    std::vector<Rational> lam{1};
    WeightVector x = pts[best];
    while (true) {
        Rational xx = cfg.inner(x, x);
        if (xx == 0) return x;
        size_t enter = pts.size();
        Rational low = xx;
        for (size_t i = 0; i < pts.size(); ++i) {
            Rational v = cfg.inner(x, pts[i]);
            if (v < low) {
                low = v;
                enter = i;
            }
        }
        if (enter == pts.size()) return x;  // <x, p> >= |x|^2 for all p: optimal
        corral.push_back(enter);
        lam.push_back(0);
        while (true) {
            std::vector<WeightVector> cp;
            for (size_t i : corral) cp.push_back(pts[i]);
            auto alpha = affine_min_norm(cfg, cp);
            if (!alpha) throw DomainError("corral became affinely dependent");
            bool interior = std::all_of(alpha->begin(), alpha->end(), [](const Rational& a) { return a > 0; });
            if (interior) {
                lam = *alpha;
                x = combine(cp, lam);
                break;
            }
            Rational theta = 1;
            for (size_t i = 0; i < alpha->size(); ++i)
                if ((*alpha)[i] <= 0) theta = std::min<Rational>(theta, lam[i] / (lam[i] - (*alpha)[i]));
            std::vector<size_t> nc;
            std::vector<Rational> nl;
            for (size_t i = 0; i < corral.size(); ++i) {
                Rational v = (1 - theta) * lam[i] + theta * (*alpha)[i];
                if (v > 0) {
                    nc.push_back(corral[i]);
                    nl.push_back(v);
                }
            }
            corral = nc;
            lam = nl;
            std::vector<WeightVector> np;
            for (size_t i : corral) np.push_back(pts[i]);
            x = combine(np, lam);
        }
    }
}

// ---- exact LP --------------------------------------------------------------

struct LpResult {
    enum Status { optimal, infeasible, unbounded } status;
    Rational value;
    std::vector<Rational> x;
};

// maximize c.x subject to A x = b, x >= 0: two-phase tableau simplex with Bland's rule.
inline LpResult linprog(const std::vector<std::vector<Rational>>& A, const std::vector<Rational>& b,
                        const std::vector<Rational>& c) {
    size_t m = A.size(), n = c.size();
    // Columns: n originals, m artificials, then the right-hand side.
    std::vector<std::vector<Rational>> t(m, std::vector<Rational>(n + m + 1, 0));
    std::vector<size_t> basis(m);
    for (size_t i = 0; i < m; ++i) {
        bool neg = b[i] < 0;
        for (size_t j = 0; j < n; ++j) t[i][j] = neg ? -A[i][j] : A[i][j];
        t[i][n + i] = 1;
        t[i][n + m] = neg ? -b[i] : b[i];
        basis[i] = n + i;
    }
    auto pivot = [&](size_t r, size_t col) {
        Rational p = t[r][col];
        for (auto& v : t[r]) v /= p;
        for (size_t i = 0; i < m; ++i) {
            if (i == r || t[i][col] == 0) continue;
            Rational f = t[i][col];
            for (size_t j = 0; j <= n + m; ++j) t[i][j] -= f * t[r][j];
        }
        basis[r] = col;
    };
    // Runs simplex for objective `obj` over allowed columns; false when unbounded.
    auto run = [&](const std::vector<Rational>& obj, size_t ncols) {
        while (true) {
            size_t enter = ncols;
            for (size_t j = 0; j < ncols && enter == ncols; ++j) {
                if (std::find(basis.begin(), basis.end(), j) != basis.end()) continue;
                Rational reduced = obj[j];
                for (size_t i = 0; i < m; ++i) reduced -= obj[basis[i]] * t[i][j];
                if (reduced > 0) enter = j;
            }
            if (enter == ncols) return true;
            size_t leave = m;
            Rational best;
            for (size_t i = 0; i < m; ++i) {
                if (t[i][enter] <= 0) continue;
                Rational ratio = t[i][n + m] / t[i][enter];
                if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == m) return false;
            pivot(leave, enter);
        }
    };
    std::vector<Rational> phase1(n + m, 0);
    for (size_t i = 0; i < m; ++i) phase1[n + i] = -1;
    run(phase1, n + m);
    Rational art = 0;
    for (size_t i = 0; i < m; ++i)
        if (basis[i] >= n) art += t[i][n + m];
    if (art != 0) return {LpResult::infeasible, 0, {}};
    // Drive zero-level artificials out of the basis where possible.
    for (size_t i = 0; i < m; ++i) {
        if (basis[i] < n) continue;
        for (size_t j = 0; j < n; ++j)
            if (t[i][j] != 0) {
                pivot(i, j);
                break;
            }
    }
    std::vector<Rational> obj(n + m, 0);
    for (size_t j = 0; j < n; ++j) obj[j] = c[j];
    if (!run(obj, n)) return {LpResult::unbounded, 0, {}};
    std::vector<Rational> x(n, 0);
    for (size_t i = 0; i < m; ++i)
        if (basis[i] < n) x[basis[i]] = t[i][n + m];
    Rational v = 0;
    for (size_t j = 0; j < n; ++j) v += c[j] * x[j];
    return {LpResult::optimal, v, x};
}

// ---- walls -----------------------------------------------------------------

struct PartitionCell {
    int h;  // component index, ordered by decreasing epsilon
    int m;
    std::vector<int> members;
    Rational r;  // sum of 1/||e_j||^2 over members
};

struct WallInstance {
    EdgeSet edges;
    WeightVector beta;
    bool zero = false;
    std::vector<Rational> epsilon;  // per component h
    std::vector<PartitionCell> partition;
    bool partition_consistent = false;
};

inline Rational norm2(const WeightConfig& cfg, const WeightVector& v) { return cfg.inner(v, v); }

// Recovers the partition Delta_{h,m} from beta's coefficients on e_j/||e_j||^2:
// coefficient (eps(h) - m) with eps(h) in [-1/2, 1/2).
inline void recover_partition(const WeightConfig& cfg, WallInstance& w) {
    int M = cfg.total();
    Rational n2 = norm2(cfg, w.beta);
    std::map<Rational, std::map<int, std::vector<int>>> by_eps;
    for (int j = 1; j <= M; ++j) {
        Rational c = w.beta[j - 1] * cfg.norm2(j) / n2;
        Rational eps = c - Rational(floor_of(c + Rational(1, 2)));
        Rational shift = eps - c;
        int m = static_cast<int>(shift.get_num().get_si());
        by_eps[eps][m].push_back(j);
    }
    int h = 0;
    for (auto it = by_eps.rbegin(); it != by_eps.rend(); ++it, ++h) {
        w.epsilon.push_back(it->first);
        for (auto& [m, members] : it->second) {
            Rational r = 0;
            for (int j : members) r += Rational(1) / cfg.norm2(j);
            w.partition.push_back({h + 1, m, members, r});
        }
    }
    // beta/|beta|^2 = sum (eps(h) - m) e_j/||e_j||^2 and eps(h) = sum m r / sum r.
    bool ok = true;
    WeightVector rebuilt(M, 0);
    std::vector<Rational> num(w.epsilon.size(), 0), den(w.epsilon.size(), 0);
    for (const auto& cell : w.partition) {
        for (int j : cell.members) rebuilt[j - 1] = n2 * (w.epsilon[cell.h - 1] - cell.m) / cfg.norm2(j);
        num[cell.h - 1] += Rational(cell.m) * cell.r;
        den[cell.h - 1] += cell.r;
    }
    if (rebuilt != w.beta) ok = false;
    for (size_t k = 0; k < w.epsilon.size(); ++k)
        if (num[k] != w.epsilon[k] * den[k]) ok = false;
    w.partition_consistent = ok;
}

inline WallInstance closest_point_beta(const EdgeSet& s, const WeightConfig& cfg) {
    check_edges(s, cfg.total());
    std::vector<WeightVector> pts;
    for (const auto& e : s) pts.push_back(cfg.weight(e));
    WallInstance w;
    w.edges = s;
    w.beta = min_norm_point(cfg, pts);
    w.zero = std::all_of(w.beta.begin(), w.beta.end(), [](const Rational& x) { return x == 0; });
    if (!w.zero) recover_partition(cfg, w);
    return w;
}

// Reference closest point: best affine-hull minimiser over all faces with
// nonnegative barycentric weights.
inline WeightVector closest_point_by_faces(const EdgeSet& s, const WeightConfig& cfg) {
    check_edges(s, cfg.total());
    std::vector<WeightVector> pts;
    for (const auto& e : s) pts.push_back(cfg.weight(e));
    size_t n = pts.size();
    if (n > 20) throw DomainError("face enumeration limited to 20 weights");
    std::optional<WeightVector> best;
    Rational best_norm;
    for (uint64_t mask = 1; mask < (1ULL << n); ++mask) {
        if (std::popcount(mask) > cfg.total()) continue;
        std::vector<WeightVector> face;
        for (size_t i = 0; i < n; ++i)
            if (mask >> i & 1) face.push_back(pts[i]);
        auto lam = affine_min_norm(cfg, face);
        if (!lam || std::any_of(lam->begin(), lam->end(), [](const Rational& a) { return a < 0; })) continue;
        WeightVector x = combine(face, *lam);
        Rational v = norm2(cfg, x);
        if (!best || v < best_norm) {
            best = x;
            best_norm = v;
        }
    }
    return *best;
}

inline std::vector<std::set<int>> out_neighbours(const EdgeSet& s, int M) {
    std::vector<std::set<int>> out(M + 1);
    for (auto [i, j] : s) out[i].insert(j);
    return out;
}

// Graph criterion: the ray R_+(e_1 + ... + e_{M-1} - (M-1) e_M) meets the wall of
// beta iff M is the only vertex of G(S) without outgoing edges.
inline bool ray_meets_wall(const EdgeSet& s, int M) {
    check_edges(s, M);
    auto out = out_neighbours(s, M);
    for (int i = 1; i < M; ++i)
        if (out[i].empty()) return false;
    return out[M].empty();
}

inline WeightVector ray_direction(int M) {
    WeightVector r(M, 1);
    r[M - 1] = -(M - 1);
    return r;
}

// Direct test: is lambda * ray in conv{e_i - e_j} for some lambda > 0?
inline bool ray_meets_hull_lp(const EdgeSet& s, int M) {
    check_edges(s, M);
    size_t n = s.size();
    WeightVector r = ray_direction(M);
    std::vector<std::vector<Rational>> A(M + 1, std::vector<Rational>(n + 1, 0));
    std::vector<Rational> b(M + 1, 0);
    for (size_t p = 0; p < n; ++p) {
        A[s[p].first - 1][p] += 1;
        A[s[p].second - 1][p] -= 1;
        A[M][p] = 1;
    }
    for (int k = 0; k < M; ++k) A[k][n] = -r[k];
    b[M] = 1;
    std::vector<Rational> c(n + 1, 0);
    c[n] = 1;
    auto res = linprog(A, b, c);
    return res.status == LpResult::optimal && res.value > 0;
}

// Spanning subgraphs {(i, j(i))} with M as the only sink and no directed loops.
inline std::vector<EdgeSet> enumerate_minimal_subgraphs(const EdgeSet& s, int M) {
    if (!ray_meets_wall(s, M)) throw DomainError("G(S) must have M as its only sink");
    auto out = out_neighbours(s, M);
    std::vector<std::vector<int>> choices(M);
    for (int i = 1; i < M; ++i) choices[i].assign(out[i].begin(), out[i].end());
    std::vector<EdgeSet> result;
    std::vector<size_t> idx(M, 0);
    while (true) {
        std::vector<int> next(M + 1, 0);
        for (int i = 1; i < M; ++i) next[i] = choices[i][idx[i]];
        bool acyclic = true;
        for (int i = 1; i < M && acyclic; ++i) {
            int v = i, steps = 0;
            while (v != M && steps <= M) {
                v = next[v];
                ++steps;
            }
            if (v != M) acyclic = false;
        }
        if (acyclic) {
            EdgeSet sub;
            for (int i = 1; i < M; ++i) sub.emplace_back(i, next[i]);
            result.push_back(sub);
        }
        int k = M - 1;
        while (k >= 1 && ++idx[k] == choices[k].size()) idx[k--] = 0;
        if (k < 1) break;
    }
    std::sort(result.begin(), result.end());
    return result;
}

// Weights lambda_ij > 0 and lambda > 0 with lambda * ray = sum lambda_ij (e_i - e_j),
// sum lambda_ij = 1, for a spanning tree; nullopt when the solution is not interior.
inline std::optional<std::pair<Rational, std::vector<Rational>>> tree_interior_weights(const EdgeSet& tree, int M) {
    check_edges(tree, M);
    if (static_cast<int>(tree.size()) != M - 1) throw DomainError("a spanning tree has M-1 edges");
    // Unknowns: mu_p = lambda_p / lambda for the M-1 edges; rows: coordinates 1..M-1.
    WeightVector r = ray_direction(M);
    std::vector<std::vector<Rational>> A(M - 1, std::vector<Rational>(M - 1, 0));
    std::vector<Rational> b(M - 1);
    for (size_t p = 0; p < tree.size(); ++p) {
        if (tree[p].first < M) A[tree[p].first - 1][p] += 1;
        if (tree[p].second < M) A[tree[p].second - 1][p] -= 1;
    }
    for (int k = 0; k < M - 1; ++k) b[k] = r[k];
    auto mu = solve_linear(A, b);
    if (!mu) return std::nullopt;
    Rational total = 0;
    for (const auto& v : *mu) {
        if (v <= 0) return std::nullopt;
        total += v;
    }
    std::vector<Rational> lam;
    for (const auto& v : *mu) lam.push_back(v / total);
    return std::make_pair(Rational(1) / total, lam);
}

struct BetaStar {
    Rational lambda;
    WeightVector point;                    // lambda * ray
    std::map<int, Rational> f;             // f(m) where constant on Delta_m
    bool f_form = false;                   // f depends only on m
    bool stabilizer_ok = false;            // Stab beta in Stab beta*
    bool regenerate_rho = false;
    std::vector<std::vector<int>> blocks;  // m_i^k = |Delta_i^k|
};

// Ray-wall intersection beta* = lambda * ray with <beta*, beta> = |beta|^2.
inline BetaStar beta_star_on_ray(const EdgeSet& s, const WeightConfig& cfg) {
    int M = cfg.total();
    if (!ray_meets_wall(s, M)) throw DomainError("the ray does not meet this wall");
    WallInstance w = closest_point_beta(s, cfg);
    if (w.zero) throw DomainError("beta = 0 has no wall");
    WeightVector r = ray_direction(M);
    BetaStar out;
    out.lambda = norm2(cfg, w.beta) / cfg.inner(r, w.beta);
    for (int j = 0; j < M; ++j) out.point.push_back(out.lambda * r[j]);

    std::map<int, int> cell_of;  // vertex -> m (single component when the ray meets the wall)
    for (const auto& c : w.partition)
        for (int j : c.members) cell_of[j] = c.m;
    out.f_form = true;
    for (int j = 1; j <= M; ++j) {
        Rational fj = out.point[j - 1] * cfg.norm2(j);
        auto [it, fresh] = out.f.emplace(cell_of[j], fj);
        if (!fresh && it->second != fj) out.f_form = false;
    }
    // Stabilisers of diagonal elements: beta_i = beta_j must force beta*_i = beta*_j.
    out.stabilizer_ok = true;
    for (int i = 0; i < M; ++i)
        for (int j = i + 1; j < M; ++j)
            if (w.beta[i] == w.beta[j] && out.point[i] != out.point[j]) out.stabilizer_ok = false;
    out.regenerate_rho = !out.stabilizer_ok;

    std::vector<int> ms;
    for (const auto& c : w.partition) ms.push_back(c.m);
    std::sort(ms.begin(), ms.end());
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
    out.blocks.assign(cfg.block_sizes.size(), std::vector<int>(ms.size(), 0));
    for (int j = 1; j <= M; ++j) {
        int k = static_cast<int>(std::lower_bound(ms.begin(), ms.end(), cell_of[j]) - ms.begin());
        ++out.blocks[cfg.block_of(j)][k];
    }
    return out;
}

// rho_i = 1/p_i for distinct primes starting at an offset fixed by the seed.
inline std::vector<Rational> generic_rho(size_t q, unsigned seed) {
    std::vector<Rational> out;
    long p = 1000 + 97 * static_cast<long>(seed % 1000);
    auto is_prime = [](long x) {
        for (long d = 2; d * d <= x; ++d)
            if (x % d == 0) return false;
        return x > 1;
    };
    while (out.size() < q) {
        ++p;
        if (is_prime(p)) out.push_back(Rational(1) / Rational(p));
    }
    return out;
}

// beta* with generic rho, retrying seeds until the stabilizer condition holds.
inline std::pair<BetaStar, WeightConfig> beta_star_generic(const EdgeSet& s, const std::vector<int>& block_sizes,
                                                           unsigned seed = 0, int attempts = 16) {
    for (int a = 0; a < attempts; ++a) {
        WeightConfig cfg(block_sizes, generic_rho(block_sizes.size(), seed + a));
        BetaStar b = beta_star_on_ray(s, cfg);
        if (!b.regenerate_rho) return {b, cfg};
    }
    throw DomainError("no generic rho found");
}

}  // namespace modpair
