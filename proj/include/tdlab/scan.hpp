#pragma once

// Exhaustive scans over small groups: strong duality over all symmetric U,
// the tiling/spectral equality over all subsets A, and packing bound dominance.
// Scans run items in parallel and emit records in a fixed order.

#include "tdlab/combinatorics.hpp"
#include "tdlab/extremal.hpp"
#include "tdlab/io.hpp"
#include "tdlab/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace tdlab {

/// All abelian groups of the given order, as invariant factors n1 | n2 | ... .
inline std::vector<FiniteAbelianGroup> abelian_groups_of_order(int order)
{
    if (order < 1) {
        throw std::invalid_argument("group order must be positive");
    }
    if (order == 1) {
        return {FiniteAbelianGroup({1})};
    }
    std::vector<std::pair<int, int>> primes; // (p, e)
    int rest = order;
    for (int p = 2; p * p <= rest; ++p) {
        int e = 0;
        while (rest % p == 0) {
            rest /= p;
            ++e;
        }
        if (e > 0) {
            primes.emplace_back(p, e);
        }
    }
    if (rest > 1) {
        primes.emplace_back(rest, 1);
    }
    // Partitions of e in non-increasing order.
    auto partitions = [](int e) {
        std::vector<std::vector<int>> out;
        std::vector<int> cur;
        std::function<void(int, int)> rec = [&](int left, int maxpart) {
            if (left == 0) {
                out.push_back(cur);
                return;
            }
            for (int k = std::min(left, maxpart); k >= 1; --k) {
                cur.push_back(k);
                rec(left - k, k);
                cur.pop_back();
            }
        };
        rec(e, e);
        return out;
    };
    std::vector<std::vector<int>> combos{{}};
    std::vector<std::vector<std::vector<int>>> per_prime;
    for (auto [p, e] : primes) {
        per_prime.push_back(partitions(e));
    }
    std::vector<FiniteAbelianGroup> out;
    std::vector<std::size_t> choice(primes.size(), 0);
    for (;;) {
        std::size_t len = 0;
        for (std::size_t i = 0; i < primes.size(); ++i) {
            len = std::max(len, per_prime[i][choice[i]].size());
        }
        std::vector<int> factors(len, 1); // factors[0] is the largest
        for (std::size_t i = 0; i < primes.size(); ++i) {
            const auto& part = per_prime[i][choice[i]];
            for (std::size_t k = 0; k < part.size(); ++k) {
                for (int r = 0; r < part[k]; ++r) {
                    factors[k] *= primes[i].first;
                }
            }
        }
        std::reverse(factors.begin(), factors.end());
        out.emplace_back(factors);
        std::size_t i = 0;
        while (i < primes.size()) {
            if (++choice[i] < per_prime[i].size()) {
                break;
            }
            choice[i] = 0;
            ++i;
        }
        if (i == primes.size()) {
            break;
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.factors().size() < b.factors().size() || (a.factors().size() == b.factors().size() && a.factors() > b.factors()); });
    return out;
}

/// Every symmetric U containing 0, in increasing order of the orbit bit pattern.
inline std::vector<SymmetricSet> all_symmetric_sets(const FiniteAbelianGroup& g, std::size_t max_count = std::size_t{1} << 20)
{
    const auto orbits = orbits_under(g);
    const std::size_t k = orbits.orbits.size() - 1;
    if (k >= 63 || (std::size_t{1} << k) > max_count) {
        throw std::invalid_argument("too many symmetric sets in " + g.literal());
    }
    std::vector<SymmetricSet> out;
    out.reserve(std::size_t{1} << k);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << k); ++bits) {
        Subset s(g);
        s.insert(0);
        for (std::size_t o = 0; o < k; ++o) {
            if ((bits >> o) & 1U) {
                for (std::size_t x : orbits.orbits[o + 1]) {
                    s.insert(x);
                }
            }
        }
        out.emplace_back(std::move(s));
    }
    return out;
}

struct ScanOptions {
    unsigned threads = 0;      // 0: default_threads()
    std::function<void(const Json&)> sink; // receives per-instance records in order; may be empty
    double tolerance = kCertificateTolerance;
    std::size_t max_order = 24;
};

struct ScanResult {
    std::string what;
    std::size_t instances = 0;
    std::size_t violations = 0;
    Json summary;
};

inline unsigned resolve_threads(unsigned t) { return t ? t : default_threads(); }

inline void check_scan_budget(const FiniteAbelianGroup& g, const ScanOptions& opt)
{
    if (g.order() > opt.max_order) {
        throw std::invalid_argument("group " + g.literal() + " exceeds scan budget (order " + std::to_string(g.order()) + " > " +
                                    std::to_string(opt.max_order) + ")");
    }
}

// ---------------------------------------------------------------------------
// Strong duality and complementarity over all symmetric U.

inline ScanResult scan_duality(const std::vector<FiniteAbelianGroup>& groups, const ScanOptions& opt = {})
{
    ScanResult res;
    res.what = "duality";
    std::size_t duality_violations = 0;
    std::size_t complementarity_violations = 0;
    std::size_t ordering_violations = 0;
    double worst_product = 0.0;
    double worst_residual = 0.0;
    for (const auto& g : groups) {
        check_scan_budget(g, opt);
        const auto sets = all_symmetric_sets(g);
        std::vector<std::optional<Certificate>> tc(sets.size());
        std::vector<std::optional<Certificate>> dc(sets.size());
        parallel_for(sets.size(), resolve_threads(opt.threads), [&](std::size_t i) {
            tc[i] = certify({ProblemKind::Turan, sets[i]});
            dc[i] = certify({ProblemKind::Delsarte, sets[i]});
        });
        for (std::size_t i = 0; i < sets.size(); ++i) {
            const auto& t = *tc[i];
            const auto& d = *dc[i];
            const double tol = opt.tolerance;
            const bool dual_ok = std::abs(t.product - 1.0) <= tol && std::abs(d.product - 1.0) <= tol;
            const bool comp_ok = t.residuals.r1 <= tol && t.residuals.r2 <= tol && d.residuals.r1 <= tol && d.residuals.r2 <= tol &&
                                 d.residuals.r3 <= tol;
            const bool order_ok = t.primal.value <= d.primal.value + tol && d.dual.value <= t.dual.value + tol;
            duality_violations += dual_ok ? 0 : 1;
            complementarity_violations += comp_ok ? 0 : 1;
            ordering_violations += order_ok ? 0 : 1;
            worst_product = std::max({worst_product, std::abs(t.product - 1.0), std::abs(d.product - 1.0)});
            worst_residual = std::max({worst_residual, t.residuals.r1, t.residuals.r2, d.residuals.r1, d.residuals.r2, d.residuals.r3});
            ++res.instances;
            if (opt.sink) {
                Json r;
                r["group"] = g.literal();
                r["U"] = to_json_array(sets[i].elements());
                r["T"] = t.primal.value;
                r["T_dual"] = t.dual.value;
                r["D"] = d.primal.value;
                r["D_dual"] = d.dual.value;
                r["product_T"] = t.product;
                r["product_D"] = d.product;
                r["residuals_T"] = {{"r1", t.residuals.r1}, {"r2", t.residuals.r2}, {"r3", t.residuals.r3}};
                r["residuals_D"] = {{"r1", d.residuals.r1}, {"r2", d.residuals.r2}, {"r3", d.residuals.r3}};
                r["ok"] = dual_ok && comp_ok && order_ok;
                opt.sink(r);
            }
        }
    }
    res.violations = duality_violations + complementarity_violations + ordering_violations;
    res.summary = {{"summary", true},
                   {"what", res.what},
                   {"instances", res.instances},
                   {"duality_violations", duality_violations},
                   {"complementarity_violations", complementarity_violations},
                   {"ordering_violations", ordering_violations},
                   {"worst_product_error", worst_product},
                   {"worst_residual", worst_residual}};
    return res;
}

// ---------------------------------------------------------------------------
// Shared machinery for scans over every nonempty subset A.

namespace detail {

inline constexpr std::uint64_t kMaskChunk = std::uint64_t{1} << 14;

inline std::size_t mask_chunk_count(std::size_t n)
{
    const std::uint64_t total = std::uint64_t{1} << n;
    return static_cast<std::size_t>((total + kMaskChunk - 1) / kMaskChunk);
}

/// Calls fn(chunk, first, last) on disjoint mask ranges covering [1, 2^n).
template <class Fn>
void for_mask_chunks(std::size_t n, unsigned threads, Fn&& fn)
{
    if (n > 40) {
        throw std::invalid_argument("subset scans need |G| <= 40");
    }
    const std::uint64_t total = std::uint64_t{1} << n;
    parallel_for(mask_chunk_count(n), threads, [&](std::size_t c) {
        const std::uint64_t first = std::max<std::uint64_t>(1, c * kMaskChunk);
        const std::uint64_t last = std::min<std::uint64_t>(total, (c + 1) * kMaskChunk);
        fn(c, first, last);
    });
}

/// Like for_mask_chunks, but fn also fills a record buffer per chunk; buffers are
/// handed to `sink` in mask order, a batch of chunks at a time.
template <class Fn>
void for_mask_chunks_with_records(std::size_t n, unsigned threads, const std::function<void(const Json&)>& sink, Fn&& fn)
{
    if (!sink) {
        for_mask_chunks(n, threads, [&](std::size_t c, std::uint64_t first, std::uint64_t last) {
            std::vector<Json>* none = nullptr;
            fn(c, first, last, none);
        });
        return;
    }
    if (n > 40) {
        throw std::invalid_argument("subset scans need |G| <= 40");
    }
    const std::uint64_t total = std::uint64_t{1} << n;
    const std::size_t chunks = mask_chunk_count(n);
    const std::size_t batch = std::max<std::size_t>(1, 4 * static_cast<std::size_t>(threads));
    for (std::size_t begin = 0; begin < chunks; begin += batch) {
        const std::size_t end = std::min(chunks, begin + batch);
        std::vector<std::vector<Json>> buffers(end - begin);
        parallel_for(end - begin, threads, [&](std::size_t k) {
            const std::size_t c = begin + k;
            const std::uint64_t first = std::max<std::uint64_t>(1, c * kMaskChunk);
            const std::uint64_t last = std::min<std::uint64_t>(total, (c + 1) * kMaskChunk);
            std::vector<Json>* out = &buffers[k];
            fn(c, first, last, out);
        });
        for (auto& buf : buffers) {
            for (const auto& r : buf) {
                sink(r);
            }
        }
    }
}

/// Distinct difference sets A - A over all nonempty A, sorted.
inline std::vector<Mask> distinct_difference_sets(const MaskGroup& mg, unsigned threads)
{
    std::mutex mu;
    std::set<Mask> all;
    for_mask_chunks(mg.order(), threads, [&](std::size_t, std::uint64_t first, std::uint64_t last) {
        std::set<Mask> local;
        for (std::uint64_t a = first; a < last; ++a) {
            local.insert(mg.difference(a));
        }
        std::lock_guard lock(mu);
        all.insert(local.begin(), local.end());
    });
    return {all.begin(), all.end()};
}

struct DifferenceSetData {
    double turan = 0.0;
    double delsarte = 0.0;
    std::size_t packing = 0;
};

inline std::unordered_map<Mask, DifferenceSetData> solve_difference_sets(const MaskGroup& mg, const std::vector<Mask>& sets, bool need_turan, bool need_packing, unsigned threads)
{
    std::vector<DifferenceSetData> data(sets.size());
    parallel_for(sets.size(), threads, [&](std::size_t i) {
        const SymmetricSet u(Subset::from_mask(mg.group(), sets[i]));
        if (need_turan) {
            data[i].turan = extremal_constant(ProblemKind::Turan, u);
        }
        data[i].delsarte = extremal_constant(ProblemKind::Delsarte, u);
        if (need_packing) {
            data[i].packing = static_cast<std::size_t>(std::popcount(packing_mask(mg, sets[i])));
        }
    });
    std::unordered_map<Mask, DifferenceSetData> out;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        out.emplace(sets[i], data[i]);
    }
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Tiling/spectral equality D(A-A) = T(A-A) = m(A), with witness certificates.

struct Fd1Counts {
    std::size_t subsets = 0;
    std::size_t tiling = 0;
    std::size_t spectral = 0;
    std::size_t equality_violations = 0;
    std::size_t witness_violations = 0;
    std::size_t equality_without_witness = 0; // T = D = m(A) but neither tiles nor spectral
    double worst_equality_error = 0.0;
    double worst_witness_error = 0.0;
};

inline ScanResult scan_tiling_spectral(const std::vector<FiniteAbelianGroup>& groups, const ScanOptions& opt = {})
{
    ScanResult res;
    res.what = "fd1";
    Fd1Counts total;
    const unsigned threads = resolve_threads(opt.threads);
    for (const auto& g : groups) {
        check_scan_budget(g, opt);
        MaskGroup mg(g);
        const auto diffs = detail::distinct_difference_sets(mg, threads);
        const auto table = detail::solve_difference_sets(mg, diffs, true, false, threads);
        std::vector<Fd1Counts> partial(detail::mask_chunk_count(g.order()));
        const double root_n = std::sqrt(static_cast<double>(g.order()));
        detail::for_mask_chunks_with_records(g.order(), threads, opt.sink, [&](std::size_t c, std::uint64_t first, std::uint64_t last, std::vector<Json>* out) {
            auto& cnt = partial[c];
            for (std::uint64_t a = first; a < last; ++a) {
                const Mask diff = mg.difference(a);
                const auto& dat = table.at(diff);
                const double m = static_cast<double>(std::popcount(a)) / root_n;
                const auto tile = detail::tile_mask(mg, a);
                const auto spec = detail::spectrum_mask(mg, a);
                const double err = std::max(std::abs(dat.turan - m), std::abs(dat.delsarte - m));
                ++cnt.subsets;
                bool witness_ok = true;
                if (tile || spec) {
                    cnt.tiling += tile ? 1 : 0;
                    cnt.spectral += spec ? 1 : 0;
                    cnt.worst_equality_error = std::max(cnt.worst_equality_error, err);
                    if (err > opt.tolerance) {
                        ++cnt.equality_violations;
                    }
                    const Subset as = Subset::from_mask(g, a);
                    const SymmetricSet u(Subset::from_mask(g, diff));
                    auto check = [&](const GroupFunction& h) {
                        const auto hh = fourier(h);
                        const double adm = check_admissible(ProblemKind::DualDelsarte, u, h, hh).violation;
                        const double val = std::abs(hh[0] - 1.0 / m);
                        cnt.worst_witness_error = std::max({cnt.worst_witness_error, adm, val});
                        if (adm > kTolerance || val > kTolerance) {
                            witness_ok = false;
                        }
                    };
                    if (tile) {
                        check(witness_to_dual(TilingWitness{as, Subset::from_mask(g, *tile)}));
                    }
                    if (spec) {
                        check(witness_to_dual(SpectralWitness{as, Subset::from_mask(g, *spec)}));
                    }
                    cnt.witness_violations += witness_ok ? 0 : 1;
                } else if (err <= opt.tolerance) {
                    ++cnt.equality_without_witness;
                }
                if (out) {
                    Json r;
                    r["group"] = g.literal();
                    r["A"] = to_json_array(detail::mask_elements(a));
                    r["difference_set"] = to_json_array(detail::mask_elements(diff));
                    r["tiles"] = tile.has_value();
                    r["spectral"] = spec.has_value();
                    r["T"] = dat.turan;
                    r["D"] = dat.delsarte;
                    r["m"] = m;
                    r["T_equals_m"] = std::abs(dat.turan - m) <= opt.tolerance;
                    r["D_equals_m"] = std::abs(dat.delsarte - m) <= opt.tolerance;
                    r["tiling_lambda"] = tile ? to_json_array(detail::mask_elements(*tile)) : Json(nullptr);
                    r["spectrum_lambda"] = spec ? to_json_array(detail::mask_elements(*spec)) : Json(nullptr);
                    r["witness_ok"] = witness_ok;
                    out->push_back(std::move(r));
                }
            }
        });
        for (const auto& p : partial) {
            total.subsets += p.subsets;
            total.tiling += p.tiling;
            total.spectral += p.spectral;
            total.equality_violations += p.equality_violations;
            total.witness_violations += p.witness_violations;
            total.equality_without_witness += p.equality_without_witness;
            total.worst_equality_error = std::max(total.worst_equality_error, p.worst_equality_error);
            total.worst_witness_error = std::max(total.worst_witness_error, p.worst_witness_error);
        }
    }
    res.instances = total.subsets;
    res.violations = total.equality_violations + total.witness_violations;
    res.summary = {{"summary", true},
                   {"what", res.what},
                   {"instances", total.subsets},
                   {"tiling", total.tiling},
                   {"spectral", total.spectral},
                   {"equality_violations", total.equality_violations},
                   {"witness_violations", total.witness_violations},
                   {"equality_without_tiling_or_spectrum", total.equality_without_witness},
                   {"worst_equality_error", total.worst_equality_error},
                   {"worst_witness_error", total.worst_witness_error}};
    return res;
}

// ---------------------------------------------------------------------------
// Packing bound sqrt|G| / D(A-A) against the exact maximum packing.

struct PackingCounts {
    std::size_t subsets = 0;
    std::size_t tiling = 0;
    std::size_t dominance_violations = 0;
    std::size_t tightness_violations = 0;
    double worst_slack = 0.0;      // max(pack - bound)
    double worst_tight_error = 0.0; // max |bound - |G|/|A|| over tiles
};

inline ScanResult scan_packing(const std::vector<FiniteAbelianGroup>& groups, const ScanOptions& opt = {})
{
    ScanResult res;
    res.what = "packing";
    PackingCounts total;
    total.worst_slack = -std::numeric_limits<double>::infinity();
    const unsigned threads = resolve_threads(opt.threads);
    for (const auto& g : groups) {
        check_scan_budget(g, opt);
        MaskGroup mg(g);
        const auto diffs = detail::distinct_difference_sets(mg, threads);
        const auto table = detail::solve_difference_sets(mg, diffs, false, true, threads);
        std::vector<PackingCounts> partial(detail::mask_chunk_count(g.order()));
        for (auto& p : partial) {
            p.worst_slack = -std::numeric_limits<double>::infinity();
        }
        const double n = static_cast<double>(g.order());
        detail::for_mask_chunks_with_records(g.order(), threads, opt.sink, [&](std::size_t c, std::uint64_t first, std::uint64_t last, std::vector<Json>* out) {
            auto& cnt = partial[c];
            for (std::uint64_t a = first; a < last; ++a) {
                const Mask diff = mg.difference(a);
                const auto& dat = table.at(diff);
                const double bound = packing_bound_from_delsarte(g.order(), dat.delsarte);
                const auto pack = static_cast<double>(dat.packing);
                const auto tile = detail::tile_mask(mg, a);
                ++cnt.subsets;
                cnt.worst_slack = std::max(cnt.worst_slack, pack - bound);
                bool ok = bound >= pack - opt.tolerance;
                if (!ok) {
                    ++cnt.dominance_violations;
                }
                if (tile) {
                    ++cnt.tiling;
                    const double target = n / static_cast<double>(std::popcount(a));
                    const double e = std::max(std::abs(bound - target), std::abs(bound - std::round(bound)));
                    cnt.worst_tight_error = std::max(cnt.worst_tight_error, e);
                    if (e > opt.tolerance) {
                        ++cnt.tightness_violations;
                        ok = false;
                    }
                }
                if (out) {
                    Json r;
                    r["group"] = g.literal();
                    r["A"] = to_json_array(detail::mask_elements(a));
                    r["packing_bound"] = bound;
                    r["max_packing"] = dat.packing;
                    r["tiles"] = tile.has_value();
                    r["ok"] = ok;
                    out->push_back(std::move(r));
                }
            }
        });
        for (const auto& p : partial) {
            total.subsets += p.subsets;
            total.tiling += p.tiling;
            total.dominance_violations += p.dominance_violations;
            total.tightness_violations += p.tightness_violations;
            total.worst_slack = std::max(total.worst_slack, p.worst_slack);
            total.worst_tight_error = std::max(total.worst_tight_error, p.worst_tight_error);
        }
    }
    res.instances = total.subsets;
    res.violations = total.dominance_violations + total.tightness_violations;
    res.summary = {{"summary", true},
                   {"what", res.what},
                   {"instances", total.subsets},
                   {"tiling", total.tiling},
                   {"dominance_violations", total.dominance_violations},
                   {"tightness_violations", total.tightness_violations},
                   {"worst_packing_minus_bound", total.worst_slack},
                   {"worst_tiling_bound_error", total.worst_tight_error}};
    return res;
}

} // namespace tdlab
