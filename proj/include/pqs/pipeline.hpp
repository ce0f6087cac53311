#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "pqs/admissibility.hpp"
#include "pqs/automorphisms.hpp"
#include "pqs/canonical_system.hpp"
#include "pqs/check.hpp"
#include "pqs/generating_vectors.hpp"
#include "pqs/quotient_geometry.hpp"
#include "pqs/records.hpp"

namespace pqs {

struct RunConfig {
    int pg = 3;
    long long max_base_points = 0;
    bool only_free = false;
    std::optional<long long> max_group_order;
    int jobs = 0;  // 0 picks hardware concurrency
    RotationConvention convention = RotationConvention::b_minus;
    std::string resume_path;  // empty disables the work log
};

struct DiscardStats {
    std::map<std::string, long long> reasons;

    void bump(const std::string& r, long long k = 1) { reasons[r] += k; }
    void merge(const DiscardStats& o) {
        for (const auto& [k, v] : o.reasons) reasons[k] += v;
    }
};

struct RunResult {
    std::vector<ClassificationRecord> records;
    DiscardStats discards;
    long long cells_total = 0;
    long long cells_from_resume = 0;
};

// ---------------------------------------------------------------------------
// work units

struct Cell {
    AdmissibleTuple tuple;
    FiniteAbelianGroup group;

    std::string id() const {
        std::string s = "gA=" + std::to_string(tuple.gA) + ";gB=" + std::to_string(tuple.gB) +
                        ";G=" + group_label(group) + ";TA=";
        for (std::size_t i = 0; i < tuple.typeA.orders.size(); ++i)
            s += (i ? "." : "") + std::to_string(tuple.typeA.orders[i]);
        s += ";TB=";
        for (std::size_t i = 0; i < tuple.typeB.orders.size(); ++i)
            s += (i ? "." : "") + std::to_string(tuple.typeB.orders[i]);
        return s;
    }
};

inline bool type_fits_group(const SignatureType& t, const FiniteAbelianGroup& G) {
    for (int m : t.orders)
        if (G.exponent() % m != 0) return false;
    return true;
}

inline std::vector<Cell> build_cells(const RunConfig& cfg) {
    std::vector<Cell> cells;
    std::map<long long, std::vector<FiniteAbelianGroup>> groups_by_order;
    for (const auto& t : step1_tuples(cfg.pg, cfg.max_group_order)) {
        auto it = groups_by_order.find(t.group_order);
        if (it == groups_by_order.end())
            it = groups_by_order.emplace(t.group_order,
                                         enumerate_abelian_groups(t.group_order)).first;
        for (const auto& G : it->second)
            if (type_fits_group(t.typeA, G) && type_fits_group(t.typeB, G))
                cells.push_back({t, G});
    }
    return cells;
}

// ---------------------------------------------------------------------------
// per-group caches shared across cells

// Local quotient data for every ordered pair of monodromy ranks: n is the
// order of the cyclic intersection, a_raw the unnormalized rotation weight
// (0 when n = 1), pts the number of shared fixed points on the product
// (nonzero also for n = 1, where it counts plain intersections of the two
// fibers), and contrib the defect numerator pts*(n^2-1)*(exp/n).
struct PairClassTable {
    int n = 0;
    std::vector<int> nn, a_raw;
    std::vector<long long> pts, contrib;

    static PairClassTable build(const GroupTables& t, RotationConvention conv) {
        PairClassTable tbl;
        tbl.n = t.n;
        std::size_t sz = static_cast<std::size_t>(t.n) * t.n;
        tbl.nn.assign(sz, 1);
        tbl.a_raw.assign(sz, 0);
        tbl.pts.assign(sz, 0);
        tbl.contrib.assign(sz, 0);
        for (int g = 1; g < t.n; ++g)
            for (int h = 1; h < t.n; ++h) {
                std::size_t k = static_cast<std::size_t>(g) * t.n + h;
                long long denom = static_cast<long long>(t.ord[g]) * t.ord[h];
                auto ps = branch_pair_singularity(t, g, h, conv);
                int n_gh = ps ? ps->n : 1;
                tbl.nn[k] = n_gh;
                tbl.a_raw[k] = ps ? ps->a_raw : 0;
                long long num = static_cast<long long>(t.n) * n_gh;
                PQS_CHECK(num % denom == 0, "fixed point count not integral");
                tbl.pts[k] = num / denom;
                tbl.contrib[k] = tbl.pts[k] * (static_cast<long long>(n_gh) * n_gh - 1) *
                                 (t.exponent / n_gh);
            }
        return tbl;
    }
};

class RunCaches {
  public:
    std::shared_ptr<const GroupTables> tables(const FiniteAbelianGroup& G) {
        std::scoped_lock lk(mu_);
        auto& slot = tables_[G];
        if (!slot) slot = std::make_shared<GroupTables>(GroupTables::build(G));
        return slot;
    }
    std::shared_ptr<const PairClassTable> pairs(const FiniteAbelianGroup& G,
                                                const GroupTables& t,
                                                RotationConvention conv) {
        std::scoped_lock lk(mu_);
        auto& slot = pairs_[{G, conv == RotationConvention::b_plus}];
        if (!slot) slot = std::make_shared<PairClassTable>(PairClassTable::build(t, conv));
        return slot;
    }
    std::shared_ptr<const AutomorphismTables> automorphisms(const FiniteAbelianGroup& G) {
        std::scoped_lock lk(mu_);
        auto& slot = auts_[G];
        if (!slot) slot = std::make_shared<AutomorphismTables>(build_automorphism_tables(G));
        return slot;
    }
    std::shared_ptr<const std::vector<std::vector<int>>> side(
        const FiniteAbelianGroup& G, const GroupTables& t, const SignatureType& type) {
        std::scoped_lock lk(mu_);
        auto& slot = sides_[{G, type}];
        if (!slot)
            slot = std::make_shared<std::vector<std::vector<int>>>(
                enumerate_generating_vector_ranks(t, type));
        return slot;
    }

  private:
    std::mutex mu_;
    std::map<FiniteAbelianGroup, std::shared_ptr<GroupTables>> tables_;
    std::map<std::pair<FiniteAbelianGroup, bool>, std::shared_ptr<PairClassTable>> pairs_;
    std::map<FiniteAbelianGroup, std::shared_ptr<AutomorphismTables>> auts_;
    std::map<std::pair<FiniteAbelianGroup, SignatureType>,
             std::shared_ptr<std::vector<std::vector<int>>>> sides_;
};

// ---------------------------------------------------------------------------
// one cell

struct CellResult {
    std::vector<ClassificationRecord> records;
    DiscardStats discards;
};

inline CellResult classify_cell(const Cell& cell, RunCaches& caches, const RunConfig& cfg) {
    CellResult res;
    const auto& tup = cell.tuple;
    const long long chi = chi_from_pg(cfg.pg);
    auto tbl = caches.tables(cell.group);
    const GroupTables& t = *tbl;

    Rat product(static_cast<long long>(tup.gA - 1) * (tup.gB - 1), t.n);
    Rat defect = (Rat(chi) - product) * 12;
    PQS_CHECK(defect >= 0, "admissible tuple with negative defect");
    Rat target_scaled = defect * t.exponent;
    if (!is_integer(target_scaled)) {
        res.discards.bump("cells_defect_unreachable");
        return res;
    }
    const long long target_num = boost::rational_cast<long long>(target_scaled);
    const bool free_required = target_num == 0;
    if (cfg.only_free && !free_required) {
        res.discards.bump("cells_skipped_only_free");
        return res;
    }
    if (!k_squared(tup.gA, tup.gB, t.n)) {
        res.discards.bump("cells_k2_nonintegral");
        return res;
    }

    auto vecs_a = caches.side(cell.group, t, tup.typeA);
    if (vecs_a->empty()) {
        res.discards.bump("cells_without_generating_vectors");
        return res;
    }
    const bool same_type = tup.typeA == tup.typeB;
    auto vecs_b = same_type ? vecs_a : caches.side(cell.group, t, tup.typeB);
    if (vecs_b->empty()) {
        res.discards.bump("cells_without_generating_vectors");
        return res;
    }

    // union of the nontrivial parts of the cyclic subgroups; two sides give a
    // smooth quotient iff these are disjoint
    auto union_masks = [&](const std::vector<std::vector<int>>& vecs) {
        std::vector<Mask128> u(vecs.size());
        for (std::size_t i = 0; i < vecs.size(); ++i) {
            Mask128 m;
            for (int r : vecs[i]) m = m | t.cyc_mask[r];
            m.lo &= ~1ull;  // drop the identity
            u[i] = m;
        }
        return u;
    };
    std::vector<Mask128> umask_a, umask_b;
    std::shared_ptr<const PairClassTable> pair_tbl;
    if (free_required) {
        umask_a = union_masks(*vecs_a);
        umask_b = same_type ? umask_a : union_masks(*vecs_b);
    } else {
        pair_tbl = caches.pairs(cell.group, t, cfg.convention);
    }

    std::vector<std::pair<std::size_t, std::size_t>> survivors;
    const std::size_t na = vecs_a->size(), nb = vecs_b->size();
    for (std::size_t ia = 0; ia < na; ++ia) {
        const auto& va = (*vecs_a)[ia];
        for (std::size_t ib = same_type ? ia : 0; ib < nb; ++ib) {
            const auto& vb = (*vecs_b)[ib];
            if (free_required) {
                Mask128 meet = umask_a[ia] & umask_b[ib];
                if (meet.lo | meet.hi) {
                    res.discards.bump(cfg.only_free ? "nonfree_excluded" : "chi_mismatch");
                    continue;
                }
            } else {
                long long acc = 0;
                bool ok = true;
                for (int g : va) {
                    for (int h : vb) {
                        std::size_t k = static_cast<std::size_t>(g) * t.n + h;
                        int n_gh = pair_tbl->nn[k];
                        if (n_gh > 1 && pair_tbl->a_raw[k] != n_gh - 1) {
                            res.discards.bump("noncanonical_basket");
                            ok = false;
                            break;
                        }
                        acc += pair_tbl->contrib[k];
                        if (acc > target_num) break;
                    }
                    if (!ok || acc > target_num) break;
                }
                if (!ok) continue;
                if (acc != target_num) {
                    res.discards.bump("chi_mismatch");
                    continue;
                }
            }
            PieceDecomposition decomp = compute_pieces(t, va, vb, cfg.convention);
            BaseLocusReport bl = base_locus(t, va, vb, decomp);
            if (bl.has_curve_component) {
                res.discards.bump("curve_base_component");
                continue;
            }
            if (bl.isolated_points > cfg.max_base_points) {
                res.discards.bump("base_points_exceed_budget");
                continue;
            }
            survivors.emplace_back(ia, ib);
        }
    }
    if (survivors.empty()) return res;

    // orbit partition: every equivalence invariant above is constant on
    // orbits, so walking each orbit once both dedups and canonicalizes
    auto aut = caches.automorphisms(cell.group);
    std::vector<bool> visited(na * nb, false);
    std::vector<std::pair<std::vector<int>, std::vector<int>>> reps;
    std::vector<int> im_a, im_b;
    for (const auto& [sa, sb] : survivors) {
        if (visited[sa * nb + sb]) continue;
        std::vector<int> best_a = (*vecs_a)[sa], best_b = (*vecs_b)[sb];
        for (const auto& perm : aut->perms) {
            detail::apply_perm_sorted(perm, (*vecs_a)[sa], im_a);
            detail::apply_perm_sorted(perm, (*vecs_b)[sb], im_b);
            const std::vector<int>* x = &im_a;
            const std::vector<int>* y = &im_b;
            if (same_type && *y < *x) std::swap(x, y);
            visited[detail::index_of(*vecs_a, *x) * nb + detail::index_of(*vecs_b, *y)] = true;
            if (*x < best_a || (*x == best_a && *y < best_b)) {
                best_a = *x;
                best_b = *y;
            }
        }
        reps.emplace_back(std::move(best_a), std::move(best_b));
    }

    for (const auto& [ra, rb] : reps) {
        ClassificationRecord r;
        r.group = cell.group;
        r.g_a = tup.gA;
        r.g_b = tup.gB;
        r.type_a = tup.typeA;
        r.type_b = tup.typeB;
        r.vec_a = detail::ranks_to_elements(t, ra);
        r.vec_b = detail::ranks_to_elements(t, rb);
        r.basket = compute_singularities(t, ra, rb, cfg.convention);
        r.chi = chi;
        auto k2 = k_squared(tup.gA, tup.gB, t.n);
        PQS_CHECK(k2.has_value(), "record with non-integral K^2");
        r.k2 = *k2;
        r.pg = cfg.pg;
        r.smooth_quotient = r.basket.empty();
        r.decomp = compute_pieces(t, ra, rb, cfg.convention);
        BaseLocusReport bl = base_locus(t, ra, rb, r.decomp);
        PQS_CHECK(!bl.has_curve_component, "representative disagrees with orbit filter");
        r.base_points = bl.isolated_points;
        r.quadric = quadric_relation(r.decomp);
        r.degree = degree_report(r.pg, r.k2, r.base_points, r.basket, r.quadric.status);
        res.records.push_back(std::move(r));
    }
    std::sort(res.records.begin(), res.records.end(), record_less);
    return res;
}

// ---------------------------------------------------------------------------
// resume log

namespace detail {

inline nlohmann::ordered_json run_fingerprint(const RunConfig& cfg) {
    nlohmann::ordered_json fp;
    fp["format"] = "pqs-work-log";
    fp["version"] = 1;
    fp["pg"] = cfg.pg;
    fp["max_base_points"] = cfg.max_base_points;
    fp["only_free"] = cfg.only_free;
    if (cfg.max_group_order) fp["max_group_order"] = *cfg.max_group_order;
    else fp["max_group_order"] = nullptr;
    fp["convention"] = cfg.convention == RotationConvention::b_minus ? "b_minus" : "b_plus";
    return fp;
}

struct WorkLog {
    std::ofstream out;
    std::mutex mu;
    std::map<std::string, std::vector<ClassificationRecord>> done;

    void append(const std::string& cell_id, const std::vector<ClassificationRecord>& recs) {
        std::scoped_lock lk(mu);
        nlohmann::ordered_json line;
        line["task"] = cell_id;
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& r : recs) arr.push_back(record_to_json(r));
        line["records"] = arr;
        out << line.dump() << "\n";
        out.flush();
    }
};

// Loads a work log, tolerating a truncated final line (an interrupted run).
// The file is cut back to its last complete line so appends stay parseable.
// A log written under a different configuration is refused.
inline std::unique_ptr<WorkLog> open_work_log(const RunConfig& cfg) {
    auto log = std::make_unique<WorkLog>();
    std::string expected = run_fingerprint(cfg).dump();
    std::ifstream in(cfg.resume_path);
    bool has_header = false;
    std::streamoff good_end = 0;
    bool torn = false;
    if (in) {
        std::string line;
        if (std::getline(in, line) && !line.empty()) {
            nlohmann::json got;
            bool matches = false;
            try {
                got = nlohmann::json::parse(line);
                matches = got == nlohmann::json::parse(expected);
            } catch (const nlohmann::json::exception&) {
            }
            if (!matches)
                throw std::runtime_error(
                    "resume log was written for a different configuration: " +
                    cfg.resume_path);
            // A header without its newline is itself a torn write; rewrite it.
            has_header = !in.eof();
            if (has_header) {
                good_end = static_cast<std::streamoff>(in.tellg());
                while (std::getline(in, line)) {
                    if (in.eof()) {  // no trailing newline: torn tail
                        torn = true;
                        break;
                    }
                    std::vector<ClassificationRecord> recs;
                    std::string task;
                    try {
                        nlohmann::json j = nlohmann::json::parse(line);
                        task = j.at("task").get<std::string>();
                        for (const auto& rj : j.at("records"))
                            recs.push_back(record_from_json(rj));
                    } catch (const nlohmann::json::exception&) {
                        torn = true;
                        break;
                    }
                    log->done[task] = std::move(recs);
                    good_end = static_cast<std::streamoff>(in.tellg());
                }
            }
        }
        in.close();
    }
    if (has_header) {
        if (torn)
            std::filesystem::resize_file(cfg.resume_path,
                                         static_cast<std::uintmax_t>(good_end));
        log->out.open(cfg.resume_path, std::ios::app);
    } else {
        log->out.open(cfg.resume_path, std::ios::trunc);
        if (log->out) {
            log->out << expected << "\n";
            log->out.flush();
        }
    }
    if (!log->out)
        throw std::runtime_error("cannot open work log for writing: " + cfg.resume_path);
    return log;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// driver

inline RunResult run_classification(const RunConfig& cfg) {
    if (cfg.pg < 3) throw std::invalid_argument("pg must be at least 3");
    if (cfg.max_base_points < 0) throw std::invalid_argument("base point budget is negative");
    if (cfg.jobs < 0) throw std::invalid_argument("jobs must be positive");

    std::vector<Cell> cells = build_cells(cfg);
    RunResult result;
    result.cells_total = static_cast<long long>(cells.size());

    std::unique_ptr<detail::WorkLog> log;
    if (!cfg.resume_path.empty()) log = detail::open_work_log(cfg);

    std::vector<CellResult> slots(cells.size());
    std::vector<char> from_resume(cells.size(), 0);
    RunCaches caches;
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr first_error;

    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            try {
                if (log) {
                    auto it = log->done.find(cells[i].id());
                    if (it != log->done.end()) {
                        slots[i].records = it->second;
                        from_resume[i] = 1;
                        continue;
                    }
                }
                slots[i] = classify_cell(cells[i], caches, cfg);
                if (log) log->append(cells[i].id(), slots[i].records);
            } catch (...) {
                std::scoped_lock lk(err_mu);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    unsigned jobs = cfg.jobs > 0 ? static_cast<unsigned>(cfg.jobs)
                                 : std::max(1u, std::thread::hardware_concurrency());
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    for (std::size_t i = 0; i < cells.size(); ++i) {
        result.cells_from_resume += from_resume[i];
        result.discards.merge(slots[i].discards);
        for (auto& r : slots[i].records) result.records.push_back(std::move(r));
    }
    std::sort(result.records.begin(), result.records.end(), record_less);
    for (std::size_t i = 1; i < result.records.size(); ++i)
        PQS_CHECK(record_less(result.records[i - 1], result.records[i]),
                  "duplicate classification records across cells");
    for (const auto& r : result.records) validate_record(r, cfg.convention);
    return result;
}

// ---------------------------------------------------------------------------
// output

inline std::string type_label(const SignatureType& t) {
    std::string s;
    for (std::size_t i = 0; i < t.orders.size();) {
        std::size_t j = i;
        while (j < t.orders.size() && t.orders[j] == t.orders[i]) ++j;
        if (!s.empty()) s += '.';
        s += std::to_string(t.orders[i]);
        if (j - i > 1) s += "^" + std::to_string(j - i);
        i = j;
    }
    return s.empty() ? "-" : s;
}

inline std::string basket_label_compact(const SingularityBasket& b) {
    if (b.empty()) return "-";
    std::string s;
    for (const auto& [sing, count] : b.entries) {
        if (!s.empty()) s += '+';
        s += std::to_string(count) + "x";
        if (is_canonical(sing)) s += "A" + std::to_string(sing.n - 1);
        else s += "(1/" + std::to_string(sing.n) + ";" + std::to_string(sing.a) + ")";
    }
    return s;
}

inline std::string vector_label(const std::vector<GroupElement>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += '|';
        for (std::size_t k = 0; k < v[i].residues.size(); ++k) {
            if (k) s += '-';
            s += std::to_string(v[i].residues[k]);
        }
    }
    return s;
}

enum class OutputFormat { jsonl, csv, table };

inline void emit(const std::vector<ClassificationRecord>& records, OutputFormat fmt,
                 std::ostream& os) {
    if (fmt == OutputFormat::jsonl) {
        os << "# count=" << records.size() << "\n";
        for (const auto& r : records) os << record_json_line(r) << "\n";
        return;
    }
    auto row = [&](const ClassificationRecord& r) {
        std::vector<std::string> c;
        c.push_back(group_label(r.group));
        c.push_back(std::to_string(r.g_a));
        c.push_back(std::to_string(r.g_b));
        c.push_back(type_label(r.type_a));
        c.push_back(type_label(r.type_b));
        c.push_back(vector_label(r.vec_a));
        c.push_back(vector_label(r.vec_b));
        c.push_back(basket_label_compact(r.basket));
        c.push_back(std::to_string(r.chi));
        c.push_back(std::to_string(r.k2));
        c.push_back(std::to_string(r.pg));
        c.push_back("0");
        c.push_back(r.smooth_quotient ? "yes" : "no");
        c.push_back(std::to_string(r.decomp.pieces.size()));
        c.push_back(std::to_string(r.base_points));
        c.push_back(to_string(r.degree.upper_bound));
        c.push_back(r.degree.exact ? std::to_string(*r.degree.exact) : "");
        c.push_back(quadric_status_label(r.quadric.status));
        return c;
    };
    const std::vector<std::string> head = {"group", "gA", "gB", "typeA", "typeB",
                                           "vectorA", "vectorB", "basket", "chi", "k2",
                                           "pg", "q", "free", "pieces", "base_points",
                                           "degree_bound", "degree_exact", "quadric"};
    if (fmt == OutputFormat::csv) {
        for (std::size_t i = 0; i < head.size(); ++i) os << (i ? "," : "") << head[i];
        os << "\n";
        for (const auto& r : records) {
            auto c = row(r);
            for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
            os << "\n";
        }
        return;
    }
    // table: drop the wide vector columns, pad the rest
    std::vector<std::size_t> keep = {0, 1, 2, 3, 4, 7, 8, 9, 10, 12, 13, 14, 15, 16, 17};
    std::vector<std::vector<std::string>> rows;
    rows.push_back({});
    for (std::size_t k : keep) rows.back().push_back(head[k]);
    for (const auto& r : records) {
        auto c = row(r);
        rows.push_back({});
        for (std::size_t k : keep) rows.back().push_back(c[k]);
    }
    std::vector<std::size_t> w(keep.size(), 0);
    for (const auto& rw : rows)
        for (std::size_t i = 0; i < rw.size(); ++i) w[i] = std::max(w[i], rw[i].size());
    for (std::size_t ri = 0; ri < rows.size(); ++ri) {
        std::string line;
        for (std::size_t i = 0; i < rows[ri].size(); ++i) {
            if (i) line += "  ";
            line += rows[ri][i];
            line.append(w[i] - rows[ri][i].size(), ' ');
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        os << line << "\n";
        if (ri == 0) {
            std::string sep;
            for (std::size_t i = 0; i < w.size(); ++i) {
                if (i) sep += "  ";
                sep.append(w[i], '-');
            }
            os << sep << "\n";
        }
    }
}

struct RunSummary {
    long long record_count = 0;
    long long free_count = 0;
    std::vector<long long> exact_degrees;  // distinct, ascending
    std::optional<long long> max_exact_degree;
    std::map<std::string, long long> per_group;
};

inline RunSummary summarize(const std::vector<ClassificationRecord>& records) {
    RunSummary s;
    s.record_count = static_cast<long long>(records.size());
    for (const auto& r : records) {
        if (r.smooth_quotient) ++s.free_count;
        ++s.per_group[group_label(r.group)];
        if (r.degree.exact) s.exact_degrees.push_back(*r.degree.exact);
    }
    std::sort(s.exact_degrees.begin(), s.exact_degrees.end());
    s.exact_degrees.erase(std::unique(s.exact_degrees.begin(), s.exact_degrees.end()),
                          s.exact_degrees.end());
    if (!s.exact_degrees.empty()) s.max_exact_degree = s.exact_degrees.back();
    return s;
}

}  // namespace pqs
