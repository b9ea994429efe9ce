#include "lzc/linear.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <ostream>

namespace lzc {

std::optional<Rat> parse_rat(const std::string& s) {
    if (s.empty()) return std::nullopt;
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(BigInt(s));
        BigInt num(s.substr(0, slash));
        BigInt den(s.substr(slash + 1));
        if (den == 0) return std::nullopt;
        return Rat(num, den);
    } catch (...) {
        return std::nullopt;
    }
}

std::string rel_str(Rel r) {
    switch (r) {
    case Rel::Le: return "<=";
    case Rel::Eq: return "=";
    case Rel::Ge: return ">=";
    }
    return "?";
}

int LinearProgram::fresh_var(std::string origin) {
    var_origin.push_back(std::move(origin));
    return num_vars++;
}

void LinearProgram::add(LinConstraint c) {
    std::map<int, Rat> merged;
    for (auto& [v, coef] : c.terms) merged[v] += coef;
    c.terms.clear();
    for (auto& [v, coef] : merged)
        if (coef != 0) c.terms.emplace_back(v, coef);
    if (c.terms.empty()) {
        bool ok = true;
        switch (c.rel) {
        case Rel::Le: ok = (0 <= c.rhs); break;
        case Rel::Eq: ok = (0 == c.rhs); break;
        case Rel::Ge: ok = (0 >= c.rhs); break;
        }
        if (!ok && !inconsistent) {
            inconsistent = true;
            inconsistency_origin = c.origin;
        }
        return; // constant rows are resolved at insertion
    }
    rows.push_back(std::move(c));
}

namespace {

// ---- presolve: alias a=b equalities and single-variable pins ------------

struct Presolve {
    int n;
    std::vector<int> parent;
    std::vector<std::optional<Rat>> pinned; // per representative
    bool infeasible = false;

    explicit Presolve(int nvars) : n(nvars), parent(nvars), pinned(nvars) {
        std::iota(parent.begin(), parent.end(), 0);
    }

    int find(int v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    }

    void pin(int v, const Rat& value) {
        if (value < 0) { infeasible = true; return; }
        v = find(v);
        if (pinned[v]) {
            if (*pinned[v] != value) infeasible = true;
        } else {
            pinned[v] = value;
        }
    }

    void alias(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a > b) std::swap(a, b); // smallest id is the representative
        if (pinned[b]) pin(a, *pinned[b]);
        parent[b] = a;
    }

    // rewrite a row through current aliases/pins; returns terms + constant moved to rhs
    std::pair<std::vector<std::pair<int, Rat>>, Rat> rewrite(const LinConstraint& c) {
        std::map<int, Rat> merged;
        Rat rhs = c.rhs;
        for (const auto& [v, coef] : c.terms) {
            int r = find(v);
            if (pinned[r])
                rhs -= coef * *pinned[r];
            else
                merged[r] += coef;
        }
        std::vector<std::pair<int, Rat>> terms;
        for (auto& [v, coef] : merged)
            if (coef != 0) terms.emplace_back(v, coef);
        return {std::move(terms), std::move(rhs)};
    }
};

struct Tableau {
    // rows x cols dense matrix; col layout: structural | slack | artificial | rhs
    int rows = 0, cols = 0;
    std::vector<std::vector<Rat>> a;
    std::vector<int> basis; // basic column per row

    Rat& at(int r, int c) { return a[r][c]; }

    void pivot(int pr, int pc) {
        Rat inv = 1 / a[pr][pc];
        for (int c = 0; c < cols; ++c) a[pr][c] *= inv;
        for (int r = 0; r < rows; ++r) {
            if (r == pr) continue;
            Rat f = a[r][pc];
            if (f == 0) continue;
            for (int c = 0; c < cols; ++c) a[r][c] -= f * a[pr][c];
        }
        basis[pr] = pc;
    }
};

enum class SimplexStatus { Optimal, Infeasible, Unbounded };

// Minimizes cost over the tableau using Bland's rule. `allowed` marks the
// columns eligible to enter the basis.
SimplexStatus run_simplex(Tableau& t, std::vector<Rat>& cost, Rat& value,
                          const std::vector<bool>& allowed) {
    int ncols = t.cols - 1; // last column is rhs
    for (;;) {
        // reduced costs: z_j = c_j - c_B * B^-1 A_j, maintained by pricing out
        int entering = -1;
        for (int c = 0; c < ncols; ++c) {
            if (!allowed[c]) continue;
            if (cost[c] < 0) { entering = c; break; }
        }
        if (entering < 0) return SimplexStatus::Optimal;
        int leaving = -1;
        Rat best;
        for (int r = 0; r < t.rows; ++r) {
            const Rat& coef = t.at(r, entering);
            if (coef <= 0) continue;
            Rat ratio = t.at(r, ncols) / coef;
            if (leaving < 0 || ratio < best ||
                (ratio == best && t.basis[r] < t.basis[leaving])) {
                leaving = r;
                best = ratio;
            }
        }
        if (leaving < 0) return SimplexStatus::Unbounded;
        // price the objective row out against the pivot row
        t.pivot(leaving, entering);
        Rat f = cost[entering];
        if (f != 0) {
            for (int c = 0; c < ncols; ++c) cost[c] -= f * t.at(leaving, c);
            value -= f * t.at(leaving, ncols);
        }
    }
}

} // namespace

Solution solve(const LinearProgram& lp) {
    Solution sol;
    if (lp.inconsistent) {
        sol.status = Solution::Status::Infeasible;
        return sol;
    }

    // -- presolve to fixpoint --
    Presolve pre(lp.num_vars);
    bool changed = true;
    while (changed && !pre.infeasible) {
        changed = false;
        for (const auto& row : lp.rows) {
            auto [terms, rhs] = pre.rewrite(row);
            if (row.rel != Rel::Eq) continue;
            if (terms.size() == 1) {
                int v = terms[0].first;
                Rat val = rhs / terms[0].second;
                if (!pre.pinned[pre.find(v)] || *pre.pinned[pre.find(v)] != val) {
                    pre.pin(v, val);
                    changed = true;
                }
            } else if (terms.size() == 2 && rhs == 0 &&
                       terms[0].second == -terms[1].second) {
                if (pre.find(terms[0].first) != pre.find(terms[1].first)) {
                    pre.alias(terms[0].first, terms[1].first);
                    changed = true;
                }
            }
        }
    }
    if (pre.infeasible) {
        sol.status = Solution::Status::Infeasible;
        return sol;
    }

    // -- build the reduced problem --
    std::vector<int> compact(lp.num_vars, -1);
    int n = 0;
    for (int v = 0; v < lp.num_vars; ++v)
        if (pre.find(v) == v && !pre.pinned[v]) compact[v] = n++;

    struct Row {
        std::vector<std::pair<int, Rat>> terms;
        Rel rel;
        Rat rhs;
    };
    std::vector<Row> rows;
    for (const auto& row : lp.rows) {
        auto [terms, rhs] = pre.rewrite(row);
        if (terms.empty()) {
            bool ok = true;
            switch (row.rel) {
            case Rel::Le: ok = (0 <= rhs); break;
            case Rel::Eq: ok = (0 == rhs); break;
            case Rel::Ge: ok = (0 >= rhs); break;
            }
            if (!ok) {
                sol.status = Solution::Status::Infeasible;
                return sol;
            }
            continue;
        }
        // rows the presolve consumed rewrite to empty and are dropped above
        for (auto& [v, c] : terms) v = compact[v];
        rows.push_back({std::move(terms), row.rel, std::move(rhs)});
    }

    Rat obj_const = 0;
    std::vector<Rat> obj(n, Rat(0));
    for (const auto& [v, w] : lp.objective) {
        int r = pre.find(v);
        if (pre.pinned[r])
            obj_const += w * *pre.pinned[r];
        else
            obj[compact[r]] += w;
    }

    int m = static_cast<int>(rows.size());

    // -- assemble the phase-1 tableau --
    int nslack = 0, nart = 0;
    for (const auto& r : rows) {
        bool flip = r.rhs < 0;
        Rel rel = r.rel;
        if (flip && rel != Rel::Eq) rel = (rel == Rel::Le) ? Rel::Ge : Rel::Le;
        if (rel != Rel::Eq) nslack++;
        if (rel != Rel::Le) nart++;
    }
    Tableau t;
    t.rows = m;
    t.cols = n + nslack + nart + 1;
    t.a.assign(m, std::vector<Rat>(t.cols, Rat(0)));
    t.basis.assign(m, -1);

    int slack_at = n, art_at = n + nslack;
    int rhs_col = t.cols - 1;
    std::vector<bool> is_artificial(t.cols - 1, false);
    for (int i = 0; i < m; ++i) {
        Rat sign = rows[i].rhs < 0 ? Rat(-1) : Rat(1);
        for (const auto& [v, c] : rows[i].terms) t.at(i, v) = sign * c;
        t.at(i, rhs_col) = sign * rows[i].rhs;
        Rel rel = rows[i].rel;
        if (sign < 0 && rel != Rel::Eq) rel = (rel == Rel::Le) ? Rel::Ge : Rel::Le;
        if (rel == Rel::Le) {
            t.at(i, slack_at) = 1;
            t.basis[i] = slack_at++;
        } else if (rel == Rel::Ge) {
            t.at(i, slack_at) = -1;
            slack_at++;
            t.at(i, art_at) = 1;
            is_artificial[art_at] = true;
            t.basis[i] = art_at++;
        } else {
            t.at(i, art_at) = 1;
            is_artificial[art_at] = true;
            t.basis[i] = art_at++;
        }
    }

    // -- phase 1: drive artificial variables to zero --
    if (nart > 0) {
        std::vector<Rat> cost(t.cols - 1, Rat(0));
        Rat value = 0;
        for (int c = 0; c < t.cols - 1; ++c)
            if (is_artificial[c]) cost[c] = 1;
        // price out the initial basis
        for (int r = 0; r < m; ++r) {
            if (!is_artificial[t.basis[r]]) continue;
            for (int c = 0; c < t.cols - 1; ++c) cost[c] -= t.at(r, c);
            value -= t.at(r, rhs_col);
        }
        std::vector<bool> allowed(t.cols - 1, true);
        SimplexStatus st = run_simplex(t, cost, value, allowed);
        assert(st != SimplexStatus::Unbounded);
        (void)st;
        if (value != 0) { // minimum of sum of artificials is -value... value tracks -z
            sol.status = Solution::Status::Infeasible;
            return sol;
        }
        // pivot leftover artificials out of the basis where possible
        for (int r = 0; r < m; ++r) {
            if (!is_artificial[t.basis[r]]) continue;
            int pc = -1;
            for (int c = 0; c < n + nslack; ++c)
                if (t.at(r, c) != 0) { pc = c; break; }
            if (pc >= 0) t.pivot(r, pc);
            // otherwise the row is redundant; the artificial stays basic at zero
        }
    }

    // -- phase 2 --
    {
        std::vector<Rat> cost(t.cols - 1, Rat(0));
        Rat value = 0;
        for (int c = 0; c < n; ++c) cost[c] = obj[c];
        for (int r = 0; r < m; ++r) {
            Rat f = cost[t.basis[r]];
            if (f == 0) continue;
            for (int c = 0; c < t.cols - 1; ++c) cost[c] -= f * t.at(r, c);
            value -= f * t.at(r, rhs_col);
        }
        std::vector<bool> allowed(t.cols - 1, true);
        for (int c = 0; c < t.cols - 1; ++c)
            if (is_artificial[c]) allowed[c] = false;
        SimplexStatus st = run_simplex(t, cost, value, allowed);
        if (st == SimplexStatus::Unbounded) {
            sol.status = Solution::Status::Unbounded;
            return sol;
        }
        sol.objective_value = -value + obj_const;
    }

    // -- read the solution back through the presolve --
    std::vector<Rat> reduced(n, Rat(0));
    for (int r = 0; r < m; ++r)
        if (t.basis[r] < n) reduced[t.basis[r]] = t.at(r, rhs_col);
    sol.assignment.assign(lp.num_vars, Rat(0));
    for (int v = 0; v < lp.num_vars; ++v) {
        int r = pre.find(v);
        if (pre.pinned[r])
            sol.assignment[v] = *pre.pinned[r];
        else
            sol.assignment[v] = reduced[compact[r]];
    }
    sol.status = Solution::Status::Optimal;
    return sol;
}

void dump_cplex(const LinearProgram& lp, std::ostream& out) {
    auto scaled = [](const std::vector<std::pair<int, Rat>>& terms, const Rat& rhs) {
        BigInt lcm = 1;
        for (const auto& [v, c] : terms) lcm = boost::multiprecision::lcm(lcm, denominator(c));
        lcm = boost::multiprecision::lcm(lcm, denominator(rhs));
        std::vector<std::pair<int, BigInt>> ts;
        for (const auto& [v, c] : terms) ts.emplace_back(v, numerator(Rat(c * lcm)));
        return std::make_pair(ts, numerator(Rat(rhs * lcm)));
    };
    auto write_terms = [&](const std::vector<std::pair<int, BigInt>>& ts) {
        bool first = true;
        for (const auto& [v, c] : ts) {
            if (c >= 0 && !first) out << " + ";
            if (c < 0) out << (first ? "- " : " - ");
            BigInt mag = abs(c);
            if (mag != 1) out << mag.str() << " ";
            out << "v" << v;
            first = false;
        }
        if (first) out << "0 v0";
    };

    out << "\\ generated by lazecost --dump-lp\n";
    out << "Minimize\n obj: ";
    {
        std::vector<std::pair<int, Rat>> terms(lp.objective.begin(), lp.objective.end());
        auto [ts, _] = scaled(terms, Rat(0));
        write_terms(ts);
    }
    out << "\nSubject To\n";
    for (size_t i = 0; i < lp.rows.size(); ++i) {
        const auto& row = lp.rows[i];
        auto [ts, rhs] = scaled(row.terms, row.rhs);
        out << " c" << i << ": ";
        write_terms(ts);
        out << " " << rel_str(row.rel) << " " << rhs.str() << "\n";
    }
    out << "Bounds\n";
    for (int v = 0; v < lp.num_vars; ++v) out << " 0 <= v" << v << "\n";
    out << "End\n";
}

} // namespace lzc
