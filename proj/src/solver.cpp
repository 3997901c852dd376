#include "mvs/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>

#include "mvs/errors.hpp"

namespace mvs {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

FieldEval view(const LatticeField& u) {
    return [&u](const Point& x) { return u.evaluate(x); };
}

}  // namespace

LatticeField sweep(const OperatorSpec& spec, const LatticeField& u) {
    const LatticeGrid& g = u.grid();
    if (g.dim() != spec.point_dim()) throw GeometryError("operator and field dimensions differ");
    const FieldEval phi = view(u);
    std::vector<double> v(g.size());
    const long n = static_cast<long>(g.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) v[i] = eval_mean(spec, g.node(i), phi);
    return u.with_values(std::move(v));
}

namespace {

// Replays the field lookups of eval_mean from a table recorded once per lattice.
class Stencil {
public:
    static std::optional<Stencil> record(const OperatorSpec& spec, const LatticeField& u) {
        const LatticeGrid& g = u.grid();
        Stencil st;
        st.node_start_.push_back(0);
        st.call_start_.push_back(0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            bool ok = true;
            const FieldEval rec = [&](const Point& x) {
                const auto ws = u.weights(x);
                if (ws.empty()) {
                    st.push_ext(u.exterior()(x), 1.0);
                } else {
                    for (const auto& w : ws) {
                        if (w.slot >= 0) st.push(static_cast<std::int32_t>(w.slot), w.weight);
                        else st.push_ext(u.exterior()(w.corner), w.weight);
                    }
                }
                st.call_start_.push_back(static_cast<std::uint32_t>(st.idx_.size()));
                if (st.idx_.size() > kMaxTerms) ok = false;
                return u.evaluate(x);
            };
            eval_mean(spec, g.node(i), rec);
            if (!ok) return std::nullopt;
            st.node_start_.push_back(st.call_start_.size() - 1);
        }
        return st;
    }

    double mean_at(const OperatorSpec& spec, const LatticeGrid& g, std::size_t i, const double* vals) const {
        std::size_t c = node_start_[i];
        const FieldEval replay = [&](const Point&) {
            double acc = 0.0;
            for (std::uint32_t t = call_start_[c]; t < call_start_[c + 1]; ++t) {
                const std::int32_t k = idx_[t];
                acc += w_[t] * (k >= 0 ? vals[k] : ext_[-k - 1]);
            }
            ++c;
            return acc;
        };
        return eval_mean(spec, g.node(i), replay);
    }

private:
    static constexpr std::size_t kMaxTerms = 40'000'000;
    void push(std::int32_t k, double w) {
        idx_.push_back(k);
        w_.push_back(w);
    }
    void push_ext(double v, double w) {
        ext_.push_back(v);
        push(-static_cast<std::int32_t>(ext_.size()), w);
    }
    std::vector<std::size_t> node_start_;
    std::vector<std::uint32_t> call_start_;
    std::vector<std::int32_t> idx_;
    std::vector<double> w_;
    std::vector<double> ext_;
};

LatticeField gauss_seidel_sweep(const OperatorSpec& spec, const LatticeField& u, const Stencil* st) {
    std::vector<double> vals = u.values();
    if (st) {
        for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = st->mean_at(spec, u.grid(), i, vals.data());
        return u.with_values(std::move(vals));
    }
    LatticeField cur = u;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        vals[i] = eval_mean(spec, u.grid().node(i), view(cur));
        cur = cur.with_values(vals);
    }
    return cur;
}

LatticeField jacobi_sweep(const OperatorSpec& spec, const LatticeField& u, const Stencil* st) {
    if (!st) return sweep(spec, u);
    std::vector<double> v(u.size());
    const double* vals = u.values().data();
    const long n = static_cast<long>(u.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) v[i] = st->mean_at(spec, u.grid(), static_cast<std::size_t>(i), vals);
    return u.with_values(std::move(v));
}

std::pair<LatticeField, SolveReport> iterate(const OperatorSpec& spec, const LatticeField& init,
                                             const SolveOptions& opts, bool monotone) {
    if (!(opts.tol > 0.0)) throw ConfigError("solver tolerance must be positive");
    if (opts.max_iter < 0) throw ConfigError("max-iter must be nonnegative");
    const auto t0 = std::chrono::steady_clock::now();
    SolveReport rep;
    rep.tol = opts.tol;
    rep.slack = monotone_slack(spec);
    rep.sweep_order = opts.gauss_seidel ? "gauss-seidel" : "jacobi";
    LatticeField u = init;
    if (u.grid().dim() != spec.point_dim()) throw GeometryError("operator and field dimensions differ");
    std::optional<Stencil> st;
    if (opts.max_iter > 1) st = Stencil::record(spec, u);
    const Stencil* sp = st ? &*st : nullptr;
    int k = 0;
    while (k < opts.max_iter) {
        LatticeField v = opts.gauss_seidel ? gauss_seidel_sweep(spec, u, sp) : jacobi_sweep(spec, u, sp);
        double r = 0.0, descent = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double d = v.values()[i] - u.values()[i];
            r = std::max(r, std::fabs(d));
            descent = std::max(descent, -d);
        }
        rep.residual_history.push_back(r);
        rep.final_residual = r;
        if (monotone) {
            if (k == 0) {
                rep.precondition_violation = descent;
                rep.precondition_ok = descent <= rep.slack;
            } else {
                rep.max_descent = std::max(rep.max_descent, descent);
                if (descent > rep.slack) {
                    rep.monotone = false;
                    if (rep.precondition_ok)
                        throw InvariantError("monotone iteration descended by " + std::to_string(descent) +
                                             " beyond slack " + std::to_string(rep.slack));
                }
            }
        }
        if (r <= opts.tol) {
            rep.converged = true;
            break;
        }
        u = std::move(v);
        ++k;
    }
    rep.iterations = k;
    rep.sup_norm = u.sup_norm();
    rep.wall_time = seconds_since(t0);
    return {u, rep};
}

}  // namespace

std::pair<LatticeField, SolveReport> solve_dpp(const OperatorSpec& spec, const LatticeField& init,
                                               const SolveOptions& opts) {
    return iterate(spec, init, opts, false);
}

std::pair<LatticeField, SolveReport> monotone_solve(const OperatorSpec& spec, const LatticeField& sub,
                                                    const SolveOptions& opts) {
    return iterate(spec, sub, opts, true);
}

double monotone_slack(const OperatorSpec& spec) {
    return 10.0 * (spec.params().root_tol + spec.tail_bound());
}

BarrierVerdict compare_with_barrier(const LatticeField& u, const FieldEval& barrier, Side side,
                                    const std::vector<Point>& exterior, std::string id) {
    BarrierVerdict v;
    v.id = std::move(id);
    auto gap = [&](double uval, double bval) { return side == Side::upper ? uval - bval : bval - uval; };
    double worst = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) worst = std::max(worst, gap(u.values()[i], barrier(u.grid().node(i))));
    for (const Point& x : exterior) worst = std::max(worst, gap(u.exterior()(x), barrier(x)));
    v.max_violation = worst;
    v.holds = worst == 0.0;
    return v;
}

double coupled_h(const OperatorSpec& spec) { return spec.radius() / 8.0; }

double coupled_ht(const OperatorSpec& spec) { return spec.rho() / (spec.dim() + 2.0) / 4.0; }

std::shared_ptr<const LatticeGrid> make_grid(const OperatorSpec& spec, const Domain& domain, double h, double T,
                                             double ht) {
    if (domain.dim() != spec.dim()) throw GeometryError("domain dimension differs from the operator");
    if (spec.family() == Family::heat) {
        if (!(T > 0.0)) throw ConfigError("heat problems need a positive time horizon");
        return std::make_shared<const LatticeGrid>(LatticeGrid::over_cylinder(domain, T, h, ht > 0.0 ? ht : coupled_ht(spec)));
    }
    return std::make_shared<const LatticeGrid>(LatticeGrid::over(domain, h));
}

std::vector<Point> exterior_samples(const LatticeGrid& grid, double width, std::size_t max_count) {
    std::vector<Point> out;
    const int n = grid.dim();
    Point lo = grid.node(0), hi = grid.node(0);
    for (const Point& x : grid.nodes())
        for (int i = 0; i < n; ++i) {
            lo[i] = std::min(lo[i], x[i]);
            hi[i] = std::max(hi[i], x[i]);
        }
    // coarse lattice over the widened box
    std::array<long, kMaxDim> count{};
    long total = 1;
    const double step = std::max(width / 4.0, 1e-12);
    for (int i = 0; i < n; ++i) {
        count[i] = static_cast<long>(std::ceil((hi[i] - lo[i] + 2.0 * width) / step)) + 1;
        total *= count[i];
    }
    const long stride = std::max<long>(1, total / static_cast<long>(4 * max_count));
    for (long flat = 0; flat < total && out.size() < max_count; flat += stride) {
        long rem = flat;
        Point x(n);
        for (int i = n - 1; i >= 0; --i) {
            x[i] = lo[i] - width + step * static_cast<double>(rem % count[i]);
            rem /= count[i];
        }
        if (!grid.inside(x)) out.push_back(x);
    }
    return out;
}

}  // namespace mvs
