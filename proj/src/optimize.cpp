#include "pvqd/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <stdexcept>

namespace pvqd {

BlockMask::BlockMask(std::vector<std::uint32_t> blocks, std::size_t num_blocks)
    : blocks_(std::move(blocks)) {
    if (blocks_.empty()) throw std::invalid_argument("block mask is empty");
    std::sort(blocks_.begin(), blocks_.end());
    blocks_.erase(std::unique(blocks_.begin(), blocks_.end()), blocks_.end());
    if (blocks_.back() >= num_blocks)
        throw std::invalid_argument("block index " + std::to_string(blocks_.back()) +
                                    " out of range for " + std::to_string(num_blocks) +
                                    " blocks");
}

BlockMask BlockMask::all(std::size_t num_blocks) {
    std::vector<std::uint32_t> blocks(num_blocks);
    for (std::size_t i = 0; i < num_blocks; ++i) blocks[i] = static_cast<std::uint32_t>(i);
    return BlockMask(std::move(blocks), num_blocks);
}

std::vector<std::size_t> BlockMask::slots(std::size_t block_size) const {
    std::vector<std::size_t> out;
    out.reserve(blocks_.size() * block_size);
    for (const std::uint32_t b : blocks_)
        for (std::size_t i = 0; i < block_size; ++i) out.push_back(b * block_size + i);
    return out;
}

LossContext::LossContext(BlockedAnsatz ansatz, ParamVector theta, Circuit target_step,
                         double dt, StateVector initial_state)
    : ansatz_(std::move(ansatz)),
      theta_(std::move(theta)),
      target_step_(std::move(target_step)),
      dt_(dt),
      initial_state_(std::move(initial_state)),
      phi_(initial_state_) {
    if (dt_ <= 0.0 || !std::isfinite(dt_))
        throw std::invalid_argument("dt must be positive and finite");
    if (theta_.size() != ansatz_.num_parameters())
        throw std::invalid_argument("theta length does not match the ansatz");
    if (target_step_.num_parameters != 0)
        throw std::invalid_argument("target step circuit must be fixed-angle");
    if (target_step_.num_qubits != ansatz_.num_qubits())
        throw std::invalid_argument("target step qubit count does not match the ansatz");
    phi_ = evaluate(ansatz_, theta_, initial_state_);
    apply_circuit(target_step_, phi_);
}

namespace {

ParamVector add(const ParamVector& a, std::span<const double> b) {
    ParamVector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

double overlap_sq(const LossContext& ctx, std::span<const double> d_theta) {
    const ParamVector x = add(ctx.theta(), d_theta);
    const StateVector psi = evaluate(ctx.ansatz(), x, ctx.initial_state());
    return std::norm(inner_product(ctx.target_state(), psi));
}

}  // namespace

double pvqd_loss(const LossContext& ctx, std::span<const double> d_theta) {
    if (d_theta.size() != ctx.ansatz().num_parameters())
        throw std::invalid_argument("d_theta length does not match the ansatz");
    const double one_minus_f = std::max(0.0, 1.0 - overlap_sq(ctx, d_theta));
    return one_minus_f / (ctx.dt() * ctx.dt());
}

ParamVector loss_gradient(const LossContext& ctx, std::span<const double> d_theta,
                          const BlockMask& mask) {
    const BlockedAnsatz& ansatz = ctx.ansatz();
    if (d_theta.size() != ansatz.num_parameters())
        throw std::invalid_argument("d_theta length does not match the ansatz");

    std::vector<char> masked(ansatz.num_parameters(), 0);
    for (const std::size_t s : mask.slots(ansatz.block_size())) masked[s] = 1;

    const ParamVector x = add(ctx.theta(), d_theta);
    const auto& gates = ansatz.circuit().gates;

    // Forward pass, then one backward sweep un-applying each gate from both
    // the state and the back-propagated target. For gate k with word P and
    // angle x_k, d<phi|psi>/dx_k = <lambda_k| (-i/2) P |s_{k+1}>.
    StateVector psi = evaluate(ansatz, x, ctx.initial_state());
    const cdouble c = inner_product(ctx.target_state(), psi);
    StateVector lambda = ctx.target_state();

    ParamVector grad(ansatz.num_parameters(), 0.0);
    const double scale = -2.0 / (ctx.dt() * ctx.dt());
    for (std::size_t k = gates.size(); k-- > 0;) {
        const auto& gate = gates[k];
        const auto slot = static_cast<std::size_t>(gate.parameter_slot);
        if (masked[slot]) {
            const cdouble dc = cdouble{0.0, -0.5} * pauli_bracket(lambda, gate, psi);
            grad[slot] += scale * (std::conj(c) * dc).real();
        }
        apply_pauli_rotation(psi, gate, -x[slot]);
        apply_pauli_rotation(lambda, gate, -x[slot]);
    }
    return grad;
}

namespace {

struct ReducedProblem {
    const LossContext& ctx;
    const BlockMask& mask;
    std::vector<std::size_t> slots;
    long loss_evals = 0;
    long grad_evals = 0;

    ReducedProblem(const LossContext& c, const BlockMask& m)
        : ctx(c), mask(m), slots(m.slots(c.ansatz().block_size())) {}

    std::size_t dim() const { return slots.size(); }

    ParamVector embed(std::span<const double> z) const {
        ParamVector full(ctx.ansatz().num_parameters(), 0.0);
        for (std::size_t i = 0; i < slots.size(); ++i) full[slots[i]] = z[i];
        return full;
    }

    double loss(std::span<const double> z) {
        ++loss_evals;
        for (const double v : z)
            if (!std::isfinite(v))
                throw std::runtime_error("optimizer produced a non-finite iterate");
        const double f = pvqd_loss(ctx, embed(z));
        if (!std::isfinite(f))
            throw std::runtime_error("optimizer encountered a non-finite loss");
        return f;
    }

    std::vector<double> gradient(std::span<const double> z) {
        ++grad_evals;
        const ParamVector full = loss_gradient(ctx, embed(z), mask);
        std::vector<double> g(slots.size());
        for (std::size_t i = 0; i < slots.size(); ++i) g[i] = full[slots[i]];
        return g;
    }
};

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (const double x : v) m = std::max(m, std::abs(x));
    return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> axpy(double alpha, std::span<const double> x,
                         std::span<const double> y) {
    std::vector<double> out(y.begin(), y.end());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] += alpha * x[i];
    return out;
}

struct LbfgsHistory {
    std::deque<std::vector<double>> s, y;
    std::deque<double> rho;
    static constexpr std::size_t kMemory = 10;

    void push(std::vector<double> si, std::vector<double> yi) {
        const double sy = dot(si, yi);
        if (sy <= 1e-12 * std::sqrt(dot(si, si)) * std::sqrt(dot(yi, yi))) return;
        s.push_back(std::move(si));
        y.push_back(std::move(yi));
        rho.push_back(1.0 / sy);
        if (s.size() > kMemory) {
            s.pop_front();
            y.pop_front();
            rho.pop_front();
        }
    }

    // Two-loop recursion for H g.
    std::vector<double> apply(std::span<const double> g) const {
        std::vector<double> q(g.begin(), g.end());
        const std::size_t m = s.size();
        std::vector<double> alpha(m);
        for (std::size_t j = m; j-- > 0;) {
            alpha[j] = rho[j] * dot(s[j], q);
            for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[j] * y[j][i];
        }
        if (m > 0) {
            const double gamma = dot(s[m - 1], y[m - 1]) / dot(y[m - 1], y[m - 1]);
            for (auto& v : q) v *= gamma;
        }
        for (std::size_t j = 0; j < m; ++j) {
            const double beta = rho[j] * dot(y[j], q);
            for (std::size_t i = 0; i < q.size(); ++i) q[i] += (alpha[j] - beta) * s[j][i];
        }
        return q;
    }
};

struct LineSearchResult {
    bool ok = false;
    double alpha = 0.0;
    double f = 0.0;
    std::vector<double> g;
};

// Strong Wolfe line search (bracket + zoom).
LineSearchResult wolfe_search(ReducedProblem& prob, std::span<const double> z,
                              std::span<const double> p, double f0, double dphi0,
                              double alpha_init) {
    constexpr double c1 = 1e-4;
    constexpr double c2 = 0.9;
    constexpr int kMaxBracket = 20;
    constexpr int kMaxZoom = 30;

    auto eval = [&](double a, double& f, std::vector<double>& g, double& dphi) {
        const std::vector<double> zt = axpy(a, p, z);
        f = prob.loss(zt);
        g = prob.gradient(zt);
        dphi = dot(g, p);
    };

    auto zoom = [&](double lo, double f_lo, double dphi_lo, double hi, double f_hi) {
        LineSearchResult res;
        for (int it = 0; it < kMaxZoom; ++it) {
            // Quadratic interpolation, safeguarded by bisection.
            double a = lo + 0.5 * (hi - lo);
            const double denom = 2.0 * (f_hi - f_lo - dphi_lo * (hi - lo));
            if (std::abs(denom) > 1e-30) {
                const double cand = lo - dphi_lo * (hi - lo) * (hi - lo) / denom;
                const double lo_b = std::min(lo, hi), hi_b = std::max(lo, hi);
                if (cand > lo_b + 0.1 * (hi_b - lo_b) && cand < hi_b - 0.1 * (hi_b - lo_b))
                    a = cand;
            }
            double f, dphi;
            std::vector<double> g;
            eval(a, f, g, dphi);
            if (f > f0 + c1 * a * dphi0 || f >= f_lo) {
                hi = a;
                f_hi = f;
            } else {
                if (std::abs(dphi) <= -c2 * dphi0) {
                    res.ok = true;
                    res.alpha = a;
                    res.f = f;
                    res.g = std::move(g);
                    return res;
                }
                if (dphi * (hi - lo) >= 0.0) {
                    hi = lo;
                    f_hi = f_lo;
                }
                lo = a;
                f_lo = f;
                dphi_lo = dphi;
            }
            if (std::abs(hi - lo) < 1e-16) break;
        }
        // Accept the best sufficient-decrease point found even if the
        // curvature condition was not met.
        double f, dphi;
        std::vector<double> g;
        eval(lo, f, g, dphi);
        if (f < f0) {
            res.ok = true;
            res.alpha = lo;
            res.f = f;
            res.g = std::move(g);
        }
        return res;
    };

    double a_prev = 0.0, f_prev = f0, dphi_prev = dphi0;
    double a = alpha_init;
    for (int it = 0; it < kMaxBracket; ++it) {
        double f, dphi;
        std::vector<double> g;
        eval(a, f, g, dphi);
        if (f > f0 + c1 * a * dphi0 || (it > 0 && f >= f_prev))
            return zoom(a_prev, f_prev, dphi_prev, a, f);
        if (std::abs(dphi) <= -c2 * dphi0) {
            LineSearchResult res;
            res.ok = true;
            res.alpha = a;
            res.f = f;
            res.g = std::move(g);
            return res;
        }
        if (dphi >= 0.0) return zoom(a, f, dphi, a_prev, f_prev);
        a_prev = a;
        f_prev = f;
        dphi_prev = dphi;
        a *= 2.0;
    }
    return {};
}

OptimizeResult finish(ReducedProblem& prob, std::span<const double> z, double f,
                      int iterations, bool budget_exhausted,
                      std::vector<double> trace) {
    OptimizeResult res;
    res.d_theta_star = prob.embed(z);
    res.final_loss = f;
    res.iterations = iterations;
    res.loss_evaluations = prob.loss_evals;
    res.gradient_evaluations = prob.grad_evals;
    res.budget_exhausted = budget_exhausted;
    res.loss_trace = std::move(trace);
    return res;
}

}  // namespace

OptimizeResult minimize(const LossContext& ctx, const BlockMask& mask,
                        const ParamVector& d_theta_0, const OptimizerConfig& cfg) {
    if (cfg.mode != OptimizerConfig::Mode::GradientQuasiNewton)
        throw std::invalid_argument("minimize requires the quasi-Newton mode");
    if (cfg.max_iterations < 1 || cfg.loss_tolerance <= 0 || cfg.gradient_tolerance <= 0)
        throw std::invalid_argument("invalid optimizer configuration");
    if (d_theta_0.size() != ctx.ansatz().num_parameters())
        throw std::invalid_argument("d_theta_0 length does not match the ansatz");

    ReducedProblem prob(ctx, mask);
    std::vector<double> z(prob.dim());
    for (std::size_t i = 0; i < prob.dim(); ++i) z[i] = d_theta_0[prob.slots[i]];

    double f = prob.loss(z);
    std::vector<double> g = prob.gradient(z);
    std::vector<double> trace{f};
    if (f <= cfg.loss_tolerance || inf_norm(g) <= cfg.gradient_tolerance)
        return finish(prob, z, f, 0, false, std::move(trace));

    LbfgsHistory hist;
    int iterations = 0;
    bool converged = false;
    while (iterations < cfg.max_iterations) {
        std::vector<double> p = hist.apply(g);
        for (auto& v : p) v = -v;
        double dphi0 = dot(p, g);
        if (dphi0 >= 0.0) {  // not a descent direction; fall back to steepest descent
            for (std::size_t i = 0; i < p.size(); ++i) p[i] = -g[i];
            dphi0 = dot(p, g);
        }
        const double alpha_init =
            hist.s.empty() ? std::min(1.0, 1.0 / std::max(inf_norm(g), 1e-12)) : 1.0;
        const LineSearchResult ls = wolfe_search(prob, z, p, f, dphi0, alpha_init);
        if (!ls.ok) break;  // no further decrease available

        std::vector<double> z_new = axpy(ls.alpha, p, z);
        std::vector<double> s(p.size()), y(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            s[i] = z_new[i] - z[i];
            y[i] = ls.g[i] - g[i];
        }
        hist.push(std::move(s), std::move(y));
        z = std::move(z_new);
        f = ls.f;
        g = ls.g;
        trace.push_back(f);
        ++iterations;
        if (f <= cfg.loss_tolerance || inf_norm(g) <= cfg.gradient_tolerance) {
            converged = true;
            break;
        }
    }
    const bool budget = !converged && iterations >= cfg.max_iterations;
    return finish(prob, z, f, iterations, budget, std::move(trace));
}

OptimizeResult spsa_minimize(const LossContext& ctx, const BlockMask& mask,
                             const ParamVector& d_theta_0, const OptimizerConfig& cfg) {
    if (cfg.mode != OptimizerConfig::Mode::Spsa)
        throw std::invalid_argument("spsa_minimize requires the SPSA mode");
    if (cfg.max_iterations < 1 || cfg.loss_tolerance <= 0)
        throw std::invalid_argument("invalid optimizer configuration");
    if (d_theta_0.size() != ctx.ansatz().num_parameters())
        throw std::invalid_argument("d_theta_0 length does not match the ansatz");

    ReducedProblem prob(ctx, mask);
    const std::size_t d = prob.dim();
    std::vector<double> z(d);
    for (std::size_t i = 0; i < d; ++i) z[i] = d_theta_0[prob.slots[i]];

    std::mt19937_64 rng(cfg.rng_seed);
    auto rademacher = [&rng]() { return (rng() & 1) ? 1.0 : -1.0; };

    const SpsaGains& gains = cfg.spsa;
    double a = gains.a;
    if (a <= 0.0) {
        // Calibrate so the first update has magnitude ~0.01 per component.
        double mag = 0.0;
        constexpr int kProbes = 5;
        std::vector<double> delta(d);
        for (int p = 0; p < kProbes; ++p) {
            for (auto& v : delta) v = rademacher();
            const double fp = prob.loss(axpy(gains.c, delta, z));
            const double fm = prob.loss(axpy(-gains.c, delta, z));
            mag += std::abs(fp - fm) / (2.0 * gains.c);
        }
        mag /= kProbes;
        a = 0.01 * std::pow(gains.big_a + 1.0, gains.alpha) / std::max(mag, 1e-8);
    }

    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;
    std::vector<double> delta(d);
    while (iterations < cfg.max_iterations) {
        const int k = iterations;
        const double ck = gains.c / std::pow(k + 1.0, gains.gamma);
        const double ak = a / std::pow(k + 1.0 + gains.big_a, gains.alpha);
        for (auto& v : delta) v = rademacher();
        const double fp = prob.loss(axpy(ck, delta, z));
        const double fm = prob.loss(axpy(-ck, delta, z));
        const double diff = (fp - fm) / (2.0 * ck);
        for (std::size_t i = 0; i < d; ++i) z[i] -= ak * diff / delta[i];
        trace.push_back(std::min(fp, fm));
        ++iterations;
        if (std::min(fp, fm) <= cfg.loss_tolerance) {
            converged = true;
            break;
        }
    }
    const double f = prob.loss(z);
    return finish(prob, z, f, iterations, !converged && iterations >= cfg.max_iterations,
                  std::move(trace));
}

}  // namespace pvqd
