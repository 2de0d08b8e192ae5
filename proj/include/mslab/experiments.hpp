#pragma once

#include "mslab/analysis.hpp"
#include "mslab/rng.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <thread>

namespace mslab {

using ordered_json = nlohmann::ordered_json;

struct ExperimentConfig {
    std::string experiment_id;
    int trials = 100;
    std::uint64_t seed = 1;
    int max_degree = 4;      // degree cap for theta; u, v stay <= 3
    double radius_cap = 0.5;
    int window = 104;
    int grid_size = 0;       // 0 = sized per trial from the degree/window rule
    std::map<std::string, double> tolerances;
};

inline const std::map<std::string, double>& default_tolerances() {
    static const std::map<std::string, double> defaults = {
        {"a_tol", 1e-8},           // exact partial-isometry tolerance on K_theta
        {"zero_tol", 1e-9},        // operator-vanishes tolerance
        {"nonzero_floor", 1e-3},   // "operator is nonzero" hypothesis floor
        {"margin_floor", 1e-3},    // non-partial-isometry defect floor
        {"eps_floor", 1e-9},       // floor under the finite-section tolerance
        {"angle_exact", 1e-6},     // principal angles for exact K_theta statements
        {"angle_window", 1e-3},    // principal angles for windowed statements
        {"rank_cutoff", 1e-8},     // singular-value cutoff for subspace ranks
        {"extremal_tol", 1e-8},    // top-cluster width for extremal spaces
        {"sedlock_tol", 1e-8},
        {"csym_tol", 1e-9},
        {"block_tol", 1e-10},
        {"const_b_tol", 1e-10},
        {"norm_tol", 1e-3},
        {"strict_residual", 1e-2},
        {"coanalytic_tol", 1e-8},
        {"min_separation", 0.15},  // zero separation enforced for coprime factors
    };
    return defaults;
}

inline double tol(const ExperimentConfig& cfg, const std::string& name) {
    const auto it = cfg.tolerances.find(name);
    if (it != cfg.tolerances.end()) return it->second;
    const auto& d = default_tolerances();
    const auto dit = d.find(name);
    if (dit == d.end()) throw std::invalid_argument("unknown tolerance: " + name);
    return dit->second;
}

struct TrialRecord {
    int trial = 0;
    std::uint64_t seed = 0;
    std::string verdict = "pass";  // pass | fail | skipped
    std::string skip_reason;
    std::string note;
    double margin = 0.0;  // signed distance from the failing boundary (>= 0 on pass)
    std::optional<BlaschkeProduct> theta, u, v;
    std::vector<std::pair<std::string, double>> values;

    void value(const std::string& name, double v) { values.emplace_back(name, v); }

    void gate(bool ok) {
        if (!ok) verdict = "fail";
    }

    void gate_margin(double m) {
        margin = has_margin_ ? std::min(margin, m) : m;
        has_margin_ = true;
        if (m < 0.0) verdict = "fail";
    }

    TrialRecord& skip(const std::string& reason) {
        verdict = "skipped";
        skip_reason = reason;
        return *this;
    }

private:
    bool has_margin_ = false;
};

struct ExperimentSummary {
    int pass = 0, fail = 0, skip = 0;
    std::optional<double> min_margin;
    std::optional<double> max_defect;
    long wall_ms = 0;  // measured; serialized as 0 to keep reports byte-stable
};

struct Report {
    ExperimentConfig config;
    std::vector<TrialRecord> trials;
    ExperimentSummary summary;
};

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

inline ordered_json complex_to_json(const Complex& z) {
    return ordered_json::array({z.real(), z.imag()});
}

inline ordered_json blaschke_to_json(const BlaschkeProduct& b) {
    ordered_json j;
    j["c"] = complex_to_json(b.constant());
    ordered_json zeros = ordered_json::array();
    for (const Complex& a : b.zeros()) zeros.push_back(complex_to_json(a));
    j["zeros"] = std::move(zeros);
    return j;
}

inline ordered_json trial_to_json(const TrialRecord& t) {
    ordered_json j;
    j["trial"] = t.trial;
    j["seed"] = t.seed;
    j["verdict"] = t.verdict;
    if (t.verdict == "skipped") j["skip_reason"] = t.skip_reason;
    if (!t.note.empty()) j["note"] = t.note;
    j["margin"] = t.margin;
    ordered_json inputs;
    if (t.theta) inputs["theta"] = blaschke_to_json(*t.theta);
    if (t.u) inputs["u"] = blaschke_to_json(*t.u);
    if (t.v) inputs["v"] = blaschke_to_json(*t.v);
    j["inputs"] = std::move(inputs);
    ordered_json values;
    for (const auto& [name, val] : t.values) values[name] = val;
    j["values"] = std::move(values);
    return j;
}

inline ordered_json report_to_json(const Report& r) {
    ordered_json j;
    j["schema_version"] = "1";
    j["experiment"] = r.config.experiment_id;
    ordered_json cfg;
    cfg["trials"] = r.config.trials;
    cfg["seed"] = r.config.seed;
    cfg["max_degree"] = r.config.max_degree;
    cfg["radius_cap"] = r.config.radius_cap;
    cfg["window"] = r.config.window;
    cfg["grid_size"] = r.config.grid_size;
    ordered_json tols;
    for (const auto& [name, val] : r.config.tolerances) tols[name] = val;
    cfg["tolerances"] = std::move(tols);
    j["config"] = std::move(cfg);
    ordered_json trials = ordered_json::array();
    for (const TrialRecord& t : r.trials) trials.push_back(trial_to_json(t));
    j["trials"] = std::move(trials);
    ordered_json s;
    s["pass"] = r.summary.pass;
    s["fail"] = r.summary.fail;
    s["skip"] = r.summary.skip;
    if (r.summary.min_margin) s["min_margin"] = *r.summary.min_margin; else s["min_margin"] = nullptr;
    if (r.summary.max_defect) s["max_defect"] = *r.summary.max_defect; else s["max_defect"] = nullptr;
    s["wall_ms"] = 0;
    j["summary"] = std::move(s);
    return j;
}

inline std::string report_to_string(const Report& r) { return report_to_json(r).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// generators
// ---------------------------------------------------------------------------

namespace gen {

inline BlaschkeProduct nonconstant(Rng& rng, int min_deg, int max_deg, double cap) {
    return random_blaschke(rng.uniform_int(std::max(1, min_deg), std::max(1, max_deg)), cap, rng);
}

/// All zeros at distance >= sep from every zero in `avoid`; up to 100 draws.
inline std::optional<BlaschkeProduct> separated(Rng& rng, int deg, double cap,
                                                const std::vector<Complex>& avoid, double sep) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        const BlaschkeProduct b = random_blaschke(deg, cap, rng);
        bool ok = true;
        for (const Complex& z : b.zeros())
            for (const Complex& a : avoid)
                if (std::abs(z - a) < sep) ok = false;
        if (ok) return b;
    }
    return std::nullopt;
}

/// Nonempty proper zero subset of theta (needs deg theta >= 2).
inline BlaschkeProduct proper_divisor(Rng& rng, const BlaschkeProduct& theta) {
    const int d = theta.degree();
    const int k = rng.uniform_int(1, d - 1);
    std::vector<int> idx(d);
    for (int i = 0; i < d; ++i) idx[i] = i;
    for (int i = d - 1; i > 0; --i) std::swap(idx[i], idx[rng.uniform_int(0, i)]);
    std::vector<Complex> zeros;
    for (int i = 0; i < k; ++i) zeros.push_back(theta.zeros()[idx[i]]);
    return BlaschkeProduct(std::move(zeros));
}

/// theta with a marked proper nonconstant divisor: theta = v * w, both factors
/// nonconstant, total degree <= max_degree.
struct FactoredTheta {
    BlaschkeProduct theta, v, w;
};

inline FactoredTheta factored_theta(Rng& rng, int max_degree, double cap) {
    const int dv = rng.uniform_int(1, std::max(1, max_degree - 1));
    const int dw = rng.uniform_int(1, std::max(1, max_degree - dv));
    FactoredTheta f;
    f.v = random_blaschke(dv, cap, rng);
    f.w = random_blaschke(dw, cap, rng);
    f.theta = multiply(f.v, f.w);
    return f;
}

inline std::vector<Complex> random_poly(Rng& rng, int max_deg) {
    std::vector<Complex> c(rng.uniform_int(1, max_deg + 1));
    for (auto& x : c) x = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
    return c;
}

} // namespace gen

// ---------------------------------------------------------------------------
// per-trial workspaces
// ---------------------------------------------------------------------------

namespace detail {

struct DualWorkspace {
    int pos = 0, neg = 0;
    CircleGrid grid;
    Frame model;
    Frame dual;
    double eps = 0.0;

    DualWorkspace(const ExperimentConfig& cfg, const BlaschkeProduct& theta, int extra_degree,
                  double r, int maxdeg)
        : pos(cfg.window + theta.degree() + extra_degree),
          neg(pos),
          grid(cfg.grid_size > 0 ? cfg.grid_size
                                 : auto_grid_size(theta.degree() + extra_degree, pos, neg)),
          model(model_basis(theta, grid)),
          dual(dual_frame(theta, pos, neg, grid)),
          eps(eps_tail(pos, r, maxdeg, 1e-9)) {}
};

inline CircleGrid small_grid(const ExperimentConfig& cfg, int total_degree) {
    return CircleGrid(cfg.grid_size > 0 ? cfg.grid_size : auto_grid_size(total_degree, 0, 0));
}

inline double max_radius(std::initializer_list<const BlaschkeProduct*> bs) {
    double r = 0.0;
    for (const auto* b : bs) r = std::max(r, tail_radius(*b));
    return r;
}

inline int total_degree(std::initializer_list<const BlaschkeProduct*> bs) {
    int d = 0;
    for (const auto* b : bs) d += b->degree();
    return d;
}

} // namespace detail

// ---------------------------------------------------------------------------
// experiments E1..E11
// ---------------------------------------------------------------------------

namespace experiments {

/// Shared sampler for the divisor characterization: positive arm u | theta or
/// theta | u, negative arm coprime nonconstant with a nonzero compression.
struct DivisorSample {
    BlaschkeProduct theta, u;
    bool positive = false;
    bool counterexample = false;  // coprime sample that tested as a partial isometry
};

/// Negative arms must witness the non-partial-isometry *margin*, not just the
/// sign: the defect landscape over the small-radius zero configurations dips
/// below the floor on thin sets even far from divisor configurations. Draws
/// in the dead band (a_tol, margin_floor) are rejected; a draw at or below
/// a_tol is returned as a counterexample so the trial fails loudly.
inline std::optional<DivisorSample> sample_divisor_case(const ExperimentConfig& cfg, Rng& rng,
                                                        bool positive) {
    DivisorSample s;
    s.positive = positive;
    if (positive) {
        if (rng.uniform() < 0.5) {
            // u | theta (u possibly theta itself)
            s.theta = gen::nonconstant(rng, 2, cfg.max_degree, cfg.radius_cap);
            if (rng.uniform() < 0.25) {
                s.u = BlaschkeProduct(s.theta.zeros());
            } else {
                s.u = gen::proper_divisor(rng, s.theta);
            }
        } else {
            // theta | u
            s.theta = gen::nonconstant(rng, 1, cfg.max_degree, cfg.radius_cap);
            s.u = multiply(s.theta, gen::nonconstant(rng, 1, 3, cfg.radius_cap));
        }
        return s;
    }
    for (int attempt = 0; attempt < 100; ++attempt) {
        s.theta = gen::nonconstant(rng, 1, cfg.max_degree, cfg.radius_cap);
        const auto u = gen::separated(rng, rng.uniform_int(1, 3), cfg.radius_cap, s.theta.zeros(),
                                      tol(cfg, "min_separation"));
        if (!u) continue;
        s.u = *u;
        const CircleGrid g = detail::small_grid(cfg, detail::total_degree({&s.theta, &s.u}));
        const OperatorMatrix a = tto(symbol_inner(s.u), s.theta, g);
        if (operator_norm(a.m) < tol(cfg, "nonzero_floor")) continue;
        const double defect = pi_defect(a, 1.0).defect;
        if (defect <= tol(cfg, "a_tol")) {
            s.counterexample = true;
            return s;
        }
        if (defect < tol(cfg, "margin_floor")) continue;
        return s;
    }
    return std::nullopt;
}

/// E1: a unimodular symbol is a partial isometry on the model space iff its
/// truncated Hankel block is iff its dual compression is.
inline TrialRecord e1_trial(const ExperimentConfig& cfg, int idx, Rng& rng) {
    TrialRecord rec;
    const int arm = idx % 3;

    BlaschkeProduct theta, u, v;  // symbol conj(u) v
    bool expect_pi = false, expectation_known = true;
    if (arm == 0 || arm == 1) {
        const auto s = sample_divisor_case(cfg, rng, arm == 0);
        if (!s) return rec.skip("separated coprime factor not found");
        theta = s->theta;
        v = s->u;  // analytic symbol u, i.e. conj(1) * u
        expect_pi = arm == 0;
    } else {
        expectation_known = false;
        theta = gen::nonconstant(rng, 1, cfg.max_degree, cfg.radius_cap);
        // reject borderline samples: the equivalence is about exact partial
        // isometries, and defect scales differ across the three operators
        bool found = false;
        for (int attempt = 0; attempt < 100 && !found; ++attempt) {
            u = random_blaschke(rng.uniform_int(0, 3), cfg.radius_cap, rng);
            v = random_blaschke(rng.uniform_int(0, 3), cfg.radius_cap, rng);
            const CircleGrid g = detail::small_grid(cfg, detail::total_degree({&theta, &u, &v}));
            const double defect = pi_defect(tto(symbol_uv(u, v), theta, g), 1.0).defect;
            found = defect <= tol(cfg, "a_tol") || defect >= tol(cfg, "margin_floor");
        }
        if (!found) return rec.skip("borderline partial-isometry defect");
    }
    rec.theta = theta;
    rec.u = u;
    rec.v = v;

    const double r = detail::max_radius({&theta, &u, &v});
    const int maxdeg = detail::total_degree({&theta, &u, &v});
    detail::DualWorkspace ws(cfg, theta, u.degree() + v.degree(), r, maxdeg);
    const SymbolSpec phi = symbol_uv(u, v);
    const CVec ps = phi.sample(ws.grid);

    const double defect_a = pi_defect(compress(ps, ws.model, ws.model, ws.grid, "phi"), 1.0).defect;
    const double defect_b =
        pi_defect(compress(ps, ws.model, ws.dual, ws.grid, "phi"), 1.0).defect;
    const OperatorMatrix d = compress(ps, ws.dual, ws.dual, ws.grid, "phi");
    const double defect_d = interior_pi_defect(d, interior_indices(ws.pos, ws.neg));

    const bool pi_a = defect_a <= tol(cfg, "a_tol");
    const bool pi_b = defect_b <= ws.eps;
    const bool pi_d = defect_d <= ws.eps;

    rec.value("defect_a", defect_a);
    rec.value("defect_b", defect_b);
    rec.value("defect_d_interior", defect_d);
    rec.value("eps_tail", ws.eps);
    rec.value("agree", (pi_a == pi_b && pi_b == pi_d) ? 1.0 : 0.0);

    rec.gate(pi_a == pi_b && pi_b == pi_d);
    if (expectation_known) rec.gate(pi_a == expect_pi);
    if (pi_a) {
        rec.gate_margin(tol(cfg, "a_tol") - defect_a);
        rec.gate_margin(ws.eps - std::max(defect_b, defect_d));
    } else {
        rec.gate_margin(defect_a - tol(cfg, "margin_floor"));
    }
    return rec;
}

/// E2: A_u is a partial isometry iff u | theta or theta | u.
inline TrialRecord e2_trial(const ExperimentConfig& cfg, int idx, Rng& rng) {
    TrialRecord rec;
    const bool positive = idx % 2 == 0;
    const auto s = sample_divisor_case(cfg, rng, positive);
    if (!s) return rec.skip("hypotheses not met after 100 draws");

    rec.theta = s->theta;
    rec.u = s->u;
    const CircleGrid g = detail::small_grid(cfg, detail::total_degree({&s->theta, &s->u}));
    const OperatorMatrix a = tto(symbol_inner(s->u), s->theta, g);
    const PiVerdict verdict = pi_defect(a, tol(cfg, "a_tol"));
    rec.value("defect_a", verdict.defect);
    rec.value("norm_a", operator_norm(a.m));
    if (positive) {
        rec.gate_margin(tol(cfg, "a_tol") - verdict.defect);
    } else {
        rec.gate(!s->counterexample);
        rec.gate_margin(verdict.defect - tol(cfg, "margin_floor"));
    }
    return rec;
}

/// E3: D with symbol conj(u) theta: partial isometry iff u | theta or
/// theta^2 | u - c; corollary for gcd(u, theta) = 1.
inline TrialRecord e3_trial(const ExperimentConfig& cfg, int idx, Rng& rng) {
    TrialRecord rec;
    const int arm = idx % 3;
    BlaschkeProduct theta, u;
    bool counterexample = false;
    if (arm == 0) {
        // u | theta properly (conj(u) theta inner, nonconstant)
        theta = gen::nonconstant(rng, 2, cfg.max_degree, cfg.radius_cap);
        u = gen::proper_divisor(rng, theta);
    } else if (arm == 1) {
        // u = theta^2 w: the A = 0 branch (theta^2 divides u - 0)
        theta = gen::nonconstant(rng, 1, std::max(1, cfg.max_degree / 2), cfg.radius_cap);
        const BlaschkeProduct w = random_blaschke(rng.uniform_int(0, 2), cfg.radius_cap, rng);
        u = multiply(multiply(theta, theta), w);
    } else {
        // coprime, not co-analytic, nonzero compression, with a witnessed
        // defect margin (dead-band draws rejected; a partial isometry here
        // would be a counterexample and fails the trial)
        bool found = false;
        for (int attempt = 0; attempt < 100 && !found; ++attempt) {
            theta = gen::nonconstant(rng, 1, cfg.max_degree, cfg.radius_cap);
            const auto uu = gen::separated(rng, rng.uniform_int(1, 3), cfg.radius_cap,
                                           theta.zeros(), tol(cfg, "min_separation"));
            if (!uu) continue;
            u = *uu;
            const CircleGrid g =
                detail::small_grid(cfg, detail::total_degree({&theta, &u}) + theta.degree());
            const SymbolSpec phi0 = symbol_uv(u, theta);
            if (coanalyticity_check(phi0, g) <= tol(cfg, "coanalytic_tol")) continue;
            const OperatorMatrix a = tto(phi0, theta, g);
            if (operator_norm(a.m) < tol(cfg, "nonzero_floor")) continue;
            const double defect = pi_defect(a, 1.0).defect;
            if (defect <= tol(cfg, "a_tol")) {
                counterexample = true;
                found = true;
            } else if (defect >= tol(cfg, "margin_floor")) {
                found = true;
            }
        }
        if (!found) return rec.skip("defect margin not witnessed in 100 draws");
    }
    rec.theta = theta;
    rec.u = u;

    const SymbolSpec phi = symbol_uv(u, theta);
    const double r = detail::max_radius({&theta, &u});
    const int maxdeg = detail::total_degree({&theta, &u}) + theta.degree();
    detail::DualWorkspace ws(cfg, theta, u.degree() + theta.degree(), r, maxdeg);
    const CVec ps = phi.sample(ws.grid);

    const OperatorMatrix a = compress(ps, ws.model, ws.model, ws.grid, "phi");
    const double norm_a = operator_norm(a.m);
    const double defect_a = pi_defect(a, 1.0).defect;
    const double mass = coanalyticity_check(phi, ws.grid);
    const OperatorMatrix d = compress(ps, ws.dual, ws.dual, ws.grid, "phi");
    const double defect_d = interior_pi_defect(d, interior_indices(ws.pos, ws.neg));

    rec.value("norm_a", norm_a);
    rec.value("defect_a", defect_a);
    rec.value("defect_d_interior", defect_d);
    rec.value("coanalytic_mass", mass);
    rec.value("eps_tail", ws.eps);

    if (arm == 0) {
        // not co-analytic (conj(u) theta is a nonconstant inner function)
        rec.gate(mass > tol(cfg, "coanalytic_tol"));
        rec.gate_margin(tol(cfg, "a_tol") - defect_a);
        rec.gate_margin(ws.eps - defect_d);
    } else if (arm == 1) {
        rec.gate_margin(tol(cfg, "a_tol") - norm_a);
        rec.gate_margin(tol(cfg, "coanalytic_tol") - mass);
        rec.gate_margin(ws.eps - defect_d);
    } else {
        // corollary: gcd = 1 and A nonzero force the dual compression away
        // from the partial isometries
        rec.gate(!counterexample);
        rec.gate_margin(defect_a - tol(cfg, "margin_floor"));
        rec.gate_margin(defect_d - tol(cfg, "margin_floor"));
    }
    return rec;
}

/// E4: with gcd(u, v) = 1 and v | theta, the compression of conj(u) v
/// vanishes only when theta = cv or v is constant.
inline TrialRecord e4_trial(const ExperimentConfig& cfg, int idx, Rng& rng) {
    TrialRecord rec;
    const int shape = idx % 4;  // 0, 1: neither special shape; 2: theta = cv; 3: v constant
    BlaschkeProduct theta, v;
    bool special = true;
    if (shape <= 1) {
        const auto f = gen::factored_theta(rng, cfg.max_degree, cfg.radius_cap);
        theta = f.theta;
        v = f.v;
        special = false;
    } else if (shape == 2) {
        v = gen::nonconstant(rng, 1, cfg.max_degree, cfg.radius_cap);
        theta = multiply(v, BlaschkeProduct(rng.unimodular(), {}));
    } else {
        v = BlaschkeProduct(rng.unimodular(), {});
        theta = gen::nonconstant(rng, 1, cfg.max_degree, cfg.radius_cap);
    }
    const auto u = gen::separated(rng, rng.uniform_int(1, 3), cfg.radius_cap, v.zeros(),
                                  tol(cfg, "min_separation"));
    if (!u) return rec.skip("separated coprime factor not found");
    rec.theta = theta;
    rec.u = *u;
    rec.v = v;

    const CircleGrid g = detail::small_grid(cfg, detail::total_degree({&theta, &*u, &v}));
    const double norm_a = operator_norm(tto(symbol_uv(*u, v), theta, g).m);
    rec.value("norm_a", norm_a);
    rec.value("special_shape", special ? 1.0 : 0.0);

    if (norm_a <= tol(cfg, "zero_tol")) rec.gate(special);
    if (!special) rec.gate_margin(norm_a - tol(cfg, "margin_floor"));
    return rec;
}

/// E5: v | theta non-trivially, gcd(u, v) = 1, symbol not co-analytic: the
/// dual compression is a partial isometry iff u is a unimodular constant.
inline TrialRecord e5_trial(const ExperimentConfig& cfg, int idx, Rng& rng) {
    TrialRecord rec;
    const bool u_constant = idx % 2 == 0;
    gen::FactoredTheta f;
    BlaschkeProduct u;
    bool counterexample = false;
    if (u_constant) {
        f = gen::factored_theta(rng, cfg.max_degree, cfg.radius_cap);
        u = BlaschkeProduct(rng.unimodular(), {});
    } else {
        // witnessed-margin sampling, as in the other negative arms
        bool found = false;
        for (int attempt = 0; attempt < 100 && !found; ++attempt) {
            f = gen::factored_theta(rng, cfg.max_degree, cfg.radius_cap);
            const auto uu = gen::separated(rng, rng.uniform_int(1, 3), cfg.radius_cap,
                                           f.v.zeros(), tol(cfg, "min_separation"));
            if (!uu) continue;
            u = *uu;
            const CircleGrid g =
                detail::small_grid(cfg, detail::total_degree({&f.theta, &u, &f.v}));
            const double defect = pi_defect(tto(symbol_uv(u, f.v), f.theta, g), 1.0).defect;
            if (defect <= tol(cfg, "a_tol")) {
                counterexample = true;
                found = true;
            } else if (defect >= tol(cfg, "margin_floor")) {
                found = true;
            }
        }
        if (!found) return rec.skip("defect margin not witnessed in 100 draws");
    }
    rec.theta = f.theta;
    rec.u = u;
    rec.v = f.v;

    const SymbolSpec phi = symbol_uv(u, f.v);
    const double r = detail::max_radius({&f.theta, &u, &f.v});
    const int maxdeg = detail::total_degree({&f.theta, &u, &f.v});
    detail::DualWorkspace ws(cfg, f.theta, u.degree() + f.v.degree(), r, maxdeg);
    const CVec ps = phi.sample(ws.grid);

    const double mass = coanalyticity_check(phi, ws.grid);
    if (!u_constant && mass <= tol(cfg, "coanalytic_tol")) return rec.skip("symbol co-analytic");

    const double defect_a =
        pi_defect(compress(ps, ws.model, ws.model, ws.grid, "phi"), 1.0).defect;
    const OperatorMatrix d = compress(ps, ws.dual, ws.dual, ws.grid, "phi");
    const double defect_d = interior_pi_defect(d, interior_indices(ws.pos, ws.neg));

    rec.value("defect_a", defect_a);
    rec.value("defect_d_interior", defect_d);
    rec.value("coanalytic_mass", mass);
    rec.value("eps_tail", ws.eps);

    if (u_constant) {
        rec.gate_margin(tol(cfg, "a_tol") - defect_a);
        rec.gate_margin(ws.eps - defect_d);
    } else {
        rec.gate(!counterexample);
        rec.gate_margin(defect_a - tol(cfg, "margin_floor"));
        rec.gate_margin(defect_d - tol(cfg, "margin_floor"));
    }
    return rec;
}

/// E6: the product law inside a Sedlock class, symbols psi / (1 - alpha conj(theta)).
inline TrialRecord e6_trial(const ExperimentConfig& cfg, int idx, Rng& rng) {
    (void)idx;
    TrialRecord rec;
    const BlaschkeProduct theta = gen::nonconstant(rng, 1, cfg.max_degree, cfg.radius_cap);
    const BlaschkeProduct f = random_blaschke(rng.uniform_int(0, 3), cfg.radius_cap, rng);
    const BlaschkeProduct h = random_blaschke(rng.uniform_int(0, 3), cfg.radius_cap, rng);
    const Complex alpha = rng.disk(0.8);
    rec.theta = theta;
    rec.u = f;
    rec.v = h;
    rec.value("alpha_re", alpha.real());
    rec.value("alpha_im", alpha.imag());

    // the quotient 1/(1 - alpha conj(theta)) has Fourier tails like
    // |alpha|^{k/deg theta}; size the grid for that decay, not the zeros'
    const double rho = std::max(cfg.radius_cap, std::pow(0.8, 1.0 / theta.degree()));
    int gsize = 256;
    while (std::pow(rho, gsize) > 1e-13) gsize <<= 1;
    const CircleGrid g(cfg.grid_size > 0 ? cfg.grid_size : gsize);
    const CMat a1 = tto(alpha_symbol(f, alpha, theta), theta, g).m;
    const CMat a2 = tto(alpha_symbol(h, alpha, theta), theta, g).m;
    const CMat a12 = tto(alpha_symbol(multiply(f, h), alpha, theta), theta, g).m;
    const double residual = operator_norm(a1 * a2 - a12);
    rec.value("residual", residual);
    rec.gate_margin(tol(cfg, "sedlock_tol") - residual);
    return rec;
}

/// E7: the initial space of a nonzero partially isometric compression matches
/// the divisibility prediction.
inline TrialRecord e7_trial(const ExperimentConfig& cfg, int idx, Rng& rng) {
    TrialRecord rec;
    const int arm = idx % 3;
    BlaschkeProduct theta, u, v;
    if (arm == 0) {
        // co-analytic inner symbol: conj(u) with u | theta properly
        theta = gen::nonconstant(rng, 2, cfg.max_degree, cfg.radius_cap);
        u = gen::proper_divisor(rng, theta);
    } else if (arm == 1) {
        const auto f = gen::factored_theta(rng, cfg.max_degree, cfg.radius_cap);
        theta = f.theta;
        u = BlaschkeProduct(rng.unimodular(), {});
        v = f.v;
    } else {
        // common inner factor: u = w, v = w v2 with v2 | theta properly
        const auto f = gen::factored_theta(rng, cfg.max_degree, cfg.radius_cap);
        theta = f.theta;
        const BlaschkeProduct w = gen::nonconstant(rng, 1, 2, cfg.radius_cap);
        u = w;
        v = multiply(w, f.v);
    }
    rec.theta = theta;
    rec.u = u;
    rec.v = v;

    const CircleGrid g(cfg.grid_size > 0
                           ? cfg.grid_size
                           : auto_grid_size(detail::total_degree({&theta, &u, &v}) + theta.degree(),
                                            cfg.window + 8, 1));
    const OperatorMatrix a = tto(symbol_uv(u, v), theta, g);
    const PiVerdict pv = pi_defect(a, tol(cfg, "a_tol"));
    rec.value("defect_a", pv.defect);
    rec.gate(pv.is_pi);
    rec.gate(operator_norm(a.m) >= tol(cfg, "nonzero_floor"));
    if (rec.verdict == "fail") return rec;

    const Subspace computed = initial_space(a, tol(cfg, "a_tol"));
    const Subspace predicted =
        predicted_initial_space(u, v, theta, g, cfg.window, tol(cfg, "rank_cutoff"));
    const PrincipalAngles angles = principal_angles(computed, predicted);
    rec.value("dim_computed", computed.dim());
    rec.value("dim_predicted", predicted.dim());
    rec.value("max_angle", angles.largest());
    rec.gate(computed.dim() == predicted.dim());
    rec.gate_margin(tol(cfg, "angle_exact") - angles.largest());
    return rec;
}

/// E8: extremal space of the dual compression for an inner symbol dividing
/// theta (and its conjugate): equality with the predicted two-block span.
inline TrialRecord e8_trial(const ExperimentConfig& cfg, int idx, Rng& rng) {
    TrialRecord rec;
    const bool conjugate_arm = idx % 2 == 1;
    const auto f = gen::factored_theta(rng, cfg.max_degree, cfg.radius_cap);
    rec.theta = f.theta;

    BlaschkeProduct plus_factor, minus_factor;  // E+ = theta u H^2, E- = conj(z v H^2)
    SymbolSpec phi = symbol_const(Complex(1.0, 0.0));
    if (conjugate_arm) {
        plus_factor = f.v;
        minus_factor = BlaschkeProduct{};
        phi = symbol_uv(f.v, BlaschkeProduct{});
        rec.u = f.v;
    } else {
        plus_factor = BlaschkeProduct{};
        minus_factor = f.v;
        phi = symbol_inner(f.v);
        rec.v = f.v;
    }

    const double r = detail::max_radius({&f.theta, &f.v});
    const int maxdeg = detail::total_degree({&f.theta, &f.v});
    detail::DualWorkspace ws(cfg, f.theta, f.v.degree(), r, maxdeg);

    const OperatorMatrix d = compress(phi, ws.dual, ws.dual, ws.grid);
    const Subspace computed = extremal_space(d, tol(cfg, "extremal_tol"));
    const Subspace predicted = direct_sum(predicted_extremal_plus(plus_factor, ws.dual),
                                          predicted_extremal_minus(minus_factor, ws.dual));
    const PrincipalAngles angles = principal_angles(computed, predicted);

    rec.value("dim_computed", computed.dim());
    rec.value("dim_predicted", predicted.dim());
    rec.value("dropped_slots", plus_factor.degree() + minus_factor.degree());
    rec.value("max_angle", angles.largest());
    rec.value("eps_tail", ws.eps);
    rec.gate(computed.dim() <= predicted.dim());
    rec.gate_margin(tol(cfg, "angle_window") - angles.largest());
    return rec;
}

/// E9: equality of the extremal decomposition iff u or v is a unimodular
/// constant; the strict arm certifies an extremal vector outside the guarded
/// span.
inline TrialRecord e9_trial(const ExperimentConfig& cfg, int idx, Rng& rng) {
    TrialRecord rec;
    const bool strict_arm = idx % 2 == 1;
    gen::FactoredTheta f;
    if (strict_arm) {
        // keep the cofactor degree <= 2 so deg u can exceed it within the cap
        const int dw = rng.uniform_int(1, std::min(2, std::max(1, cfg.max_degree - 1)));
        const int dv = rng.uniform_int(1, std::max(1, cfg.max_degree - dw));
        f.v = random_blaschke(dv, cfg.radius_cap, rng);
        f.w = random_blaschke(dw, cfg.radius_cap, rng);
        f.theta = multiply(f.v, f.w);
    } else {
        f = gen::factored_theta(rng, cfg.max_degree, cfg.radius_cap);
    }
    rec.theta = f.theta;

    if (!strict_arm) {
        // u or v a unimodular constant: the decomposition is exact
        const bool const_u = rng.uniform() < 0.5;
        const BlaschkeProduct c(rng.unimodular(), {});
        const BlaschkeProduct u = const_u ? c : f.v;
        const BlaschkeProduct v = const_u ? f.v : c;
        rec.u = u;
        rec.v = v;
        const double r = detail::max_radius({&f.theta, &f.v});
        const int maxdeg = detail::total_degree({&f.theta, &f.v});
        detail::DualWorkspace ws(cfg, f.theta, f.v.degree(), r, maxdeg);
        const OperatorMatrix d = compress(symbol_uv(u, v), ws.dual, ws.dual, ws.grid);
        const Subspace computed = extremal_space(d, tol(cfg, "extremal_tol"));
        const Subspace predicted = direct_sum(predicted_extremal_plus(u, ws.dual),
                                              predicted_extremal_minus(v, ws.dual));
        const PrincipalAngles angles = principal_angles(computed, predicted);
        rec.value("dim_computed", computed.dim());
        rec.value("dim_predicted", predicted.dim());
        rec.value("max_angle", angles.largest());
        rec.gate_margin(tol(cfg, "angle_window") - angles.largest());
        return rec;
    }

    // both factors nonconstant: exhibit an extremal vector outside the span.
    // The extremal space is ker of the model-space block, of codimension
    // rank <= deg theta in the window, while the guarded span has
    // codimension deg u + deg v; the containment is strict (and an outside
    // vector exists) exactly on the family deg u + deg v > deg theta.
    const int du = f.w.degree() + rng.uniform_int(1, std::max(1, std::min(2, 3 - f.w.degree())));
    const auto u = gen::separated(rng, du, cfg.radius_cap, f.v.zeros(),
                                  tol(cfg, "min_separation"));
    if (!u) return rec.skip("separated coprime factor not found");
    rec.u = *u;
    rec.v = f.v;

    const SymbolSpec phi = symbol_uv(*u, f.v);
    const double r = detail::max_radius({&f.theta, &*u, &f.v});
    const int maxdeg = detail::total_degree({&f.theta, &*u, &f.v});
    detail::DualWorkspace ws(cfg, f.theta, u->degree() + f.v.degree(), r, maxdeg);
    const CVec ps = phi.sample(ws.grid);

    // extremal vectors in the window are exactly the null space of the
    // model-space block of multiplication by phi
    const OperatorMatrix c_section = compress(ps, ws.dual, ws.model, ws.grid, "phi");
    const CMat null_basis = nullspace(c_section.m, tol(cfg, "rank_cutoff"));
    if (null_basis.cols() == 0) return rec.skip("empty extremal window");

    const Subspace guarded = direct_sum(predicted_extremal_plus(*u, ws.dual),
                                        predicted_extremal_minus(f.v, ws.dual));
    const CMat outside = null_basis - guarded.basis * (guarded.basis.adjoint() * null_basis);
    Eigen::BDCSVD<CMat> svd(outside, Eigen::ComputeThinV);
    const double residual = svd.singularValues()[0];
    const CVec h = null_basis * svd.matrixV().col(0);

    // certificate: h is a unit window vector and phi h has no model-space part
    const CVec h_samples = synthesize(ws.dual, h);
    const double certificate = analyze(ws.model, ps.cwiseProduct(h_samples)).norm();

    rec.value("residual_outside", residual);
    rec.value("certificate", certificate);
    rec.value("norm_h", h.norm());
    rec.gate(std::abs(h.norm() - 1.0) < 1e-10);
    rec.gate_margin(tol(cfg, "a_tol") - certificate);
    rec.gate_margin(residual - tol(cfg, "strict_residual"));
    return rec;
}

/// E10: the block identities, the Hankel factorization of the truncated
/// Hankel block, conjugation symmetry, and block assembly.
inline TrialRecord e10_trial(const ExperimentConfig& cfg, int idx, Rng& rng) {
    (void)idx;
    TrialRecord rec;
    const BlaschkeProduct theta = gen::nonconstant(rng, 1, cfg.max_degree, cfg.radius_cap);
    const BlaschkeProduct u1 = random_blaschke(rng.uniform_int(0, 2), cfg.radius_cap, rng);
    const BlaschkeProduct v1 = random_blaschke(rng.uniform_int(0, 2), cfg.radius_cap, rng);
    const BlaschkeProduct u2 = random_blaschke(rng.uniform_int(0, 2), cfg.radius_cap, rng);
    const BlaschkeProduct v2 = random_blaschke(rng.uniform_int(0, 2), cfg.radius_cap, rng);
    rec.theta = theta;
    rec.u = multiply(u1, v1);
    rec.v = multiply(u2, v2);

    const SymbolSpec p = symbol_uv(u1, v1), q = symbol_uv(u2, v2);
    const double r = detail::max_radius({&theta, &u1, &v1, &u2, &v2});
    const int maxdeg = detail::total_degree({&theta, &u1, &v1, &u2, &v2});
    const int pos = cfg.window + maxdeg;
    const CircleGrid g(cfg.grid_size > 0 ? cfg.grid_size : auto_grid_size(maxdeg, pos, pos));
    const double eps = eps_tail(pos, r, maxdeg, tol(cfg, "eps_floor"));

    const IdentityResiduals res = multiplicative_identity_residuals(p, q, theta, pos, pos, g);
    const double res41 = hankel_factorization_residual(p, theta, pos, pos, g);

    const Frame k = model_basis(theta, g);
    const Frame w = dual_frame(theta, pos, pos, g);
    const Conjugation ck = conjugation_on(k, theta, g);
    const Conjugation cw = conjugation_on(w, theta, g);
    const CVec ps_samples = p.sample(g);
    const double csym_a = c_symmetry_residual(compress(ps_samples, k, k, g, "p").m, ck);
    const double csym_d = c_symmetry_residual(compress(ps_samples, w, w, g, "p").m, cw);

    const OperatorMatrix blocks = block_assemble(p, theta, pos, pos, g);
    const Frame full = concat_frames(k, w);
    const double block_res = operator_norm(blocks.m - compress(ps_samples, full, full, g, "p").m);

    rec.value("residual_21", res.a);
    rec.value("residual_22", res.b);
    rec.value("residual_23_interior", res.d_interior);
    rec.value("residual_hankel_factorization", res41);
    rec.value("csym_a", csym_a);
    rec.value("csym_d", csym_d);
    rec.value("block_residual", block_res);
    rec.value("eps_tail", eps);

    rec.gate_margin(eps - res.a);
    rec.gate_margin(eps - res.b);
    rec.gate_margin(eps - res.d_interior);
    rec.gate_margin(eps - res41);
    rec.gate_margin(tol(cfg, "csym_tol") - csym_a);
    rec.gate_margin(tol(cfg, "csym_tol") - csym_d);
    rec.gate_margin(tol(cfg, "block_tol") - block_res);
    return rec;
}

/// E11: basic structure: dual section norms grow to the sup norm, zero-class
/// symbols compress to zero, constant symbols kill the Hankel block.
inline TrialRecord e11_trial(const ExperimentConfig& cfg, int idx, Rng& rng) {
    (void)idx;
    TrialRecord rec;
    const BlaschkeProduct theta = gen::nonconstant(rng, 1, cfg.max_degree, cfg.radius_cap);
    const BlaschkeProduct u = random_blaschke(rng.uniform_int(1, 3), cfg.radius_cap, rng);
    const BlaschkeProduct v = random_blaschke(rng.uniform_int(1, 3), cfg.radius_cap, rng);
    rec.theta = theta;
    rec.u = u;
    rec.v = v;
    const SymbolSpec phi = symbol_uv(u, v);

    const std::vector<int> windows = {32, 64, 104};
    const CircleGrid g(cfg.grid_size > 0
                           ? cfg.grid_size
                           : auto_grid_size(detail::total_degree({&theta, &u, &v}),
                                            windows.back(), windows.back()));
    const CVec ps = phi.sample(g);
    const double sup_phi = ps.cwiseAbs().maxCoeff();
    rec.value("sup_phi", sup_phi);

    double prev = 0.0, norm_default = 0.0;
    for (size_t i = 0; i < windows.size(); ++i) {
        const double nrm = operator_norm(dtto(phi, theta, windows[i], windows[i], g).m);
        rec.value("norm_w" + std::to_string(windows[i]), nrm);
        rec.gate(nrm >= prev - 1e-12);
        prev = nrm;
        norm_default = nrm;
    }
    rec.gate_margin(tol(cfg, "norm_tol") - std::abs(norm_default - sup_phi));

    const SymbolSpec zs = symbol_zero_class(theta, gen::random_poly(rng, 3), gen::random_poly(rng, 3));
    const double zero_norm = operator_norm(tto(zs, theta, g).m);
    rec.value("zero_symbol_norm", zero_norm);
    rec.gate_margin(tol(cfg, "zero_tol") - zero_norm);

    const double const_b =
        operator_norm(tho(symbol_const(rng.unimodular()), theta, 32, 32, g).m);
    rec.value("const_b_norm", const_b);
    rec.gate_margin(tol(cfg, "const_b_tol") - const_b);

    rec.value("b_norm_nonconstant", operator_norm(tho(phi, theta, 32, 32, g).m));
    return rec;
}

} // namespace experiments

// ---------------------------------------------------------------------------
// registry and runner
// ---------------------------------------------------------------------------

struct Experiment {
    std::string id;
    std::string description;
    int default_trials = 100;
    std::function<TrialRecord(const ExperimentConfig&, int, Rng&)> trial_fn;
};

inline const std::vector<Experiment>& experiment_registry() {
    using namespace experiments;
    static const std::vector<Experiment> registry = {
        {"E1", "partial-isometry equivalence of the model, Hankel and dual compressions", 102,
         e1_trial},
        {"E2", "inner-symbol compressions: partial isometry iff divisor order", 100, e2_trial},
        {"E3", "conj(u)*theta symbols: divisor or theta^2-shift characterization", 102, e3_trial},
        {"E4", "vanishing compressions occur only for the two degenerate shapes", 100, e4_trial},
        {"E5", "conj(u)v with v | theta: partial isometry iff u constant", 100, e5_trial},
        {"E6", "product law for symbols psi/(1 - alpha conj(theta))", 100, e6_trial},
        {"E7", "initial spaces match the divisibility prediction", 102, e7_trial},
        {"E8", "extremal decomposition for inner divisors and their conjugates", 50, e8_trial},
        {"E9", "extremal equality iff a constant factor; strict arm certificate", 100, e9_trial},
        {"E10", "block identities, Hankel factorization, conjugation symmetry, assembly", 100,
         e10_trial},
        {"E11", "norm growth to the sup norm; zero-class and constant symbols", 100, e11_trial},
    };
    return registry;
}

inline const Experiment& find_experiment(const std::string& id) {
    for (const Experiment& e : experiment_registry())
        if (e.id == id) return e;
    throw std::invalid_argument("unknown experiment id: " + id);
}

inline int resolve_threads() {
    const char* env = std::getenv("MSLAB_THREADS");
    if (env == nullptr) return std::max(1u, std::thread::hardware_concurrency());
    const long v = std::strtol(env, nullptr, 10);
    return v <= 0 ? 1 : static_cast<int>(v);
}

/// Executes all trials of the configured experiment. Deterministic per
/// (experiment, config, seed): each trial draws from its own derived stream,
/// so the thread count never changes the report.
inline Report run_experiment(ExperimentConfig cfg) {
    const Experiment& exp = find_experiment(cfg.experiment_id);
    if (cfg.trials < 1) throw std::invalid_argument("run_experiment: trials must be >= 1");
    if (cfg.grid_size != 0 && (cfg.grid_size < 64 || !is_power_of_two(cfg.grid_size)))
        throw std::invalid_argument("run_experiment: grid_size must be 0 or a power of two >= 64");
    for (const auto& [name, val] : cfg.tolerances)
        if (default_tolerances().find(name) == default_tolerances().end())
            throw std::invalid_argument("run_experiment: unknown tolerance " + name);

    Report report;
    report.config = cfg;
    report.trials.resize(cfg.trials);

    const auto t0 = std::chrono::steady_clock::now();
    const auto run_one = [&](int i) {
        const std::uint64_t trial_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(i));
        Rng rng(trial_seed);
        TrialRecord rec;
        try {
            rec = exp.trial_fn(cfg, i, rng);
        } catch (const std::exception& e) {
            rec.verdict = "fail";
            rec.value("exception", 1.0);
            rec.margin = -1.0;
            rec.note = e.what();
        }
        rec.trial = i;
        rec.seed = trial_seed;
        report.trials[i] = std::move(rec);
    };

    const int threads = std::min(resolve_threads(), cfg.trials);
    if (threads <= 1) {
        for (int i = 0; i < cfg.trials; ++i) run_one(i);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (int i = next.fetch_add(1); i < cfg.trials; i = next.fetch_add(1)) run_one(i);
            });
        for (auto& th : pool) th.join();
    }
    const auto t1 = std::chrono::steady_clock::now();
    report.summary.wall_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();

    for (const TrialRecord& t : report.trials) {
        if (t.verdict == "pass") ++report.summary.pass;
        else if (t.verdict == "fail") ++report.summary.fail;
        else ++report.summary.skip;
        if (t.verdict != "skipped") {
            if (!report.summary.min_margin || t.margin < *report.summary.min_margin)
                report.summary.min_margin = t.margin;
            for (const auto& [name, val] : t.values)
                if (name.find("defect") != std::string::npos)
                    if (!report.summary.max_defect || val > *report.summary.max_defect)
                        report.summary.max_defect = val;
        }
    }
    return report;
}

} // namespace mslab
