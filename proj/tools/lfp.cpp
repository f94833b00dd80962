// lfp: lattice-form probability toolkit command line.
//
// Commands: min, spectral-bounds, theorem3, wishart-table, chol-bounds,
// snr-table, kappa, if-verify, mc-verify. Exit codes: 0 success,
// 2 validation error, 3 non-convergence / consistency alarm.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "latmin/chol_bounds.hpp"
#include "latmin/forms.hpp"
#include "latmin/integer_forcing.hpp"
#include "latmin/lattice.hpp"
#include "latmin/quadrature.hpp"
#include "latmin/rng.hpp"
#include "latmin/sampling.hpp"
#include "latmin/spectral.hpp"

using json = nlohmann::ordered_json;
using namespace latmin;

namespace {

struct OutputOpts {
    bool as_json = false;
    bool as_csv = false;
    std::string out_path;
    int threads = 1;  // accepted for interface compatibility; execution is single-threaded
};

void add_output_flags(CLI::App* cmd, OutputOpts& opts) {
    cmd->add_flag("--json", opts.as_json, "machine-readable JSON report (17 significant digits)");
    cmd->add_flag("--csv", opts.as_csv, "CSV report");
    cmd->add_option("--out", opts.out_path, "also write the report to this file");
    int env_threads = 1;
    if (const char* e = std::getenv("LFP_THREADS")) env_threads = std::max(1, std::atoi(e));
    opts.threads = env_threads;
    cmd->add_option("--threads", opts.threads, "worker cap (currently single-threaded)");
}

std::string human(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

void render_human(const json& j, std::ostream& os, int indent = 0) {
    const std::string pad(indent, ' ');
    for (auto it = j.begin(); it != j.end(); ++it) {
        const json& v = it.value();
        if (v.is_array() && !v.empty() && v.front().is_object()) {
            os << pad << it.key() << ":\n";
            // column table
            std::vector<std::string> cols;
            for (auto ct = v.front().begin(); ct != v.front().end(); ++ct) cols.push_back(ct.key());
            os << pad << " ";
            for (const auto& c : cols) os << " " << c;
            os << "\n";
            for (const auto& row : v) {
                os << pad << " ";
                for (const auto& c : cols) {
                    const json& cell = row.contains(c) ? row.at(c) : json();
                    if (cell.is_number_float())
                        os << " " << human(cell.get<double>());
                    else if (cell.is_string())
                        os << " " << cell.get<std::string>();
                    else if (cell.is_null())
                        os << " -";
                    else
                        os << " " << cell.dump();
                }
                os << "\n";
            }
        } else if (v.is_object()) {
            os << pad << it.key() << ":\n";
            render_human(v, os, indent + 2);
        } else if (v.is_number_float()) {
            os << pad << it.key() << " = " << human(v.get<double>()) << "\n";
        } else if (v.is_string()) {
            os << pad << it.key() << " = " << v.get<std::string>() << "\n";
        } else {
            os << pad << it.key() << " = " << v.dump() << "\n";
        }
    }
}

void render_csv(const json& j, std::ostream& os, const std::string& prefix = "") {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const json& v = it.value();
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (v.is_array() && !v.empty() && v.front().is_object()) {
            std::vector<std::string> cols;
            for (auto ct = v.front().begin(); ct != v.front().end(); ++ct) cols.push_back(ct.key());
            os << key;
            for (const auto& c : cols) os << "," << c;
            os << "\n";
            for (const auto& row : v) {
                os << key;
                for (const auto& c : cols) {
                    os << ",";
                    const json& cell = row.contains(c) ? row.at(c) : json();
                    if (cell.is_number_float())
                        os << format_full(cell.get<double>());
                    else if (cell.is_string())
                        os << cell.get<std::string>();
                    else if (!cell.is_null())
                        os << cell.dump();
                }
                os << "\n";
            }
        } else if (v.is_object()) {
            render_csv(v, os, key);
        } else if (v.is_number_float()) {
            os << key << "," << format_full(v.get<double>()) << "\n";
        } else if (v.is_string()) {
            os << key << "," << v.get<std::string>() << "\n";
        } else {
            os << key << "," << v.dump() << "\n";
        }
    }
}

void emit(const json& report, const OutputOpts& opts) {
    std::ostringstream body;
    if (opts.as_json)
        body << report.dump(2) << "\n";
    else if (opts.as_csv)
        render_csv(report, body);
    else
        render_human(report, body);
    std::cout << body.str();
    if (!opts.out_path.empty()) {
        std::ofstream f(opts.out_path);
        if (!f) throw std::invalid_argument("cannot open output file: " + opts.out_path);
        f << body.str();
    }
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    if (out.empty()) throw std::invalid_argument("empty numeric list: " + csv);
    return out;
}

std::string witness_string(const std::vector<long long>& x) {
    std::string s = "(";
    for (size_t i = 0; i < x.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(x[i]);
    }
    return s + ")";
}

ChannelParams channel_from(double c0_value, const std::string& units, double snr, int m, int n) {
    ChannelParams p;
    p.m = m;
    p.n = n;
    p.snr = snr;
    if (units == "bits")
        p.capacity = c0_value * std::log(2.0);
    else if (units == "paper" || units == "nats")
        p.capacity = c0_value;
    else
        throw std::invalid_argument("c0-units must be one of paper|bits|nats");
    p.validate();
    return p;
}

// ---------------------------------------------------------------- commands

int cmd_min(const std::string& matrix_path, const OutputOpts& opts) {
    SymmetricForm q(read_matrix_file(matrix_path));
    LatticeMinimumResult r = lattice_minimum(q);
    json rep;
    rep["command"] = "min";
    rep["matrix"] = matrix_path;
    rep["value"] = r.value;
    rep["argmin"] = witness_string(r.argmin);
    rep["nodes_visited"] = r.nodes_visited;
    rep["hermite_upper_bound"] = hermite_upper_bound(q);
    emit(rep, opts);
    return 0;
}

int cmd_spectral_bounds(double delta, const std::string& axes_csv, double eps,
                        std::uint64_t mc_n, std::uint64_t seed, const OutputOpts& opts) {
    std::vector<double> axes = parse_list(axes_csv);
    const int d = static_cast<int>(axes.size());
    if (d < 2) throw std::invalid_argument("spectral-bounds: need at least 2 axes");
    if (!(delta > 0.0)) throw std::invalid_argument("spectral-bounds: delta must be positive");

    json rep;
    rep["command"] = "spectral-bounds";
    rep["delta"] = delta;
    rep["axes"] = axes_csv;
    rep["seed"] = seed;

    BoundPair km = km_bounds(d, delta);
    json jkm;
    if (km.lower_defined) jkm["lower"] = km.lower;
    jkm["lower_label"] = km.lower_defined ? km.lower_label : "unavailable for d = 2";
    jkm["upper"] = km.upper;
    jkm["upper_label"] = km.upper_label;
    rep["invariant_measure_bounds"] = jkm;

    std::vector<double> scaled(axes);
    for (double& a : scaled) a *= std::sqrt(delta);
    Ellipsoid e(scaled);
    SphericalMeasure cap = cap_measure_recursive(e);
    json jcap;
    jcap["value"] = cap.value;
    jcap["method"] = cap.method;
    jcap["error_estimate"] = cap.error_estimate;
    rep["cap_measure"] = jcap;
    if (!cap.converged) throw std::runtime_error("cap measure recursion did not converge");

    {
        std::vector<double> srt = e.sorted_axes();
        if (srt.front() < 1.0 && srt.back() > 1.0) {
            CapMeasureBounds cb = cap_measure_bounds(e);
            json jb;
            jb["tight_lower"] = cb.tight.lower;
            jb["tight_upper"] = cb.tight.upper;
            if (cb.crude.lower_defined) jb["crude_lower"] = cb.crude.lower;
            jb["crude_upper"] = cb.crude.upper;
            jb["envelope_lower"] = cb.envelope.lower;
            jb["envelope_upper"] = cb.envelope.upper;
            rep["cap_measure_bounds"] = jb;
        }
    }

    SpectralEventBounds t2 = theorem2_bounds(axes, delta, mc_n, seed);
    json jt2;
    jt2["lower"] = t2.bounds.lower;
    jt2["lower_label"] = t2.bounds.lower_label;
    jt2["lower_deterministic"] = t2.lower_deterministic;
    jt2["lower_mc"] = t2.lower_mc;
    jt2["lower_mc_error"] = t2.lower_mc_error;
    jt2["upper"] = t2.bounds.upper;
    jt2["upper_label"] = t2.bounds.upper_label;
    jt2["primitive_terms"] = t2.primitive_terms;
    rep["rotation_event_bounds"] = jt2;

    if (eps > 0.0) {
        Theorem3Result t3 = theorem3_bounds(d, eps, delta, mc_n, seed);
        json jt3;
        jt3["exact_zero"] = t3.exact_zero;
        jt3["lower"] = t3.lower;
        jt3["upper"] = t3.upper;
        rep["log_uniform_event_bounds"] = jt3;
    }
    emit(rep, opts);
    return 0;
}

int cmd_theorem3(int d, double eps, double delta, std::uint64_t mc_n, std::uint64_t seed,
                 const OutputOpts& opts) {
    Theorem3Result r = theorem3_bounds(d, eps, delta, mc_n, seed);
    json rep;
    rep["command"] = "theorem3";
    rep["d"] = d;
    rep["eps"] = eps;
    rep["delta"] = delta;
    rep["seed"] = seed;
    rep["exact_zero"] = r.exact_zero;
    if (!r.exact_zero) {
        rep["lower"] = r.lower;
        rep["upper"] = r.upper;
        rep["s_d"] = r.s_d;
        rep["s_d_error"] = r.s_d_error;
        rep["S_d"] = r.S_d;
        rep["S_d_error"] = r.S_d_error;
        rep["c_d"] = r.c_d;
        rep["C_d"] = r.C_d;
        rep["s_d_envelope_lower"] = r.s_d_envelope_lower;
        rep["S_d_envelope_upper"] = r.S_d_envelope_upper;
    } else {
        rep["lower"] = 0.0;
        rep["upper"] = 0.0;
        rep["note"] = "delta <= eps^{2(d-1)}: event probability is exactly zero";
    }
    emit(rep, opts);
    return 0;
}

int cmd_wishart_table(const std::string& deltas_csv, const OutputOpts& opts) {
    std::vector<double> deltas = parse_list(deltas_csv);
    // reference values with half-ulp tolerances of their printed precision
    struct Ref {
        double delta, j1, j2, tol1, tol2;
    };
    const std::vector<Ref> refs = {
        {0.2, 0.095, 0.41, 5e-4, 5e-3},
        {0.1, 0.049, 0.28, 5e-4, 5e-3},
        {0.01, 4.99e-3, 8.42e-2, 5e-6, 5e-5},
        {0.001, 5.0e-4, 2.6e-2, 5e-6, 5e-4},
    };
    json rows = json::array();
    bool all_pass = true;
    for (double delta : deltas) {
        BoundPair b = wishart_J1_J2(delta);
        json row;
        row["delta"] = delta;
        row["J1"] = b.lower;
        row["J2"] = b.upper;
        const Ref* ref = nullptr;
        for (const Ref& r : refs)
            if (std::fabs(r.delta - delta) < 1e-12 * std::max(1.0, r.delta)) ref = &r;
        if (ref) {
            row["J1_ref"] = ref->j1;
            row["J2_ref"] = ref->j2;
            const bool ok =
                std::fabs(b.lower - ref->j1) <= ref->tol1 && std::fabs(b.upper - ref->j2) <= ref->tol2;
            row["check"] = ok ? "PASS" : "FAIL";
            all_pass = all_pass && ok;
        } else {
            row["check"] = "-";
        }
        rows.push_back(row);
    }
    json rep;
    rep["command"] = "wishart-table";
    rep["table"] = rows;
    emit(rep, opts);
    return all_pass ? 0 : 3;
}

DensityOnForms density_from_spec(const std::string& spec) {
    std::string text = spec;
    if (!spec.empty() && spec.front() != '{') {
        std::ifstream f(spec);
        if (!f) throw std::invalid_argument("cannot open density spec file: " + spec);
        std::stringstream ss;
        ss << f.rdbuf();
        text = ss.str();
    }
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("malformed density spec JSON: ") + e.what());
    }
    const std::string family = j.value("family", "");
    if (family == "wishart") {
        const int wd = j.value("d", 2);
        const int wn = j.value("n", 2);
        Mat v = Mat::identity(wd);
        if (j.contains("v")) v = read_matrix(j["v"].dump());
        WishartParams wp{wd, wn, SymmetricForm(v)};
        return wishart_density(wp);
    }
    if (family == "gaussian-bump") {
        Mat c(2, 2);
        c(0, 0) = 2.0;
        c(1, 1) = 2.0;
        c(0, 1) = c(1, 0) = 0.2;
        if (j.contains("center")) c = read_matrix(j["center"].dump());
        if (c.rows() != 2) throw std::invalid_argument("gaussian-bump: center must be 2x2");
        const double w = j.value("width", 0.5);
        if (!(w > 0.0)) throw std::invalid_argument("gaussian-bump: width must be positive");
        auto bump = [c, w](double q11, double q12, double q22) {
            const double r2 = (q11 - c(0, 0)) * (q11 - c(0, 0)) +
                              2.0 * (q12 - c(0, 1)) * (q12 - c(0, 1)) +
                              (q22 - c(1, 1)) * (q22 - c(1, 1));
            return std::exp(-0.5 * r2 / (w * w));
        };
        // normalize over the positive definite cone {q11>0, q22>0, q12^2 < q11 q22}
        const double inf = std::numeric_limits<double>::infinity();
        auto outer = [&](double q11) {
            auto mid = [&](double q22) {
                const double s = std::sqrt(q11 * q22);
                auto inner = [&](double q12) { return bump(q11, q12, q22); };
                return integrate_1d(inner, -s, s, 1e-7).value;
            };
            return integrate_1d(mid, 0.0, inf, 1e-7).value;
        };
        IntegrationResult z = integrate_1d(outer, 0.0, inf, 1e-6);
        if (!z.converged || !(z.value > 0.0))
            throw std::runtime_error("gaussian-bump: normalization quadrature failed");
        const double norm = z.value;
        DensityOnForms out;
        out.dim = 2;
        out.determinant_one = false;
        out.evaluate = [bump, norm](const SymmetricForm& q) {
            if (q(0, 0) <= 0.0 || q(1, 1) <= 0.0 || q(0, 1) * q(0, 1) >= q(0, 0) * q(1, 1))
                return 0.0;
            return bump(q(0, 0), q(0, 1), q(1, 1)) / norm;
        };
        return out;
    }
    throw std::invalid_argument("density spec: family must be wishart or gaussian-bump");
}

int cmd_chol_bounds(const std::string& density_spec, double delta, const OutputOpts& opts) {
    DensityOnForms f = density_from_spec(density_spec);
    BoundPair b = theorem4_bounds(f, delta);
    json rep;
    rep["command"] = "chol-bounds";
    rep["delta"] = delta;
    if (b.lower_defined) {
        rep["lower"] = b.lower;
        rep["lower_label"] = b.lower_label;
    } else {
        rep["lower_label"] = b.lower_label;
    }
    rep["upper"] = b.upper;
    rep["upper_label"] = b.upper_label;
    emit(rep, opts);
    return 0;
}

int cmd_snr_table(double c0_value, const std::string& units, double snr,
                  const std::string& s_csv, int m, int n, const OutputOpts& opts) {
    ChannelParams p = channel_from(c0_value, units, snr, m, n);
    std::vector<double> s_list = parse_list(s_csv);
    std::vector<SnrTableRow> table = snr_table(s_list, p);

    // printed reference values for the canonical parameter point
    const bool canonical = p.d() == 2 && std::fabs(p.capacity - 30.0) < 1e-9 &&
                           std::fabs(p.snr - 5.0) < 1e-9;
    struct Ref {
        double s, bound, delta;  // delta < 0: not printed unambiguously
    };
    const std::vector<Ref> refs = {
        {0.3125, 1.0, 3.06e-7}, {1.0, 0.672723, 9.79e-7}, {1.5, 0.560289, -1.0},
        {2.0, 0.489859, -1.0},  {5.0, 0.314961, -1.0},    {10.0, 0.223899, 9.79e-6},
        {30.0, 0.12972, 2.94e-5},
    };
    json rows = json::array();
    bool all_pass = true;
    for (const SnrTableRow& r : table) {
        json row;
        row["s"] = r.s;
        row["delta_s"] = r.delta_s;
        row["lower_bound"] = r.lower_bound;
        const Ref* ref = nullptr;
        if (canonical)
            for (const Ref& q : refs)
                if (std::fabs(q.s - r.s) < 1e-9 * std::max(1.0, q.s)) ref = &q;
        if (ref) {
            row["bound_ref"] = ref->bound;
            bool ok = std::fabs(r.lower_bound - ref->bound) <= 1e-3 * ref->bound;
            if (ref->delta > 0.0) {
                row["delta_ref"] = ref->delta;
                ok = ok && std::fabs(r.delta_s - ref->delta) <= 5e-3 * ref->delta;
            }
            row["check"] = ok ? "PASS" : "FAIL";
            all_pass = all_pass && ok;
        } else {
            row["check"] = "-";
        }
        rows.push_back(row);
    }
    json rep;
    rep["command"] = "snr-table";
    rep["gamma"] = p.gamma();
    rep["c0"] = p.c0();
    rep["delta_star"] = p.delta_star();
    rep["table"] = rows;
    emit(rep, opts);
    return all_pass ? 0 : 3;
}

int cmd_kappa(double gamma, double c0_value, const std::string& units, const std::string& method,
              const OutputOpts& opts) {
    if (!(gamma > 0.0)) throw std::invalid_argument("kappa: gamma must be positive");
    ChannelParams p = channel_from(c0_value, units, 1.0 / gamma, 2, 2);
    json rep;
    rep["command"] = "kappa";
    rep["gamma"] = gamma;
    rep["c0"] = p.c0();
    int rc = 0;
    if (method == "a" || method == "both") rep["kappa_chart"] = kappa2(p, 'a');
    if (method == "b" || method == "both") rep["kappa_pullback"] = kappa2(p, 'b');
    if (method == "both") {
        const double ka = rep["kappa_chart"].get<double>();
        const double kb = rep["kappa_pullback"].get<double>();
        const double rel = std::fabs(ka - kb) / std::max(std::fabs(ka), 1e-300);
        rep["relative_difference"] = rel;
        if (rel > 1e-6) {
            rep["alarm"] = "methods disagree beyond combined error estimates";
            rc = 3;
        }
    }
    if (method != "a" && method != "b" && method != "both")
        throw std::invalid_argument("kappa: method must be a, b, or both");
    emit(rep, opts);
    return rc;
}

int cmd_if_verify(std::uint64_t samples, std::uint64_t seed, double c0_value,
                  const std::string& units, double snr, double s_target, double delta_opt,
                  const OutputOpts& opts) {
    if (samples < 1000) throw std::invalid_argument("if-verify: need at least 1000 samples");
    ChannelParams p = channel_from(c0_value, units, snr, 2, 2);
    const double delta = delta_opt > 0.0
                             ? delta_opt
                             : 4.0 * 4.0 * s_target * std::pow(p.gamma(), 2) / std::sqrt(p.c0());
    if (!(delta < 1.0)) throw std::invalid_argument("if-verify: delta must be < 1");

    ManifoldSampler2 sampler(p, seed);
    double sw = 0.0, sw2 = 0.0, sw_event = 0.0;
    std::uint64_t off_manifold = 0, norm_window_violations = 0;
    const double frob_lo = std::sqrt(p.c0()) - p.gamma();
    const double frob_hi = (p.c0() - p.gamma() * p.gamma()) / p.gamma();
    std::vector<double> weights, event_w;
    weights.reserve(samples);
    event_w.reserve(samples);
    for (std::uint64_t i = 0; i < samples; ++i) {
        ManifoldSampler2::Draw d = sampler.draw();
        if (!on_manifold(d.h, p)) ++off_manifold;
        const double fr = frobenius_norm_sq(d.h.mat());
        if (fr < frob_lo * (1.0 - 1e-9) || fr > frob_hi * (1.0 + 1e-9)) ++norm_window_violations;
        const double minimum = lattice_minimum(d.l).value;
        sw += d.weight;
        sw2 += d.weight * d.weight;
        const double ev = minimum > delta ? d.weight : 0.0;
        sw_event += ev;
        weights.push_back(d.weight);
        event_w.push_back(ev);
    }
    const double mean_w = sw / static_cast<double>(samples);
    const double kappa = kappa2(p, 'a');
    const double ratio = sw_event / sw;
    // delta-method standard error of the self-normalized ratio
    double se2 = 0.0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        const double r = event_w[i] - ratio * weights[i];
        se2 += r * r;
    }
    se2 /= sw * sw;
    const double se = std::sqrt(se2);
    const double bound = m2_lower_bound(delta, p);

    json rep;
    rep["command"] = "if-verify";
    rep["samples"] = samples;
    rep["seed"] = seed;
    rep["gamma"] = p.gamma();
    rep["c0"] = p.c0();
    rep["delta"] = delta;
    rep["mc_estimate"] = ratio;
    rep["mc_standard_error"] = se;
    rep["lower_bound"] = bound;
    rep["mean_weight"] = mean_w;
    rep["kappa"] = kappa;
    rep["mean_weight_relative_gap"] = std::fabs(mean_w - kappa) / kappa;
    rep["off_manifold_points"] = off_manifold;
    rep["norm_window_violations"] = norm_window_violations;
    const bool ok = ratio >= bound - 3.0 * se && off_manifold == 0 && norm_window_violations == 0;
    rep["check"] = ok ? "PASS" : "FAIL";
    emit(rep, opts);
    return ok ? 0 : 3;
}

int cmd_mc_verify(const std::string& target, double delta, std::uint64_t samples,
                  std::uint64_t seed, const std::string& axes_csv, int d, double eps,
                  const OutputOpts& opts) {
    if (samples < 1000) throw std::invalid_argument("mc-verify: need at least 1000 samples");
    json rep;
    rep["command"] = "mc-verify";
    rep["target"] = target;
    rep["delta"] = delta;
    rep["samples"] = samples;
    rep["seed"] = seed;
    bool ok = false;

    if (target == "wishart") {
        SymmetricForm id2(Mat::identity(2));
        Rng rng(seed, 0x71a5);
        std::uint64_t hits = 0;
        for (std::uint64_t i = 0; i < samples; ++i) {
            SymmetricForm w = wishart_sample(id2, 2, rng);
            double m;
            try {
                m = lattice_minimum(w).value;
            } catch (const std::invalid_argument&) {
                m = 0.0;  // numerically singular draw counts as a small minimum
            }
            if (m <= delta) ++hits;
        }
        const double freq = static_cast<double>(hits) / static_cast<double>(samples);
        const double sigma = std::sqrt(std::max(freq * (1.0 - freq), 1e-12) /
                                       static_cast<double>(samples));
        BoundPair b = wishart_J1_J2(delta);
        rep["frequency"] = freq;
        rep["standard_error"] = sigma;
        rep["J1"] = b.lower;
        rep["J2"] = b.upper;
        ok = freq >= b.lower - 3.0 * sigma && freq <= b.upper + 3.0 * sigma;
    } else if (target == "theorem2") {
        std::vector<double> axes = parse_list(axes_csv);
        std::vector<double> scaled(axes);
        for (double& a : scaled) a *= std::sqrt(delta);
        SphericalMeasure mc = p_ellipsoid_mc(Ellipsoid(scaled), samples, seed);
        SpectralEventBounds t2 = theorem2_bounds(axes, delta, 20000, seed + 1);
        rep["frequency"] = mc.value;
        rep["standard_error"] = mc.error_estimate;
        rep["lower"] = t2.bounds.lower;
        rep["upper"] = t2.bounds.upper;
        const double slack = 3.0 * (mc.error_estimate + t2.lower_mc_error);
        ok = mc.value >= t2.bounds.lower - slack && mc.value <= t2.bounds.upper + 3.0 * mc.error_estimate;
    } else if (target == "theorem3") {
        if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("mc-verify: eps must be in (0,1)");
        Theorem3Result t3 = theorem3_bounds(d, eps, delta, 200000, seed + 1);
        Rng rng(seed, 0x73b1);
        NuEpsilonParams np{d, eps};
        std::uint64_t hits = 0;
        for (std::uint64_t i = 0; i < samples; ++i) {
            std::vector<double> alpha = nu_epsilon_sample(np, rng);
            Mat rot = haar_orthogonal(d, rng);
            // event: rotated lattice meets the ellipsoid with axes sqrt(delta)*alpha
            Mat a(d, d);
            for (int k = 0; k < d; ++k) a(k, k) = 1.0 / (delta * alpha[k] * alpha[k]);
            SymmetricForm q(transpose(rot) * a * rot);
            if (lattice_minimum(q).value <= 1.0) ++hits;
        }
        const double freq = static_cast<double>(hits) / static_cast<double>(samples);
        const double sigma = std::sqrt(std::max(freq * (1.0 - freq), 1e-12) /
                                       static_cast<double>(samples));
        rep["frequency"] = freq;
        rep["standard_error"] = sigma;
        rep["exact_zero"] = t3.exact_zero;
        rep["lower"] = t3.exact_zero ? 0.0 : t3.lower;
        rep["upper"] = t3.exact_zero ? 0.0 : t3.upper;
        ok = t3.exact_zero ? hits == 0
                           : (freq >= t3.lower - 3.0 * sigma && freq <= t3.upper + 3.0 * sigma);
    } else {
        throw std::invalid_argument("mc-verify: target must be wishart, theorem2, or theorem3");
    }
    rep["check"] = ok ? "PASS" : "FAIL";
    emit(rep, opts);
    return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lattice-form probability bounds toolkit"};
    app.require_subcommand(1);

    OutputOpts opts;

    // min
    auto* c_min = app.add_subcommand("min", "exact lattice minimum of a quadratic form");
    std::string matrix_path;
    c_min->add_option("--matrix", matrix_path, "matrix file (JSON or text rows)")->required();
    add_output_flags(c_min, opts);

    // spectral-bounds
    auto* c_spec = app.add_subcommand("spectral-bounds", "cap-measure and rotation-event bounds");
    double sb_delta = 0.0, sb_eps = 0.0;
    std::string sb_axes;
    std::uint64_t sb_mc_n = 20000, sb_seed = 0;
    c_spec->add_option("--delta", sb_delta, "event threshold")->required();
    c_spec->add_option("--axes", sb_axes, "comma-separated semi-axes (det-1 for the event bracket)")
        ->required();
    c_spec->add_option("--eps", sb_eps, "also evaluate the log-uniform measure bounds");
    c_spec->add_option("--mc-n", sb_mc_n, "Monte-Carlo samples for statistical terms");
    c_spec->add_option("--seed", sb_seed, "RNG seed");
    add_output_flags(c_spec, opts);

    // theorem3
    auto* c_t3 = app.add_subcommand("theorem3", "log-uniform spectral measure probability bounds");
    int t3_d = 2;
    double t3_eps = 0.5, t3_delta = 0.25;
    std::uint64_t t3_mc_n = 200000, t3_seed = 0;
    c_t3->add_option("--d", t3_d, "dimension");
    c_t3->add_option("--eps", t3_eps, "support parameter in (0,1)")->required();
    c_t3->add_option("--delta", t3_delta, "event threshold")->required();
    c_t3->add_option("--mc-n", t3_mc_n, "Monte-Carlo samples for s_d, S_d");
    c_t3->add_option("--seed", t3_seed, "RNG seed");
    add_output_flags(c_t3, opts);

    // wishart-table
    auto* c_wt = app.add_subcommand("wishart-table", "J1/J2 bracket table for the 2x2 Wishart case");
    std::string wt_deltas = "0.2,0.1,0.01,0.001";
    c_wt->add_option("--deltas", wt_deltas, "comma-separated thresholds");
    add_output_flags(c_wt, opts);

    // chol-bounds
    auto* c_cb = app.add_subcommand("chol-bounds", "density-based minimum bracket via the Cholesky map");
    std::string cb_density;
    double cb_delta = 0.0;
    c_cb->add_option("--density", cb_density, "density spec: JSON file or inline (wishart, gaussian-bump)")
        ->required();
    c_cb->add_option("--delta", cb_delta, "event threshold in (0,1)")->required();
    add_output_flags(c_cb, opts);

    // snr-table
    auto* c_st = app.add_subcommand("snr-table", "effective-SNR lower-bound table");
    double st_c0 = 30.0, st_snr = 5.0;
    std::string st_units = "paper", st_s = "0.3125,1,1.5,2,5,10,30";
    int st_m = 2, st_n = 2;
    c_st->add_option("--c0", st_c0, "capacity (exponent of e, or bits with --c0-units bits)");
    c_st->add_option("--c0-units", st_units, "paper|bits|nats")
        ->check(CLI::IsMember({"paper", "bits", "nats"}));
    c_st->add_option("--snr", st_snr, "linear SNR");
    c_st->add_option("--s", st_s, "comma-separated target effective SNRs");
    c_st->add_option("--m", st_m, "transmit antennas");
    c_st->add_option("--n", st_n, "receive antennas");
    add_output_flags(c_st, opts);

    // kappa
    auto* c_k = app.add_subcommand("kappa", "surface area of the d=2 capacity manifold");
    double k_gamma = 0.2, k_c0 = 30.0;
    std::string k_units = "paper", k_method = "both";
    c_k->add_option("--gamma", k_gamma, "inverse SNR");
    c_k->add_option("--c0", k_c0, "capacity (same convention as snr-table)");
    c_k->add_option("--c0-units", k_units, "paper|bits|nats")
        ->check(CLI::IsMember({"paper", "bits", "nats"}));
    c_k->add_option("--method", k_method, "a|b|both");
    add_output_flags(c_k, opts);

    // if-verify
    auto* c_if = app.add_subcommand("if-verify", "end-to-end manifold Monte-Carlo vs the lower bound");
    std::uint64_t if_samples = 100000, if_seed = 0;
    double if_c0 = 30.0, if_snr = 5.0, if_s = 1.0, if_delta = -1.0;
    std::string if_units = "paper";
    c_if->add_option("--samples", if_samples, "number of weighted manifold samples");
    c_if->add_option("--seed", if_seed, "RNG seed");
    c_if->add_option("--c0", if_c0, "capacity");
    c_if->add_option("--c0-units", if_units, "paper|bits|nats")
        ->check(CLI::IsMember({"paper", "bits", "nats"}));
    c_if->add_option("--snr", if_snr, "linear SNR");
    c_if->add_option("--s", if_s, "target effective SNR determining delta");
    c_if->add_option("--delta", if_delta, "explicit threshold (overrides --s)");
    add_output_flags(c_if, opts);

    // mc-verify
    auto* c_mc = app.add_subcommand("mc-verify", "Monte-Carlo bracket checks against the bound formulas");
    std::string mc_target = "wishart", mc_axes = "0.5,2";
    double mc_delta = 0.2, mc_eps = 0.3;
    int mc_d = 2;
    std::uint64_t mc_samples = 100000, mc_seed = 0;
    c_mc->add_option("--target", mc_target, "wishart|theorem2|theorem3")
        ->check(CLI::IsMember({"wishart", "theorem2", "theorem3"}));
    c_mc->add_option("--delta", mc_delta, "event threshold");
    c_mc->add_option("--samples", mc_samples, "Monte-Carlo sample count");
    c_mc->add_option("--seed", mc_seed, "RNG seed");
    c_mc->add_option("--axes", mc_axes, "det-1 axes for theorem2 target");
    c_mc->add_option("--d", mc_d, "dimension for theorem3 target");
    c_mc->add_option("--eps", mc_eps, "support parameter for theorem3 target");
    add_output_flags(c_mc, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (c_min->parsed()) return cmd_min(matrix_path, opts);
        if (c_spec->parsed())
            return cmd_spectral_bounds(sb_delta, sb_axes, sb_eps, sb_mc_n, sb_seed, opts);
        if (c_t3->parsed()) return cmd_theorem3(t3_d, t3_eps, t3_delta, t3_mc_n, t3_seed, opts);
        if (c_wt->parsed()) return cmd_wishart_table(wt_deltas, opts);
        if (c_cb->parsed()) return cmd_chol_bounds(cb_density, cb_delta, opts);
        if (c_st->parsed()) return cmd_snr_table(st_c0, st_units, st_snr, st_s, st_m, st_n, opts);
        if (c_k->parsed()) return cmd_kappa(k_gamma, k_c0, k_units, k_method, opts);
        if (c_if->parsed())
            return cmd_if_verify(if_samples, if_seed, if_c0, if_units, if_snr, if_s, if_delta, opts);
        if (c_mc->parsed())
            return cmd_mc_verify(mc_target, mc_delta, mc_samples, mc_seed, mc_axes, mc_d, mc_eps, opts);
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "not converged: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
