// Command-line front end: structure configs in, spectra/roots/thresholds out
// as CSV or JSON. See README.md for the config schema and presets.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ptcpa/elements.hpp"
#include "ptcpa/scattering.hpp"
#include "ptcpa/spectral.hpp"

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitConfig = 2;
constexpr int kExitPole = 3;
constexpr int kExitNotBracketed = 4;
constexpr int kExitPtFailed = 5;

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Config model
// ---------------------------------------------------------------------------

enum class RatioKind { none, fixed, auto_cpa };

struct RunConfig {
    ptcpa::StructureSpec structure;
    std::string structure_preset;  // empty for element lists
    // gain-parametrized rebuild for threshold/coincidence; null otherwise
    std::function<ptcpa::StructureSpec(double)> family;

    ptcpa::SpectralGrid grid{-1.0, 1.0, 201};

    ptcpa::Excitation mode{ptcpa::Excitation::single_left};
    RatioKind ratio{RatioKind::none};
    double sigma{0.0};
    double phi{0.0};

    double tol{0.0};  // 0 = per-command default
    ptcpa::SearchRegion region{-10.0, 10.0, -2.0, 2.0, 40, 40};
    bool has_region{false};
    std::optional<std::pair<double, double>> g_bracket;
    int pt_samples{1000};

    std::string format{"csv"};
    std::string out{"-"};
    bool meta{false};
};

double require_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path + ": expected a number");
    return j.get<double>();
}

double get_number(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key)) throw ConfigError(path + "." + key + ": missing");
    return require_number(j.at(key), path + "." + key);
}

double get_number_or(const json& j, const std::string& key, const std::string& path,
                     double fallback) {
    if (!j.contains(key)) return fallback;
    return require_number(j.at(key), path + "." + key);
}

ptcpa::cplx get_complex(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key)) throw ConfigError(path + "." + key + ": missing");
    const json& v = j.at(key);
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError(path + "." + key + ": expected a number or [re, im]");
}

ptcpa::StackElement parse_element(const json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
        throw ConfigError(path + ": expected an object with a \"type\" string");
    const std::string type = j.at("type").get<std::string>();
    if (type == "slab") {
        return ptcpa::Slab{get_complex(j, "n", path), get_number(j, "kl", path)};
    }
    if (type == "mirror") {
        const double r = get_number(j, "rM", path);
        if (!(std::abs(r) < 1.0)) throw ConfigError(path + ".rM: |rM| must be < 1");
        return ptcpa::Mirror{r};
    }
    if (type == "gain_slab") {
        return ptcpa::GainSlab{get_number(j, "gL", path), get_number_or(j, "delta0", path, 0.0)};
    }
    if (type == "dfb_half") {
        const double q = get_number(j, "q0L", path);
        if (!(q >= 0.0)) throw ConfigError(path + ".q0L: must be >= 0");
        return ptcpa::DfbHalf{q, get_number(j, "gL", path),
                              get_number_or(j, "delta_scale", path, 1.0),
                              get_number_or(j, "delta_offset", path, 0.0)};
    }
    if (type == "propagation") {
        return ptcpa::Propagation{get_number(j, "phase", path)};
    }
    if (type == "near_threshold") {
        const double eps = get_number(j, "eps", path);
        if (!(eps > 0.0)) throw ConfigError(path + ".eps: must be > 0");
        const double alpha = get_number(j, "alpha", path);
        if (alpha == 0.0) throw ConfigError(path + ".alpha: must be nonzero");
        return ptcpa::NearThreshold{alpha, get_number(j, "beta", path), eps,
                                    get_complex(j, "kappa", path)};
    }
    throw ConfigError(path + ".type: unknown element type \"" + type + "\"");
}

void parse_structure(const json& j, RunConfig& cfg) {
    if (!j.is_object()) throw ConfigError("structure: expected an object");
    if (j.contains("preset")) {
        const std::string name = j.at("preset").get<std::string>();
        const json params = j.value("params", json::object());
        cfg.structure_preset = name;
        if (name == "fp_laser") {
            const double r = get_number(params, "rM", "structure.params");
            if (!(std::abs(r) < 1.0))
                throw ConfigError("structure.params.rM: |rM| must be < 1");
            const double g = get_number(params, "gL", "structure.params");
            cfg.structure = ptcpa::fp_laser(r, g);
            cfg.family = [r](double gg) { return ptcpa::fp_laser(r, gg); };
        } else if (name == "pt_dfb") {
            const double q = get_number(params, "q0L", "structure.params");
            if (!(q >= 0.0)) throw ConfigError("structure.params.q0L: must be >= 0");
            const double g = get_number(params, "gL", "structure.params");
            cfg.structure = ptcpa::pt_dfb(q, g);
            cfg.family = [q](double gg) { return ptcpa::pt_dfb(q, gg); };
        } else if (name == "near_threshold") {
            const double eps = get_number(params, "eps", "structure.params");
            if (!(eps > 0.0)) throw ConfigError("structure.params.eps: must be > 0");
            const double alpha = get_number(params, "alpha", "structure.params");
            if (alpha == 0.0) throw ConfigError("structure.params.alpha: must be nonzero");
            cfg.structure = ptcpa::near_threshold_model(
                alpha, get_number(params, "beta", "structure.params"), eps,
                get_complex(params, "kappa", "structure.params"));
        } else {
            throw ConfigError("structure.preset: unknown preset \"" + name + "\"");
        }
        return;
    }
    if (j.contains("elements")) {
        const json& els = j.at("elements");
        if (!els.is_array() || els.empty())
            throw ConfigError("structure.elements: expected a non-empty array");
        cfg.structure.elements.clear();
        for (size_t i = 0; i < els.size(); ++i)
            cfg.structure.elements.push_back(
                parse_element(els[i], "structure.elements[" + std::to_string(i) + "]"));
        cfg.structure.n0 = get_number_or(j, "n0", "structure", 1.0);
        if (!(cfg.structure.n0 > 0.0)) throw ConfigError("structure.n0: must be > 0");
        return;
    }
    throw ConfigError("structure: needs either \"preset\" or \"elements\"");
}

void parse_excitation(const json& j, RunConfig& cfg) {
    if (!j.is_object()) throw ConfigError("excitation: expected an object");
    const std::string mode = j.value("mode", "single_left");
    if (mode == "single_left") {
        cfg.mode = ptcpa::Excitation::single_left;
    } else if (mode == "single_right") {
        cfg.mode = ptcpa::Excitation::single_right;
    } else if (mode == "coherent") {
        cfg.mode = ptcpa::Excitation::coherent;
    } else if (mode == "incoherent") {
        cfg.mode = ptcpa::Excitation::incoherent;
    } else {
        throw ConfigError("excitation.mode: unknown mode \"" + mode + "\"");
    }
    const bool two_port =
        cfg.mode == ptcpa::Excitation::coherent || cfg.mode == ptcpa::Excitation::incoherent;
    if (!two_port) return;
    if (j.contains("ratio")) {
        if (j.at("ratio").is_string() && j.at("ratio").get<std::string>() == "auto_cpa") {
            cfg.ratio = RatioKind::auto_cpa;
            return;
        }
        throw ConfigError("excitation.ratio: only \"auto_cpa\" is recognized");
    }
    cfg.ratio = RatioKind::fixed;
    cfg.sigma = get_number(j, "sigma", "excitation");
    if (!(cfg.sigma >= 0.0)) throw ConfigError("excitation.sigma: must be >= 0");
    cfg.phi = get_number_or(j, "phi", "excitation", 0.0);
}

void parse_options(const json& j, RunConfig& cfg) {
    if (!j.is_object()) throw ConfigError("options: expected an object");
    if (j.contains("tol")) {
        cfg.tol = require_number(j.at("tol"), "options.tol");
        if (!(cfg.tol > 0.0)) throw ConfigError("options.tol: must be > 0");
    }
    if (j.contains("region")) {
        const json& r = j.at("region");
        if (!r.is_object()) throw ConfigError("options.region: expected an object");
        auto span = [&](const char* key, double& lo, double& hi) {
            if (!r.contains(key) || !r.at(key).is_array() || r.at(key).size() != 2)
                throw ConfigError(std::string("options.region.") + key + ": expected [min, max]");
            lo = require_number(r.at(key)[0], std::string("options.region.") + key + "[0]");
            hi = require_number(r.at(key)[1], std::string("options.region.") + key + "[1]");
            if (!(lo < hi))
                throw ConfigError(std::string("options.region.") + key + ": min must be < max");
        };
        span("re", cfg.region.re_min, cfg.region.re_max);
        span("im", cfg.region.im_min, cfg.region.im_max);
        if (r.contains("seeds")) {
            const json& s = r.at("seeds");
            if (!s.is_array() || s.size() != 2 || !s[0].is_number_integer() ||
                !s[1].is_number_integer())
                throw ConfigError("options.region.seeds: expected [n_re, n_im]");
            cfg.region.seeds_re = s[0].get<int>();
            cfg.region.seeds_im = s[1].get<int>();
            if (cfg.region.seeds_re < 2 || cfg.region.seeds_im < 2)
                throw ConfigError("options.region.seeds: must be >= 2");
        }
        cfg.has_region = true;
    }
    if (j.contains("g_bracket")) {
        const json& b = j.at("g_bracket");
        if (!b.is_array() || b.size() != 2)
            throw ConfigError("options.g_bracket: expected [g_lo, g_hi]");
        const double lo = require_number(b[0], "options.g_bracket[0]");
        const double hi = require_number(b[1], "options.g_bracket[1]");
        if (!(lo < hi)) throw ConfigError("options.g_bracket: g_lo must be < g_hi");
        cfg.g_bracket = {lo, hi};
    }
    if (j.contains("pt_samples")) {
        if (!j.at("pt_samples").is_number_integer() || j.at("pt_samples").get<int>() < 1)
            throw ConfigError("options.pt_samples: expected a positive integer");
        cfg.pt_samples = j.at("pt_samples").get<int>();
    }
    if (j.contains("format")) {
        cfg.format = j.at("format").get<std::string>();
        if (cfg.format != "csv" && cfg.format != "json")
            throw ConfigError("options.format: must be \"csv\" or \"json\"");
    }
    if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
    if (j.contains("meta")) {
        if (!j.at("meta").is_boolean()) throw ConfigError("options.meta: expected a boolean");
        cfg.meta = j.at("meta").get<bool>();
    }
}

RunConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    if (!j.contains("structure")) throw ConfigError("structure: missing");
    RunConfig cfg;
    parse_structure(j.at("structure"), cfg);
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        if (!g.is_object()) throw ConfigError("grid: expected an object");
        cfg.grid.start = get_number(g, "start", "grid");
        cfg.grid.stop = get_number(g, "stop", "grid");
        if (!g.contains("count") || !g.at("count").is_number_integer())
            throw ConfigError("grid.count: expected an integer");
        cfg.grid.count = g.at("count").get<int>();
        try {
            cfg.grid.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (j.contains("excitation")) parse_excitation(j.at("excitation"), cfg);
    if (j.contains("options")) parse_options(j.at("options"), cfg);
    return cfg;
}

// Embedded one-command reproductions of the paper-style spectra.
const char* preset_json(const std::string& name) {
    if (name == "fig2a") {
        return R"({
          "structure": {"preset": "near_threshold",
                        "params": {"alpha": 3.0, "beta": 0.3, "eps": 0.02, "kappa": [1.0, 0.0]}},
          "grid": {"start": -0.5, "stop": 0.5, "count": 1001},
          "excitation": {"mode": "coherent", "ratio": "auto_cpa"},
          "options": {"tol": 1e-9,
                      "region": {"re": [-0.5, 0.5], "im": [-0.5, 0.5], "seeds": [40, 40]}}
        })";
    }
    if (name == "fig2b") {
        return R"({
          "structure": {"preset": "pt_dfb", "params": {"q0L": 1.0, "gL": 4.43}},
          "grid": {"start": -8.0, "stop": 8.0, "count": 3201},
          "excitation": {"mode": "coherent", "ratio": "auto_cpa"},
          "options": {"tol": 1e-9,
                      "region": {"re": [0.1, 8.0], "im": [-1.5, 1.5], "seeds": [40, 40]},
                      "g_bracket": [3.0, 6.0]}
        })";
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

std::string fmt15(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

void write_output(const RunConfig& cfg, const std::string& command, const Table& table) {
    std::ostringstream os;
    if (cfg.format == "csv") {
        if (cfg.meta) os << "# ptcpa " << kVersion << " command=" << command << "\n";
        for (size_t c = 0; c < table.columns.size(); ++c)
            os << (c ? "," : "") << table.columns[c];
        os << "\n";
        for (const auto& row : table.rows) {
            for (size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << fmt15(row[c]);
            os << "\n";
        }
    } else {
        ojson doc;
        if (cfg.meta)
            doc["meta"] = {{"tool", "ptcpa"}, {"version", kVersion}, {"command", command}};
        ojson rows = ojson::array();
        for (const auto& row : table.rows) {
            ojson r;
            for (size_t c = 0; c < row.size(); ++c) r[table.columns[c]] = row[c];
            rows.push_back(std::move(r));
        }
        doc["rows"] = std::move(rows);
        os << doc.dump() << "\n";
    }
    if (cfg.out == "-") {
        std::cout << os.str();
    } else {
        std::ofstream f(cfg.out, std::ios::binary);
        if (!f) throw ConfigError("out: cannot open \"" + cfg.out + "\" for writing");
        f << os.str();
    }
}

void write_json_doc(const RunConfig& cfg, ojson doc) {
    std::ostringstream os;
    os << doc.dump() << "\n";
    if (cfg.out == "-") {
        std::cout << os.str();
    } else {
        std::ofstream f(cfg.out, std::ios::binary);
        if (!f) throw ConfigError("out: cannot open \"" + cfg.out + "\" for writing");
        f << os.str();
    }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

// Resolve the two-port input ratio: explicit sigma/phi, or the CPA condition
// d/a = M21 evaluated at the real part of the M22 zero nearest the real axis.
void resolve_ratio(RunConfig& cfg) {
    if (cfg.ratio != RatioKind::auto_cpa) return;
    const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-9;
    const ptcpa::ZeroSearch zs =
        ptcpa::find_zeros(cfg.structure, ptcpa::MatrixEntry::M22, cfg.region, tol);
    if (zs.roots.empty())
        throw ConfigError(
            "excitation.ratio: auto_cpa found no M22 zero in options.region; widen the region");
    ptcpa::cplx best = zs.roots.front().freq;
    for (const auto& r : zs.roots)
        if (std::abs(r.freq.imag()) < std::abs(best.imag())) best = r.freq;
    const ptcpa::cplx ratio =
        ptcpa::cpa_input(ptcpa::build_structure(cfg.structure, best.real()));
    cfg.sigma = std::abs(ratio);
    cfg.phi = std::arg(ratio);
    cfg.ratio = RatioKind::fixed;
}

int cmd_spectrum(RunConfig& cfg) {
    const bool two_port =
        cfg.mode == ptcpa::Excitation::coherent || cfg.mode == ptcpa::Excitation::incoherent;
    if (two_port) resolve_ratio(cfg);

    Table table;
    table.columns = {"delta", "re_t", "im_t", "T", "R_left", "R_right", "theta_single"};
    if (two_port) {
        table.columns.push_back("theta_coherent");
        table.columns.push_back("theta_incoherent");
    }

    for (const double d : cfg.grid.points()) {
        const ptcpa::TransferMatrix m = ptcpa::build_structure(cfg.structure, d);
        const auto sc = ptcpa::s_coefficients(m);
        std::vector<double> row = {d,
                                   sc.t.real(),
                                   sc.t.imag(),
                                   std::norm(sc.t),
                                   std::norm(sc.r_left),
                                   std::norm(sc.r_right),
                                   ptcpa::theta(m, ptcpa::TwoPortInput::single_left())};
        if (two_port) {
            row.push_back(
                ptcpa::theta(m, ptcpa::TwoPortInput::coherent(cfg.sigma, cfg.phi)));
            row.push_back(ptcpa::theta(m, ptcpa::TwoPortInput::incoherent(cfg.sigma)));
        }
        for (const double v : row)
            if (!std::isfinite(v)) throw ptcpa::LasingPoleError{};
        table.rows.push_back(std::move(row));
    }
    write_output(cfg, "spectrum", table);
    return 0;
}

int cmd_poles(RunConfig& cfg) {
    const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-9;

    ojson jrows = ojson::array();
    for (const auto target : {ptcpa::MatrixEntry::M11, ptcpa::MatrixEntry::M22}) {
        const std::string name = target == ptcpa::MatrixEntry::M11 ? "M11" : "M22";
        const ptcpa::ZeroSearch zs = ptcpa::find_zeros(cfg.structure, target, cfg.region, tol);
        for (const auto& d : zs.dropped)
            std::cerr << "dropped candidate near (" << fmt15(d.seed.real()) << ", "
                      << fmt15(d.seed.imag()) << "): residual " << fmt15(d.residual) << " after "
                      << d.iterations << " iterations\n";
        for (const auto& r : zs.roots)
            jrows.push_back({{"target", name},
                             {"re_delta", r.freq.real()},
                             {"im_delta", r.freq.imag()},
                             {"residual", r.residual}});
    }

    if (cfg.format == "csv") {
        std::ostringstream os;
        if (cfg.meta) os << "# ptcpa " << kVersion << " command=poles\n";
        os << "target,re_delta,im_delta,residual\n";
        for (const auto& r : jrows)
            os << r.at("target").get<std::string>() << ","
               << fmt15(r.at("re_delta").get<double>()) << ","
               << fmt15(r.at("im_delta").get<double>()) << ","
               << fmt15(r.at("residual").get<double>()) << "\n";
        if (cfg.out == "-") {
            std::cout << os.str();
        } else {
            std::ofstream f(cfg.out, std::ios::binary);
            if (!f) throw ConfigError("out: cannot open \"" + cfg.out + "\" for writing");
            f << os.str();
        }
    } else {
        ojson doc;
        if (cfg.meta) doc["meta"] = {{"tool", "ptcpa"}, {"version", kVersion}, {"command", "poles"}};
        doc["rows"] = std::move(jrows);
        write_json_doc(cfg, std::move(doc));
    }
    return 0;
}

int cmd_threshold(RunConfig& cfg) {
    if (!cfg.family)
        throw ConfigError(
            "threshold: structure is not gain-parametrized (use preset fp_laser or pt_dfb)");
    if (!cfg.g_bracket) throw ConfigError("options.g_bracket: missing");
    const double g_tol = cfg.tol > 0.0 ? cfg.tol : 1e-4;

    const ptcpa::ThresholdResult res = ptcpa::lasing_threshold(
        cfg.family, cfg.g_bracket->first, cfg.g_bracket->second, cfg.region, g_tol, 1e-8);

    if (cfg.format == "csv") {
        std::ostringstream os;
        if (cfg.meta) os << "# ptcpa " << kVersion << " command=threshold\n";
        os << "key,value\n";
        os << "g_th," << fmt15(res.g_th) << "\n";
        for (const double f : res.freqs) os << "freq," << fmt15(f) << "\n";
        for (const double r : res.residuals) os << "residual," << fmt15(r) << "\n";
        os << "iterations," << res.iterations << "\n";
        if (cfg.out == "-") {
            std::cout << os.str();
        } else {
            std::ofstream f(cfg.out, std::ios::binary);
            if (!f) throw ConfigError("out: cannot open \"" + cfg.out + "\" for writing");
            f << os.str();
        }
    } else {
        ojson doc;
        if (cfg.meta)
            doc["meta"] = {{"tool", "ptcpa"}, {"version", kVersion}, {"command", "threshold"}};
        doc["g_th"] = res.g_th;
        doc["freqs"] = res.freqs;
        doc["residuals"] = res.residuals;
        doc["iterations"] = res.iterations;
        write_json_doc(cfg, std::move(doc));
    }
    return 0;
}

int cmd_check_pt(RunConfig& cfg) {
    const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-12;

    bool eps_checkable = true;
    bool eps_ok = true;
    try {
        eps_ok = ptcpa::verify_pt_epsilon(cfg.structure);
    } catch (const ptcpa::NotCheckable&) {
        eps_checkable = false;
    }

    // deterministic sample set
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> u_re(cfg.region.re_min, cfg.region.re_max);
    std::uniform_real_distribution<double> u_im(cfg.region.im_min, cfg.region.im_max);
    std::vector<ptcpa::cplx> samples(static_cast<size_t>(cfg.pt_samples));
    for (auto& s : samples) s = {u_re(rng), u_im(rng)};
    const ptcpa::PtMatrixReport rep = ptcpa::verify_pt_matrix(cfg.structure, samples, tol);

    const bool pass = rep.pass && (!eps_checkable || eps_ok);

    if (cfg.format == "csv") {
        std::ostringstream os;
        if (cfg.meta) os << "# ptcpa " << kVersion << " command=check-pt\n";
        os << "check,pass,detail\n";
        os << "epsilon," << (eps_checkable ? (eps_ok ? "true" : "false") : "not_applicable")
           << ",\n";
        os << "matrix," << (rep.pass ? "true" : "false") << ",worst=" << fmt15(rep.worst())
           << "\n";
        if (cfg.out == "-") {
            std::cout << os.str();
        } else {
            std::ofstream f(cfg.out, std::ios::binary);
            if (!f) throw ConfigError("out: cannot open \"" + cfg.out + "\" for writing");
            f << os.str();
        }
    } else {
        ojson doc;
        if (cfg.meta)
            doc["meta"] = {{"tool", "ptcpa"}, {"version", kVersion}, {"command", "check-pt"}};
        doc["epsilon"] = {{"checkable", eps_checkable}, {"pass", eps_ok}};
        doc["matrix"] = {{"pass", rep.pass},
                         {"worst_diag", rep.worst_diag},
                         {"worst_m12", rep.worst_m12},
                         {"worst_m21", rep.worst_m21},
                         {"worst_freq", {rep.worst_freq.real(), rep.worst_freq.imag()}},
                         {"checked", rep.checked}};
        write_json_doc(cfg, std::move(doc));
    }
    return pass ? 0 : kExitPtFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"1D complex-permittivity scattering engine: spectra, lasing poles and CPA "
                 "zeros, gain thresholds, and PT-symmetry checks"};
    app.require_subcommand(1);

    std::string config_path, preset_name, grid_spec, out_path, format;
    double tol_flag = 0.0;
    bool meta_flag = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Path to a JSON run configuration");
        sub->add_option("--preset", preset_name, "Embedded configuration: fig2a or fig2b");
        sub->add_option("--grid", grid_spec, "Override grid as start:stop:count");
        sub->add_option("--tol", tol_flag, "Override the command's main tolerance");
        sub->add_option("--out", out_path, "Output path ('-' = stdout)");
        sub->add_option("--format", format, "Output format: csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_flag("--meta", meta_flag, "Prepend a provenance header");
    };

    CLI::App* spectrum = app.add_subcommand("spectrum", "Evaluate spectra over the grid");
    CLI::App* poles = app.add_subcommand("poles", "Locate M22 and M11 zeros in a region");
    CLI::App* threshold = app.add_subcommand("threshold", "Bisect the lasing gain threshold");
    CLI::App* check_pt = app.add_subcommand("check-pt", "Verify PT symmetry of the structure");
    for (CLI::App* sub : {spectrum, poles, threshold, check_pt}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    try {
        json raw;
        if (!preset_name.empty() && !config_path.empty())
            throw ConfigError("give either --preset or --config, not both");
        if (!preset_name.empty()) {
            const char* text = preset_json(preset_name);
            if (!text) throw ConfigError("unknown preset \"" + preset_name + "\"");
            raw = json::parse(text);
        } else if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw ConfigError("cannot open config file \"" + config_path + "\"");
            try {
                raw = json::parse(f);
            } catch (const json::parse_error& e) {
                throw ConfigError(std::string("config parse error: ") + e.what());
            }
        } else {
            throw ConfigError("one of --preset or --config is required");
        }

        RunConfig cfg = parse_config(raw);
        if (!grid_spec.empty()) {
            double s, e;
            int n;
            if (std::sscanf(grid_spec.c_str(), "%lf:%lf:%d", &s, &e, &n) != 3)
                throw ConfigError("--grid: expected start:stop:count");
            cfg.grid = {s, e, n};
            try {
                cfg.grid.validate();
            } catch (const std::invalid_argument& ex) {
                throw ConfigError(ex.what());
            }
        }
        if (tol_flag != 0.0) {
            if (!(tol_flag > 0.0)) throw ConfigError("--tol: must be > 0");
            cfg.tol = tol_flag;
        }
        if (!out_path.empty()) cfg.out = out_path;
        if (!format.empty()) cfg.format = format;
        if (meta_flag) cfg.meta = true;

        if (spectrum->parsed()) return cmd_spectrum(cfg);
        if (poles->parsed()) return cmd_poles(cfg);
        if (threshold->parsed()) return cmd_threshold(cfg);
        if (check_pt->parsed()) return cmd_check_pt(cfg);
        throw ConfigError("no subcommand given");
    } catch (const ptcpa::LasingPoleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPole;
    } catch (const ptcpa::ThresholdNotBracketed& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNotBracketed;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
