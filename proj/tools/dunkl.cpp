#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "config_file.hpp"
#include "dunkl/error.hpp"
#include "dunkl/verifier.hpp"

using namespace dunkl;
namespace fs = std::filesystem;

namespace {

struct Common {
    std::string out_dir;
    std::uint64_t seed = 1;
    int threads = 1;
};

std::vector<double> parse_list(const std::string& field, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        CLI::detail::trim(tok);
        if (tok.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError(field + ": '" + tok + "' is not a number");
        }
    }
    if (out.empty()) throw ConfigError(field + ": empty list");
    return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, sep)) {
        CLI::detail::trim(tok);
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

RootSystem preset_of(const std::string& preset, const std::string& kappa) {
    return kappa.empty() ? parse_preset(preset) : parse_preset(preset, kappa);
}

// Writes each report, prints one status line per suite, and returns the exit code.
int finish(const std::vector<SuiteReport>& reports, const Common& c, const std::string& hash) {
    bool ok = true;
    for (const auto& r : reports) {
        r.write(c.out_dir, hash);
        std::cout << r.suite << ": " << (r.pass() ? "pass" : "FAIL") << "\n";
        for (const auto& f : r.fits)
            std::cout << "  " << f.id << "  constant " << fmt(f.constant) << "  exponent " << fmt(f.exponent)
                      << (f.halvings ? "  (halved " + std::to_string(f.halvings) + "x)" : "")
                      << (f.ok() ? "" : "  [not finite/stable]") << "\n";
        for (const auto& k : r.checks)
            if (!k.pass) std::cout << "  failed " << k.id << ": " << fmt(k.value) << " vs " << fmt(k.limit) << "  " << k.detail << "\n";
        ok = ok && r.pass();
    }
    std::cout << "reports in " << c.out_dir << " (config " << hash << ")\n";
    return ok ? 0 : 1;
}

int report_summary(const std::string& dir) {
    if (!fs::is_directory(dir)) throw ConfigError("report: no directory " + dir);
    nlohmann::ordered_json summary;
    summary["suites"] = nlohmann::ordered_json::array();
    bool ok = true;
    int n = 0;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".json" && e.path().filename() != "summary.json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
        std::ifstream in(p);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(p.string() + ": " + e.what());
        }
        if (!j.contains("suite") || !j.contains("status")) continue;
        ++n;
        bool pass = j["status"] == "pass";
        ok = ok && pass;
        std::cout << (pass ? "pass  " : "FAIL  ") << j["suite"].get<std::string>() << "  ("
                  << j.value("constants", nlohmann::json::array()).size() << " constants, config "
                  << j.value("config_hash", "") << ")\n";
        summary["suites"].push_back(
            {{"suite", j["suite"]}, {"status", j["status"]}, {"config_hash", j.value("config_hash", "")}});
    }
    if (n == 0) throw ConfigError("report: no suite reports in " + dir);
    summary["status"] = ok ? "pass" : "fail";
    std::ofstream(fs::path(dir) / "summary.json") << summary.dump(2) << "\n";
    return ok ? 0 : 1;
}

std::string config_path_from_argv(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) return argv[i + 1];
        if (a.rfind("--config=", 0) == 0) return a.substr(9);
    }
    return "config";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dunkl harmonic-analysis verifier"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand
    auto lines = std::make_shared<KeyValueConfig::LineMap>();
    app.config_formatter(std::make_shared<KeyValueConfig>(lines, config_path_from_argv(argc, argv)));
    app.set_config("--config", "", "key = value file with [section] headers; flags override it");
    app.allow_config_extras(CLI::config_extras_mode::error);

    Common c;
    const char* env_out = std::getenv("DUNKL_OUT_DIR");
    c.out_dir = env_out && *env_out ? env_out : "reports";
    app.add_option("--out", c.out_dir, "report directory (default $DUNKL_OUT_DIR or ./reports)");
    app.add_option("--seed", c.seed, "random seed")->capture_default_str();
    app.add_option("--threads", c.threads, "worker threads for square-function sweeps")->capture_default_str()
        ->check(CLI::PositiveNumber);

    std::map<const CLI::App*, std::pair<std::string, std::string>> presets;  // preset, kappa override
    auto add_preset = [&](CLI::App* s, const std::string& def) {
        auto& p = presets[s];
        s->add_option("--preset", p.first, "root system preset")->default_val(def);
        s->add_option("--kappa", p.second, "multiplicities overriding the preset");
    };

    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->require_subcommand(1);

    CalculusOptions calc;
    auto* v_calc = verify->add_subcommand("calculus", "exact Dunkl calculus identities");
    add_preset(v_calc, "z2^3:kappa=1,2,1/2");
    v_calc->add_option("--polynomials", calc.polynomials)->capture_default_str()->check(CLI::PositiveNumber);
    v_calc->add_option("--max-degree", calc.max_degree)->capture_default_str()->check(CLI::PositiveNumber);

    KernelBoundOptions kb;
    std::string cal_kappas = "0,0.5,1,2.5";
    int heat_order = 1, flow_polys = 10;
    double heat_tol = 1e-5;
    auto* v_kernel = verify->add_subcommand("kernel", "kernel calibration, heat equation and pointwise bounds");
    add_preset(v_kernel, "z2:kappa=1");
    v_kernel->add_option("--calibration-kappas", cal_kappas)->capture_default_str();
    v_kernel->add_option("--upper-exponent", kb.upper_exponent)->capture_default_str()->check(CLI::PositiveNumber);
    v_kernel->add_option("--derivative-exponent", kb.derivative_exponent)->capture_default_str()
        ->check(CLI::PositiveNumber);
    v_kernel->add_option("--max-halvings", kb.max_halvings)->capture_default_str()->check(CLI::NonNegativeNumber);
    v_kernel->add_option("--stability", kb.stability)->capture_default_str()->check(CLI::PositiveNumber);
    v_kernel->add_option("--heat-order", heat_order)->capture_default_str()->check(CLI::Range(1, 3));
    v_kernel->add_option("--heat-tolerance", heat_tol)->capture_default_str()->check(CLI::PositiveNumber);
    v_kernel->add_option("--flow-polynomials", flow_polys)->capture_default_str()->check(CLI::NonNegativeNumber);

    LemmaSweep ls;
    std::string s_list, ts_list, m_list;
    double lemma_stability = 0.25;
    auto* v_lemmas = verify->add_subcommand("lemmas", "integral lemmas 2.2 to 2.4");
    add_preset(v_lemmas, "z2:kappa=1");
    v_lemmas->add_option("--epsilon", ls.epsilon)->capture_default_str()->check(CLI::PositiveNumber);
    v_lemmas->add_option("--delta", ls.delta)->capture_default_str()->check(CLI::PositiveNumber);
    v_lemmas->add_option("--s", s_list, "comma-separated s values");
    v_lemmas->add_option("--t-over-s", ts_list, "comma-separated t/s values");
    v_lemmas->add_option("--m", m_list, "comma-separated orders");
    v_lemmas->add_option("--stability", lemma_stability)->capture_default_str()->check(CLI::PositiveNumber);

    std::string radii, factors;
    auto* v_measure = verify->add_subcommand("measure", "doubling of the weighted measure");
    add_preset(v_measure, "z2:kappa=1");
    v_measure->add_option("--radii", radii, "comma-separated radii");
    v_measure->add_option("--factors", factors, "comma-separated R/r factors");

    CZSuiteOptions czo;
    Claim34SuiteOptions c34;
    std::string c34_t;
    auto* v_cz = verify->add_subcommand("cz", "Calderon-Zygmund decomposition and claim 3.4");
    add_preset(v_cz, "z2:kappa=1");
    v_cz->add_option("--functions", czo.random_functions)->capture_default_str()->check(CLI::PositiveNumber);
    v_cz->add_option("--depth-1d", czo.depth_1d)->capture_default_str()->check(CLI::Range(1, 16));
    v_cz->add_option("--depth-2d", czo.depth_2d)->capture_default_str()->check(CLI::Range(1, 8));
    v_cz->add_option("--claim34-center", c34.center)->capture_default_str();
    v_cz->add_option("--claim34-width", c34.width)->capture_default_str()->check(CLI::PositiveNumber);
    v_cz->add_option("--claim34-t", c34_t, "comma-separated t values");
    v_cz->add_option("--claim34-tolerance", c34.tolerance)->capture_default_str()->check(CLI::PositiveNumber);

    Weak11Options wo;
    std::string widths, modes;
    auto* weak = app.add_subcommand("weak11", "weak-(1,1) profile of the square functions on spikes");
    add_preset(weak, "z2:kappa=1");
    weak->add_option("--widths", widths, "comma-separated spike widths (default 1,0.1,0.01)");
    weak->add_option("--modes", modes, "comma-separated: gamma, dunkl_grad, grad, horizontal");
    weak->add_option("--center", wo.center)->capture_default_str();
    weak->add_option("--lambda-decades", wo.lambda_decades)->capture_default_str()->check(CLI::PositiveNumber);
    weak->add_option("--x-per-decade", wo.x_per_decade)->capture_default_str()->check(CLI::PositiveNumber);
    weak->add_option("--stability", wo.stability)->capture_default_str()->check(CLI::PositiveNumber);

    EnergyOptions eo;
    std::string functions = "bump(0, 1) | bump(0.7, 0.3)";
    auto* l2 = app.add_subcommand("l2", "L2 energy identities of the square functions");
    add_preset(l2, "z2:kappa=1");
    l2->add_option("--functions", functions, "test functions separated by '|'")->capture_default_str();
    l2->add_option("--tolerance", eo.tolerance)->capture_default_str()->check(CLI::PositiveNumber);

    std::string report_dir;
    auto* report = app.add_subcommand("report", "summarize the reports in a directory");
    report->add_option("--dir", report_dir, "directory (default: --out)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        // point config-file problems at their line
        std::string msg = e.what();
        for (const auto& [name, where] : *lines)
            if (msg.find(name) != std::string::npos) {
                msg = where + ": " + msg;
                break;
            }
        std::cerr << "error: " << msg << "\n";
        return 2;
    }

    std::string sub = report->parsed() ? "report" : weak->parsed() ? "weak11" : l2->parsed() ? "l2" : "verify";
    for (auto* s : verify->get_subcommands()) sub += " " + s->get_name();
    const std::string hash = config_hash(sub + "\n" + app.config_to_str(true, false));

    try {
        if (report->parsed()) return report_summary(report_dir.empty() ? c.out_dir : report_dir);
        const CLI::App* leaf = verify->parsed() ? verify->get_subcommands().front() : app.get_subcommands().front();
        RootSystem R = preset_of(presets.at(leaf).first, presets.at(leaf).second);
        const int d = R.dim();
        std::vector<SuiteReport> out;
        if (v_calc->parsed()) {
            out.push_back(verify_calculus_identities(R, c.seed, calc));
        } else if (v_kernel->parsed()) {
            KernelSpec spec(R);
            out.push_back(kernel_calibration_suite(parse_list("calibration-kappas", cal_kappas), c.seed));
            if (R.exact() && spec.variant() != KernelVariant::gaussian && flow_polys > 0)
                out.push_back(polynomial_flow_suite(R, c.seed, flow_polys));
            out.push_back(heat_equation_suite(spec, KernelSweep::standard(d, c.seed), heat_order, heat_tol));
            out.push_back(verify_kernel_bounds(spec, KernelSweep::standard(d, c.seed), kb));
        } else if (v_lemmas->parsed()) {
            KernelSpec spec(R);
            LemmaSweep sw = LemmaSweep::standard(d, c.seed);
            sw.epsilon = ls.epsilon;
            sw.delta = ls.delta;
            if (!s_list.empty()) sw.s = parse_list("s", s_list);
            if (!ts_list.empty()) sw.t_over_s = parse_list("t-over-s", ts_list);
            if (!m_list.empty()) {
                sw.m.clear();
                for (double m : parse_list("m", m_list)) {
                    if (m < 0 || m != std::floor(m)) throw ConfigError("m: orders must be nonnegative integers");
                    sw.m.push_back(static_cast<int>(m));
                }
            }
            out.push_back(verify_integral_lemmas(spec, sw, lemma_stability));
        } else if (v_measure->parsed()) {
            DoublingSweep sw = DoublingSweep::standard(d, c.seed);
            if (!radii.empty()) sw.radii = parse_list("radii", radii);
            if (!factors.empty()) sw.factors = parse_list("factors", factors);
            out.push_back(doubling_suite(R, sw));
        } else if (v_cz->parsed()) {
            out.push_back(cz_suite(R, c.seed, czo));
            if (!c34_t.empty()) c34.t = parse_list("claim34-t", c34_t);
            if (d == 1) out.push_back(claim34_suite(KernelSpec(R), c34));
        } else if (weak->parsed()) {
            if (!widths.empty()) wo.widths = parse_list("widths", widths);
            if (!modes.empty()) {
                wo.modes.clear();
                for (const auto& m : split(modes, ',')) wo.modes.push_back(parse_mode(m));
            }
            wo.threads = c.threads;
            out.push_back(weak11_profile(KernelSpec(R), wo));
        } else if (l2->parsed()) {
            KernelSpec spec(R);
            std::vector<TestFunction> fam;
            for (const auto& f : split(functions, '|')) fam.push_back(parse_test_function(f, spec.density()));
            if (fam.empty()) throw ConfigError("functions: no test functions");
            eo.threads = c.threads;
            out.push_back(l2_energy_identities(spec, fam, eo));
        }
        return finish(out, c, hash);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return 2;
    } catch (const UnsupportedVariant& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "verification error: " << e.what() << "\n";
        return 1;
    }
}
