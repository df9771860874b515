// SPDX-License-Identifier: (Apache-2.0 OR MIT)
#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "io.hpp"

namespace sphera::cli {

enum ExitCode : int { ok = 0, usage = 1, data = 2, numerical = 3 };

// TOML-style "key = value" lines; '#' comments and [section] headers are ignored.
inline std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
        return s;
    };
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty() || line.front() == '[') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DataError("config line " + std::to_string(lineno) + ": expected key = value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

inline UnitVector parse_axis(const std::string& s) {
    auto comma = s.find(',');
    double t, p;
    if (comma == std::string::npos || !detail::parse_double(s.substr(0, comma), t) ||
        !detail::parse_double(s.substr(comma + 1), p))
        throw std::invalid_argument("--axis expects theta,phi in radians");
    if (t < 0.0 || t > pi) throw std::invalid_argument("--axis theta must lie in [0, pi]");
    return UnitVector::from_angles(t, p);
}

namespace detail {

struct DataArgs {
    std::string path;
    std::string polar = "theta";
    std::string azimuth = "phi";
    bool latitude = false;
    bool degrees = false;
    bool dedupe = false;

    void attach(CLI::App* app) {
        app->add_option("data", path, "Input CSV")->required();
        app->add_option("--polar-col", polar, "Colatitude or latitude column")->capture_default_str();
        app->add_option("--azimuth-col", azimuth, "Longitude column")->capture_default_str();
        app->add_flag("--latitude", latitude, "Polar column holds latitude (-90..90)");
        app->add_flag("--degrees", degrees, "Angles in degrees");
        app->add_flag("--dedupe", dedupe, "Drop exact duplicate coordinate pairs");
    }

    DatasetDescriptor descriptor() const {
        DatasetDescriptor d;
        d.path = path;
        d.polar_column = polar;
        d.azimuth_column = azimuth;
        d.convention = latitude ? PolarConvention::latitude : PolarConvention::colatitude;
        d.unit = degrees ? AngleUnit::degrees : AngleUnit::radians;
        d.dedupe = dedupe;
        return d;
    }
};

class Output {
public:
    Output(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (!path.empty() && path != "-") {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw DataError("cannot write '" + path + "'");
            os_ = file_.get();
        }
    }
    std::ostream& stream() { return *os_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* os_;
};

inline std::string error_json(const char* kind, const std::string& msg) {
    json j;
    j["error"] = kind;
    j["message"] = msg;
    return j.dump() + "\n";
}

}  // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Harmonic analysis of directional data on the sphere", "sphera"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand
    std::string config_path, out_path;
    app.add_option("--config", config_path, "key = value defaults for L, alpha, resolution, seed");
    app.add_option("-o,--out", out_path, "Output file (default stdout)");

    int L = 4;
    double alpha = 0.05;
    int resolution = 16;
    std::uint64_t seed = 0;

    // estimate
    auto* est = app.add_subcommand("estimate", "Estimate harmonic coefficients from a sample");
    detail::DataArgs est_data;
    est_data.attach(est);
    auto* est_L = est->add_option("--L", L, "Maximum degree")->check(CLI::NonNegativeNumber);

    // test
    auto* tst = app.add_subcommand("test", "Uniformity or symmetry test");
    detail::DataArgs tst_data;
    tst_data.attach(tst);
    std::string kind, axis_str = "0,0", mode;
    double phi0 = 0.0;
    tst->add_option("--kind", kind, "Test kind")
        ->required()
        ->check(CLI::IsMember({"uniform", "rotational", "axial", "equatorial", "meridial"}));
    auto* tst_L = tst->add_option("--L", L, "Maximum degree")->check(CLI::PositiveNumber);
    auto* tst_alpha = tst->add_option("--alpha", alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
    tst->add_option("--axis", axis_str, "Rotational axis theta,phi (radians)");
    tst->add_option("--phi0", phi0, "Meridian plane longitude (radians)");
    tst->add_option("--mode", mode, "full|diagonal (rotational), joint|diagonal (meridial)")
        ->check(CLI::IsMember({"full", "diagonal", "joint"}));

    // fit
    auto* fit = app.add_subcommand("fit", "Fit the symmetric mixture-Watson girdle model");
    detail::DataArgs fit_data;
    fit_data.attach(fit);
    std::string rings_path, group_col, butterfly_path, fit_axis;
    auto* fit_res = fit->add_option("--resolution", resolution, "Histogram resolution")->check(CLI::Range(1, 1024));
    fit->add_option("--rings", rings_path, "Ring-averaged histogram CSV");
    fit->add_option("--axis", fit_axis, "Symmetry axis theta,phi (radians); default north pole");
    fit->add_option("--group-col", group_col, "Grouping column for a per-group alpha table");
    fit->add_option("--butterfly", butterfly_path, "Per-group alpha CSV (requires --group-col)");

    // sample
    auto* smp = app.add_subcommand("sample", "Draw a sample from a model");
    std::string model_path;
    std::size_t n = 0;
    smp->add_option("--model", model_path, "Model JSON")->required();
    smp->add_option("--n", n, "Sample size")->required()->check(CLI::PositiveNumber);
    auto* smp_seed = smp->add_option("--seed", seed, "Seed");

    // expand
    auto* exp = app.add_subcommand("expand", "Harmonic coefficients of a model");
    std::string exp_model;
    bool zonal = false;
    exp->add_option("--model", exp_model, "Model JSON")->required();
    auto* exp_L = exp->add_option("--L", L, "Maximum degree")->check(CLI::NonNegativeNumber);
    exp->add_flag("--zonal", zonal, "Also report c_l = sqrt(4 pi / (2l+1)) a_l^0");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << detail::error_json("usage", e.what());
        return usage;
    }

    try {
        if (!config_path.empty()) {
            auto cfg = read_config(config_path);
            auto apply = [&](const char* key, CLI::Option* opt, auto& target) {
                auto it = cfg.find(key);
                if (it == cfg.end() || opt->count() > 0) return;
                using T = std::decay_t<decltype(target)>;
                if (!CLI::detail::lexical_cast<T>(it->second, target))
                    throw std::invalid_argument(std::string("config: bad value for ") + key);
            };
            CLI::Option* l_opt = est->parsed() ? est_L : tst->parsed() ? tst_L : exp_L;
            apply("L", l_opt, L);
            apply("alpha", tst_alpha, alpha);
            apply("resolution", fit_res, resolution);
            apply("seed", smp_seed, seed);
            if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
            if (L < 0) throw std::invalid_argument("L must be non-negative");
        }

        detail::Output o(out_path, out);
        std::ostream& os = o.stream();

        if (est->parsed()) {
            auto in = ingest(est_data.descriptor());
            os << dump_stable(to_json(estimate_coeffs(in.sample, L)));
        } else if (tst->parsed()) {
            if (L < 1) throw std::invalid_argument("test: --L must be at least 1");
            auto in = ingest(tst_data.descriptor());
            TestReport r;
            if (kind == "uniform") {
                r = test_uniformity(in.sample, L, alpha);
            } else if (kind == "rotational") {
                if (mode == "joint") throw std::invalid_argument("rotational --mode is full or diagonal");
                r = test_rotational(in.sample, parse_axis(axis_str), L, alpha,
                                    mode == "diagonal" ? RotationalMode::diagonal : RotationalMode::full);
            } else if (kind == "axial") {
                r = test_axial(in.sample, L, alpha);
            } else if (kind == "equatorial") {
                r = test_equatorial(in.sample, L, alpha);
            } else {
                if (mode == "full") throw std::invalid_argument("meridial --mode is joint or diagonal");
                r = test_meridial(in.sample, phi0, L, alpha,
                                  mode == "diagonal" ? MeridialMode::diagonal : MeridialMode::joint);
            }
            os << dump_stable(to_json(r));
        } else if (fit->parsed()) {
            if (!butterfly_path.empty() && group_col.empty())
                throw std::invalid_argument("--butterfly requires --group-col");
            auto desc = fit_data.descriptor();
            desc.group_column = group_col;
            auto in = ingest(desc);
            SampleSet s = fit_axis.empty() ? in.sample : rotate_sample(in.sample, rotation_to_north(parse_axis(fit_axis)));
            GirdleFit f = fit_mixture_watson(s, resolution);
            os << dump_stable(to_json(f));
            if (!rings_path.empty()) {
                detail::Output r(rings_path, out);
                write_ring_csv(r.stream(), build_histogram(s, resolution));
            }
            if (!butterfly_path.empty()) {
                std::map<std::string, SampleSet> groups;
                for (std::size_t k = 0; k < s.size(); ++k) groups[in.groups[k]].points.push_back(s.points[k]);
                detail::Output b(butterfly_path, out);
                b.stream() << "group,n,alpha_hat,minus_alpha_hat\n";
                for (const auto& [g, gs] : groups) {
                    b.stream() << g << ',' << gs.size() << ',';
                    try {
                        double a = estimate_alpha(build_histogram(gs, resolution));
                        b.stream() << format_double(a) << ',' << format_double(-a) << '\n';
                    } catch (const DataError&) {
                        b.stream() << ",\n";  // no detectable girdle in this group
                    }
                }
            }
        } else if (smp->parsed()) {
            ModelSpec spec = load_model(model_path);
            write_sample_csv(os, sample(spec, n, seed));
        } else if (exp->parsed()) {
            Model m(load_model(exp_model));
            auto c = m.coefficients(L);
            json j = to_json(c);
            if (zonal) {
                std::vector<double> z;
                for (int l = 0; l <= L; ++l) z.push_back(c(l, 0).real() * std::sqrt(four_pi / (2.0 * l + 1.0)));
                j["zonal_c"] = z;
            }
            os << dump_stable(j);
        }
        return ok;
    } catch (const DataError& e) {
        err << detail::error_json("data", e.what());
        return data;
    } catch (const NumericalError& e) {
        err << detail::error_json("numerical", e.what());
        return numerical;
    } catch (const std::overflow_error& e) {
        err << detail::error_json("numerical", e.what());
        return numerical;
    } catch (const std::invalid_argument& e) {
        err << detail::error_json("usage", e.what());
        return usage;
    } catch (const std::domain_error& e) {
        err << detail::error_json("usage", e.what());
        return usage;
    } catch (const std::exception& e) {
        err << detail::error_json("numerical", e.what());
        return numerical;
    }
}

}  // namespace sphera::cli
