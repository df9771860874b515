// SPDX-License-Identifier: (Apache-2.0 OR MIT)
#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "coefficients.hpp"
#include "error.hpp"
#include "estimation.hpp"
#include "fitting.hpp"
#include "hypothesis.hpp"
#include "models.hpp"
#include "sampling.hpp"

namespace sphera {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------- number formatting

inline std::string format_double(double v) {
    if (!std::isfinite(v)) return "null";
    if (v == 0.0) return "0";  // folds -0 as well
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline void write_stable(std::ostream& os, const json& j, int indent, int depth) {
    auto pad = [&](int d) {
        if (indent > 0) os << '\n' << std::string(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ',';
                first = false;
                pad(depth + 1);
                os << json(it.key()).dump() << (indent > 0 ? ": " : ":");
                write_stable(os, it.value(), indent, depth + 1);
            }
            pad(depth);
            os << '}';
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            // Arrays of scalars stay on one line.
            bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
            os << '[';
            bool first = true;
            for (const auto& e : j) {
                if (!first) os << (flat && indent > 0 ? ", " : ",");
                first = false;
                if (!flat) pad(depth + 1);
                write_stable(os, e, indent, depth + 1);
            }
            if (!flat) pad(depth);
            os << ']';
            return;
        }
        case json::value_t::number_float:
            os << format_double(j.get<double>());
            return;
        default:
            os << j.dump();
            return;
    }
}

}  // namespace detail

// Byte-stable JSON: insertion-ordered keys, doubles at 17 significant digits.
inline std::string dump_stable(const json& j, int indent = 2) {
    std::ostringstream os;
    detail::write_stable(os, j, indent, 0);
    os << '\n';
    return os.str();
}

// ---------------------------------------------------------------- report types

inline json to_json(const HarmonicCoefficients& c) {
    json j;
    j["L"] = c.max_degree();
    j["basis"] = to_string(c.basis());
    json e = json::array();
    for (int l = 0; l <= c.max_degree(); ++l)
        for (int m = -l; m <= l; ++m) e.push_back(json::array({l, m, c(l, m).real(), c(l, m).imag()}));
    j["entries"] = std::move(e);
    return j;
}

inline HarmonicCoefficients coefficients_from_json(const json& j) {
    int L = j.at("L").get<int>();
    std::string b = j.value("basis", std::string("complex"));
    if (b != "complex" && b != "real") throw DataError("coefficients: basis must be complex or real");
    HarmonicCoefficients c(L, b == "real" ? Basis::real : Basis::complex);
    for (const auto& e : j.at("entries")) {
        int l = e.at(0).get<int>(), m = e.at(1).get<int>();
        if (l < 0 || l > L || std::abs(m) > l) throw DataError("coefficients: entry index out of range");
        c(l, m) = cdouble(e.at(2).get<double>(), e.size() > 3 ? e.at(3).get<double>() : 0.0);
    }
    return c;
}

inline json to_json(const CoefficientEstimate& est) {
    json j;
    j["n"] = est.n;
    j["L"] = est.max_degree();
    j["basis"] = "complex";
    json e = json::array();
    for (int l = 0; l <= est.max_degree(); ++l)
        for (int m = -l; m <= l; ++m) {
            cdouble a = est.coeffs(l, m);
            e.push_back(json::array({l, m, a.real(), a.imag(), est.standard_error(l, m)}));
        }
    j["entries"] = std::move(e);
    return j;
}

inline json to_json(const TestReport& r) {
    json j;
    j["test"] = r.test;
    j["L"] = r.L;
    j["statistic"] = r.statistic;
    j["df"] = r.df;
    j["p_value"] = r.p_value;
    j["alpha"] = r.alpha;
    j["reject"] = r.reject;
    j["notes"] = r.notes;
    j["components"] = r.components;
    return j;
}

inline json to_json(const GirdleFit& f) {
    json j;
    j["alpha_hat"] = f.alpha_hat;
    j["gamma_hat"] = f.gamma_hat;
    j["residual"] = f.residual;
    j["c_hat"] = f.c_hat;
    j["c_model"] = f.c_model;
    return j;
}

// ---------------------------------------------------------------- model specs

namespace detail {

inline UnitVector unit_from_json(const json& j) {
    if (j.is_object()) return UnitVector::from_angles(j.at("theta").get<double>(), j.at("phi").get<double>());
    if (j.is_array() && j.size() == 3)
        return UnitVector::from_cartesian(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
    throw DataError("unit vector must be {\"theta\", \"phi\"} or [x, y, z]");
}

inline json unit_to_json(const UnitVector& u) { return json{{"theta", u.theta()}, {"phi", u.phi()}}; }

// "frame": three columns [[mu1], [mu2], [mu3]], or "euler": [alpha, beta, gamma].
inline Mat3 frame_from_json(const json& j) {
    if (j.contains("frame")) {
        const auto& f = j.at("frame");
        if (!f.is_array() || f.size() != 3) throw DataError("frame must list three columns");
        Mat3 m;
        for (int c = 0; c < 3; ++c) {
            if (!f[c].is_array() || f[c].size() != 3) throw DataError("frame columns must have three entries");
            for (int r = 0; r < 3; ++r) m(r, c) = f[c][r].get<double>();
        }
        return m;
    }
    if (j.contains("euler")) {
        const auto& e = j.at("euler");
        return rotation_matrix({e.at(0).get<double>(), e.at(1).get<double>(), e.at(2).get<double>()});
    }
    return Mat3::Identity();
}

inline json frame_to_json(const Mat3& m) {
    json f = json::array();
    for (int c = 0; c < 3; ++c) f.push_back(json::array({m(0, c), m(1, c), m(2, c)}));
    return f;
}

}  // namespace detail

inline ModelSpec model_from_json(const json& j) {
    std::string t = j.at("model").get<std::string>();
    auto num = [&](const char* k, double d) { return j.contains(k) ? j.at(k).get<double>() : d; };
    auto axis = [&](const char* k) { return j.contains(k) ? detail::unit_from_json(j.at(k)) : north_pole; };
    if (t == "uniform") return Uniform{};
    if (t == "brownian_motion") return BrownianMotion{axis("x0"), num("zeta", 1.0)};
    if (t == "vmf") return VonMisesFisher{axis("mu"), num("kappa", 0.0)};
    if (t == "watson") return Watson{axis("mu"), num("gamma", 0.0)};
    if (t == "bingham") return Bingham{num("beta", 0.0), num("gamma", 0.0), detail::frame_from_json(j)};
    if (t == "kent") return Kent{num("kappa", 0.0), num("beta", 0.0), detail::frame_from_json(j)};
    if (t == "gfb6") return Gfb6{num("kappa", 0.0), num("beta", 0.0), num("gamma", 0.0), detail::frame_from_json(j)};
    if (t == "gfb6_zeta")
        return Gfb6Zeta{num("kappa", 0.0), num("zeta1", 0.0), num("zeta2", 0.0), detail::frame_from_json(j)};
    if (t == "harmonic_square")
        return HarmonicSquare{j.at("l").get<int>(), j.at("m").get<int>(), j.value("real", false)};
    if (t == "exponential_family") return ExponentialFamily{coefficients_from_json(j.at("coefficients"))};
    if (t == "exponential_legendre") return ExponentialLegendre{j.at("c").get<std::vector<double>>(), axis("axis")};
    if (t == "mixture_watson")
        return MixtureWatson{num("p", 0.5), num("gamma1", 0.0), num("gamma2", 0.0), num("alpha1", 0.0),
                             num("alpha2", 0.0)};
    throw DataError("unknown model '" + t + "'");
}

inline json to_json(const ModelSpec& spec) {
    json j;
    j["model"] = model_name(spec);
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, BrownianMotion>) {
                j["x0"] = detail::unit_to_json(m.x0);
                j["zeta"] = m.zeta;
            } else if constexpr (std::is_same_v<T, VonMisesFisher>) {
                j["mu"] = detail::unit_to_json(m.mu);
                j["kappa"] = m.kappa;
            } else if constexpr (std::is_same_v<T, Watson>) {
                j["mu"] = detail::unit_to_json(m.mu);
                j["gamma"] = m.gamma;
            } else if constexpr (std::is_same_v<T, Bingham>) {
                j["beta"] = m.beta;
                j["gamma"] = m.gamma;
                j["frame"] = detail::frame_to_json(m.frame);
            } else if constexpr (std::is_same_v<T, Kent>) {
                j["kappa"] = m.kappa;
                j["beta"] = m.beta;
                j["frame"] = detail::frame_to_json(m.frame);
            } else if constexpr (std::is_same_v<T, Gfb6>) {
                j["kappa"] = m.kappa;
                j["beta"] = m.beta;
                j["gamma"] = m.gamma;
                j["frame"] = detail::frame_to_json(m.frame);
            } else if constexpr (std::is_same_v<T, Gfb6Zeta>) {
                j["kappa"] = m.kappa;
                j["zeta1"] = m.zeta1;
                j["zeta2"] = m.zeta2;
                j["frame"] = detail::frame_to_json(m.frame);
            } else if constexpr (std::is_same_v<T, HarmonicSquare>) {
                j["l"] = m.l;
                j["m"] = m.m;
                j["real"] = m.real;
            } else if constexpr (std::is_same_v<T, ExponentialFamily>) {
                j["coefficients"] = to_json(m.c);
            } else if constexpr (std::is_same_v<T, ExponentialLegendre>) {
                j["c"] = m.c;
                j["axis"] = detail::unit_to_json(m.axis);
            } else if constexpr (std::is_same_v<T, MixtureWatson>) {
                j["p"] = m.p;
                j["gamma1"] = m.gamma1;
                j["gamma2"] = m.gamma2;
                j["alpha1"] = m.alpha1;
                j["alpha2"] = m.alpha2;
            }
        },
        spec);
    return j;
}

inline ModelSpec load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
        ModelSpec s = model_from_json(j);
        validate(s);
        return s;
    } catch (const json::exception& e) {
        throw DataError("model file '" + path + "': " + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError("model file '" + path + "': " + e.what());
    } catch (const std::domain_error& e) {
        throw DataError("model file '" + path + "': " + e.what());
    }
}

// ---------------------------------------------------------------- CSV

inline void write_sample_csv(std::ostream& os, const SampleSet& s) {
    os << "theta,phi\n";
    for (const auto& x : s.points) os << format_double(x.theta()) << ',' << format_double(x.phi()) << '\n';
}

inline void write_ring_csv(std::ostream& os, const SphereHistogram& h) {
    os << "ring,colatitude,mean_count,sectors\n";
    auto avg = h.ring_averages();
    for (int k = 0; k < h.ring_count(); ++k)
        os << k << ',' << format_double(h.ring_colatitude(k)) << ',' << format_double(avg[k]) << ',' << h.sectors[k]
           << '\n';
}

enum class AngleUnit { radians, degrees };
enum class PolarConvention { colatitude, latitude };

struct DatasetDescriptor {
    std::string path;
    std::string polar_column = "theta";
    std::string azimuth_column = "phi";
    PolarConvention convention = PolarConvention::colatitude;
    AngleUnit unit = AngleUnit::radians;
    bool dedupe = false;
    std::string group_column;  // optional
};

struct IngestResult {
    SampleSet sample;
    std::vector<std::string> groups;  // per point, when a group column is given
    std::size_t rows = 0;
    std::size_t failed = 0;
    std::size_t duplicates = 0;
    std::vector<std::string> errors;  // first few row errors
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') quoted = !quoted;
        else if (ch == ',' && !quoted) {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') cur += ch;
    }
    out.push_back(cur);
    for (auto& s : out) {
        auto b = s.find_first_not_of(" \t");
        auto e = s.find_last_not_of(" \t");
        s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    }
    return out;
}

inline bool parse_double(const std::string& s, double& v) {
    if (s.empty()) return false;
    char* end = nullptr;
    v = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && std::isfinite(v);
}

}  // namespace detail

inline constexpr double ingest_failure_limit = 0.01;

inline IngestResult ingest(const DatasetDescriptor& d, std::istream& in) {
    IngestResult r;
    std::string line;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        header = detail::split_csv_line(line);
        break;
    }
    if (header.empty()) throw DataError("ingest: '" + d.path + "' is empty");
    auto col = [&](const std::string& name) -> long {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<long>(i);
        return -1;
    };
    long ct = col(d.polar_column), cp = col(d.azimuth_column);
    long cg = d.group_column.empty() ? -2 : col(d.group_column);
    if (ct < 0 || cp < 0) throw DataError("ingest: missing column '" + (ct < 0 ? d.polar_column : d.azimuth_column) + "'");
    if (cg == -1) throw DataError("ingest: missing group column '" + d.group_column + "'");
    double unit = d.unit == AngleUnit::degrees ? pi / 180.0 : 1.0;
    std::set<std::pair<double, double>> seen;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++r.rows;
        auto f = detail::split_csv_line(line);
        auto fail = [&](const std::string& why) {
            ++r.failed;
            if (r.errors.size() < 10) r.errors.push_back("line " + std::to_string(lineno) + ": " + why);
        };
        long need = std::max({ct, cp, cg});
        if (static_cast<long>(f.size()) <= need) {
            fail("too few fields");
            continue;
        }
        double a, b;
        if (!detail::parse_double(f[ct], a) || !detail::parse_double(f[cp], b)) {
            fail("non-numeric angle");
            continue;
        }
        a *= unit;
        b *= unit;
        double theta = d.convention == PolarConvention::latitude ? pi / 2 - a : a;
        if (d.convention == PolarConvention::latitude && std::abs(a) > pi / 2 + 1e-12) {
            fail("latitude out of range");
            continue;
        }
        if (theta < -1e-12 || theta > pi + 1e-12) {
            fail("colatitude out of range");
            continue;
        }
        if (d.dedupe && !seen.insert({a, b}).second) {
            ++r.duplicates;
            continue;
        }
        r.sample.points.push_back(UnitVector::from_angles(theta, b));
        if (cg >= 0) r.groups.push_back(f[cg]);
    }
    if (r.rows == 0) throw DataError("ingest: '" + d.path + "' has no data rows");
    if (static_cast<double>(r.failed) > ingest_failure_limit * static_cast<double>(r.rows)) {
        std::string msg = "ingest: " + std::to_string(r.failed) + " of " + std::to_string(r.rows) +
                          " rows failed to parse (limit 1%)";
        if (!r.errors.empty()) msg += "; first: " + r.errors.front();
        throw DataError(msg);
    }
    if (r.sample.points.empty()) throw DataError("ingest: no valid rows");
    return r;
}

inline IngestResult ingest(const DatasetDescriptor& d) {
    std::ifstream in(d.path);
    if (!in) throw DataError("ingest: cannot open '" + d.path + "'");
    return ingest(d, in);
}

}  // namespace sphera
