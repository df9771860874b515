// JSON/CSV formats, ingest and the command-line front end.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include <sphera/cli.hpp>

using namespace sphera;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code;
    std::string out, err;
};

CliResult run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::run(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

std::string fixture(const std::string& name) { return std::string(SPHERA_FIXTURES) + "/" + name; }

fs::path temp_file(const std::string& name, const std::string& content) {
    fs::path p = fs::temp_directory_path() / ("sphera_test_" + name);
    std::ofstream(p, std::ios::binary) << content;
    return p;
}

IngestResult ingest_text(const std::string& text, DatasetDescriptor d = {}) {
    std::istringstream in(text);
    return ingest(d, in);
}

}  // namespace

TEST(Json, StableFormatting) {
    json j;
    j["b"] = 0.1;
    j["a"] = json::array({1, 2.5, -0.0});
    j["s"] = "x\"y";
    j["nested"] = json::array({json{{"k", true}}});
    EXPECT_EQ(dump_stable(j),
              "{\n  \"b\": 0.10000000000000001,\n  \"a\": [1, 2.5, 0],\n  \"s\": \"x\\\"y\",\n"
              "  \"nested\": [\n    {\n      \"k\": true\n    }\n  ]\n}\n");
    EXPECT_EQ(format_double(std::nan("")), "null");
    EXPECT_EQ(format_double(1e300), "1.0000000000000001e+300");
}

TEST(Json, ModelRoundTrip) {
    std::vector<ModelSpec> specs = {
        Uniform{},
        VonMisesFisher{UnitVector::from_angles(0.7, 1.2), 2.0},
        Watson{north_pole, -3.0},
        Kent{2.0, 0.5, rotation_matrix({0.1, 0.2, 0.3})},
        Gfb6{1.0, 0.5, -0.5, Mat3::Identity()},
        HarmonicSquare{3, -2, true},
        ExponentialLegendre{{0.0, 1.0, 0.5}, north_pole},
        MixtureWatson{0.5, -39.0022, -39.0022, 0.2527, 0.2527},
    };
    auto x = UnitVector::from_angles(1.1, 0.4);
    for (const auto& s : specs) {
        ModelSpec back = model_from_json(json::parse(to_json(s).dump()));
        EXPECT_EQ(model_name(back), model_name(s));
        EXPECT_NEAR(Model(back).density(x), Model(s).density(x), 1e-12) << model_name(s);
    }
    EXPECT_THROW(model_from_json(json{{"model", "nope"}}), DataError);
    auto c = Model(specs[1]).coefficients(3);
    EXPECT_EQ(coefficients_from_json(to_json(c)).max_abs_difference(c), 0.0);
}

TEST(Ingest, LatitudeDegrees) {
    DatasetDescriptor d;
    d.polar_column = "lat";
    d.azimuth_column = "lon";
    d.convention = PolarConvention::latitude;
    d.unit = AngleUnit::degrees;
    auto r = ingest_text("lat,lon\n14.9,171.3\n", d);
    ASSERT_EQ(r.sample.size(), 1u);
    EXPECT_NEAR(r.sample.points[0].theta(), pi / 2 - 14.9 * pi / 180, 1e-15);
    EXPECT_NEAR(r.sample.points[0].phi(), 171.3 * pi / 180, 1e-15);
}

TEST(Ingest, ErrorsAndDuplicates) {
    EXPECT_THROW(ingest_text(""), DataError);
    EXPECT_THROW(ingest_text("theta,phi\n"), DataError);
    EXPECT_THROW(ingest_text("a,b\n1,2\n"), DataError);
    std::string rows = "theta,phi\n";
    for (int i = 0; i < 199; ++i) rows += "1.0,2.0\n";
    auto ok = ingest_text(rows + "oops,1\n");  // 1 bad row in 200: 0.5%
    EXPECT_EQ(ok.failed, 1u);
    EXPECT_EQ(ok.sample.size(), 199u);
    EXPECT_THROW(ingest_text(rows + "oops,1\n4.0,1\n9,9\n"), DataError);  // 3 in 202
    DatasetDescriptor d;
    d.dedupe = true;
    auto dd = ingest_text("theta,phi\n1,2\n1,2\n1,3\n", d);
    EXPECT_EQ(dd.sample.size(), 2u);
    EXPECT_EQ(dd.duplicates, 1u);
    EXPECT_EQ(ingest_text("theta,phi\n1,2\n1,2\n").sample.size(), 2u);  // keep all by default
}

TEST(Ingest, CsvRoundTrip) {
    auto s = sample_vmf(500, UnitVector::from_angles(1.0, 4.0), 3.0, 12);
    std::ostringstream os;
    write_sample_csv(os, s);
    auto back = ingest_text(os.str());
    ASSERT_EQ(back.sample.size(), s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_NEAR(back.sample.points[i].theta(), s.points[i].theta(), 1e-15 * s.points[i].theta());
        EXPECT_NEAR(back.sample.points[i].phi(), s.points[i].phi(), 1e-15 * s.points[i].phi());
    }
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run_cli({"sample", "--model", fixture("vmf.json"), "--n", "0"}).code, 1);
    EXPECT_EQ(run_cli({}).code, 1);
    EXPECT_EQ(run_cli({"bogus"}).code, 1);
    EXPECT_EQ(run_cli({"--help"}).code, 0);
    auto missing = run_cli({"estimate", "/nonexistent/file.csv"});
    EXPECT_EQ(missing.code, 2);
    auto err = json::parse(missing.err);
    EXPECT_EQ(err["error"], "data");
    auto empty = temp_file("empty.csv", "");
    EXPECT_EQ(run_cli({"test", empty.string(), "--kind", "uniform"}).code, 2);
    auto bad_model = temp_file("bad_model.json", R"({"model": "vmf", "kappa": -1})");
    EXPECT_EQ(run_cli({"expand", "--model", bad_model.string()}).code, 2);
    EXPECT_EQ(run_cli({"test", fixture("uniform.csv"), "--kind", "rotational", "--axis", "x"}).code, 1);
}

TEST(Cli, ExpandWatson) {
    auto r = run_cli({"expand", "--model", fixture("watson_g2.json"), "--L", "4", "--zonal"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_NEAR(j["zonal_c"][2].get<double>(), 0.2969, 5e-5);
    EXPECT_NEAR(j["zonal_c"][4].get<double>(), 0.0576, 5e-5);
    EXPECT_EQ(j["L"], 4);
}

TEST(Cli, SampleIsDeterministic) {
    auto a = run_cli({"sample", "--model", fixture("vmf.json"), "--n", "50", "--seed", "3"});
    auto b = run_cli({"sample", "--model", fixture("vmf.json"), "--n", "50", "--seed", "3"});
    auto c = run_cli({"sample", "--model", fixture("vmf.json"), "--n", "50", "--seed", "4"});
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out, c.out);
    EXPECT_EQ(a.out.substr(0, 10), "theta,phi\n");
}

TEST(Cli, ConfigDefaultsAndOverride) {
    auto cfg = temp_file("run.conf", "# defaults\nL = 2\nalpha = 0.01\n");
    auto r = run_cli({"--config", cfg.string(), "test", fixture("uniform.csv"), "--kind", "uniform"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_EQ(j["L"], 2);
    EXPECT_EQ(j["alpha"], 0.01);
    auto o = json::parse(
        run_cli({"--config", cfg.string(), "test", fixture("uniform.csv"), "--kind", "uniform", "--L", "3"}).out);
    EXPECT_EQ(o["L"], 3);
    EXPECT_EQ(o["df"], 15);
}

TEST(Cli, FitWritesRingsAndButterfly) {
    auto rings = fs::temp_directory_path() / "sphera_test_rings.csv";
    auto fly = fs::temp_directory_path() / "sphera_test_butterfly.csv";
    auto r = run_cli({"fit", fixture("girdle_latlon.csv"), "--polar-col", "lat", "--azimuth-col", "lon", "--latitude",
                      "--degrees", "--rings", rings.string(), "--group-col", "epoch", "--butterfly", fly.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_NEAR(j["alpha_hat"].get<double>(), 0.2527, 0.03);
    std::ifstream rf(rings), ff(fly);
    std::string line;
    std::getline(rf, line);
    EXPECT_EQ(line, "ring,colatitude,mean_count,sectors");
    int nr = 0;
    while (std::getline(rf, line)) ++nr;
    EXPECT_EQ(nr, 4 * 16 - 1);
    std::getline(ff, line);
    EXPECT_EQ(line, "group,n,alpha_hat,minus_alpha_hat");
    int ng = 0;
    while (std::getline(ff, line)) ++ng;
    EXPECT_EQ(ng, 5);
}
