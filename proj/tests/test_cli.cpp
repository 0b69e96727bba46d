// SPDX-License-Identifier: Apache-2.0
//! \file tests/test_cli.cpp
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <gtest/gtest.h>
#include <photoion/cli.hpp>

using namespace photoion;
namespace fs = std::filesystem;

namespace
{
struct Result
{
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args, std::string const& stdin_text = {})
{
    std::ostringstream out, err;
    std::istringstream in(stdin_text);
    int code = cli::run(args, out, err, in);
    return {code, out.str(), err.str()};
}

double field(std::string const& text, std::string const& key)
{
    std::regex re("(^|\\n)" + key + " *= ([-+0-9.eE]+)");
    std::smatch m;
    if (!std::regex_search(text, m, re))
        throw std::runtime_error("no field " + key);
    return std::stod(m[2]);
}

fs::path scratch_dir()
{
    auto dir = fs::temp_directory_path() / "photoion_test_cli";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(fs::path const& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::string> const anomalous_example{
    "predict", "--model", "anomalous", "--wavelength", "1.06um",
    "--intensity", "1e12W_per_cm2", "--v0", "2e6", "--work", "15.76eV"};
}  // namespace

TEST(Predict, AnomalousGeometryBlock)
{
    auto r = run(anomalous_example);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(field(r.out, "lambda"), 0.36, 0.36 * 0.03);
    EXPECT_NEAR(field(r.out, "Lambda/pi"), 17, 17 * 0.05);
    EXPECT_EQ(field(r.out, "ceil N_th"), 14);
    EXPECT_NE(r.out.find("sigma window"), std::string::npos);
    EXPECT_NE(r.out.find("N on cloud"), std::string::npos);
    EXPECT_GT(field(r.out, "P ramp"), 0);
    EXPECT_GT(field(r.out, "P flat"), 0);
}

TEST(Predict, JsonReport)
{
    auto args = anomalous_example;
    args.insert(args.end(), {"--format", "json"});
    auto r = run(args);
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = ordered_json::parse(r.out);
    EXPECT_EQ(j["schema_version"], 1);
    EXPECT_EQ(j["command"], "predict");
    EXPECT_EQ(j["results"]["threshold_photon_number_ceil"], 14);
    EXPECT_NEAR(j["results"]["de_broglie_lambda_m"].get<double>(), 3.637e-10, 1e-13);
    EXPECT_EQ(j.begin().key(), "schema_version");
}

TEST(Predict, OtherModels)
{
    auto m = run({"predict", "--model", "multiphoton", "--intensity",
                  "1e12W_per_cm2", "--ati", "1"});
    ASSERT_EQ(m.code, 0) << m.err;
    EXPECT_EQ(field(m.out, "order N"), 14);
    auto e = run({"predict", "--model", "effective", "--intensity",
                  "1e12W_per_cm2", "--ref-intensity", "1e12W_per_cm2"});
    ASSERT_EQ(e.code, 0) << e.err;
    EXPECT_NEAR(field(e.out, "eps / h nu"), 1 / (1 - 0.9 * 0.5), 1e-3);
    EXPECT_LT(field(e.out, "order N"), 14);
}

TEST(Predict, ConfigOverriddenByFlags)
{
    auto cfg = std::string(PHOTOION_CONFIG_DIR) + "/anomalous_helium.json";
    auto base = run({"predict", "--config", cfg, "--format", "json"});
    ASSERT_EQ(base.code, 0) << base.err;
    auto j0 = ordered_json::parse(base.out);
    EXPECT_DOUBLE_EQ(j0["config"]["laser"]["intensity_W_per_m2"].get<double>(), 1e16);
    auto over = run({"predict", "--config", cfg, "--format", "json",
                     "--intensity", "1e13W_per_cm2"});
    ASSERT_EQ(over.code, 0) << over.err;
    auto j1 = ordered_json::parse(over.out);
    EXPECT_DOUBLE_EQ(j1["config"]["laser"]["intensity_W_per_m2"].get<double>(), 1e17);
    EXPECT_DOUBLE_EQ(j1["config"]["laser"]["time_s"].get<double>(), 1e-9);
}

TEST(ExitCodes, Contract)
{
    EXPECT_EQ(run({"predict", "--intensity", "1e12"}).code, 1);
    EXPECT_EQ(run({"predict", "--intensity", "1e12W_per_cm2", "--model", "x"}).code, 1);
    EXPECT_EQ(run({"frobnicate"}).code, 1);
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"predict", "--bogus"}).code, 1);
    // A very slow free electron makes (hbar/p)^6 enormous and P > 1.
    auto r = run({"predict", "--intensity", "1e12W_per_cm2", "--v-free", "1e-10"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("perturbation_breakdown"), std::string::npos);
    EXPECT_EQ(run({"fit", "/nonexistent/data.csv"}).code, 3);
    EXPECT_EQ(run({"deviations", "--output", "/nonexistent-dir/x.json"}).code, 3);
    EXPECT_EQ(run({"predict", "--config", "/nonexistent/c.json"}).code, 3);
}

TEST(ExitCodes, ErrorsAreMachineReadable)
{
    auto r = run({"predict", "--intensity", "1e12furlongs"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.err.rfind("error[parse]:", 0), 0u) << r.err;
}

TEST(Help, EverySubcommand)
{
    for (std::string sub : {"predict", "kinetics", "fit", "analyze", "sweep", "deviations"})
    {
        auto r = run({sub, "--help"});
        EXPECT_EQ(r.code, 0) << sub;
        EXPECT_NE(r.out.find("W_per_cm2"), std::string::npos) << sub;
        EXPECT_NE(r.out.find("per_cm3"), std::string::npos) << sub;
        EXPECT_NE(r.out.find("Exit codes"), std::string::npos) << sub;
        EXPECT_NE(r.out.find("3  I/O error"), std::string::npos) << sub;
        EXPECT_NE(r.out.find("--output"), std::string::npos) << sub;
    }
    auto top = run({"--help"});
    EXPECT_EQ(top.code, 0);
    EXPECT_NE(top.out.find("sweep"), std::string::npos);
}

TEST(Sweep, MultiphotonSlopeThroughAnalyze)
{
    auto s = run({"sweep", "--model", "multiphoton", "--order", "14", "--var",
                  "intensity", "--lo", "1e10W_per_cm2", "--hi", "1e15W_per_cm2",
                  "--steps", "50", "--log", "--output", "-"});
    ASSERT_EQ(s.code, 0) << s.err;
    EXPECT_EQ(s.out.rfind("I_W_per_cm2,Ni\n", 0), 0u);
    auto a = run({"analyze", "-"}, s.out);
    ASSERT_EQ(a.code, 0) << a.err;
    auto j = ordered_json::parse(a.out);
    EXPECT_NEAR(j["results"]["loglog"]["slope"].get<double>(), 14, 1e-6);
    auto f = run({"fit", "--model", "power", "-"}, s.out);
    ASSERT_EQ(f.code, 0) << f.err;
    EXPECT_NEAR(ordered_json::parse(f.out)["params"]["exponent"].get<double>(), 14, 1e-6);
}

TEST(Sweep, ConfigDrivenAnomalousIsLinear)
{
    auto s = run({"sweep", "--config",
                  std::string(PHOTOION_CONFIG_DIR) + "/multiphoton_sweep.json",
                  "--model", "anomalous", "--output", "-"});
    ASSERT_EQ(s.code, 0) << s.err;
    auto a = run({"analyze", "-"}, s.out);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_NEAR(ordered_json::parse(a.out)["results"]["loglog"]["slope"].get<double>(),
                1, 1e-6);
}

TEST(Sweep, TimeSweepLogDerivative)
{
    auto s = run({"sweep", "--model", "anomalous", "--intensity", "1e12W_per_cm2",
                  "--var", "time", "--lo", "1e-10s", "--hi", "1e-9s", "--steps", "40"});
    ASSERT_EQ(s.code, 0) << s.err;
    EXPECT_EQ(s.out.rfind("t_s,Ne\n", 0), 0u);
    auto a = run({"analyze", "-"}, s.out);
    ASSERT_EQ(a.code, 0) << a.err;
    auto j = ordered_json::parse(a.out);
    EXPECT_NEAR(j["results"]["loglog"]["slope"].get<double>(), 2, 1e-9);
    ASSERT_TRUE(j["results"]["log_derivative"].is_array());
}

TEST(Sweep, DeterministicAcrossRunsAndJobs)
{
    std::vector<std::string> base{"sweep", "--model", "anomalous", "--var",
                                  "intensity", "--lo", "1e9W_per_cm2", "--hi",
                                  "1e13W_per_cm2", "--steps", "64", "--log",
                                  "--noise", "0.05", "--seed", "77"};
    auto one = base;
    one.insert(one.end(), {"--jobs", "1"});
    auto many = base;
    many.insert(many.end(), {"--jobs", "8"});
    auto a = run(one), b = run(one), c = run(many);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out, c.out);
    auto other = base;
    other[other.size() - 1] = "78";
    EXPECT_NE(run(other).out, a.out);
}

TEST(Sweep, NoiseNeedsSeed)
{
    auto r = run({"sweep", "--var", "intensity", "--lo", "1e9W_per_cm2", "--hi",
                  "1e13W_per_cm2", "--steps", "10", "--noise", "0.05"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("seed"), std::string::npos);
    EXPECT_EQ(run({"sweep", "--var", "intensity", "--lo", "1e13W_per_cm2",
                   "--hi", "1e9W_per_cm2", "--steps", "10"})
                  .code,
              1);
}

TEST(Sweep, OutputDirectoryFromEnvironment)
{
    auto dir = scratch_dir() / "env_out";
    fs::remove_all(dir);
    fs::create_directories(dir);
    ::setenv(cli::output_dir_env, dir.c_str(), 1);
    auto r = run({"sweep", "--var", "intensity", "--lo", "1e9W_per_cm2", "--hi",
                  "1e13W_per_cm2", "--steps", "5"});
    ::unsetenv(cli::output_dir_env);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    auto text = slurp(dir / "sweep.csv");
    EXPECT_EQ(text.rfind("I_W_per_cm2,Ni\n", 0), 0u);
    // Explicit "-" still streams to stdout.
    ::setenv(cli::output_dir_env, dir.c_str(), 1);
    auto s = run({"deviations", "--output", "-"});
    ::unsetenv(cli::output_dir_env);
    EXPECT_FALSE(s.out.empty());
}

TEST(Sweep, RepeatedFileOutputIsByteIdentical)
{
    auto p1 = scratch_dir() / "a.csv", p2 = scratch_dir() / "b.csv";
    for (auto const& p : {p1, p2})
    {
        auto r = run({"sweep", "--config",
                      std::string(PHOTOION_CONFIG_DIR) + "/noisy_anomalous_sweep.json",
                      "--output", p.string()});
        ASSERT_EQ(r.code, 0) << r.err;
    }
    EXPECT_EQ(slurp(p1), slurp(p2));
    EXPECT_FALSE(slurp(p1).empty());
}

TEST(Kinetics, ClosedAndResidual)
{
    auto c = run({"kinetics", "--alpha", "0.5", "--beta", "0.5", "--na0", "1",
                  "--i-grid", "1:2:2", "--mode", "closed"});
    ASSERT_EQ(c.code, 0) << c.err;
    std::istringstream is(c.out);
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    EXPECT_EQ(header, "I,Na,Ni");
    EXPECT_EQ(row.substr(0, 2), "1,");
    EXPECT_NE(row.find("0.632120558828557"), std::string::npos);
    auto r = run({"kinetics", "--mode", "residual", "--i-grid", "0.1:10:20"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("I,Na,Ni,residual\n", 0), 0u);
}

TEST(Kinetics, OdeNegativeDensities)
{
    auto strict = run({"kinetics", "--mode", "ode", "--i-grid", "0.5:10:4"});
    EXPECT_EQ(strict.code, 2);
    EXPECT_NE(strict.err.find("integration_failure"), std::string::npos);
    auto loose = run({"kinetics", "--mode", "ode", "--i-grid", "0.5:10:4",
                      "--allow-negative"});
    ASSERT_EQ(loose.code, 0) << loose.err;
    auto positive = run({"kinetics", "--mode", "ode", "--i-grid", "0.5:10:4",
                         "--init-na", "0.55", "--init-ni", "0.45"});
    EXPECT_EQ(positive.code, 0) << positive.err;
    EXPECT_EQ(run({"kinetics", "--i-grid", "1:2"}).code, 1);
    EXPECT_EQ(run({"kinetics", "--mode", "sideways"}).code, 1);
}

TEST(Fit, FieldNamesExact)
{
    std::ostringstream csv;
    csv << "# synthetic\nI_W_per_cm2,Ni\n";
    for (double i : log_grid(1e10, 1e14, 30))
        csv << photoion::detail::format_double(i) << ','
            << photoion::detail::format_double(
                   ion_yield_model(2, 1, 1e16, i * 1e4))
            << '\n';
    auto r = run({"fit", "-"}, csv.str());
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = ordered_json::parse(r.out);
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it)
        keys.push_back(it.key());
    EXPECT_EQ(keys, (std::vector<std::string>{"params", "stderr", "residual_norm",
                                              "converged", "iterations"}));
    EXPECT_NEAR(j["params"]["balance_intensity"].get<double>(), 1e16, 1e13);
    EXPECT_NEAR(j["params"]["amplitude_product"].get<double>(), 2, 2e-3);
    EXPECT_TRUE(j["converged"].get<bool>());
}

TEST(Fit, ParseErrorsAreValidation)
{
    auto r = run({"fit", "-"}, "I_W_per_cm2,Ni\n1,2\n1,3\n");
    EXPECT_EQ(r.code, 1);
}

TEST(Deviations, StandingReport)
{
    auto r = run({"deviations"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = ordered_json::parse(r.out);
    ASSERT_GE(j["deviations"].size(), 3u);
    std::map<std::string, double> ratios;
    for (auto const& e : j["deviations"])
        ratios[e["location"].get<std::string>()] = e["ratio"].get<double>();
    EXPECT_NEAR(ratios.at("cross_section_upper_bound"), 5.6, 0.05);
    EXPECT_NEAR(ratios.at("photon_density_at_1e12_W_per_cm2"), 5.9, 0.05);
    EXPECT_NEAR(ratios.at("photon_spacing_at_3e19_per_cm3"), 0.11, 0.005);
    EXPECT_EQ(run({"deviations"}).out, r.out);
    auto text = run({"deviations", "--format", "text"});
    EXPECT_NE(text.out.find("ratio 5.56"), std::string::npos);
}

TEST(Binary, ExitCodeThroughProcess)
{
    std::string bin = PHOTOION_CLI_PATH;
    auto status = [&](std::string const& args) {
        int s = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
        return WEXITSTATUS(s);
    };
    EXPECT_EQ(status("deviations"), 0);
    EXPECT_EQ(status("predict --intensity 1e12"), 1);
    EXPECT_EQ(status("predict --intensity 1e12W_per_cm2 --v-free 1e-10"), 2);
    EXPECT_EQ(status("fit /nonexistent.csv"), 3);
}
